//! Room-temperature receiver noise budget and antenna-coupling optimization.

use serde::Serialize;

use crate::model::constants::{HBAR, K_B};
use crate::model::OperatingPoint;
use crate::transduction::{cooperativity, peak_efficiency};

/// Reference temperature of the noise figure, K.
pub const NF_REFERENCE: f64 = 290.0;

#[derive(Debug, thiserror::Error)]
pub enum NoiseError {
    #[error("invalid noise input: {0}")]
    InvalidInput(String),
    #[error(
        "noise temperature is not unimodal in the antenna coupling; \
         search bracket [{lo_hz:.6e}, {hi_hz:.6e}] Hz, minimum candidate {at_hz:.6e} Hz"
    )]
    NotUnimodal { lo_hz: f64, hi_hz: f64, at_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub n_th: f64,
    pub snr_db: f64,
    pub n_added_qu: f64,
    pub n_added_th: f64,
    /// Noise temperature, K.
    pub t_n: f64,
    pub noise_figure_db: f64,
}

/// `k_B T / (ħ ω_m)`.
pub fn thermal_occupation(temperature: f64, omega_m: f64) -> f64 {
    K_B * temperature / (HBAR * omega_m)
}

/// Thermal peak over shot-noise floor, `10 log₁₀(4 C n_th κ_o,ext/κ_o)`.
pub fn thermal_to_shot_ratio(c: f64, n_th: f64, ratio_o: f64) -> Result<f64, NoiseError> {
    let x = 4.0 * c * n_th * ratio_o;
    if !(x > 0.0) || !x.is_finite() {
        return Err(NoiseError::InvalidInput(format!(
            "4 C n_th ratio = {x} has no dB value"
        )));
    }
    Ok(10.0 * x.log10())
}

/// `(1/η, (κ_m,int/κ_m,ext) n_th)`.
pub fn added_noise(eta: f64, ratio_int_ext: f64, n_th: f64) -> Result<(f64, f64), NoiseError> {
    if !(eta > 0.0) {
        return Err(NoiseError::InvalidInput(format!(
            "efficiency must be positive, got {eta}"
        )));
    }
    Ok((1.0 / eta, ratio_int_ext * n_th))
}

/// `(T_n, NF)` with `T_n = T (n_qu + n_th_added) / n_th` and NF in dB.
pub fn noise_temperature(temperature: f64, n_added_qu: f64, n_added_th: f64, n_th: f64) -> (f64, f64) {
    let t_n = temperature * (n_added_qu + n_added_th) / n_th;
    (t_n, noise_figure_db(t_n))
}

pub fn noise_figure_db(t_n: f64) -> f64 {
    10.0 * (1.0 + t_n / NF_REFERENCE).log10()
}

/// Device parameters held fixed while the antenna coupling varies.
/// Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntennaBase {
    pub n_p: f64,
    pub g0: f64,
    pub kappa_o: f64,
    pub kappa_o_ext: f64,
    pub kappa_m_int: f64,
    pub temperature: f64,
    pub omega_m: f64,
}

impl AntennaBase {
    pub fn from_operating_point(op: &OperatingPoint) -> Self {
        AntennaBase {
            n_p: op.n_p,
            g0: op.g0,
            kappa_o: op.kappa_o,
            kappa_o_ext: op.kappa_o_ext,
            kappa_m_int: op.kappa_m_int(),
            temperature: op.temperature,
            omega_m: op.omega_m,
        }
    }

    fn validate(&self) -> Result<(), NoiseError> {
        let fields = [
            ("n_p", self.n_p),
            ("g0", self.g0),
            ("kappa_o", self.kappa_o),
            ("kappa_o_ext", self.kappa_o_ext),
            ("kappa_m_int", self.kappa_m_int),
            ("temperature", self.temperature),
            ("omega_m", self.omega_m),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(NoiseError::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.kappa_o_ext > self.kappa_o {
            return Err(NoiseError::InvalidInput("kappa_o_ext exceeds kappa_o".into()));
        }
        Ok(())
    }
}

/// Full budget at the triply resonant peak for a given antenna coupling.
pub fn budget_at_coupling(base: &AntennaBase, kappa_m_ext: f64) -> Result<NoiseBudget, NoiseError> {
    let kappa_m = base.kappa_m_int + kappa_m_ext;
    let c = cooperativity(base.n_p, base.g0, base.kappa_o, kappa_m);
    let ratio_o = base.kappa_o_ext / base.kappa_o;
    let eta = peak_efficiency(c, ratio_o, kappa_m_ext / kappa_m);
    let n_th = thermal_occupation(base.temperature, base.omega_m);
    let (n_added_qu, n_added_th) = added_noise(eta, base.kappa_m_int / kappa_m_ext, n_th)?;
    let (t_n, noise_figure_db) = noise_temperature(base.temperature, n_added_qu, n_added_th, n_th);
    Ok(NoiseBudget {
        n_th,
        snr_db: thermal_to_shot_ratio(c, n_th, ratio_o)?,
        n_added_qu,
        n_added_th,
        t_n,
        noise_figure_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingOptimum {
    /// Optimal antenna coupling, rad/s.
    pub kappa_m_ext: f64,
    pub budget: NoiseBudget,
    pub cooperativity: f64,
    pub efficiency: f64,
    pub iterations: usize,
}

fn t_n_at(base: &AntennaBase, log_kappa: f64) -> Result<f64, NoiseError> {
    Ok(budget_at_coupling(base, log_kappa.exp())?.t_n)
}

/// Minimizes the noise temperature over `κ_m,ext` by golden-section search
/// in `ln κ_m,ext`. The bracket spans a hundredth of the larger of
/// `κ_m,int` and `4 N_p g₀²/κ_o` up to a hundred times
/// `(κ_m,int + 4 N_p g₀²/κ_o)(1 + √n_th)`.
pub fn optimize_antenna_coupling(base: &AntennaBase) -> Result<CouplingOptimum, NoiseError> {
    base.validate()?;
    let kappa_c = 4.0 * base.n_p * base.g0 * base.g0 / base.kappa_o;
    let n_th = thermal_occupation(base.temperature, base.omega_m);
    let lo = 1e-2 * base.kappa_m_int.max(kappa_c);
    let hi = 1e2 * (base.kappa_m_int + kappa_c) * (1.0 + n_th.sqrt());
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - invphi * (b - a);
    let mut x2 = a + invphi * (b - a);
    let mut f1 = t_n_at(base, x1)?;
    let mut f2 = t_n_at(base, x2)?;
    let mut iterations = 0;
    while b - a > 1e-7 && iterations < 500 {
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = t_n_at(base, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = t_n_at(base, x2)?;
        }
    }
    let u = 0.5 * (a + b);
    let f = t_n_at(base, u)?;
    let h = 1e-3;
    if !(t_n_at(base, u - h)? > f && t_n_at(base, u + h)? > f) {
        let hz = |w: f64| w / std::f64::consts::TAU;
        return Err(NoiseError::NotUnimodal {
            lo_hz: hz(lo),
            hi_hz: hz(hi),
            at_hz: hz(u.exp()),
        });
    }
    let kappa_m_ext = u.exp();
    let kappa_m = base.kappa_m_int + kappa_m_ext;
    let c = cooperativity(base.n_p, base.g0, base.kappa_o, kappa_m);
    Ok(CouplingOptimum {
        kappa_m_ext,
        budget: budget_at_coupling(base, kappa_m_ext)?,
        cooperativity: c,
        efficiency: peak_efficiency(c, base.kappa_o_ext / base.kappa_o, kappa_m_ext / kappa_m),
        iterations,
    })
}
