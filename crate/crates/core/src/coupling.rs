//! Single-photon electro-optic coupling rate g₀.
//!
//! Two routes share one prefactor `r33 n² / √ε_z`:
//!
//! * [`g0_general`]: three-mode overlap `∫ψ_m ψ_p ψ_o dV` on a 3-D grid,
//!   normalized by the three mode volumes;
//! * [`g0_quasi_1d`]: the beam-axis reduction
//!   `∫₀^L ψ_m(x) ½ cos(n Δk x) dx` with `Δk = ω_m / c`, mode volumes of the
//!   optical modes replaced by their effective lengths.
//!
//! The nonlinear susceptibility of the 3-D route is taken to be r33 and the
//! microwave permittivity ε_z, so the two routes agree identically for
//! beam-like optical modes. Optical mode volumes in the 3-D route are
//! `L_eff · ∫u² dA` with the transverse profile `u` peaking at one; that
//! convention makes g₀ independent of the waist.

use serde::Serialize;

use crate::microwave::{AxialProfile, MicrowaveMode};
use crate::model::constants::{C, EPS0, HBAR};
use crate::model::Material;
use crate::optical::OpticalMode;
use crate::quadrature::{integrate, trapezoid_weights};

#[derive(Debug, thiserror::Error)]
pub enum CouplingError {
    #[error("field array has {got} samples, grid needs {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("grid axis {0} must be strictly increasing with at least two points")]
    BadAxis(&'static str),
    #[error("mode volume {name} must be positive, got {value}")]
    NonPositiveVolume { name: &'static str, value: f64 },
    #[error("mode function {0} exceeds unit peak")]
    NotNormalized(&'static str),
    #[error("microwave occupation must be positive, got {0}")]
    NonPositiveOccupation(f64),
}

/// `r33 n² / √ε_z`, the electro-optic prefactor shared by both routes.
pub fn eo_prefactor(material: &Material) -> f64 {
    material.r33 * material.n_opt.powi(2) / material.eps_z.sqrt()
}

/// `√(ħ ω_m ω_p ω_o / (8 ε₀ V_m V_p V_o))`.
fn zero_point_factor(omegas: [f64; 3], volumes: [f64; 3]) -> f64 {
    let [wm, wp, wo] = omegas;
    let [vm, vp, vo] = volumes;
    (HBAR * wm * wp * wo / (8.0 * EPS0 * vm * vp * vo)).sqrt()
}

/// Rectilinear sampling grid shared by the three mode functions. Arrays are
/// flattened with z fastest: `idx = (i · ny + j) · nz + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
}

impl Grid3 {
    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len() * self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fills an array by evaluating `f(x, y, z)` at every node.
    pub fn sample<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &x in &self.xs {
            for &y in &self.ys {
                for &z in &self.zs {
                    out.push(f(x, y, z));
                }
            }
        }
        out
    }

    fn check(&self) -> Result<(), CouplingError> {
        for (name, axis) in [("x", &self.xs), ("y", &self.ys), ("z", &self.zs)] {
            if axis.len() < 2 || axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(CouplingError::BadAxis(name));
            }
        }
        Ok(())
    }
}

/// Mode functions on a common grid with their angular frequencies and volumes.
#[derive(Debug, Clone, Copy)]
pub struct GridModes<'a> {
    pub psi_m: &'a [f64],
    pub psi_p: &'a [f64],
    pub psi_o: &'a [f64],
    /// `[ω_m, ω_p, ω_o]`, rad/s.
    pub omegas: [f64; 3],
    /// `[V_m, V_p, V_o]`, m³.
    pub volumes: [f64; 3],
}

/// Three-dimensional overlap route. Returns g₀ in rad/s (signed; the sign
/// follows the overlap integral).
pub fn g0_general(material: &Material, grid: &Grid3, modes: &GridModes<'_>) -> Result<f64, CouplingError> {
    grid.check()?;
    let n = grid.len();
    for (name, psi) in [
        ("psi_m", modes.psi_m),
        ("psi_p", modes.psi_p),
        ("psi_o", modes.psi_o),
    ] {
        if psi.len() != n {
            return Err(CouplingError::GridMismatch {
                expected: n,
                got: psi.len(),
            });
        }
        if psi.iter().any(|v| !(v.abs() <= 1.0 + 1e-9)) {
            return Err(CouplingError::NotNormalized(name));
        }
    }
    for (name, v) in ["V_m", "V_p", "V_o"].into_iter().zip(modes.volumes) {
        if !(v > 0.0) {
            return Err(CouplingError::NonPositiveVolume { name, value: v });
        }
    }
    let (wx, wy, wz) = (
        trapezoid_weights(&grid.xs),
        trapezoid_weights(&grid.ys),
        trapezoid_weights(&grid.zs),
    );
    let (ny, nz) = (grid.ys.len(), grid.zs.len());
    let mut overlap = 0.0;
    for (i, wxi) in wx.iter().enumerate() {
        let mut plane = 0.0;
        for (j, wyj) in wy.iter().enumerate() {
            let mut line = 0.0;
            let base = (i * ny + j) * nz;
            for (k, wzk) in wz.iter().enumerate() {
                let idx = base + k;
                line += wzk * modes.psi_m[idx] * modes.psi_p[idx] * modes.psi_o[idx];
            }
            plane += wyj * line;
        }
        overlap += wxi * plane;
    }
    Ok(eo_prefactor(material) * zero_point_factor(modes.omegas, modes.volumes) * overlap)
}

/// Inputs of the beam-axis route. Rates in rad/s, lengths in m.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingInput {
    pub material: Material,
    pub omega_m: f64,
    pub volume_m: f64,
    /// `ψ_m(x)` on `[0, L_crystal]`, origin at the HR face.
    pub profile: AxialProfile,
    pub omega_p: f64,
    pub omega_o: f64,
    pub l_eff_p: f64,
    pub l_eff_o: f64,
    pub crystal_len: f64,
}

impl CouplingInput {
    pub fn from_modes(
        material: &Material,
        microwave: &MicrowaveMode,
        pump: &OpticalMode,
        output: &OpticalMode,
        crystal_len: f64,
    ) -> Self {
        CouplingInput {
            material: material.clone(),
            omega_m: microwave.omega,
            volume_m: microwave.volume,
            profile: microwave.profile.clone(),
            omega_p: pump.omega,
            omega_o: output.omega,
            l_eff_p: pump.effective_length,
            l_eff_o: output.effective_length,
            crystal_len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingResult {
    /// |g₀|, rad/s.
    pub g0: f64,
    /// Signed value of `∫ ψ_m ½ cos(n Δk x) dx`, m.
    pub overlap_integral: f64,
    /// `n Δk L_crystal`, rad.
    pub phase_mismatch: f64,
}

/// `∫₀^L ψ_m(x) ½ cos(n Δk x) dx` to 1e-10 relative accuracy.
pub fn overlap_integral(profile: &AxialProfile, n: f64, delta_k: f64, crystal_len: f64) -> f64 {
    let f = |x: f64| profile.eval(x) * 0.5 * (n * delta_k * x).cos();
    let mut knots: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .filter(|&x| x > 0.0 && x < crystal_len)
        .collect();
    knots.insert(0, 0.0);
    knots.push(crystal_len);
    knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| integrate(f, w[0], w[1], 1e-10).value)
        .sum()
}

/// Beam-axis route. `Δk = ω_m / c`.
pub fn g0_quasi_1d(input: &CouplingInput) -> CouplingResult {
    let n = input.material.n_opt;
    let delta_k = input.omega_m / C;
    let overlap = overlap_integral(&input.profile, n, delta_k, input.crystal_len);
    let zpf = zero_point_factor(
        [input.omega_m, input.omega_p, input.omega_o],
        [input.volume_m, input.l_eff_p, input.l_eff_o],
    );
    CouplingResult {
        g0: (eo_prefactor(&input.material) * zpf * overlap).abs(),
        overlap_integral: overlap,
        phase_mismatch: n * delta_k * input.crystal_len,
    }
}

/// g₀ from a normal-mode splitting at triple resonance, `Δ / (2 √n_m)`.
pub fn calibrate_g0_from_nms(splitting: f64, n_m: f64) -> Result<f64, CouplingError> {
    if !(n_m > 0.0) {
        return Err(CouplingError::NonPositiveOccupation(n_m));
    }
    Ok(splitting / (2.0 * n_m.sqrt()))
}
