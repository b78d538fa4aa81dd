//! Optical normal-mode splitting under a strong coherent microwave drive.
//!
//! In the frame rotating with the drive, the pump-sideband and output modes
//! form the 2×2 problem
//!
//! `M = [[ δ/2, G ], [ G, −δ/2 ]]`, `G = √n_m g₀`,
//!
//! with the bare pump mode at `+δ/2`. The transmission seen by a scanning
//! probe laser is the sum of two Lorentzians of width κ_o located at the
//! eigenvalues and weighted by the squared pump component of each eigenvector.

use serde::Serialize;

use super::TransductionError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NmsParams {
    pub n_m: f64,
    pub g0: f64,
    pub kappa_o: f64,
    /// Detuning of Δ_op from ω_m.
    pub delta: f64,
}

impl NmsParams {
    pub fn validate(&self) -> Result<(), TransductionError> {
        if !(self.n_m >= 0.0) || !self.g0.is_finite() || !self.delta.is_finite() {
            return Err(TransductionError::InvalidParams(format!(
                "n_m = {}, g0 = {}, delta = {}",
                self.n_m, self.g0, self.delta
            )));
        }
        if !(self.kappa_o > 0.0) {
            return Err(TransductionError::InvalidParams(format!(
                "kappa_o must be positive, got {}",
                self.kappa_o
            )));
        }
        Ok(())
    }
}

/// Eigenfrequencies relative to the mean of the bare modes, and their
/// weights on the pump mode. `lower + upper = 0`, `weight_lower + weight_upper = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalModes {
    pub lower: f64,
    pub upper: f64,
    pub weight_lower: f64,
    pub weight_upper: f64,
}

pub fn normal_modes(params: &NmsParams) -> NormalModes {
    let coupling = params.n_m.sqrt() * params.g0;
    let split = params.delta.hypot(2.0 * coupling);
    let (weight_upper, weight_lower) = if split > 0.0 {
        let bias = params.delta / split;
        (0.5 * (1.0 + bias), 0.5 * (1.0 - bias))
    } else {
        (0.5, 0.5)
    };
    NormalModes {
        lower: -0.5 * split,
        upper: 0.5 * split,
        weight_lower,
        weight_upper,
    }
}

/// `√(δ² + 4 n_m g₀²)`.
pub fn nms_splitting(params: &NmsParams) -> f64 {
    let m = normal_modes(params);
    m.upper - m.lower
}

/// Normalized transmission at each probe detuning (relative to the mean of
/// the bare modes). Peak value is one when the modes are unresolved.
pub fn nms_spectrum(params: &NmsParams, detunings: &[f64]) -> Vec<f64> {
    let m = normal_modes(params);
    let lorentz = |x: f64| 1.0 / (1.0 + (2.0 * x / params.kappa_o).powi(2));
    detunings
        .iter()
        .map(|&d| m.weight_lower * lorentz(d - m.lower) + m.weight_upper * lorentz(d - m.upper))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{angular_to_hz, hz_to_angular};
    use proptest::prelude::*;

    fn p(delta_mhz: f64) -> NmsParams {
        NmsParams {
            n_m: 1.3e15,
            g0: hz_to_angular(1.43),
            kappa_o: hz_to_angular(4.1e6),
            delta: hz_to_angular(delta_mhz * 1e6),
        }
    }

    #[test]
    fn resonant_splitting() {
        let s = angular_to_hz(nms_splitting(&p(0.0)));
        assert!((s - 103.1e6).abs() < 0.5e6, "{s}");
        let prm = p(0.0);
        let exact = 2.0 * prm.n_m.sqrt() * prm.g0;
        assert!((nms_splitting(&prm) - exact).abs() <= 1e-15 * exact);
        let m = normal_modes(&prm);
        assert_eq!(m.weight_lower, 0.5);
        assert_eq!(m.weight_upper, 0.5);
    }

    #[test]
    fn undriven_is_single_lorentzian() {
        let mut prm = p(0.0);
        prm.n_m = 0.0;
        assert_eq!(nms_splitting(&prm), 0.0);
        let xs: Vec<f64> = (-20..=20).map(|k| hz_to_angular(k as f64 * 1e6)).collect();
        for (x, t) in xs.iter().zip(nms_spectrum(&prm, &xs)) {
            let l = 1.0 / (1.0 + (2.0 * x / prm.kappa_o).powi(2));
            assert!((t - l).abs() < 1e-15);
        }
    }

    #[test]
    fn far_detuned_limit() {
        let prm = p(1e5);
        let m = normal_modes(&prm);
        let s = nms_splitting(&prm);
        assert!((s / prm.delta - 1.0).abs() < 1e-5);
        assert!(m.weight_upper > 1.0 - 1e-5 && m.weight_lower < 1e-5);
        let prm = p(-1e5);
        let m = normal_modes(&prm);
        assert!(m.weight_lower > 1.0 - 1e-5);
    }

    #[test]
    fn spectrum_shows_two_peaks() {
        let prm = p(0.0);
        let half = 0.5 * nms_splitting(&prm);
        let t = nms_spectrum(&prm, &[-half, 0.0, half]);
        assert!(t[0] > 0.49 && t[2] > 0.49);
        assert!(t[1] < 0.01);
    }

    proptest! {
        #[test]
        fn even_and_monotone_in_detuning(a in 0.0f64..500.0, b in 0.0f64..500.0) {
            prop_assert_eq!(nms_splitting(&p(a)), nms_splitting(&p(-a)));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(nms_splitting(&p(lo)) <= nms_splitting(&p(hi)));
        }

        #[test]
        fn weights_sum_to_one(d in -500.0f64..500.0, n in 0.0f64..1e16) {
            let mut prm = p(d);
            prm.n_m = n;
            let m = normal_modes(&prm);
            prop_assert!((m.weight_lower + m.weight_upper - 1.0).abs() < 1e-15);
            prop_assert!(m.weight_lower >= 0.0 && m.weight_upper >= 0.0);
        }
    }
}
