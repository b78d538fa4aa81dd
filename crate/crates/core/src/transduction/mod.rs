//! Coupled-mode figures of merit, pump occupation, normal-mode splitting and
//! the triple-resonance tuning and sweep engine.
//!
//! All rates are angular (rad/s); photon numbers are dimensionless.

mod nms;
mod sweep;

pub use nms::{nms_spectrum, nms_splitting, normal_modes, NmsParams, NormalModes};
pub use sweep::{
    lock_air_gap, predict_g0, sweep_triple_resonance, tune_triple_resonance, G0Prediction, Lock, SweepAxis,
    SweepMetadata, SweepResult, SweepRow, SweepSetup, TuneResult,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::coupling::CouplingError;
use crate::model::constants::HBAR;
use crate::optical::OpticalError;

#[derive(Debug, thiserror::Error)]
pub enum TransductionError {
    #[error("invalid transduction parameters: {0}")]
    InvalidParams(String),
    #[error("no sign change of the mode-spacing mismatch between air gaps {lo} m and {hi} m")]
    NoBracket { lo: f64, hi: f64 },
    #[error("{0}")]
    NotConverged(String),
    #[error(transparent)]
    Optical(#[from] OpticalError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

/// Inputs of the three-mode lineshape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransductionParams {
    pub n_p: f64,
    pub g0: f64,
    pub kappa_o: f64,
    pub kappa_o_ext: f64,
    pub kappa_m: f64,
    pub kappa_m_ext: f64,
    pub omega_m: f64,
    /// Pump-to-output mode spacing.
    pub delta_op: f64,
}

impl TransductionParams {
    pub fn validate(&self) -> Result<(), TransductionError> {
        let bad = |what: &str| Err(TransductionError::InvalidParams(what.to_string()));
        if !(self.kappa_o > 0.0 && self.kappa_m > 0.0) {
            return bad("linewidths must be positive");
        }
        if !(self.kappa_o_ext > 0.0 && self.kappa_o_ext <= self.kappa_o) {
            return bad("optical external coupling must lie in (0, kappa_o]");
        }
        if !(self.kappa_m_ext > 0.0 && self.kappa_m_ext <= self.kappa_m) {
            return bad("microwave external coupling must lie in (0, kappa_m]");
        }
        if !(self.n_p >= 0.0) || !self.g0.is_finite() {
            return bad("photon number must be non-negative and g0 finite");
        }
        if !(self.omega_m.is_finite() && self.delta_op.is_finite()) {
            return bad("frequencies must be finite");
        }
        Ok(())
    }

    pub fn cooperativity(&self) -> f64 {
        cooperativity(self.n_p, self.g0, self.kappa_o, self.kappa_m)
    }

    pub fn peak_efficiency(&self) -> f64 {
        peak_efficiency(
            self.cooperativity(),
            self.kappa_o_ext / self.kappa_o,
            self.kappa_m_ext / self.kappa_m,
        )
    }
}

/// `C = 4 N_p g₀² / (κ_o κ_m)`.
pub fn cooperativity(n_p: f64, g0: f64, kappa_o: f64, kappa_m: f64) -> f64 {
    4.0 * n_p * g0 * g0 / (kappa_o * kappa_m)
}

/// `η_peak = 4C / (1 + C)² · (κ_o,ext/κ_o) · (κ_m,ext/κ_m)`.
pub fn peak_efficiency(c: f64, ratio_o: f64, ratio_m: f64) -> f64 {
    4.0 * c / ((1.0 + c) * (1.0 + c)) * ratio_o * ratio_m
}

/// `4C / |C + (1 + 2i(Δ_op − ω)/κ_o)(1 + 2i(ω_m − ω)/κ_m)|²`, the
/// efficiency with both external-coupling ratios set to one.
pub fn lineshape(c: f64, kappa_o: f64, kappa_m: f64, omega_m: f64, delta_op: f64, omega: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let opt = Complex64::new(1.0, 2.0 * (delta_op - omega) / kappa_o);
    let mw = Complex64::new(1.0, 2.0 * (omega_m - omega) / kappa_m);
    4.0 * c / (c + opt * mw).norm_sqr()
}

/// Photon transduction efficiency at drive frequency `omega`.
pub fn efficiency_at(params: &TransductionParams, omega: f64) -> f64 {
    let ratios = (params.kappa_o_ext / params.kappa_o) * (params.kappa_m_ext / params.kappa_m);
    ratios
        * lineshape(
            params.cooperativity(),
            params.kappa_o,
            params.kappa_m,
            params.omega_m,
            params.delta_op,
            omega,
        )
}

pub fn efficiency_spectrum(params: &TransductionParams, omegas: &[f64]) -> Vec<f64> {
    omegas.iter().map(|&w| efficiency_at(params, w)).collect()
}

/// Intracavity pump photons for incident power `p_in` (W) detuned by
/// `detuning` from the pump mode: `4 κ_ext P / (ħ ω_p (κ² + 4Δ²))`.
pub fn pump_occupation(
    p_in: f64,
    mode_match: f64,
    kappa_o: f64,
    kappa_o_ext: f64,
    omega_p: f64,
    detuning: f64,
) -> f64 {
    4.0 * kappa_o_ext * mode_match * p_in / (HBAR * omega_p * (kappa_o * kappa_o + 4.0 * detuning * detuning))
}
