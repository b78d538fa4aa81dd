//! One-dimensional model of the composite Fabry–Perot cavity: HR mirror,
//! crystal, optional coating layers, air gap, curved mirror.

mod cavity;
mod fresnel;
mod linewidth;

pub use cavity::{
    expected_fsr, find_resonances, mode_at_index, propagate, solve_mode_index, solve_phase,
    standing_wave_phase, FieldProfile, LayerField, OpticalMode, Propagation,
};
pub use fresnel::{fresnel_reflectivity, stack_reflectivity, StackReflection};
pub use linewidth::{effective_length, linewidth_from_losses, Linewidth};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub index: f64,
    pub thickness: f64,
}

impl Layer {
    pub const fn new(index: f64, thickness: f64) -> Self {
        Layer { index, thickness }
    }
}

/// Which mirror the pump enters through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Back,
    Front,
}

/// Layers ordered from the back (HR) mirror to the front mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub back_mirror_t: f64,
    pub front_mirror_t: f64,
    pub excess_loss: f64,
}

impl LayerStack {
    pub fn validate(&self) -> Result<(), OpticalError> {
        if self.layers.is_empty() {
            return Err(OpticalError::InvalidStack("stack has no layers".into()));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if !(l.index >= 1.0) || !(l.thickness >= 0.0) {
                return Err(OpticalError::InvalidStack(format!(
                    "layer {i}: index {} thickness {}",
                    l.index, l.thickness
                )));
            }
        }
        if self.layers.iter().all(|l| l.thickness == 0.0) {
            return Err(OpticalError::InvalidStack("stack has zero length".into()));
        }
        for (name, t) in [("back", self.back_mirror_t), ("front", self.front_mirror_t)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(OpticalError::InvalidStack(format!(
                    "{name} mirror transmission must be in (0, 1), got {t}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.excess_loss) {
            return Err(OpticalError::InvalidStack(format!(
                "excess loss must be in [0, 1), got {}",
                self.excess_loss
            )));
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn optical_length(&self) -> f64 {
        self.layers.iter().map(|l| l.index * l.thickness).sum()
    }

    pub fn total_loss(&self) -> f64 {
        self.back_mirror_t + self.front_mirror_t + self.excess_loss
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OpticalError {
    #[error("invalid layer stack: {0}")]
    InvalidStack(String),
    #[error("invalid frequency window [{lo_hz}, {hi_hz}] Hz")]
    InvalidWindow { lo_hz: f64, hi_hz: f64 },
    #[error("resonance root did not converge in bracket [{lo_hz}, {hi_hz}] Hz")]
    NonConvergent { lo_hz: f64, hi_hz: f64 },
    #[error("round-trip loss {0} too large for the small-loss linewidth formula")]
    LossTooLarge(f64),
    #[error("no resonance with longitudinal index {0} could be bracketed")]
    IndexNotBracketed(u64),
}
