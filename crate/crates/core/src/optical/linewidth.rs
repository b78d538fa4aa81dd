use std::f64::consts::TAU;

use super::{LayerStack, OpticalError, Port};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linewidth {
    pub finesse: f64,
    /// Total linewidth, same unit as the FSR passed in.
    pub kappa: f64,
    /// Coupling through the input mirror, same unit.
    pub kappa_ext: f64,
}

/// Small-loss finesse `2π / (T_back + T_front + loss)` and the resulting
/// total and input-port linewidths for a given local mode spacing.
pub fn linewidth_from_losses(
    stack: &LayerStack,
    fsr_local: f64,
    input: Port,
) -> Result<Linewidth, OpticalError> {
    let total = stack.total_loss();
    if total >= 0.5 || total <= 0.0 {
        return Err(OpticalError::LossTooLarge(total));
    }
    let finesse = TAU / total;
    let kappa = fsr_local / finesse;
    let t_in = match input {
        Port::Back => stack.back_mirror_t,
        Port::Front => stack.front_mirror_t,
    };
    Ok(Linewidth {
        finesse,
        kappa,
        kappa_ext: t_in / total * kappa,
    })
}

/// `½ L_crystal + A² / (2 n²) · L_air`.
pub fn effective_length(enhancement: f64, crystal_len: f64, air_len: f64, n: f64) -> f64 {
    0.5 * crystal_len + enhancement * enhancement / (2.0 * n * n) * air_len
}
