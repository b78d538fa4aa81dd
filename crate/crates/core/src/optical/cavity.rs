use std::f64::consts::PI;

use serde::Serialize;

use super::linewidth::{effective_length, linewidth_from_losses};
use super::{Layer, LayerStack, OpticalError, Port};
use crate::model::constants::C;

/// Standing wave inside one layer: `E(x) = amplitude · sin(phase0 + k n (x − start))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerField {
    pub start: f64,
    pub thickness: f64,
    pub index: f64,
    pub amplitude: f64,
    pub phase0: f64,
}

/// Result of propagating a standing wave with a node on the back mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    /// Accumulated standing-wave phase at the front mirror; a resonance
    /// sits wherever this equals an integer multiple of π.
    pub phase: f64,
    pub layers: Vec<LayerField>,
}

/// Propagates `E = sin(k n x)` from the back mirror through the stack,
/// matching `E` and `dE/dx` at every interface.
///
/// The phase is the Prüfer angle of the field, which is continuous across
/// interfaces and strictly increasing in frequency, so it also counts the
/// longitudinal index.
pub fn propagate(layers: &[Layer], omega: f64) -> Propagation {
    let k = omega / C;
    let mut phase = 0.0_f64;
    let mut amplitude = 1.0_f64;
    let mut start = 0.0;
    let mut out = Vec::with_capacity(layers.len());
    for (i, layer) in layers.iter().enumerate() {
        if i > 0 {
            // (E, E'/k) is continuous; rescale the normalized derivative
            // E'/(k n) into the new medium without leaving the quadrant.
            let ratio = layers[i - 1].index / layer.index;
            let base = (phase / PI).floor() * PI;
            let rem = phase - base;
            let (s, c) = rem.sin_cos();
            amplitude *= s.hypot(ratio * c);
            phase = base + s.atan2(ratio * c);
        }
        out.push(LayerField {
            start,
            thickness: layer.thickness,
            index: layer.index,
            amplitude,
            phase0: phase,
        });
        phase += k * layer.index * layer.thickness;
        start += layer.thickness;
    }
    Propagation { phase, layers: out }
}

pub fn standing_wave_phase(layers: &[Layer], omega: f64) -> f64 {
    propagate(layers, omega).phase
}

/// Mean mode spacing of the stack in rad/s, `π c / Σ n d`.
pub fn expected_fsr(stack: &LayerStack) -> f64 {
    PI * C / stack.optical_length()
}

/// Sampled standing-wave field of a resonance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    pub k: f64,
    pub layers: Vec<LayerField>,
}

impl FieldProfile {
    pub fn eval(&self, x: f64) -> f64 {
        let l = self
            .layers
            .iter()
            .rev()
            .find(|l| x >= l.start)
            .unwrap_or(&self.layers[0]);
        l.amplitude * (l.phase0 + self.k * l.index * (x - l.start)).sin()
    }

    /// `(x, E(x))` at `n` evenly spaced points across the whole cavity.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let end = self.layers.last().map_or(0.0, |l| l.start + l.thickness);
        let denom = n.saturating_sub(1).max(1) as f64;
        (0..n)
            .map(|i| {
                let x = end * i as f64 / denom;
                (x, self.eval(x))
            })
            .collect()
    }

    /// Largest mismatch of `E` or `dE/dx` across any interface, plus the
    /// field left on the front mirror, relative to the peak field.
    pub fn boundary_residual(&self) -> f64 {
        let peak = self
            .layers
            .iter()
            .map(|l| l.amplitude * l.index.max(1.0))
            .fold(0.0, f64::max);
        let end_state = |l: &LayerField| {
            let ph = l.phase0 + self.k * l.index * l.thickness;
            (l.amplitude * ph.sin(), l.amplitude * l.index * ph.cos())
        };
        let mut worst = 0.0_f64;
        for pair in self.layers.windows(2) {
            let (e_l, d_l) = end_state(&pair[0]);
            let r = &pair[1];
            let e_r = r.amplitude * r.phase0.sin();
            let d_r = r.amplitude * r.index * r.phase0.cos();
            worst = worst.max((e_l - e_r).abs()).max((d_l - d_r).abs());
        }
        if let Some(last) = self.layers.last() {
            worst = worst.max(end_state(last).0.abs());
        }
        worst / peak
    }
}

/// One longitudinal resonance. Rates are in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalMode {
    pub omega: f64,
    pub longitudinal_index: u64,
    /// Peak field in the last layer over peak field in the first layer.
    pub enhancement: f64,
    pub effective_length: f64,
    pub local_fsr: f64,
    pub finesse: f64,
    pub kappa_o: f64,
    pub kappa_o_ext: f64,
    pub boundary_residual: f64,
    #[serde(skip)]
    pub field: FieldProfile,
}

impl OpticalMode {
    pub fn freq_hz(&self) -> f64 {
        crate::model::angular_to_hz(self.omega)
    }
}

/// Bisects `phase(ω) = target` inside `[lo, hi]` down to adjacent floats.
fn bisect_phase(layers: &[Layer], target: f64, mut lo: f64, mut hi: f64) -> Result<f64, OpticalError> {
    let bracket_err = |lo: f64, hi: f64| OpticalError::NonConvergent {
        lo_hz: crate::model::angular_to_hz(lo),
        hi_hz: crate::model::angular_to_hz(hi),
    };
    let (p_lo, p_hi) = (standing_wave_phase(layers, lo), standing_wave_phase(layers, hi));
    if !(p_lo <= target && target <= p_hi) || !p_lo.is_finite() || !p_hi.is_finite() {
        return Err(bracket_err(lo, hi));
    }
    let (lo0, hi0) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if standing_wave_phase(layers, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > 1e-12 * hi {
        return Err(bracket_err(lo0, hi0));
    }
    let (e_lo, e_hi) = (
        (standing_wave_phase(layers, lo) - target).abs(),
        (standing_wave_phase(layers, hi) - target).abs(),
    );
    Ok(if e_lo <= e_hi { lo } else { hi })
}

/// Frequency (rad/s) where the standing-wave phase reaches `target`,
/// searching outward from `guess`.
pub fn solve_phase(layers: &[Layer], target: f64, guess: f64, step: f64) -> Result<f64, OpticalError> {
    let mut lo = (guess - step).max(0.0);
    let mut hi = guess + step;
    let mut grow = step;
    for _ in 0..64 {
        if standing_wave_phase(layers, lo) > target {
            lo = (lo - grow).max(0.0);
        } else if standing_wave_phase(layers, hi) < target {
            hi += grow;
        } else {
            return bisect_phase(layers, target, lo, hi);
        }
        grow *= 2.0;
    }
    Err(OpticalError::NonConvergent {
        lo_hz: crate::model::angular_to_hz(lo),
        hi_hz: crate::model::angular_to_hz(hi),
    })
}

/// Frequency (rad/s) of longitudinal mode `q`, searching near `guess`.
pub fn solve_mode_index(stack: &LayerStack, q: u64, guess: f64) -> Result<f64, OpticalError> {
    if q == 0 {
        return Err(OpticalError::IndexNotBracketed(q));
    }
    solve_phase(&stack.layers, q as f64 * PI, guess, expected_fsr(stack))
        .map_err(|_| OpticalError::IndexNotBracketed(q))
}

fn build_mode(stack: &LayerStack, q: u64, omega: f64, input: Port) -> Result<OpticalMode, OpticalError> {
    let prop = propagate(&stack.layers, omega);
    let first = prop.layers[0];
    let last = *prop.layers.last().unwrap();
    let enhancement = last.amplitude / first.amplitude;
    let below = if q > 1 {
        Some(solve_mode_index(stack, q - 1, omega - expected_fsr(stack))?)
    } else {
        None
    };
    let above = solve_mode_index(stack, q + 1, omega + expected_fsr(stack))?;
    let local_fsr = match below {
        Some(b) => 0.5 * (above - b),
        None => above - omega,
    };
    let lw = linewidth_from_losses(stack, local_fsr, input)?;
    let field = FieldProfile {
        k: omega / C,
        layers: prop.layers,
    };
    let (crystal_len, air_len) = if stack.layers.len() > 1 {
        (first.thickness, last.thickness)
    } else {
        (first.thickness, 0.0)
    };
    Ok(OpticalMode {
        omega,
        longitudinal_index: q,
        enhancement,
        effective_length: effective_length(enhancement, crystal_len, air_len, first.index),
        local_fsr,
        finesse: lw.finesse,
        kappa_o: lw.kappa,
        kappa_o_ext: lw.kappa_ext,
        boundary_residual: field.boundary_residual(),
        field,
    })
}

/// Fully characterized mode with longitudinal index `q`, searching near `guess`.
pub fn mode_at_index(
    stack: &LayerStack,
    q: u64,
    guess: f64,
    input: Port,
) -> Result<OpticalMode, OpticalError> {
    stack.validate()?;
    let omega = solve_mode_index(stack, q, guess)?;
    build_mode(stack, q, omega, input)
}

/// All standing-wave resonances with angular frequency in `[lo, hi]`,
/// ordered by frequency.
///
/// The standing-wave phase is scanned on a grid of one twentieth of the
/// mean mode spacing; every multiple of π crossed between grid points is
/// then bisected.
pub fn find_resonances(
    stack: &LayerStack,
    window: (f64, f64),
    input: Port,
) -> Result<Vec<OpticalMode>, OpticalError> {
    stack.validate()?;
    let (lo, hi) = window;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(OpticalError::InvalidWindow {
            lo_hz: crate::model::angular_to_hz(lo),
            hi_hz: crate::model::angular_to_hz(hi),
        });
    }
    let step = expected_fsr(stack) / 20.0;
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + step * i as f64 })
        .collect();
    let phases: Vec<f64> = grid
        .iter()
        .map(|&w| standing_wave_phase(&stack.layers, w))
        .collect();

    let q_first = (phases[0] / PI).ceil().max(1.0) as u64;
    let q_last = (phases[n] / PI).floor() as u64;
    let mut modes = Vec::new();
    for q in q_first..=q_last {
        let target = q as f64 * PI;
        // first grid point at or above the target
        let j = phases.partition_point(|&p| p < target);
        let omega = if j == 0 {
            grid[0]
        } else {
            bisect_phase(&stack.layers, target, grid[j - 1], grid[j])?
        };
        modes.push(build_mode(stack, q, omega, input)?);
    }
    Ok(modes)
}
