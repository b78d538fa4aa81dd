//! Triple-resonance tuning and two-dimensional transduction maps.
//!
//! The air gap is the last layer of the stack, so at fixed laser frequency
//! the standing-wave phase grows exactly as `k · L_air`. Locking the pump
//! mode onto the laser therefore needs no root finding.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{efficiency_at, pump_occupation, TransductionError, TransductionParams};
use crate::coupling::{g0_quasi_1d, CouplingInput, CouplingResult};
use crate::microwave::MicrowaveMode;
use crate::model::constants::C;
use crate::model::{Device, Laser};
use crate::optical::{
    expected_fsr, mode_at_index, solve_mode_index, solve_phase, standing_wave_phase, OpticalMode,
};

/// Air gap nudged so the laser sits exactly on longitudinal mode `pump_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lock {
    pub air_gap: f64,
    pub pump_index: u64,
}

/// Moves `air_gap` by at most a quarter wavelength to the nearest length at
/// which `omega_laser` is resonant.
pub fn lock_air_gap(device: &Device, air_gap: f64, omega_laser: f64) -> Result<Lock, TransductionError> {
    if !(air_gap >= 0.0) || !(omega_laser > 0.0) {
        return Err(TransductionError::InvalidParams(format!(
            "cannot lock air gap {air_gap} m at laser frequency {omega_laser} rad/s"
        )));
    }
    let stack = device.stack(air_gap);
    let theta = standing_wave_phase(&stack.layers, omega_laser);
    let k = omega_laser / C;
    let mut q = (theta / PI).round().max(1.0);
    let mut gap = air_gap + (q * PI - theta) / k;
    if gap < 0.0 {
        q += 1.0;
        gap = air_gap + (q * PI - theta) / k;
    }
    Ok(Lock {
        air_gap: gap,
        pump_index: q as u64,
    })
}

/// Operating point where the spacing between the pump mode and one of its
/// neighbors equals the microwave frequency. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuneResult {
    pub air_gap: f64,
    pub pump_index: u64,
    /// +1 when the output mode lies above the pump, −1 below.
    pub side: i32,
    /// Laser frequency retuned onto the pump mode.
    pub pump_omega: f64,
    pub output_omega: f64,
    pub delta_op: f64,
    pub omega_m: f64,
}

fn bisect<F: Fn(f64) -> Result<f64, TransductionError>>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
) -> Result<f64, TransductionError> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of `f` on a uniform scan of `[lo, hi]`, refined by bisection.
fn scan_roots<F: Fn(f64) -> Result<f64, TransductionError>>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<f64>, TransductionError> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::new();
    for i in 0..n {
        if vals[i] == 0.0 {
            roots.push(xs[i]);
        } else if (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            roots.push(bisect(&f, xs[i], xs[i + 1], vals[i])?);
        }
    }
    Ok(roots)
}

/// Finds an air gap and laser frequency at which the pump mode and an
/// adjacent mode are separated by exactly `omega_m`.
///
/// A coarse stage bisects the spacing, measured from the fixed laser
/// frequency, between half and one and a half times the estimate
/// `π c / ω_m − n L_crystal`; the root nearest the estimate wins. The fine
/// stage then follows one longitudinal index and bisects the true mode
/// spacing within two wavelengths of the coarse root, with the laser
/// retuned onto the pump mode.
pub fn tune_triple_resonance(
    device: &Device,
    omega_laser: f64,
    omega_m: f64,
) -> Result<TuneResult, TransductionError> {
    if !(omega_m > 0.0 && omega_m.is_finite()) {
        return Err(TransductionError::NoBracket {
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let estimate = PI * C / omega_m - device.crystal_optical_length();
    if !(estimate > 0.0) {
        return Err(TransductionError::NoBracket { lo: 0.0, hi: 0.0 });
    }
    let (lo, hi) = (0.5 * estimate, 1.5 * estimate);

    let mut best: Option<(f64, i32)> = None;
    for side in [1_i32, -1] {
        let spacing = |gap: f64| -> Result<f64, TransductionError> {
            let stack = device.stack(gap);
            let fsr = expected_fsr(&stack);
            let theta = standing_wave_phase(&stack.layers, omega_laser);
            let target = theta + side as f64 * PI;
            let w = solve_phase(&stack.layers, target, omega_laser + side as f64 * fsr, fsr)?;
            Ok((w - omega_laser).abs() - omega_m)
        };
        for root in scan_roots(spacing, lo, hi, 400)? {
            if best.is_none_or(|(b, _)| (root - estimate).abs() < (b - estimate).abs()) {
                best = Some((root, side));
            }
        }
    }
    let (coarse, side) = best.ok_or(TransductionError::NoBracket { lo, hi })?;

    let stack = device.stack(coarse);
    let q = (standing_wave_phase(&stack.layers, omega_laser) / PI)
        .round()
        .max(1.0) as u64;
    let q_out = q as i64 + side as i64;
    if q_out < 1 {
        return Err(TransductionError::NoBracket { lo, hi });
    }
    let q_out = q_out as u64;
    let pair = |gap: f64| -> Result<(f64, f64), TransductionError> {
        let stack = device.stack(gap);
        let fsr = expected_fsr(&stack);
        let wp = solve_mode_index(&stack, q, omega_laser)?;
        let wo = solve_mode_index(&stack, q_out, wp + side as f64 * fsr)?;
        Ok((wp, wo))
    };
    let mismatch = |gap: f64| pair(gap).map(|(wp, wo)| (wo - wp).abs() - omega_m);
    let wavelength = 2.0 * PI * C / omega_laser;
    let span = 2.0 * wavelength;
    let fine_lo = (coarse - span).max(0.0);
    let roots = scan_roots(mismatch, fine_lo, coarse + span, 80)?;
    let air_gap = roots
        .into_iter()
        .min_by(|a, b| (a - coarse).abs().total_cmp(&(b - coarse).abs()))
        .ok_or(TransductionError::NoBracket {
            lo: fine_lo,
            hi: coarse + span,
        })?;
    let (pump_omega, output_omega) = pair(air_gap)?;
    let delta_op = (output_omega - pump_omega).abs();
    if (delta_op - omega_m).abs() > 1e3 {
        return Err(TransductionError::NotConverged(format!(
            "mode spacing misses the target by {} rad/s",
            (delta_op - omega_m).abs()
        )));
    }
    Ok(TuneResult {
        air_gap,
        pump_index: q,
        side,
        pump_omega,
        output_omega,
        delta_op,
        omega_m,
    })
}

/// Coupling rate at a triply resonant (or nearly resonant) configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G0Prediction {
    pub coupling: CouplingResult,
    pub air_gap: f64,
    /// Whether the air gap came from [`tune_triple_resonance`].
    pub tuned: bool,
    pub pump: OpticalMode,
    pub output: OpticalMode,
    pub omega_m: f64,
}

/// g₀ for `microwave` with the pump mode locked to the laser.
///
/// Without an air gap the configuration is tuned to exact triple
/// resonance first. With one, the gap is locked to the laser and the
/// neighbor whose spacing lies closer to `ω_m` becomes the output mode.
pub fn predict_g0(
    device: &Device,
    omega_laser: f64,
    microwave: &MicrowaveMode,
    air_gap: Option<f64>,
) -> Result<G0Prediction, TransductionError> {
    let port = device.input_port;
    let (gap, pump, output, tuned) = match air_gap {
        None => {
            let t = tune_triple_resonance(device, omega_laser, microwave.omega)?;
            let stack = device.stack(t.air_gap);
            let pump = mode_at_index(&stack, t.pump_index, t.pump_omega, port)?;
            let q_out = (t.pump_index as i64 + t.side as i64) as u64;
            let output = mode_at_index(&stack, q_out, t.output_omega, port)?;
            (t.air_gap, pump, output, true)
        }
        Some(gap) => {
            let lock = lock_air_gap(device, gap, omega_laser)?;
            let stack = device.stack(lock.air_gap);
            let pump = mode_at_index(&stack, lock.pump_index, omega_laser, port)?;
            let mut best: Option<OpticalMode> = None;
            for side in [-1, 1] {
                if let Some(out) = neighbor(&stack, &pump, side, device)? {
                    let miss = ((out.omega - pump.omega).abs() - microwave.omega).abs();
                    if best
                        .as_ref()
                        .is_none_or(|b| miss < ((b.omega - pump.omega).abs() - microwave.omega).abs())
                    {
                        best = Some(out);
                    }
                }
            }
            let output = best
                .ok_or_else(|| TransductionError::InvalidParams("pump mode has no neighbors".to_string()))?;
            (lock.air_gap, pump, output, false)
        }
    };
    let input = CouplingInput::from_modes(&device.material, microwave, &pump, &output, device.slab.len_x);
    Ok(G0Prediction {
        coupling: g0_quasi_1d(&input),
        air_gap: gap,
        tuned,
        pump,
        output,
        omega_m: microwave.omega,
    })
}

/// Quantity varied along the first map axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Air gap in m, laser fixed.
    AirGap,
    /// Laser vacuum wavelength in m, nominal air gap fixed.
    Wavelength,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::AirGap => "air_gap",
            SweepAxis::Wavelength => "wavelength",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSetup<'a> {
    pub device: &'a Device,
    pub laser: &'a Laser,
    pub microwave: &'a [MicrowaveMode],
    pub axis: SweepAxis,
    pub axis_values: &'a [f64],
    /// Nominal air gap for wavelength sweeps, m.
    pub air_gap: f64,
    /// Microwave drive frequencies, rad/s.
    pub drive: &'a [f64],
}

/// Optical configuration found at one axis point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub air_gap: f64,
    pub pump_index: u64,
    pub pump_omega: f64,
    pub n_p: f64,
    /// Spacing to the mode below the pump.
    pub delta_op_lower: Option<f64>,
    /// Spacing to the mode above the pump.
    pub delta_op_upper: Option<f64>,
    pub flagged: Option<String>,
}

/// Linear √η map; `magnitude[i][j]` belongs to `axis_values[i]`, `drive[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub drive: Vec<f64>,
    pub magnitude: Vec<Vec<f64>>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub axis1_name: String,
    pub axis1_unit: String,
    pub axis2_name: String,
    pub axis2_unit: String,
    pub magnitude: String,
    pub rows: usize,
    pub columns: usize,
    pub flagged_rows: Vec<usize>,
    pub fixture_hash: String,
}

impl SweepResult {
    pub fn flagged(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.flagged.is_some())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn metadata(&self, fixture_hash: &str, db: bool) -> SweepMetadata {
        SweepMetadata {
            axis1_name: self.axis.name().to_string(),
            axis1_unit: "m".to_string(),
            axis2_name: "drive_frequency".to_string(),
            axis2_unit: "Hz".to_string(),
            magnitude: if db {
                "sqrt_efficiency_db"
            } else {
                "sqrt_efficiency"
            }
            .to_string(),
            rows: self.axis_values.len(),
            columns: self.drive.len(),
            flagged_rows: self.flagged(),
            fixture_hash: fixture_hash.to_string(),
        }
    }
}

fn neighbor(
    stack: &crate::optical::LayerStack,
    pump: &OpticalMode,
    side: i64,
    device: &Device,
) -> Result<Option<OpticalMode>, TransductionError> {
    let q = pump.longitudinal_index as i64 + side;
    if q < 1 {
        return Ok(None);
    }
    let guess = pump.omega + side as f64 * expected_fsr(stack);
    Ok(Some(mode_at_index(stack, q as u64, guess, device.input_port)?))
}

fn sweep_row(setup: &SweepSetup<'_>, axis_value: f64) -> Result<(Vec<f64>, SweepRow), TransductionError> {
    let laser_omega = 2.0 * PI * C / setup.laser.wavelength;
    let (gap, omega_l) = match setup.axis {
        SweepAxis::AirGap => (axis_value, laser_omega),
        SweepAxis::Wavelength => (setup.air_gap, 2.0 * PI * C / axis_value),
    };
    let lock = lock_air_gap(setup.device, gap, omega_l)?;
    let stack = setup.device.stack(lock.air_gap);
    let pump = mode_at_index(&stack, lock.pump_index, omega_l, setup.device.input_port)?;
    let n_p = pump_occupation(
        setup.laser.power,
        setup.laser.mode_match,
        pump.kappa_o,
        pump.kappa_o_ext,
        pump.omega,
        0.0,
    );
    let mut mags = vec![0.0; setup.drive.len()];
    let mut spacing = [None, None];
    for (slot, side) in [(0, -1_i64), (1, 1)] {
        let Some(out) = neighbor(&stack, &pump, side, setup.device)? else {
            continue;
        };
        let delta_op = (out.omega - pump.omega).abs();
        spacing[slot] = Some(delta_op);
        for mw in setup.microwave {
            let input =
                CouplingInput::from_modes(&setup.device.material, mw, &pump, &out, setup.device.slab.len_x);
            let params = TransductionParams {
                n_p,
                g0: g0_quasi_1d(&input).g0,
                kappa_o: out.kappa_o,
                kappa_o_ext: out.kappa_o_ext,
                kappa_m: mw.kappa_m,
                kappa_m_ext: mw.kappa_m_ext,
                omega_m: mw.omega,
                delta_op,
            };
            for (m, &w) in mags.iter_mut().zip(setup.drive) {
                *m += efficiency_at(&params, w).sqrt();
            }
        }
    }
    Ok((
        mags,
        SweepRow {
            axis_value,
            air_gap: lock.air_gap,
            pump_index: lock.pump_index,
            pump_omega: pump.omega,
            n_p,
            delta_op_lower: spacing[0],
            delta_op_upper: spacing[1],
            flagged: None,
        },
    ))
}

/// Transduction map over `axis_values × drive`. Rows are evaluated in
/// parallel on the current rayon pool and assembled in axis order; a row
/// whose optical solve fails is zero-filled and flagged.
pub fn sweep_triple_resonance(setup: &SweepSetup<'_>) -> Result<SweepResult, TransductionError> {
    if setup.axis_values.is_empty() || setup.drive.is_empty() {
        return Err(TransductionError::InvalidParams(
            "sweep axes must be non-empty".to_string(),
        ));
    }
    let rows: Vec<(Vec<f64>, SweepRow)> = setup
        .axis_values
        .par_iter()
        .map(|&v| {
            sweep_row(setup, v).unwrap_or_else(|e| {
                (
                    vec![0.0; setup.drive.len()],
                    SweepRow {
                        axis_value: v,
                        air_gap: f64::NAN,
                        pump_index: 0,
                        pump_omega: f64::NAN,
                        n_p: 0.0,
                        delta_op_lower: None,
                        delta_op_upper: None,
                        flagged: Some(e.to_string()),
                    },
                )
            })
        })
        .collect();
    let (magnitude, rows) = rows.into_iter().unzip();
    Ok(SweepResult {
        axis: setup.axis,
        axis_values: setup.axis_values.to_vec(),
        drive: setup.drive.to_vec(),
        magnitude,
        rows,
    })
}
