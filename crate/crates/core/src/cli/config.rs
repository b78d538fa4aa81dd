//! JSON run configuration. Frequencies are in Hz, lengths in m, powers in W.
//! Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::microwave::{ModeIndices, ResonatorSettings};
use crate::model::{hz_to_angular, Device, Laser, OperatingPoint};
use crate::transduction::SweepAxis;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<Device>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laser: Option<Laser>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub microwave: Option<MicrowaveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical: Option<OpticalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_point: Option<OperatingPointConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nms: Option<NmsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrowaveConfig {
    /// The first mode is the target of `tune` and `g0`.
    pub modes: Vec<ModeIndices>,
    /// Replaces the modeled frequency of the first mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    pub q_int: f64,
    pub kappa_ext_hz: f64,
    /// Beam position `(y, z)` in the slab cross-section, m; centered by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam_offset: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_eff: Option<f64>,
}

impl MicrowaveConfig {
    pub fn settings(&self) -> ResonatorSettings {
        ResonatorSettings {
            q_int: self.q_int,
            kappa_ext: hz_to_angular(self.kappa_ext_hz),
            beam_offset: self.beam_offset,
            eps_eff: self.eps_eff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalConfig {
    /// Air gap, m. `g0` tunes to triple resonance when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_gap: Option<f64>,
    /// Search window for `modes-optical`; the laser ± 50 GHz by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_hz: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPointConfig {
    pub n_p: f64,
    pub g0_hz: f64,
    pub kappa_o_hz: f64,
    pub kappa_o_ext_hz: f64,
    pub kappa_m_hz: f64,
    pub microwave_freq_hz: f64,
    pub q_int: f64,
    pub temperature: f64,
}

impl OperatingPointConfig {
    pub fn to_model(self) -> OperatingPoint {
        OperatingPoint {
            n_p: self.n_p,
            g0: hz_to_angular(self.g0_hz),
            kappa_o: hz_to_angular(self.kappa_o_hz),
            kappa_o_ext: hz_to_angular(self.kappa_o_ext_hz),
            kappa_m: hz_to_angular(self.kappa_m_hz),
            omega_m: hz_to_angular(self.microwave_freq_hz),
            q_int: self.q_int,
            temperature: self.temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub drive_start_hz: f64,
    pub drive_stop_hz: f64,
    pub drive_points: usize,
    /// Nominal air gap for wavelength sweeps, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_gap: Option<f64>,
    /// Emit `20 log₁₀ √η` instead of the linear amplitude.
    #[serde(default)]
    pub db: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
    /// Pump–output spacing; the microwave frequency by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_op_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmsConfig {
    pub n_m: f64,
    /// Defaults to the operating point's g₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0_hz: Option<f64>,
    /// Defaults to the operating point's κ_o.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_o_hz: Option<f64>,
    #[serde(default)]
    pub delta_hz: f64,
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
    /// A measured splitting; reported back as a calibrated g₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_splitting_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Lineshape,
    Nms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub kind: FitKind,
    /// Trace files with header `freq_hz,magnitude`, relative to the config
    /// file. Several lineshape traces are fitted jointly.
    pub traces: Vec<String>,
    /// Starting point; estimated from the traces when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<serde_json::Value>,
}

/// A configuration problem with its position in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// Position of the last key of `path`, each key searched after the previous
/// one; falls back to the start of the file.
pub fn locate(text: &str, path: &[&str]) -> (usize, usize) {
    let mut pos = 0;
    let mut found = None;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[pos..].find(&needle) {
            Some(i) => {
                pos += i;
                found = Some(pos);
                pos += needle.len();
            }
            None => break,
        }
    }
    let Some(at) = found else {
        return (1, 1);
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = at - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: e.line().max(1),
        column: e.column().max(1),
        message: e
            .to_string()
            .split(" at line ")
            .next()
            .unwrap_or_default()
            .to_string(),
    })?;
    validate(&cfg).map_err(|(path, message)| {
        let (line, column) = locate(text, &path);
        ConfigError {
            line,
            column,
            message,
        }
    })?;
    Ok(cfg)
}

type Invalid = (Vec<&'static str>, String);

fn check(ok: bool, path: &[&'static str], message: impl FnOnce() -> String) -> Result<(), Invalid> {
    if ok {
        Ok(())
    } else {
        Err((path.to_vec(), message()))
    }
}

fn positive(v: f64, path: &[&'static str]) -> Result<(), Invalid> {
    check(v > 0.0 && v.is_finite(), path, || {
        format!("`{}` must be positive and finite, got {v}", path.last().unwrap())
    })
}

fn grid(start: f64, stop: f64, points: usize, path: &[&'static str]) -> Result<(), Invalid> {
    check(points >= 1, path, || "grid needs at least one point".into())?;
    check(start.is_finite() && stop.is_finite(), path, || {
        "grid limits must be finite".into()
    })?;
    check(points == 1 || stop > start, path, || {
        format!("grid stop {stop} must exceed start {start}")
    })
}

fn validate(cfg: &RunConfig) -> Result<(), Invalid> {
    if let Some(d) = &cfg.device {
        d.material
            .validate()
            .map_err(|e| (vec!["device", "material"], e.to_string()))?;
        d.slab
            .validate()
            .map_err(|e| (vec!["device", "slab"], e.to_string()))?;
        d.stack(1e-3)
            .validate()
            .map_err(|e| (vec!["device", "mirrors"], e.to_string()))?;
        if let Some(ar) = d.ar_coating {
            check(
                ar.index >= 1.0 && ar.thickness >= 0.0,
                &["device", "ar_coating"],
                || "coating needs index >= 1 and non-negative thickness".into(),
            )?;
        }
    }
    if let Some(l) = &cfg.laser {
        positive(l.wavelength, &["laser", "wavelength"])?;
        check(l.power >= 0.0 && l.power.is_finite(), &["laser", "power"], || {
            format!("`power` must be non-negative, got {}", l.power)
        })?;
        check(
            l.mode_match > 0.0 && l.mode_match <= 1.0,
            &["laser", "mode_match"],
            || format!("`mode_match` must lie in (0, 1], got {}", l.mode_match),
        )?;
    }
    if let Some(m) = &cfg.microwave {
        check(!m.modes.is_empty(), &["microwave", "modes"], || {
            "at least one mode is required".into()
        })?;
        for idx in &m.modes {
            check(
                idx.l >= 1 && idx.m >= 1 && idx.p >= 1,
                &["microwave", "modes"],
                || format!("mode indices must be >= 1, got {idx}"),
            )?;
        }
        positive(m.q_int, &["microwave", "q_int"])?;
        check(
            m.kappa_ext_hz > 0.0 && m.kappa_ext_hz.is_finite(),
            &["microwave", "kappa_ext_hz"],
            || format!("`kappa_ext_hz` must be positive, got {}", m.kappa_ext_hz),
        )?;
        if let Some(f) = m.frequency_hz {
            positive(f, &["microwave", "frequency_hz"])?;
        }
        if let Some(e) = m.eps_eff {
            positive(e, &["microwave", "eps_eff"])?;
        }
    }
    if let Some(o) = &cfg.optical {
        if let Some(g) = o.air_gap {
            check(g >= 0.0 && g.is_finite(), &["optical", "air_gap"], || {
                format!("`air_gap` must be non-negative, got {g}")
            })?;
        }
        if let Some((lo, hi)) = o.window_hz {
            check(
                lo >= 0.0 && hi > lo && hi.is_finite(),
                &["optical", "window_hz"],
                || format!("invalid window [{lo}, {hi}]"),
            )?;
        }
    }
    if let Some(op) = &cfg.operating_point {
        positive(op.n_p, &["operating_point", "n_p"])?;
        positive(op.g0_hz, &["operating_point", "g0_hz"])?;
        positive(op.kappa_o_hz, &["operating_point", "kappa_o_hz"])?;
        positive(op.kappa_o_ext_hz, &["operating_point", "kappa_o_ext_hz"])?;
        check(
            op.kappa_o_ext_hz <= op.kappa_o_hz,
            &["operating_point", "kappa_o_ext_hz"],
            || "`kappa_o_ext_hz` exceeds `kappa_o_hz`".into(),
        )?;
        positive(op.kappa_m_hz, &["operating_point", "kappa_m_hz"])?;
        positive(op.microwave_freq_hz, &["operating_point", "microwave_freq_hz"])?;
        positive(op.q_int, &["operating_point", "q_int"])?;
        check(
            op.microwave_freq_hz / op.q_int < op.kappa_m_hz,
            &["operating_point", "kappa_m_hz"],
            || "`kappa_m_hz` must exceed the intrinsic linewidth microwave_freq_hz / q_int".into(),
        )?;
        positive(op.temperature, &["operating_point", "temperature"])?;
    }
    if let Some(s) = &cfg.sweep {
        grid(s.start, s.stop, s.points, &["sweep", "start"])?;
        grid(
            s.drive_start_hz,
            s.drive_stop_hz,
            s.drive_points,
            &["sweep", "drive_start_hz"],
        )?;
        check(s.start >= 0.0, &["sweep", "start"], || {
            "sweep axis must be non-negative".into()
        })?;
        if s.axis == SweepAxis::Wavelength {
            check(s.start > 0.0, &["sweep", "start"], || {
                "wavelengths must be positive".into()
            })?;
            check(s.air_gap.is_some_and(|g| g >= 0.0), &["sweep", "axis"], || {
                "wavelength sweeps need a non-negative `air_gap`".into()
            })?;
        }
    }
    if let Some(s) = &cfg.spectrum {
        grid(s.start_hz, s.stop_hz, s.points, &["spectrum", "start_hz"])?;
    }
    if let Some(n) = &cfg.nms {
        check(n.n_m >= 0.0 && n.n_m.is_finite(), &["nms", "n_m"], || {
            format!("`n_m` must be non-negative, got {}", n.n_m)
        })?;
        grid(n.start_hz, n.stop_hz, n.points, &["nms", "start_hz"])?;
        if let Some(k) = n.kappa_o_hz {
            positive(k, &["nms", "kappa_o_hz"])?;
        }
    }
    if let Some(f) = &cfg.fit {
        check(!f.traces.is_empty(), &["fit", "traces"], || {
            "at least one trace is required".into()
        })?;
        check(
            f.kind == FitKind::Lineshape || f.traces.len() == 1,
            &["fit", "traces"],
            || "normal-mode fits take exactly one trace".into(),
        )?;
    }
    Ok(())
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let step = (stop - start) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect()
}
