use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, ParamSpec, Scale};
use super::{Estimate, FitError, FitResult, Trace};
use crate::transduction::lineshape;

/// Parameters of `gain · 4C / |C + (1 + 2i(Δ_op − f)/κ_o)(1 + 2i(ω_m − f)/κ_m)|²`,
/// in the frequency unit of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineshapeGuess {
    pub gain: f64,
    pub c: f64,
    pub kappa_o: f64,
    pub kappa_m: f64,
    pub omega_m: f64,
    pub delta_op: f64,
}

impl LineshapeGuess {
    /// Rough starting point from the peak and its half-maximum width.
    /// The two linewidths start a factor of two apart so the fit does not
    /// begin on the `κ_o ↔ κ_m` exchange symmetry.
    pub fn from_trace(trace: &Trace) -> Self {
        let (imax, &ymax) = trace
            .value
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let f0 = trace.freq[imax];
        let half = 0.5 * ymax;
        let left = trace.value[..imax]
            .iter()
            .rposition(|&v| v < half)
            .map(|i| trace.freq[i]);
        let right = trace.value[imax..]
            .iter()
            .position(|&v| v < half)
            .map(|i| trace.freq[imax + i]);
        let width = match (left, right) {
            (Some(l), Some(r)) => r - l,
            _ => 0.1 * trace.span(),
        };
        let (kappa_o, kappa_m, c) = (0.7 * width, 1.4 * width, 0.1);
        let shape = lineshape(c, kappa_o, kappa_m, f0, f0, f0);
        LineshapeGuess {
            gain: if ymax > 0.0 { ymax / shape } else { 1.0 },
            c,
            kappa_o,
            kappa_m,
            omega_m: f0,
            delta_op: f0,
        }
    }

    fn from_slice(p: &[f64]) -> Self {
        LineshapeGuess {
            gain: p[0],
            c: p[1],
            kappa_o: p[2],
            kappa_m: p[3],
            omega_m: p[4],
            delta_op: p[5],
        }
    }
}

pub fn lineshape_model(p: &LineshapeGuess, f: f64) -> f64 {
    p.gain * lineshape(p.c, p.kappa_o, p.kappa_m, p.omega_m, p.delta_op, f)
}

/// Box bounds on the two resonance locations; the trace window by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineshapeBounds {
    pub omega_m: (f64, f64),
    pub delta_op: (f64, f64),
}

/// Shared starting point for a joint fit of several traces that differ only
/// in the pump–output spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointGuess {
    pub gain: f64,
    pub c: f64,
    pub kappa_o: f64,
    pub kappa_m: f64,
    pub omega_m: f64,
    /// One per trace.
    pub delta_op: Vec<f64>,
}

/// Levenberg–Marquardt fit of the transduction lineshape with a gain factor.
///
/// Linewidths are bounded to `[span·1e-6, 10·span]` and the cooperativity to
/// `[1e-9, 1e6]`; a flat trace drives the linewidths to their upper bound
/// and is reported as not converged.
///
/// The denominator of the lineshape is `|(f − r₁)(f − r₂)|²` up to a
/// constant, so one trace determines only the two complex roots and the
/// amplitude: five numbers for six parameters. A single trace is therefore
/// always flagged degenerate, while the root sum `Δ_op + ω_m − i(κ_o + κ_m)/2`
/// is recovered exactly. [`fit_lineshape_joint`] with a second trace at a
/// different `Δ_op` resolves every parameter.
pub fn fit_lineshape(
    trace: &Trace,
    initial: &LineshapeGuess,
    bounds: Option<LineshapeBounds>,
) -> Result<FitResult, FitError> {
    let joint = JointGuess {
        gain: initial.gain,
        c: initial.c,
        kappa_o: initial.kappa_o,
        kappa_m: initial.kappa_m,
        omega_m: initial.omega_m,
        delta_op: vec![initial.delta_op],
    };
    fit_joint(std::slice::from_ref(trace), &joint, bounds)
}

/// Fit of several traces sharing gain, cooperativity, linewidths and `ω_m`,
/// each with its own `Δ_op` (named `delta_op_0`, `delta_op_1`, …).
pub fn fit_lineshape_joint(traces: &[Trace], initial: &JointGuess) -> Result<FitResult, FitError> {
    fit_joint(traces, initial, None)
}

fn fit_joint(
    traces: &[Trace],
    initial: &JointGuess,
    bounds: Option<LineshapeBounds>,
) -> Result<FitResult, FitError> {
    if traces.is_empty() || initial.delta_op.len() != traces.len() {
        return Err(FitError::InvalidInitial(format!(
            "{} traces but {} pump-output spacings",
            traces.len(),
            initial.delta_op.len()
        )));
    }
    let f_lo = traces.iter().map(|t| t.window().0).fold(f64::INFINITY, f64::min);
    let f_hi = traces
        .iter()
        .map(|t| t.window().1)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = traces.iter().map(Trace::span).fold(0.0, f64::max);
    let bounds = bounds.unwrap_or(LineshapeBounds {
        omega_m: (f_lo, f_hi),
        delta_op: (f_lo, f_hi),
    });
    let loc = Scale::Linear {
        center: 0.5 * (f_lo + f_hi),
        width: f_hi - f_lo,
    };
    let mut names: Vec<String> = ["gain", "c", "kappa_o", "kappa_m", "omega_m"]
        .map(String::from)
        .to_vec();
    if traces.len() == 1 {
        names.push("delta_op".into());
    } else {
        names.extend((0..traces.len()).map(|i| format!("delta_op_{i}")));
    }
    let mut specs = vec![
        ParamSpec {
            name: "gain",
            scale: Scale::Log,
            lower: f64::MIN_POSITIVE,
            upper: f64::MAX,
        },
        ParamSpec {
            name: "c",
            scale: Scale::Log,
            lower: 1e-9,
            upper: 1e6,
        },
        ParamSpec {
            name: "kappa_o",
            scale: Scale::Log,
            lower: 1e-6 * span,
            upper: 10.0 * span,
        },
        ParamSpec {
            name: "kappa_m",
            scale: Scale::Log,
            lower: 1e-6 * span,
            upper: 10.0 * span,
        },
        ParamSpec {
            name: "omega_m",
            scale: loc,
            lower: bounds.omega_m.0,
            upper: bounds.omega_m.1,
        },
    ];
    specs.extend(traces.iter().map(|_| ParamSpec {
        name: "delta_op",
        scale: loc,
        lower: bounds.delta_op.0,
        upper: bounds.delta_op.1,
    }));
    let mut start = vec![
        initial.gain,
        initial.c,
        initial.kappa_o,
        initial.kappa_m,
        initial.omega_m,
    ];
    start.extend(&initial.delta_op);
    let data: Vec<f64> = traces.iter().flat_map(|t| t.value.iter().copied()).collect();
    let model = |p: &[f64]| {
        traces
            .iter()
            .enumerate()
            .flat_map(|(i, t)| {
                let g = LineshapeGuess::from_slice(&[p[0], p[1], p[2], p[3], p[4], p[5 + i]]);
                t.freq.iter().map(move |&f| lineshape_model(&g, f))
            })
            .collect()
    };
    let out = levenberg_marquardt(model, &data, &specs, &start)?;
    Ok(FitResult {
        model: "lineshape".into(),
        params: names
            .into_iter()
            .zip(&out.params)
            .zip(&out.std_errors)
            .map(|((name, &value), &std_error)| Estimate {
                name,
                value,
                std_error,
            })
            .collect(),
        derived: Vec::new(),
        covariance: out.covariance,
        residual_norm: out.residual_norm,
        initial_residual_norm: out.initial_residual_norm,
        gradient_norm: out.gradient_norm,
        converged: out.converged,
        at_bound: out.at_bound,
        iterations: out.iterations,
        condition_number: out.condition_number,
        degenerate: out.degenerate,
    })
}
