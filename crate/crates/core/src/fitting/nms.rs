use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, ParamSpec, Scale};
use super::{Estimate, FitError, FitResult, Trace};

/// Two Lorentzians of common full width `kappa_o` at `center ∓ separation/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmsGuess {
    pub center: f64,
    pub separation: f64,
    pub kappa_o: f64,
    pub weight_lower: f64,
    pub weight_upper: f64,
}

impl NmsGuess {
    /// Starting point from the two largest local maxima of the trace.
    pub fn from_trace(trace: &Trace) -> Self {
        let v = &trace.value;
        let mut peaks: Vec<usize> = (1..v.len() - 1)
            .filter(|&i| v[i] >= v[i - 1] && v[i] > v[i + 1])
            .collect();
        peaks.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
        let (a, b) = match peaks.as_slice() {
            [a, b, ..] => ((*a).min(*b), (*a).max(*b)),
            [a] => (*a, *a),
            [] => (v.len() / 2, v.len() / 2),
        };
        let (fa, fb) = (trace.freq[a], trace.freq[b]);
        let separation = if b > a { fb - fa } else { 0.1 * trace.span() };
        NmsGuess {
            center: 0.5 * (fa + fb),
            separation,
            kappa_o: (0.25 * separation).max(trace.span() / trace.freq.len() as f64),
            weight_lower: v[a].max(f64::MIN_POSITIVE),
            weight_upper: v[b].max(f64::MIN_POSITIVE),
        }
    }

    fn to_vec(self) -> Vec<f64> {
        vec![
            self.center,
            self.separation,
            self.kappa_o,
            self.weight_lower,
            self.weight_upper,
        ]
    }

    fn from_slice(p: &[f64]) -> Self {
        NmsGuess {
            center: p[0],
            separation: p[1],
            kappa_o: p[2],
            weight_lower: p[3],
            weight_upper: p[4],
        }
    }
}

pub fn nms_model(p: &NmsGuess, f: f64) -> f64 {
    let l = |x: f64| 1.0 / (1.0 + (2.0 * x / p.kappa_o).powi(2));
    let half = 0.5 * p.separation;
    p.weight_lower * l(f - (p.center - half)) + p.weight_upper * l(f - (p.center + half))
}

const NAMES: [&str; 5] = ["center", "separation", "kappa_o", "weight_lower", "weight_upper"];

/// Fit of a split optical response. The separation is bounded to
/// `[0, span]`; a single unsplit peak ends on the lower bound with a
/// degenerate covariance.
pub fn fit_nms(trace: &Trace, initial: &NmsGuess) -> Result<FitResult, FitError> {
    let (f_lo, f_hi) = trace.window();
    let span = trace.span();
    let specs = [
        ParamSpec {
            name: NAMES[0],
            scale: Scale::Linear {
                center: 0.5 * (f_lo + f_hi),
                width: span,
            },
            lower: f_lo,
            upper: f_hi,
        },
        ParamSpec {
            name: NAMES[1],
            scale: Scale::Linear {
                center: 0.0,
                width: span,
            },
            lower: 0.0,
            upper: span,
        },
        ParamSpec {
            name: NAMES[2],
            scale: Scale::Log,
            lower: 1e-6 * span,
            upper: 10.0 * span,
        },
        ParamSpec {
            name: NAMES[3],
            scale: Scale::Log,
            lower: f64::MIN_POSITIVE,
            upper: f64::MAX,
        },
        ParamSpec {
            name: NAMES[4],
            scale: Scale::Log,
            lower: f64::MIN_POSITIVE,
            upper: f64::MAX,
        },
    ];
    let model = |p: &[f64]| {
        let g = NmsGuess::from_slice(p);
        trace.freq.iter().map(|&f| nms_model(&g, f)).collect()
    };
    let out = levenberg_marquardt(model, &trace.value, &specs, &initial.to_vec())?;
    let fitted = NmsGuess::from_slice(&out.params);
    let total = fitted.weight_lower + fitted.weight_upper;
    let derived = [
        ("splitting", fitted.separation),
        ("weight_lower_fraction", fitted.weight_lower / total),
        ("weight_upper_fraction", fitted.weight_upper / total),
    ]
    .into_iter()
    .map(|(n, v)| Estimate {
        name: n.to_string(),
        value: v,
        std_error: None,
    })
    .collect();
    Ok(FitResult {
        model: "nms".into(),
        params: NAMES
            .iter()
            .zip(&out.params)
            .zip(&out.std_errors)
            .map(|((n, &v), &s)| Estimate {
                name: n.to_string(),
                value: v,
                std_error: s,
            })
            .collect(),
        derived,
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
