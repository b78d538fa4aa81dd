//! Least-squares fits of transduction and normal-mode-splitting traces.
//!
//! Fits work in the frequency unit of the trace (Hz for files); the
//! lineshape is invariant under a common change of frequency unit.
//! Rates, gains and weights are optimized through their logarithms and
//! locations linearly, all inside box bounds. A parameter ending on a bound
//! marks the fit as not converged.

mod lineshape;
mod lm;
mod nms;

pub use lineshape::{
    fit_lineshape, fit_lineshape_joint, lineshape_model, JointGuess, LineshapeBounds, LineshapeGuess,
};
pub use nms::{fit_nms, nms_model, NmsGuess};

use std::io::Read;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid initial guess: {0}")]
    InvalidInitial(String),
    #[error("normal equations are singular (condition number {condition:e})")]
    Singular { condition: f64 },
    #[error("trace file line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sampled response: strictly increasing frequencies and finite values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub freq: Vec<f64>,
    pub value: Vec<f64>,
    pub meta: String,
}

impl Trace {
    pub const MIN_LEN: usize = 8;

    pub fn new(freq: Vec<f64>, value: Vec<f64>, meta: impl Into<String>) -> Result<Self, FitError> {
        if freq.len() != value.len() {
            return Err(FitError::InvalidTrace(format!(
                "{} frequencies but {} values",
                freq.len(),
                value.len()
            )));
        }
        if freq.len() < Self::MIN_LEN {
            return Err(FitError::InvalidTrace(format!(
                "need at least {} samples, got {}",
                Self::MIN_LEN,
                freq.len()
            )));
        }
        if freq.iter().chain(&value).any(|v| !v.is_finite()) {
            return Err(FitError::InvalidTrace("non-finite sample".into()));
        }
        if let Some(i) = freq.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(FitError::InvalidTrace(format!(
                "frequencies not strictly increasing at sample {}",
                i + 1
            )));
        }
        Ok(Trace {
            freq,
            value,
            meta: meta.into(),
        })
    }

    /// Reads `freq_hz,magnitude` CSV.
    pub fn from_csv<R: Read>(reader: R, meta: impl Into<String>) -> Result<Self, FitError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["freq_hz", "magnitude"] {
            return Err(FitError::Parse {
                line: 1,
                message: format!(
                    "expected header `freq_hz,magnitude`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let (mut freq, mut value) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(&e))?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |i: usize| -> Result<f64, FitError> {
                rec.get(i)
                    .ok_or_else(|| FitError::Parse {
                        line,
                        message: "missing field".into(),
                    })?
                    .parse::<f64>()
                    .map_err(|e| FitError::Parse {
                        line,
                        message: e.to_string(),
                    })
            };
            freq.push(field(0)?);
            value.push(field(1)?);
        }
        Trace::new(freq, value, meta)
    }

    pub fn span(&self) -> f64 {
        self.freq[self.freq.len() - 1] - self.freq[0]
    }

    pub fn window(&self) -> (f64, f64) {
        (self.freq[0], self.freq[self.freq.len() - 1])
    }
}

fn csv_error(e: &csv::Error) -> FitError {
    FitError::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    /// One-sigma linearized uncertainty, absent when the covariance is singular.
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: String,
    pub params: Vec<Estimate>,
    /// Quantities derived from the fitted parameters.
    pub derived: Vec<Estimate>,
    /// Covariance of `params`, same order.
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub at_bound: bool,
    pub iterations: usize,
    /// Condition number of the column-scaled normal matrix.
    pub condition_number: f64,
    /// Set when the normal matrix is numerically singular.
    pub degenerate: bool,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .chain(&self.derived)
            .find(|e| e.name == name)
            .map(|e| e.value)
    }
}
