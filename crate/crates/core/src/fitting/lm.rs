//! Bounded Levenberg–Marquardt with a central-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use super::FitError;

pub(crate) const MAX_ITERATIONS: usize = 500;
const GRADIENT_TOL: f64 = 1e-10;
/// Largest allowed cosine between the residual and a Jacobian column.
const ORTHOGONALITY_TOL: f64 = 1e-8;
/// Relative cost reduction predicted by a Gauss–Newton step below which the
/// fit sits at its numerical floor.
const PREDICTED_REDUCTION_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-6;
/// Column-scaled condition number above which the fit is flagged degenerate.
const DEGENERATE_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Scale {
    Log,
    /// `p = center + width · u`.
    Linear {
        center: f64,
        width: f64,
    },
}

impl Scale {
    fn to_internal(self, p: f64) -> f64 {
        match self {
            Scale::Log => p.ln(),
            Scale::Linear { center, width } => (p - center) / width,
        }
    }

    fn to_external(self, u: f64) -> f64 {
        match self {
            Scale::Log => u.exp(),
            Scale::Linear { center, width } => center + width * u,
        }
    }

    fn derivative(self, u: f64) -> f64 {
        match self {
            Scale::Log => u.exp(),
            Scale::Linear { width, .. } => width,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ParamSpec {
    pub name: &'static str,
    pub scale: Scale,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub params: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub std_errors: Vec<Option<f64>>,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub at_bound: bool,
    pub iterations: usize,
    pub condition_number: f64,
    pub degenerate: bool,
}

struct Problem<'a, F> {
    model: F,
    data: &'a [f64],
    specs: &'a [ParamSpec],
}

impl<F: Fn(&[f64]) -> Vec<f64>> Problem<'_, F> {
    fn external(&self, u: &DVector<f64>) -> Vec<f64> {
        u.iter()
            .zip(self.specs)
            .map(|(&v, s)| s.scale.to_external(v))
            .collect()
    }

    fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let pred = (self.model)(&self.external(u));
        DVector::from_iterator(self.data.len(), pred.iter().zip(self.data).map(|(p, d)| p - d))
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.data.len(), u.len());
        for j in 0..u.len() {
            let h = FD_STEP * u[j].abs().max(1.0);
            let mut up = u.clone();
            let mut down = u.clone();
            up[j] += h;
            down[j] -= h;
            let col = (self.residual(&up) - self.residual(&down)) / (2.0 * h);
            jac.set_column(j, &col);
        }
        jac
    }
}

/// `max_j |J_jᵀ r| / (‖J_j‖ ‖r‖)`; zero for a zero residual.
fn max_cosine(jac: &DMatrix<f64>, grad: &DVector<f64>, r_norm: f64) -> f64 {
    if r_norm == 0.0 {
        return 0.0;
    }
    jac.column_iter()
        .zip(grad.iter())
        .map(|(col, g)| {
            let n = col.norm();
            if n > 0.0 {
                g.abs() / (n * r_norm)
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Condition number of the column-scaled normal matrix and its
/// pseudo-inverse in the original scaling.
fn normal_inverse(jac: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let p = jac.ncols();
    let norms: Vec<f64> = (0..p).map(|j| jac.column(j).norm()).collect();
    if norms.contains(&0.0) {
        return (f64::INFINITY, pseudo_inverse_scaled(jac, &norms));
    }
    let scaled = DMatrix::from_fn(jac.nrows(), p, |i, j| jac[(i, j)] / norms[j]);
    let eig = (scaled.transpose() * &scaled).symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    (cond, pseudo_inverse_scaled(jac, &norms))
}

fn pseudo_inverse_scaled(jac: &DMatrix<f64>, norms: &[f64]) -> DMatrix<f64> {
    let p = jac.ncols();
    let safe: Vec<f64> = norms.iter().map(|&n| if n > 0.0 { n } else { 1.0 }).collect();
    let scaled = DMatrix::from_fn(jac.nrows(), p, |i, j| jac[(i, j)] / safe[j]);
    let eig = (scaled.transpose() * &scaled).symmetric_eigen();
    let max = eig.eigenvalues.max().max(0.0);
    let mut inv = DMatrix::zeros(p, p);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-14 * max {
            let v = eig.eigenvectors.column(k);
            inv += (v * v.transpose()) / lam;
        }
    }
    DMatrix::from_fn(p, p, |i, j| inv[(i, j)] / (safe[i] * safe[j]))
}

/// Minimizes `Σ (model(p) − data)²` from `initial` inside the bounds of `specs`.
pub(crate) fn levenberg_marquardt<F: Fn(&[f64]) -> Vec<f64>>(
    model: F,
    data: &[f64],
    specs: &[ParamSpec],
    initial: &[f64],
) -> Result<Outcome, FitError> {
    for (s, &p) in specs.iter().zip(initial) {
        let log_ok = !matches!(s.scale, Scale::Log) || s.lower > 0.0;
        if !(p.is_finite() && p >= s.lower && p <= s.upper && log_ok) {
            return Err(FitError::InvalidInitial(format!(
                "{} = {p} outside [{}, {}]",
                s.name, s.lower, s.upper
            )));
        }
    }
    let problem = Problem { model, data, specs };
    let lo = DVector::from_iterator(specs.len(), specs.iter().map(|s| s.scale.to_internal(s.lower)));
    let hi = DVector::from_iterator(specs.len(), specs.iter().map(|s| s.scale.to_internal(s.upper)));
    let clamp = |u: DVector<f64>| u.zip_zip_map(&lo, &hi, |v, l, h| v.clamp(l, h));

    let mut u = DVector::from_iterator(
        specs.len(),
        specs.iter().zip(initial).map(|(s, &p)| s.scale.to_internal(p)),
    );
    let mut r = problem.residual(&u);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(FitError::InvalidInitial(
            "model is not finite at the initial guess".into(),
        ));
    }
    let initial_norm = r.norm();
    let tol = GRADIENT_TOL * initial_norm;
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;

    let mut jac = problem.jacobian(&u);
    let mut grad = jac.transpose() * &r;
    let stationary = |jac: &DMatrix<f64>, grad: &DVector<f64>, r: &DVector<f64>| {
        grad.norm() <= tol || max_cosine(jac, grad, r.norm()) <= ORTHOGONALITY_TOL
    };
    while iterations < MAX_ITERATIONS && !stationary(&jac, &grad, &r) {
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(FitError::Singular { condition: f64::NAN });
        }
        let a = jac.transpose() * &jac;
        let max_diag = a.diagonal().max();
        if !(max_diag > 0.0) {
            return Err(FitError::Singular {
                condition: f64::INFINITY,
            });
        }
        let mut accepted = None;
        while lambda <= 1e16 {
            let mut m = a.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += lambda * a[(i, i)].max(1e-12 * max_diag);
            }
            let Some(chol) = m.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let u_new = clamp(&u + step);
            let r_new = problem.residual(&u_new);
            let c_new = r_new.norm_squared();
            if c_new < cost {
                accepted = Some((u_new, r_new, c_new));
                lambda = (lambda * 0.1).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }
        let Some((u_new, r_new, c_new)) = accepted else {
            break;
        };
        iterations += 1;
        u = u_new;
        r = r_new;
        cost = c_new;
        jac = problem.jacobian(&u);
        grad = jac.transpose() * &r;
    }

    let gradient_norm = grad.norm();
    let at_bound = u
        .iter()
        .zip(lo.iter().zip(hi.iter()))
        .any(|(&v, (&l, &h))| v <= l || v >= h);
    let (condition_number, inv) = normal_inverse(&jac);
    let predicted = if cost > 0.0 {
        grad.dot(&(&inv * &grad)) / cost
    } else {
        0.0
    };
    let n = data.len();
    let p = specs.len();
    let sigma2 = if n > p { cost / (n - p) as f64 } else { 0.0 };
    let deriv: Vec<f64> = u.iter().zip(specs).map(|(&v, s)| s.scale.derivative(v)).collect();
    let mut covariance = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let c = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            covariance[i][j] = sigma2 * (deriv[i] * deriv[j]) * c;
            covariance[j][i] = covariance[i][j];
        }
    }
    let degenerate = !(condition_number < DEGENERATE_CONDITION);
    let std_errors = (0..p)
        .map(|i| (!degenerate).then(|| covariance[i][i].max(0.0).sqrt()))
        .collect();
    Ok(Outcome {
        params: problem.external(&u),
        covariance,
        std_errors,
        residual_norm: cost.sqrt(),
        initial_residual_norm: initial_norm,
        gradient_norm,
        converged: (stationary(&jac, &grad, &r) || predicted <= PREDICTED_REDUCTION_TOL) && !at_bound,
        at_bound,
        iterations,
        condition_number,
        degenerate,
    })
}
