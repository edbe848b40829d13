use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::criteria::{null_loglik, KConvention, ModelCriteria};
use super::likelihood::{derivatives_internal, flip_covariance, loglik_internal};
use super::FittedModel;
use crate::error::{Error, Result};
use crate::item::{encode_design, Dataset, DifficultyLevel, Predictor};

/// Slopes beyond this magnitude are treated as divergence.
const SEPARATION_LIMIT: f64 = 30.0;
const MAX_HALVINGS: usize = 30;
/// Smallest admissible eigenvalue ratio of the information matrix.
const MIN_EIGEN_RATIO: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Convergence bound on the gradient max-norm.
    pub tol: f64,
    /// Convergence bound on the last log-likelihood change.
    pub loglik_tol: f64,
    pub max_iter: usize,
    pub k_convention: KConvention,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-6,
            loglik_tol: 1e-10,
            max_iter: 100,
            k_convention: KConvention::AllParams,
        }
    }
}

/// Raw result of fitting a design matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignFit {
    pub slopes: Vec<f64>,
    pub a1: f64,
    pub a2: f64,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Gradient max-norm at the returned parameters.
    pub gradient_max: f64,
    /// Covariance of `[slopes…, a1, a2]`.
    pub vcov: DMatrix<f64>,
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn information_check(info: &DMatrix<f64>) -> Result<()> {
    let eig = SymmetricEigen::new(info.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min > MIN_EIGEN_RATIO * max) {
        return Err(Error::Singular(format!(
            "information matrix is not positive definite (eigenvalues in [{min:.3e}, {max:.3e}])"
        )));
    }
    Ok(())
}

/// Maximum-likelihood fit by Newton–Raphson with step halving.
///
/// Starts from thresholds matching the marginal outcome frequencies and zero
/// slopes. Divergence of any slope past ±30 is reported as complete
/// separation.
pub fn fit_design(x: &DMatrix<f64>, y: &[DifficultyLevel], options: &FitOptions) -> Result<DesignFit> {
    let n = y.len();
    let p = x.ncols();
    if x.nrows() != n {
        return Err(Error::Dimension(format!(
            "design has {} rows but {} outcomes",
            x.nrows(),
            n
        )));
    }
    let mut counts = [0usize; 3];
    for level in y {
        counts[level.index()] += 1;
    }
    if counts.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "fewer than 3 outcome levels present (Low {}, Moderate {}, High {})",
            counts[0], counts[1], counts[2]
        )));
    }
    if n < p + 3 {
        return Err(Error::InvalidInput(format!(
            "{n} items cannot identify {} parameters",
            p + 2
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("design contains non-finite values".into()));
    }

    let mut params = vec![0.0; p + 2];
    params[p] = logit(counts[0] as f64 / n as f64);
    params[p + 1] = logit((counts[0] + counts[1]) as f64 / n as f64);

    let mut ll = loglik_internal(&params, x, y);
    let mut last_delta = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut gradient_max;

    loop {
        let (_, grad, hess) = derivatives_internal(&params, x, y);
        gradient_max = grad.amax();
        if gradient_max < options.tol && last_delta.abs() < options.loglik_tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        let info = -hess;
        information_check(&info)?;
        let chol = info
            .cholesky()
            .ok_or_else(|| Error::Singular("information matrix is not positive definite".into()))?;
        let step: DVector<f64> = chol.solve(&grad);
        iterations += 1;

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(v, s)| v + scale * s).collect();
            if trial[p] < trial[p + 1] {
                let trial_ll = loglik_internal(&trial, x, y);
                if trial_ll.is_finite() && trial_ll >= ll {
                    accepted = Some((trial, trial_ll));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((trial, trial_ll)) => {
                last_delta = trial_ll - ll;
                params = trial;
                ll = trial_ll;
            }
            None => {
                // No ascent possible: the current point is a numerical optimum
                // if the gradient agrees.
                converged = gradient_max < options.tol;
                break;
            }
        }
        if let Some((c, b)) = params[..p].iter().enumerate().find(|(_, b)| b.abs() > SEPARATION_LIMIT) {
            return Err(Error::Separation {
                variable: format!("column {c}"),
                value: *b,
            });
        }
    }

    let (_, grad, hess) = derivatives_internal(&params, x, y);
    gradient_max = gradient_max.min(grad.amax());
    let info = -hess;
    information_check(&info)?;
    let mut vcov = info
        .try_inverse()
        .ok_or_else(|| Error::Singular("information matrix is not invertible".into()))?;
    // Symmetrize against round-off before exporting.
    vcov = (&vcov + vcov.transpose()) * 0.5;
    flip_covariance(&mut vcov);

    Ok(DesignFit {
        slopes: params[..p].to_vec(),
        a1: -params[p],
        a2: -params[p + 1],
        loglik: ll,
        converged,
        iterations,
        gradient_max,
        vcov,
    })
}

/// Fits the model on `variables` of a labeled dataset.
pub fn fit(data: &Dataset, variables: &[Predictor], options: &FitOptions) -> Result<FittedModel> {
    if !data.labeled() {
        return Err(Error::InvalidInput(
            "fitting requires a labeled, nonempty dataset".into(),
        ));
    }
    let y = data.outcomes()?;
    let x = encode_design(data, variables);
    let raw = fit_design(&x, &y, options).map_err(|e| match e {
        Error::Separation { variable, value } => {
            let idx: usize = variable.trim_start_matches("column ").parse().unwrap_or(usize::MAX);
            let name = variables.get(idx).map(|v| v.name().to_string()).unwrap_or(variable);
            Error::Separation { variable: name, value }
        }
        other => other,
    })?;
    let ll0 = if variables.is_empty() {
        raw.loglik
    } else {
        null_loglik(&y)?
    };
    let criteria = ModelCriteria::new(raw.loglik, ll0, variables.len(), data.len(), options.k_convention);
    Ok(FittedModel {
        variables: variables.to_vec(),
        slopes: raw.slopes,
        a1: raw.a1,
        a2: raw.a2,
        n_train: data.len(),
        loglik: raw.loglik,
        converged: raw.converged,
        criteria,
        vcov: Some(raw.vcov),
        iterations: raw.iterations,
        gradient_max: Some(raw.gradient_max),
    })
}
