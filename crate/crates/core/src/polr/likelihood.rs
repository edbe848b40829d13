//! Cumulative-logit log-likelihood with analytic first and second derivatives.
//!
//! Internally the model is written `P(D <= j | x) = σ(θ_j − η)` with
//! `η = b·x` and `θ_1 < θ_2`. The exported intercepts are `a_j = −θ_j`, so
//! `P(D = High) = σ(a_2 + η)` and `P(D >= Moderate) = σ(a_1 + η)`.
//!
//! Parameter vectors are laid out as `[b_1, …, b_p, θ_1, θ_2]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::item::DifficultyLevel;

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(z)` without underflow for large negative `z`.
fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// One observation's log-probability and its derivatives with respect to
/// the upper cut `u = θ_k − η` and lower cut `l = θ_{k−1} − η`.
struct Term {
    logp: f64,
    /// f(u)/p and f(l)/p where f = σ' (zero when the cut is infinite).
    du: f64,
    dl: f64,
    /// σ''(u)/p and σ''(l)/p.
    ddu: f64,
    ddl: f64,
}

fn density(z: f64) -> (f64, f64) {
    let s = sigmoid(z);
    let c = sigmoid(-z);
    let f = s * c;
    (f, f * (c - s))
}

fn term(level: DifficultyLevel, eta: f64, theta1: f64, theta2: f64) -> Term {
    match level {
        DifficultyLevel::Low => {
            // f/p and σ''/p in closed form, exact even when p underflows.
            let u = theta1 - eta;
            let (s, c) = (sigmoid(u), sigmoid(-u));
            Term {
                logp: log_sigmoid(u),
                du: c,
                dl: 0.0,
                ddu: c * (c - s),
                ddl: 0.0,
            }
        }
        DifficultyLevel::Moderate => {
            let u = theta2 - eta;
            let l = theta1 - eta;
            // Pick the difference with less cancellation.
            let p = if l > 0.0 {
                sigmoid(-l) - sigmoid(-u)
            } else {
                sigmoid(u) - sigmoid(l)
            };
            let (fu, gu) = density(u);
            let (fl, gl) = density(l);
            Term {
                logp: p.ln(),
                du: fu / p,
                dl: fl / p,
                ddu: gu / p,
                ddl: gl / p,
            }
        }
        DifficultyLevel::High => {
            let l = theta2 - eta;
            let (s, c) = (sigmoid(l), sigmoid(-l));
            Term {
                logp: log_sigmoid(-l),
                du: 0.0,
                dl: s,
                ddu: 0.0,
                ddl: s * (c - s),
            }
        }
    }
}

fn check_dims(params: &[f64], x: &DMatrix<f64>, y: &[DifficultyLevel]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "design has {} rows but {} outcomes",
            x.nrows(),
            y.len()
        )));
    }
    if params.len() != x.ncols() + 2 {
        return Err(Error::Dimension(format!(
            "expected {} parameters for {} columns, got {}",
            x.ncols() + 2,
            x.ncols(),
            params.len()
        )));
    }
    Ok(())
}

fn linear_predictor(params: &[f64], x: &DMatrix<f64>, row: usize) -> f64 {
    (0..x.ncols()).map(|c| params[c] * x[(row, c)]).sum()
}

/// Log-likelihood at internal parameters `[b…, θ1, θ2]`.
pub(crate) fn loglik_internal(params: &[f64], x: &DMatrix<f64>, y: &[DifficultyLevel]) -> f64 {
    let p = x.ncols();
    let (t1, t2) = (params[p], params[p + 1]);
    (0..x.nrows())
        .map(|r| term(y[r], linear_predictor(params, x, r), t1, t2).logp)
        .sum()
}

/// Log-likelihood, gradient and Hessian at internal parameters.
pub(crate) fn derivatives_internal(
    params: &[f64],
    x: &DMatrix<f64>,
    y: &[DifficultyLevel],
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let p = x.ncols();
    let dim = p + 2;
    let (t1, t2) = (params[p], params[p + 1]);
    let mut ll = 0.0;
    let mut grad = DVector::zeros(dim);
    let mut hess = DMatrix::zeros(dim, dim);
    for r in 0..x.nrows() {
        let level = y[r];
        let t = term(level, linear_predictor(params, x, r), t1, t2);
        ll += t.logp;

        // Indices of the thresholds bounding this category, if finite.
        let (upper, lower) = match level {
            DifficultyLevel::Low => (Some(p), None),
            DifficultyLevel::Moderate => (Some(p + 1), Some(p)),
            DifficultyLevel::High => (None, Some(p + 1)),
        };
        let diff = t.du - t.dl;
        // d²logp/dη² and the mixed η-threshold terms.
        let h_eta = (t.ddu - t.ddl) - diff * diff;
        let h_eta_u = -t.ddu + t.du * diff;
        let h_eta_l = t.ddl - t.dl * diff;

        for c in 0..p {
            let xc = x[(r, c)];
            grad[c] -= xc * diff;
            for c2 in 0..=c {
                hess[(c, c2)] += xc * x[(r, c2)] * h_eta;
            }
            if let Some(u) = upper {
                hess[(u, c)] += xc * h_eta_u;
            }
            if let Some(l) = lower {
                hess[(l, c)] += xc * h_eta_l;
            }
        }
        if let Some(u) = upper {
            grad[u] += t.du;
            hess[(u, u)] += t.ddu - t.du * t.du;
        }
        if let Some(l) = lower {
            grad[l] -= t.dl;
            hess[(l, l)] += -t.ddl - t.dl * t.dl;
        }
        if let (Some(u), Some(l)) = (upper, lower) {
            hess[(u, l)] += t.du * t.dl;
        }
    }
    // Mirror the accumulated lower triangle.
    for i in 0..dim {
        for j in (i + 1)..dim {
            hess[(i, j)] = hess[(j, i)];
        }
    }
    (ll, grad, hess)
}

fn internal_params(a1: f64, a2: f64, b: &[f64]) -> Result<Vec<f64>> {
    if !(a1 > a2) {
        return Err(Error::ThresholdOrdering { a1, a2 });
    }
    let mut params = b.to_vec();
    params.push(-a1);
    params.push(-a2);
    Ok(params)
}

/// Sum over items of `ln P(D = d_i | x_i)` in the exported `(a1, a2, b)` form.
pub fn log_likelihood(a1: f64, a2: f64, b: &[f64], design: &DMatrix<f64>, outcomes: &[DifficultyLevel]) -> Result<f64> {
    let params = internal_params(a1, a2, b)?;
    check_dims(&params, design, outcomes)?;
    Ok(loglik_internal(&params, design, outcomes))
}

/// Log-likelihood, gradient and Hessian with respect to `[b…, a1, a2]`.
pub fn log_likelihood_derivatives(
    a1: f64,
    a2: f64,
    b: &[f64],
    design: &DMatrix<f64>,
    outcomes: &[DifficultyLevel],
) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
    let params = internal_params(a1, a2, b)?;
    check_dims(&params, design, outcomes)?;
    let (ll, mut g, mut h) = derivatives_internal(&params, design, outcomes);
    flip_threshold_signs(&mut g, &mut h);
    Ok((ll, g, h))
}

/// Converts gradient/Hessian (or covariance) between the θ and a = −θ
/// parameterizations; the map is its own inverse.
pub(crate) fn flip_threshold_signs(g: &mut DVector<f64>, h: &mut DMatrix<f64>) {
    let dim = g.len();
    for i in (dim - 2)..dim {
        g[i] = -g[i];
        for j in 0..dim {
            h[(i, j)] = -h[(i, j)];
            h[(j, i)] = -h[(j, i)];
        }
    }
}

pub(crate) fn flip_covariance(v: &mut DMatrix<f64>) {
    let dim = v.nrows();
    for i in (dim - 2)..dim {
        for j in 0..dim {
            v[(i, j)] = -v[(i, j)];
            v[(j, i)] = -v[(j, i)];
        }
    }
}
