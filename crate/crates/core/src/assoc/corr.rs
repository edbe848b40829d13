//! Pearson, polyserial and polychoric correlation estimators.
//!
//! The latent-normal estimators use the two-step method: thresholds come from
//! the ordinal marginals through Φ⁻¹, then ρ maximizes the conditional
//! likelihood over `[−0.999, 0.999]`.

use serde::{Deserialize, Serialize};

use super::bvn::bvn_rectangle;
use super::chisq::chi_sq_sf;
use super::normal::{std_normal_cdf, std_normal_quantile};
use crate::error::{Error, Result};

/// Bound on |ρ| for the latent-normal estimators.
pub const RHO_BOUND: f64 = 0.999;
const GRID_POINTS: usize = 41;
const RHO_TOL: f64 = 1e-9;
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Pearson,
    Polyserial,
    Polychoric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "p<0.05")]
    P05,
    #[serde(rename = "p<0.01")]
    P01,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            Significance::P01
        } else if p < 0.05 {
            Significance::P05
        } else {
            Significance::None
        }
    }

    /// `*` / `**` suffix for tabular output.
    pub fn stars(self) -> &'static str {
        match self {
            Significance::None => "",
            Significance::P05 => "*",
            Significance::P01 => "**",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub rho: f64,
    pub kind: CorrelationKind,
    pub p_value: f64,
    pub significance: Significance,
    /// True when the estimate sits on the ±0.999 bound.
    pub clamped: bool,
}

impl CorrelationEntry {
    fn new(rho: f64, kind: CorrelationKind, p_value: f64, clamped: bool) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        CorrelationEntry {
            rho,
            kind,
            p_value,
            significance: Significance::from_p(p_value),
            clamped,
        }
    }

    pub(crate) fn diagonal() -> Self {
        CorrelationEntry {
            rho: 1.0,
            kind: CorrelationKind::Pearson,
            p_value: 0.0,
            significance: Significance::None,
            clamped: false,
        }
    }
}

fn nonconstant(values: &[f64], what: &str) -> Result<()> {
    let first = values[0];
    if values.iter().all(|v| *v == first) {
        return Err(Error::InvalidInput(format!("{what} is constant")));
    }
    Ok(())
}

/// Sample Pearson correlation with a Fisher-z p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationEntry> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput("pearson needs at least 3 pairs".into()));
    }
    nonconstant(x, "x")?;
    nonconstant(y, "y")?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let z = r.atanh() * (n - 3.0).sqrt();
    let p = if z.is_nan() {
        1.0
    } else {
        2.0 * std_normal_cdf(-z.abs())
    };
    Ok(CorrelationEntry::new(r, CorrelationKind::Pearson, p, false))
}

/// Maps codes to category indices `0..K` in ascending code order.
fn categorize(codes: &[i64]) -> (Vec<usize>, usize) {
    let mut levels: Vec<i64> = codes.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let idx = codes
        .iter()
        .map(|c| levels.binary_search(c).expect("code present"))
        .collect();
    (idx, levels.len())
}

/// Thresholds `[−∞, τ_1, …, τ_{K−1}, +∞]` from category counts.
fn thresholds(counts: &[usize]) -> Vec<f64> {
    let n: usize = counts.iter().sum();
    let mut out = Vec::with_capacity(counts.len() + 1);
    out.push(f64::NEG_INFINITY);
    let mut cum = 0;
    for c in &counts[..counts.len() - 1] {
        cum += c;
        out.push(std_normal_quantile(cum as f64 / n as f64));
    }
    out.push(f64::INFINITY);
    out
}

/// Maximizes `f` over `[−RHO_BOUND, RHO_BOUND]`: grid scan, golden-section
/// refinement in the best bracket, then a check of both bounds.
/// Returns `(argmax, max, on_bound)`.
fn maximize_rho(f: impl Fn(f64) -> f64) -> (f64, f64, bool) {
    let (lo, hi) = (-RHO_BOUND, RHO_BOUND);
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
    let mut best = 0;
    for i in 1..GRID_POINTS {
        if values[i] > values[best] {
            best = i;
        }
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(GRID_POINTS - 1)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > RHO_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    let (f_lo, f_hi) = (values[0], values[GRID_POINTS - 1]);
    if f_hi > fmid && f_hi >= f_lo {
        (hi, f_hi, true)
    } else if f_lo > fmid {
        (lo, f_lo, true)
    } else {
        (mid, fmid, false)
    }
}

/// Likelihood-ratio p-value against ρ = 0 with one degree of freedom.
fn lr_p_value(ll_hat: f64, ll_zero: f64) -> f64 {
    let stat = (2.0 * (ll_hat - ll_zero)).max(0.0);
    chi_sq_sf(stat, 1)
}

/// Two-step polyserial correlation between a numeric `x` and ordinal codes `y`.
pub fn polyserial(x: &[f64], y: &[i64]) -> Result<CorrelationEntry> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("polyserial needs data".into()));
    }
    nonconstant(x, "numeric variable")?;
    let (cat, k) = categorize(y);
    if k < 2 {
        return Err(Error::InvalidInput("ordinal variable is constant".into()));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    let mut counts = vec![0usize; k];
    for &c in &cat {
        counts[c] += 1;
    }
    let tau = thresholds(&counts);

    let loglik = |rho: f64| -> f64 {
        let s = (1.0 - rho * rho).sqrt();
        z.iter()
            .zip(&cat)
            .map(|(&zi, &c)| {
                let upper = std_normal_cdf((tau[c + 1] - rho * zi) / s);
                let lower = std_normal_cdf((tau[c] - rho * zi) / s);
                (upper - lower).max(LOG_FLOOR).ln()
            })
            .sum()
    };
    let (rho, ll_hat, clamped) = maximize_rho(loglik);
    let p = lr_p_value(ll_hat, loglik(0.0));
    Ok(CorrelationEntry::new(rho, CorrelationKind::Polyserial, p, clamped))
}

/// Polychoric correlation from a contingency table (rows = categories of the
/// first variable, ascending).
pub fn polychoric_table(table: &[Vec<u64>]) -> Result<CorrelationEntry> {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().any(|c| *c > 0)).collect();
    if rows.is_empty() {
        return Err(Error::InvalidInput("empty contingency table".into()));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Dimension("ragged contingency table".into()));
    }
    let live_cols: Vec<usize> = (0..width).filter(|&j| rows.iter().any(|r| r[j] > 0)).collect();
    let cells: Vec<Vec<u64>> = rows.iter().map(|r| live_cols.iter().map(|&j| r[j]).collect()).collect();
    if cells.len() < 2 || live_cols.len() < 2 {
        return Err(Error::InvalidInput(
            "polychoric correlation needs two observed categories per variable".into(),
        ));
    }
    let row_counts: Vec<usize> = cells.iter().map(|r| r.iter().sum::<u64>() as usize).collect();
    let col_counts: Vec<usize> = (0..live_cols.len())
        .map(|j| cells.iter().map(|r| r[j]).sum::<u64>() as usize)
        .collect();
    let a = thresholds(&row_counts);
    let b = thresholds(&col_counts);

    let loglik = |rho: f64| -> f64 {
        let mut ll = 0.0;
        for (i, row) in cells.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mass = bvn_rectangle(a[i], a[i + 1], b[j], b[j + 1], rho).expect("rho is inside the open interval");
                ll += count as f64 * mass.max(LOG_FLOOR).ln();
            }
        }
        ll
    };
    let (rho, ll_hat, clamped) = maximize_rho(loglik);
    let p = lr_p_value(ll_hat, loglik(0.0));
    Ok(CorrelationEntry::new(rho, CorrelationKind::Polychoric, p, clamped))
}

/// Polychoric correlation between two ordinal code vectors.
pub fn polychoric(x: &[i64], y: &[i64]) -> Result<CorrelationEntry> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("empty contingency table".into()));
    }
    let (cx, kx) = categorize(x);
    let (cy, ky) = categorize(y);
    if kx < 2 || ky < 2 {
        return Err(Error::InvalidInput("ordinal variable is constant".into()));
    }
    let mut table = vec![vec![0u64; ky]; kx];
    for (i, j) in cx.into_iter().zip(cy) {
        table[i][j] += 1;
    }
    polychoric_table(&table)
}
