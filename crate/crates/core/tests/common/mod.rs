//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use itemgauge::item::ripple_carry_adder_example;
use itemgauge::{Dataset, DifficultyLevel, ItemCoding, Predictor};

use DifficultyLevel::*;
use Predictor::*;

/// Six published slopes, in model order.
pub const PUBLISHED_VARS: [Predictor; 6] = [T2, C2, C3, S1, S4, S6];
pub const PUBLISHED_SLOPES: [f64; 6] = [0.28, 0.54, 0.47, 0.51, 0.23, -0.48];
pub const PUBLISHED_ODDS: [f64; 6] = [1.32, 1.71, 1.59, 1.66, 1.25, 0.61];
pub const PUBLISHED_A1: f64 = -3.2;
pub const PUBLISHED_A2: f64 = -5.8;

/// The three worked items: codes for the six published variables and the
/// printed `(low, moderate, high)` triple.
pub const WORKED_ITEMS: [([i64; 6], [f64; 3]); 3] = [
    ([1, 0, 1, 1, 1, 2], [0.93, 0.05, 0.005]),
    ([1, 3, 4, 1, 2, 2], [0.25, 0.56, 0.17]),
    ([3, 6, 3, 2, 2, 0], [0.02, 0.21, 0.76]),
];

/// Printed model-summary rows: variables, AIC, BIC, deviance.
pub const SUMMARY_ROWS: [(&str, f64, f64, f64); 9] = [
    ("T2,T3,C1", 1029.23, 1040.82, 1023.23),
    ("T2,T3,C1,C2", 953.86, 969.31, 945.86),
    ("T2,C2,C3,C5", 908.05, 923.5, 900.05),
    ("T2,C2,C3,S1,S2", 885.13, 904.44, 875.13),
    ("T2,C2,C3,S1,S2,S4", 890.86, 914.04, 878.86),
    ("T2,C2,C3,S1,S4,S5", 882.46, 905.64, 870.46),
    ("T2,C2,C3,S1,S4,S6", 865.67, 888.85, 853.67),
    ("T2,C2,C3,S2,S4,S5,S6", 871.88, 898.92, 857.88),
    ("T2,C2,C3,S2,S4,S5,S6,S7", 873.84, 904.74, 857.84),
];

/// Printed per-course confusion matrices with their stated accuracies.
pub const CONFUSION_TABLES: [(&str, [[u64; 3]; 3], f64); 3] = [
    ("Digital Systems", [[22, 5, 1], [2, 24, 6], [0, 4, 36]], 0.82),
    ("Digital Communication", [[18, 4, 0], [5, 29, 3], [1, 8, 32]], 0.79),
    ("Design of Algorithms", [[24, 6, 0], [4, 31, 5], [0, 5, 25]], 0.80),
];
pub const STATED_MEAN_ACCURACY: f64 = 0.81;

/// The worked example with some codes overridden.
pub fn item_with(id: &str, overrides: &[(Predictor, i64)]) -> ItemCoding {
    let mut item = ripple_carry_adder_example();
    item.item_id = id.to_string();
    for &(var, value) in overrides {
        item.set(var, value);
    }
    item
}

pub fn worked_item(index: usize) -> ItemCoding {
    let (codes, _) = WORKED_ITEMS[index];
    let overrides: Vec<(Predictor, i64)> = PUBLISHED_VARS.iter().copied().zip(codes).collect();
    item_with(&format!("worked{}", index + 1), &overrides)
}

/// Six items, one count predictor (C2), not separable.
pub fn six_item_fixture() -> Dataset {
    let rows = [(0, Low), (1, Moderate), (2, Low), (3, High), (4, Moderate), (5, High)];
    let items = rows
        .iter()
        .enumerate()
        .map(|(i, &(x, d))| item_with(&format!("s{i}"), &[(C2, x)]).with_difficulty(d))
        .collect();
    Dataset::new(items).unwrap()
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Class probabilities written directly from the cumulative-logit definition.
pub fn oracle_probs(a1: f64, a2: f64, eta: f64) -> [f64; 3] {
    let high = logistic(a2 + eta);
    let moderate = logistic(a1 + eta) - high;
    [1.0 - moderate - high, moderate, high]
}

pub fn oracle_loglik(a1: f64, a2: f64, b: f64, xs: &[f64], ys: &[DifficultyLevel]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| oracle_probs(a1, a2, b * x)[y.index()].ln())
        .sum()
}

/// Exhaustive grid maximum of the one-predictor log-likelihood. A 0.05 pass
/// over `[-4, 4]³` locates the basin; a 0.01 pass within ±0.25 of it refines.
/// Strict concavity makes the coarse basin contain the fine optimum.
pub fn grid_oracle(xs: &[f64], ys: &[DifficultyLevel]) -> (f64, f64, f64) {
    let search = |centre: (f64, f64, f64), half: f64, step: f64| {
        let n = (2.0 * half / step).round() as i64;
        let mut best = (f64::NEG_INFINITY, centre);
        for i in 0..=n {
            let b = centre.0 - half + step * i as f64;
            for j in 0..=n {
                let a1 = centre.1 - half + step * j as f64;
                for k in 0..=n {
                    let a2 = centre.2 - half + step * k as f64;
                    if a2 >= a1 {
                        continue;
                    }
                    let ll = oracle_loglik(a1, a2, b, xs, ys);
                    if ll > best.0 {
                        best = (ll, (b, a1, a2));
                    }
                }
            }
        }
        best.1
    };
    let coarse = search((0.0, 0.0, 0.0), 4.0, 0.05);
    search(coarse, 0.25, 0.01)
}

/// Upper tail of χ² by the closed forms for integer degrees of freedom.
pub fn chi_sq_tail_closed_form(x: f64, df: u32) -> f64 {
    if df.is_multiple_of(2) {
        let half = x / 2.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..(df / 2) {
            term *= half / j as f64;
            sum += term;
        }
        (-half).exp() * sum
    } else {
        let r = x.sqrt();
        let mut sum = 0.0;
        let mut term = r * (2.0 / std::f64::consts::PI).sqrt() * (-x / 2.0).exp();
        for j in 1..=((df - 1) / 2) {
            if j > 1 {
                term *= x / (2 * j - 1) as f64;
            }
            sum += term;
        }
        2.0 * normal_upper(r) + sum
    }
}

/// Upper normal tail by composite Simpson integration of the density on
/// [z, z + 16]; the neglected remainder is below 1e-50 for z ≥ −8.
pub fn normal_upper(z: f64) -> f64 {
    let n = 20_000;
    let h = 16.0 / n as f64;
    let f = |t: f64| (-0.5 * t * t).exp();
    let mut acc = f(z) + f(z + 16.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(z + h * i as f64);
    }
    acc * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
}

/// Orthant probability P(X ≤ h, Y ≤ k) by Plackett's identity
/// ∂Φ₂/∂ρ = φ₂(h, k; ρ), integrated from zero correlation with the
/// substitution ρ = sin θ and composite Simpson's rule.
pub fn plackett_bvn(h: f64, k: f64, rho: f64) -> f64 {
    let phi = |x: f64| 1.0 - normal_upper(x);
    let theta_end = rho.asin();
    let n = 2000;
    let step = theta_end / n as f64;
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let q = (h * h - 2.0 * s * h * k + k * k) / (2.0 * c * c);
        (-q).exp() / (2.0 * std::f64::consts::PI)
    };
    let mut acc = f(0.0) + f(theta_end);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(step * i as f64);
    }
    phi(h) * phi(k) + acc * step / 3.0
}
