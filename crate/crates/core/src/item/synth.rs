//! Seeded synthetic corpora.
//!
//! Predictors are drawn independently from per-variable categorical
//! marginals. When a model is supplied, each item's difficulty is sampled
//! from the model's class probabilities. The generator is ChaCha8
//! (`rand_chacha`) seeded with `seed_from_u64`; every draw is one uniform
//! `f64` consumed in a fixed order (fifteen predictors in canonical order,
//! then the label), so a given seed yields the same corpus on every platform.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, DifficultyLevel, ItemCoding, Predictor};
use crate::error::{Error, Result};
use crate::polr::FittedModel;

/// A categorical distribution over explicit code values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Categorical {
    pub values: Vec<i64>,
    pub probs: Vec<f64>,
}

impl Categorical {
    pub fn new(values: Vec<i64>, probs: Vec<f64>) -> Self {
        Categorical { values, probs }
    }

    fn validate(&self, var: Predictor) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(format!("marginal for {var}: {msg}")));
        if self.values.is_empty() || self.values.len() != self.probs.len() {
            return bad("values and probs must be nonempty and of equal length".into());
        }
        if let Some(p) = self.probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return bad(format!("invalid probability {p}"));
        }
        if !(self.probs.iter().sum::<f64>() > 0.0) {
            return bad("probabilities sum to zero".into());
        }
        if let Some(msg) = self.values.iter().find_map(|v| var.violation(*v)) {
            return bad(msg);
        }
        Ok(())
    }

    fn sample(&self, u: f64) -> i64 {
        let total: f64 = self.probs.iter().sum();
        let target = u * total;
        let mut cum = 0.0;
        for (v, p) in self.values.iter().zip(&self.probs) {
            cum += p;
            if target < cum {
                return *v;
            }
        }
        // u * total can round up to the total.
        *self
            .values
            .iter()
            .zip(&self.probs)
            .rev()
            .find(|(_, p)| **p > 0.0)
            .map(|(v, _)| v)
            .expect("validated nonzero mass")
    }
}

/// Marginal distributions for all fifteen predictors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marginals {
    pub vars: BTreeMap<Predictor, Categorical>,
}

impl Marginals {
    /// Marginals loosely matched to a 300-item engineering corpus: count
    /// means near 2.0 (T1), 0.77 (T2), 4.0 (C1), 5.5 (C2), 3.6 (C3), 3.2 (C5),
    /// 0.4 (S2), 1.0 (S5), 0.96 (S6), 0.88 (S7); ordinal shares as observed.
    pub fn reference() -> Self {
        use Predictor::*;
        let table: [(Predictor, Vec<i64>, Vec<f64>); 15] = [
            (T1, (0..=5).collect(), vec![0.05, 0.30, 0.32, 0.23, 0.08, 0.02]),
            (T2, (0..=2).collect(), vec![0.42, 0.39, 0.19]),
            (T3, (1..=3).collect(), vec![0.28, 0.49, 0.23]),
            (C1, (2..=6).collect(), vec![0.10, 0.20, 0.38, 0.22, 0.10]),
            (
                C2,
                (2..=9).collect(),
                vec![0.05, 0.10, 0.15, 0.20, 0.20, 0.15, 0.10, 0.05],
            ),
            (C3, (1..=7).collect(), vec![0.12, 0.17, 0.21, 0.21, 0.15, 0.09, 0.05]),
            (C4, (1..=7).collect(), vec![0.06, 0.03, 0.04, 0.11, 0.25, 0.04, 0.47]),
            (
                C5,
                (0..=7).collect(),
                vec![0.04, 0.12, 0.20, 0.24, 0.18, 0.12, 0.07, 0.03],
            ),
            (S1, (1..=2).collect(), vec![0.51, 0.49]),
            (S2, (0..=2).collect(), vec![0.66, 0.28, 0.06]),
            (S3, (1..=2).collect(), vec![0.33, 0.67]),
            (S4, (1..=2).collect(), vec![0.52, 0.48]),
            (S5, (0..=4).collect(), vec![0.38, 0.35, 0.17, 0.07, 0.03]),
            (S6, (0..=2).collect(), vec![0.12, 0.80, 0.08]),
            (S7, (0..=3).collect(), vec![0.38, 0.40, 0.18, 0.04]),
        ];
        Marginals {
            vars: table.into_iter().map(|(p, v, w)| (p, Categorical::new(v, w))).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for var in Predictor::ALL {
            match self.vars.get(&var) {
                Some(m) => m.validate(var)?,
                None => return Err(Error::InvalidInput(format!("marginal for {var} is missing"))),
            }
        }
        Ok(())
    }
}

/// Generates `n` items; labels are drawn from `model` when given.
pub fn generate_synthetic(marginals: &Marginals, model: Option<&FittedModel>, n: usize, seed: u64) -> Result<Dataset> {
    marginals.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.to_string().len().max(4);
    let mut items = Vec::with_capacity(n);
    for i in 0..n {
        let mut codes = [0i64; 15];
        for var in Predictor::ALL {
            let u: f64 = rng.random();
            codes[var.index()] = marginals.vars[&var].sample(u);
        }
        let mut item = ItemCoding::new(format!("syn{:0width$}", i + 1), codes);
        if let Some(m) = model {
            let p = m.probs_at_eta(m.eta(&item));
            let u: f64 = rng.random();
            item.difficulty = Some(if u < p.p_low {
                DifficultyLevel::Low
            } else if u < p.p_low + p.p_moderate {
                DifficultyLevel::Moderate
            } else {
                DifficultyLevel::High
            });
        }
        items.push(item);
    }
    Dataset::new(items)
}
