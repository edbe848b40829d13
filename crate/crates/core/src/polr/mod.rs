//! Proportional-odds (cumulative-logit) regression for the three-level
//! difficulty outcome.
//!
//! A fitted model exposes two intercepts with `a1 > a2` and one slope per
//! variable. With `η = Σ b_v · code_v`:
//!
//! ```text
//! P(High)     = σ(a2 + η)
//! P(Moderate) = σ(a1 + η) − σ(a2 + η)
//! P(Low)      = 1 − σ(a1 + η)
//! ```

mod criteria;
mod fit;
mod likelihood;
mod model_json;
mod wald;

pub use criteria::{criteria, null_loglik, KConvention, ModelCriteria};
pub use fit::{fit, fit_design, DesignFit, FitOptions};
pub use likelihood::{log_likelihood, log_likelihood_derivatives, sigmoid};
pub use model_json::{deserialize_model, serialize_model, MODEL_SCHEMA};
pub use wald::{coefficient_table, WaldRow};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::item::{validate_coding, DifficultyLevel, ItemCoding, Predictor};

/// Class probabilities for one item.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedProbabilities {
    pub p_low: f64,
    pub p_moderate: f64,
    pub p_high: f64,
}

impl PredictedProbabilities {
    /// Probabilities at linear predictor `eta`.
    pub fn at(a1: f64, a2: f64, eta: f64) -> Self {
        let p_high = sigmoid(a2 + eta);
        let p_ge_moderate = sigmoid(a1 + eta);
        PredictedProbabilities {
            p_low: sigmoid(-(a1 + eta)),
            p_moderate: (p_ge_moderate - p_high).max(0.0),
            p_high,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p_low, self.p_moderate, self.p_high]
    }

    pub fn get(&self, level: DifficultyLevel) -> f64 {
        self.as_array()[level.index()]
    }

    /// Most probable level; on an exact tie the lower level wins.
    pub fn argmax(&self) -> DifficultyLevel {
        let p = self.as_array();
        let mut best = 0;
        for k in 1..3 {
            if p[k] > p[best] {
                best = k;
            }
        }
        DifficultyLevel::ALL[best]
    }
}

/// A proportional-odds model with exported intercepts `a1 > a2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    pub variables: Vec<Predictor>,
    /// One slope per entry of `variables`.
    pub slopes: Vec<f64>,
    pub a1: f64,
    pub a2: f64,
    pub n_train: usize,
    pub loglik: f64,
    pub converged: bool,
    pub criteria: ModelCriteria,
    /// Covariance of `[slopes…, a1, a2]` (inverse observed information).
    /// Not part of the model file; `None` after loading from JSON.
    pub vcov: Option<DMatrix<f64>>,
    /// Newton iterations used; zero for models built from fixed coefficients.
    pub iterations: usize,
    /// Max-norm of the score at the reported estimate; `None` unless fitted.
    pub gradient_max: Option<f64>,
}

impl FittedModel {
    /// A model with fixed, externally supplied coefficients and no training
    /// metadata.
    pub fn from_coefficients(variables: Vec<Predictor>, slopes: Vec<f64>, a1: f64, a2: f64) -> Result<Self> {
        if variables.len() != slopes.len() {
            return Err(Error::Dimension(format!(
                "{} variables but {} slopes",
                variables.len(),
                slopes.len()
            )));
        }
        if !(a1 > a2) {
            return Err(Error::ThresholdOrdering { a1, a2 });
        }
        if slopes.iter().chain([&a1, &a2]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(FittedModel {
            variables,
            slopes,
            a1,
            a2,
            n_train: 0,
            loglik: 0.0,
            converged: false,
            criteria: ModelCriteria {
                deviance: 0.0,
                aic: 0.0,
                bic: 0.0,
                mcfadden: 0.0,
                k_convention: KConvention::AllParams,
            },
            vcov: None,
            iterations: 0,
            gradient_max: None,
        })
    }

    /// The ripple-carry worked model: six predictors with the published
    /// rounded estimates and intercepts.
    pub fn published_six_variable() -> Self {
        use Predictor::*;
        FittedModel::from_coefficients(
            vec![T2, C2, C3, S1, S4, S6],
            vec![0.28, 0.54, 0.47, 0.51, 0.23, -0.48],
            -3.2,
            -5.8,
        )
        .expect("published coefficients are ordered")
    }

    pub fn slope(&self, var: Predictor) -> Option<f64> {
        self.variables.iter().position(|v| *v == var).map(|i| self.slopes[i])
    }

    /// Linear predictor from codes listed in the order of `self.variables`.
    pub fn eta_from_codes(&self, codes: &[i64]) -> f64 {
        self.slopes.iter().zip(codes).map(|(b, c)| b * *c as f64).sum()
    }

    pub fn eta(&self, item: &ItemCoding) -> f64 {
        self.slopes
            .iter()
            .zip(&self.variables)
            .map(|(b, v)| b * item.get(*v) as f64)
            .sum()
    }

    pub fn probs_at_eta(&self, eta: f64) -> PredictedProbabilities {
        PredictedProbabilities::at(self.a1, self.a2, eta)
    }

    /// Class probabilities for a fully coded item.
    pub fn predict_probs(&self, item: &ItemCoding) -> Result<PredictedProbabilities> {
        let violations = validate_coding(item);
        if !violations.is_empty() {
            return Err(Error::Data(format!(
                "item `{}`: {}",
                item.item_id,
                violations.join("; ")
            )));
        }
        Ok(self.probs_at_eta(self.eta(item)))
    }

    pub fn classify(&self, item: &ItemCoding) -> Result<DifficultyLevel> {
        Ok(self.predict_probs(item)?.argmax())
    }

    /// Number of free parameters under `convention`.
    pub fn parameter_count(&self, convention: KConvention) -> usize {
        convention.parameter_count(self.variables.len())
    }
}

/// Class probabilities for a fully coded item (free-function form).
pub fn predict_probs(model: &FittedModel, item: &ItemCoding) -> Result<PredictedProbabilities> {
    model.predict_probs(item)
}

pub fn classify(model: &FittedModel, item: &ItemCoding) -> Result<DifficultyLevel> {
    model.classify(item)
}
