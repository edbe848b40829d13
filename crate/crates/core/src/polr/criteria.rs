use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fit::{fit_design, FitOptions};
use super::likelihood::log_likelihood;
use super::FittedModel;
use crate::error::{Error, Result};
use crate::item::{encode_design, Dataset, DifficultyLevel};

/// Which parameters count toward the AIC/BIC penalty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KConvention {
    /// Slopes plus both intercepts.
    #[default]
    AllParams,
    /// Slopes only.
    SlopesOnly,
}

impl KConvention {
    pub fn parameter_count(self, n_slopes: usize) -> usize {
        match self {
            KConvention::AllParams => n_slopes + 2,
            KConvention::SlopesOnly => n_slopes,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KConvention::AllParams => "all_params",
            KConvention::SlopesOnly => "slopes_only",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCriteria {
    pub deviance: f64,
    pub aic: f64,
    pub bic: f64,
    /// `1 − loglik / loglik_null`.
    pub mcfadden: f64,
    pub k_convention: KConvention,
}

impl ModelCriteria {
    pub fn new(loglik: f64, null_loglik: f64, n_slopes: usize, n: usize, k_convention: KConvention) -> Self {
        let deviance = -2.0 * loglik;
        let k = k_convention.parameter_count(n_slopes) as f64;
        let mcfadden = if null_loglik == 0.0 {
            0.0
        } else {
            1.0 - loglik / null_loglik
        };
        ModelCriteria {
            deviance,
            aic: deviance + 2.0 * k,
            bic: deviance + k * (n as f64).ln(),
            mcfadden,
            k_convention,
        }
    }
}

/// Maximized log-likelihood of the intercepts-only model.
pub fn null_loglik(outcomes: &[DifficultyLevel]) -> Result<f64> {
    let x = DMatrix::zeros(outcomes.len(), 0);
    let null = fit_design(&x, outcomes, &FitOptions::default())
        .map_err(|e| Error::Numerical(format!("null model fit failed: {e}")))?;
    Ok(null.loglik)
}

/// Deviance, AIC, BIC and McFadden pseudo-R² of `model` on `data`, under the
/// model's own parameter-count convention.
pub fn criteria(model: &FittedModel, data: &Dataset) -> Result<ModelCriteria> {
    criteria_with(model, data, model.criteria.k_convention)
}

pub fn criteria_with(model: &FittedModel, data: &Dataset, k_convention: KConvention) -> Result<ModelCriteria> {
    let y = data.outcomes()?;
    let x = encode_design(data, &model.variables);
    let ll = log_likelihood(model.a1, model.a2, &model.slopes, &x, &y)?;
    let ll0 = null_loglik(&y)?;
    Ok(ModelCriteria::new(
        ll,
        ll0,
        model.variables.len(),
        data.len(),
        k_convention,
    ))
}
