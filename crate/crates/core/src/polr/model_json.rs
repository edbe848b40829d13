use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{FittedModel, KConvention, ModelCriteria};
use crate::error::{Error, Result};
use crate::item::{DifficultyLevel, Predictor};
use crate::json::to_canonical_json;

pub const MODEL_SCHEMA: &str = "itemgauge-model/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Intercepts {
    a1: f64,
    a2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema: String,
    variables: Vec<String>,
    coefficients: IndexMap<String, f64>,
    intercepts: Intercepts,
    levels: Vec<String>,
    n_train: u64,
    loglik: f64,
    deviance: f64,
    aic: f64,
    bic: f64,
    mcfadden: f64,
    k_convention: KConvention,
    converged: bool,
}

/// Canonical model JSON: fixed key order, 17 significant digits per number.
pub fn serialize_model(model: &FittedModel) -> String {
    let file = ModelFile {
        schema: MODEL_SCHEMA.to_string(),
        variables: model.variables.iter().map(|v| v.name().to_string()).collect(),
        coefficients: model
            .variables
            .iter()
            .zip(&model.slopes)
            .map(|(v, b)| (v.name().to_string(), *b))
            .collect(),
        intercepts: Intercepts {
            a1: model.a1,
            a2: model.a2,
        },
        levels: DifficultyLevel::ALL.iter().map(|l| l.name().to_string()).collect(),
        n_train: model.n_train as u64,
        loglik: model.loglik,
        deviance: model.criteria.deviance,
        aic: model.criteria.aic,
        bic: model.criteria.bic,
        mcfadden: model.criteria.mcfadden,
        k_convention: model.criteria.k_convention,
        converged: model.converged,
    };
    to_canonical_json(&file)
}

/// Loads a model file, enforcing the schema and `a1 > a2`.
pub fn deserialize_model(text: &str) -> Result<FittedModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.schema != MODEL_SCHEMA {
        return Err(Error::Schema(format!(
            "unsupported schema `{}`, expected `{MODEL_SCHEMA}`",
            file.schema
        )));
    }
    let expected_levels: Vec<&str> = DifficultyLevel::ALL.iter().map(|l| l.name()).collect();
    if file.levels != expected_levels {
        return Err(Error::Schema(format!(
            "levels must be {:?}, found {:?}",
            expected_levels, file.levels
        )));
    }
    let variables = file
        .variables
        .iter()
        .map(|s| s.parse::<Predictor>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Schema(e.to_string()))?;
    let mut unique = variables.clone();
    unique.sort();
    unique.dedup();
    if unique.len() != variables.len() {
        return Err(Error::Schema("variables listed more than once".into()));
    }
    if file.coefficients.len() != variables.len() {
        return Err(Error::Schema(format!(
            "{} coefficients for {} variables",
            file.coefficients.len(),
            variables.len()
        )));
    }
    let slopes = variables
        .iter()
        .map(|v| {
            file.coefficients
                .get(v.name())
                .copied()
                .ok_or_else(|| Error::Schema(format!("missing coefficient for {v}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let Intercepts { a1, a2 } = file.intercepts;
    if !(a1 > a2) {
        return Err(Error::ThresholdOrdering { a1, a2 });
    }
    Ok(FittedModel {
        variables,
        slopes,
        a1,
        a2,
        n_train: file.n_train as usize,
        loglik: file.loglik,
        converged: file.converged,
        criteria: ModelCriteria {
            deviance: file.deviance,
            aic: file.aic,
            bic: file.bic,
            mcfadden: file.mcfadden,
            k_convention: file.k_convention,
        },
        vcov: None,
        iterations: 0,
        gradient_max: None,
    })
}
