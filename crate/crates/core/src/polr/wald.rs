use serde::{Deserialize, Serialize};

use super::FittedModel;
use crate::assoc::std_normal_cdf;
use crate::error::{Error, Result};

/// One row of the coefficient table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaldRow {
    pub variable: String,
    pub estimate: f64,
    pub odds_ratio: f64,
    pub std_error: f64,
    pub z: f64,
    /// Two-sided normal tail of `z`.
    pub p: f64,
}

impl WaldRow {
    pub fn new(variable: impl Into<String>, estimate: f64, std_error: f64) -> Self {
        let z = estimate / std_error;
        WaldRow {
            variable: variable.into(),
            estimate,
            odds_ratio: estimate.exp(),
            std_error,
            z,
            p: 2.0 * std_normal_cdf(-z.abs()),
        }
    }
}

/// Wald rows for every slope followed by the intercepts `a1` and `a2`.
pub fn coefficient_table(model: &FittedModel) -> Result<Vec<WaldRow>> {
    let vcov = model
        .vcov
        .as_ref()
        .ok_or_else(|| Error::Numerical("model carries no covariance matrix".into()))?;
    let dim = model.variables.len() + 2;
    if vcov.nrows() != dim || vcov.ncols() != dim {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, expected {dim}x{dim}",
            vcov.nrows(),
            vcov.ncols()
        )));
    }
    if vcov.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite covariance entries".into()));
    }
    let names = model
        .variables
        .iter()
        .map(|v| v.name().to_string())
        .chain(["a1".to_string(), "a2".to_string()]);
    let estimates = model.slopes.iter().copied().chain([model.a1, model.a2]);
    names
        .zip(estimates)
        .enumerate()
        .map(|(i, (name, est))| {
            let var = vcov[(i, i)];
            if !(var > 0.0) {
                return Err(Error::Numerical(format!("nonpositive variance {var} for {name}")));
            }
            Ok(WaldRow::new(name, est, var.sqrt()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::Predictor;
    use nalgebra::DMatrix;

    #[test]
    fn odds_ratios() {
        assert!((WaldRow::new("T2", 0.28, 0.07).odds_ratio - 1.323_129_812_337_437).abs() < 1e-12);
        assert!((WaldRow::new("S6", -0.48, 0.16).odds_ratio - 0.618_783_391_806_141).abs() < 1e-12);
    }

    #[test]
    fn z_and_p() {
        let row = WaldRow::new("T2", 0.28, 0.07);
        assert!((row.z - 4.0).abs() < 1e-9);
        // 2·(1 − Φ(4)).
        assert!((row.p - 6.334_248_366_623_984e-5).abs() < 1e-15);
    }

    #[test]
    fn table_from_covariance() {
        let mut m = FittedModel::from_coefficients(vec![Predictor::T2], vec![0.28], -3.2, -5.8).unwrap();
        assert!(coefficient_table(&m).is_err());
        m.vcov = Some(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.0049, 0.25, 0.36,
        ])));
        let rows = coefficient_table(&m).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].variable, "a1");
        assert!((rows[2].std_error - 0.6).abs() < 1e-15);
        m.vcov.as_mut().unwrap()[(0, 0)] = f64::NAN;
        assert!(coefficient_table(&m).is_err());
    }
}
