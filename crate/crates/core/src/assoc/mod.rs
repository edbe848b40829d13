//! Heterogeneous correlation analysis and the scalar probability functions it
//! relies on.

mod bvn;
mod chisq;
mod corr;
mod normal;

pub use bvn::{bvn_cdf, bvn_rectangle};
pub use chisq::{chi_sq_sf, gamma_q};
pub use corr::{
    pearson, polychoric, polychoric_table, polyserial, CorrelationEntry, CorrelationKind, Significance, RHO_BOUND,
};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::item::{Dataset, Predictor};

/// Minimum number of items for a correlation matrix.
pub const MIN_ITEMS: usize = 10;

/// One matrix cell: an estimate, or the reason its estimator failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Cell {
    Estimated(CorrelationEntry),
    Failed { kind: CorrelationKind, reason: String },
}

impl Cell {
    pub fn entry(&self) -> Option<&CorrelationEntry> {
        match self {
            Cell::Estimated(e) => Some(e),
            Cell::Failed { .. } => None,
        }
    }
}

/// Square symmetric matrix over the fifteen predictors followed by `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
}

impl CorrelationMatrix {
    pub fn get(&self, row: &str, col: &str) -> Option<&Cell> {
        let i = self.variables.iter().position(|v| v == row)?;
        let j = self.variables.iter().position(|v| v == col)?;
        Some(&self.cells[i][j])
    }
}

enum Column {
    Numeric(Vec<f64>),
    Ordinal(Vec<i64>),
}

fn estimate(a: &Column, b: &Column) -> (CorrelationKind, Result<CorrelationEntry>) {
    match (a, b) {
        (Column::Numeric(x), Column::Numeric(y)) => (CorrelationKind::Pearson, pearson(x, y)),
        (Column::Numeric(x), Column::Ordinal(y)) | (Column::Ordinal(y), Column::Numeric(x)) => {
            (CorrelationKind::Polyserial, polyserial(x, y))
        }
        (Column::Ordinal(x), Column::Ordinal(y)) => (CorrelationKind::Polychoric, polychoric(x, y)),
    }
}

/// Correlations among all predictors and the difficulty label, dispatching on
/// variable type: Pearson for count–count, polyserial for count–ordinal and
/// polychoric for ordinal–ordinal (the label counts as ordinal).
pub fn correlation_matrix(data: &Dataset) -> Result<CorrelationMatrix> {
    if !data.labeled() {
        return Err(Error::InvalidInput(
            "correlation matrix requires a labeled dataset".into(),
        ));
    }
    if data.len() < MIN_ITEMS {
        return Err(Error::InvalidInput(format!(
            "correlation matrix requires at least {MIN_ITEMS} items, got {}",
            data.len()
        )));
    }
    let mut variables: Vec<String> = Predictor::ALL.iter().map(|p| p.name().to_string()).collect();
    variables.push("D".into());
    let mut columns: Vec<Column> = Predictor::ALL
        .iter()
        .map(|&p| {
            let col = data.column(p);
            if p.is_ordinal() {
                Column::Ordinal(col)
            } else {
                Column::Numeric(col.into_iter().map(|v| v as f64).collect())
            }
        })
        .collect();
    columns.push(Column::Ordinal(
        data.outcomes()?.into_iter().map(|d| d.code()).collect(),
    ));

    let m = columns.len();
    let mut cells = vec![vec![Cell::Estimated(CorrelationEntry::diagonal()); m]; m];
    for i in 0..m {
        for j in 0..i {
            let (kind, result) = estimate(&columns[i], &columns[j]);
            let cell = match result {
                Ok(e) => Cell::Estimated(e),
                Err(e) => Cell::Failed {
                    kind,
                    reason: e.to_string(),
                },
            };
            cells[j][i] = cell.clone();
            cells[i][j] = cell;
        }
    }
    Ok(CorrelationMatrix { variables, cells })
}
