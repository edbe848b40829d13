use serde::{Deserialize, Serialize};

use super::{Dataset, DifficultyLevel, Predictor, VarKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub variable: Predictor,
    pub mean: f64,
    /// Sample standard deviation (divisor n - 1); zero for a single item.
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryShare {
    pub code: i64,
    pub label: String,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub variable: String,
    pub categories: Vec<CategoryShare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveReport {
    pub n: usize,
    pub numeric: Vec<NumericSummary>,
    pub ordinal: Vec<FrequencyTable>,
    /// Present when the dataset is labeled.
    pub difficulty: Option<FrequencyTable>,
}

/// Mean and sample standard deviation of a slice.
pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn shares(codes: impl Iterator<Item = i64>, domain: &[(i64, String)], n: usize) -> Vec<CategoryShare> {
    let mut counts = vec![0usize; domain.len()];
    for c in codes {
        if let Some(pos) = domain.iter().position(|(d, _)| *d == c) {
            counts[pos] += 1;
        }
    }
    domain
        .iter()
        .zip(counts)
        .map(|((code, label), k)| CategoryShare {
            code: *code,
            label: label.clone(),
            share: k as f64 / n as f64,
        })
        .collect()
}

/// Summary statistics per predictor: mean/sd for counts, category shares for
/// ordinal codes and for the difficulty label.
pub fn describe(data: &Dataset) -> Result<DescriptiveReport> {
    if data.is_empty() {
        return Err(Error::InvalidInput("cannot describe an empty dataset".into()));
    }
    let n = data.len();
    let mut numeric = Vec::new();
    let mut ordinal = Vec::new();
    for var in Predictor::ALL {
        match var.kind() {
            VarKind::Count => {
                let col: Vec<f64> = data.column(var).into_iter().map(|v| v as f64).collect();
                let (mean, sd) = mean_sd(&col);
                numeric.push(NumericSummary {
                    variable: var,
                    mean,
                    sd,
                });
            }
            VarKind::Ordinal { max } => {
                let domain: Vec<(i64, String)> = (1..=max)
                    .map(|c| (c, var.labels()[(c - 1) as usize].to_string()))
                    .collect();
                ordinal.push(FrequencyTable {
                    variable: var.name().to_string(),
                    categories: shares(data.column(var).into_iter(), &domain, n),
                });
            }
        }
    }
    let difficulty = data.labeled().then(|| {
        let domain: Vec<(i64, String)> = DifficultyLevel::ALL
            .iter()
            .map(|l| (l.code(), l.name().to_string()))
            .collect();
        FrequencyTable {
            variable: "D".into(),
            categories: shares(
                data.items().iter().filter_map(|i| i.difficulty.map(|d| d.code())),
                &domain,
                n,
            ),
        }
    });
    Ok(DescriptiveReport {
        n,
        numeric,
        ordinal,
        difficulty,
    })
}
