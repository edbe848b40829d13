//! Classification accuracy on labeled items.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::item::{Dataset, DifficultyLevel};
use crate::polr::FittedModel;

/// 3×3 counts; rows are actual levels, columns predicted levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
    pub course: Option<String>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 3]; 3]) -> Self {
        ConfusionMatrix { counts, course: None }
    }

    pub fn with_course(mut self, course: impl Into<String>) -> Self {
        self.course = Some(course.into());
        self
    }

    pub fn record(&mut self, actual: DifficultyLevel, predicted: DifficultyLevel) {
        self.counts[actual.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Actual class counts.
    pub fn row_sums(&self) -> [u64; 3] {
        self.counts.map(|r| r.iter().sum())
    }

    pub fn col_sums(&self) -> [u64; 3] {
        [0, 1, 2].map(|j| self.counts.iter().map(|r| r[j]).sum())
    }

    pub fn correct(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

/// Share of items on the diagonal.
pub fn accuracy(m: &ConfusionMatrix) -> Result<f64> {
    let total = m.total();
    if total == 0 {
        return Err(Error::InvalidInput("accuracy of an empty confusion matrix".into()));
    }
    Ok(m.correct() as f64 / total as f64)
}

/// Tabulates (actual, predicted) pairs over a labeled dataset.
pub fn confusion(model: &FittedModel, data: &Dataset) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::from_counts([[0; 3]; 3]);
    for item in data.items() {
        let actual = item
            .difficulty
            .ok_or_else(|| Error::InvalidInput(format!("item `{}` has no difficulty label", item.item_id)))?;
        m.record(actual, model.classify(item)?);
    }
    Ok(m)
}

/// One confusion matrix per course tag, in order of first appearance.
pub fn confusion_by_course(model: &FittedModel, data: &Dataset) -> Result<Vec<ConfusionMatrix>> {
    data.courses()
        .into_iter()
        .map(|course| {
            let subset = data.filter_course(course.as_deref());
            let mut m = confusion(model, &subset)?;
            m.course = course;
            Ok(m)
        })
        .collect()
}

/// Seeded train/test partition. With `stratify`, each difficulty level (and
/// the unlabeled group) is split separately, giving every level
/// `round(fraction · count)` test items. Both parts keep file order.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64, stratify: bool) -> Result<(Dataset, Dataset)> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::InvalidInput(format!(
            "test fraction must lie in [0, 1], got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Vec<usize>> = if stratify {
        let keys = [
            None,
            Some(DifficultyLevel::Low),
            Some(DifficultyLevel::Moderate),
            Some(DifficultyLevel::High),
        ];
        keys.iter()
            .map(|k| {
                data.items()
                    .iter()
                    .enumerate()
                    .filter(|(_, it)| it.difficulty == *k)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    } else {
        vec![(0..data.len()).collect()]
    };
    let mut in_test = vec![false; data.len()];
    for mut group in groups {
        let take = (test_fraction * group.len() as f64).round() as usize;
        group.shuffle(&mut rng);
        for &i in &group[..take] {
            in_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| in_test[i]);
    Ok((data.subset(&train), data.subset(&test)))
}
