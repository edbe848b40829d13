//! Coded assessment items.
//!
//! Every item is described by fifteen learner-independent predictors in three
//! families: task (`T1`..`T3`), content (`C1`..`C5`) and stimulus (`S1`..`S7`).
//! Counts are nonnegative integers; ordinal predictors carry small integer
//! codes with fixed labels.

mod csv_io;
mod describe;
mod synth;

pub use csv_io::{parse_dataset, serialize_dataset, CSV_HEADER};
pub use describe::{describe, CategoryShare, DescriptiveReport, FrequencyTable, NumericSummary};
pub use synth::{generate_synthetic, Categorical, Marginals};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-level ordered difficulty outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DifficultyLevel {
    Low = 1,
    Moderate = 2,
    High = 3,
}

impl DifficultyLevel {
    pub const ALL: [DifficultyLevel; 3] = [DifficultyLevel::Low, DifficultyLevel::Moderate, DifficultyLevel::High];

    /// Zero-based position (Low = 0).
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn code(self) -> i64 {
        self as i64
    }

    pub fn name(self) -> &'static str {
        match self {
            DifficultyLevel::Low => "Low",
            DifficultyLevel::Moderate => "Moderate",
            DifficultyLevel::High => "High",
        }
    }
}

impl fmt::Display for DifficultyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DifficultyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Low" | "1" => Ok(DifficultyLevel::Low),
            "Moderate" | "2" => Ok(DifficultyLevel::Moderate),
            "High" | "3" => Ok(DifficultyLevel::High),
            other => Err(Error::Data(format!("unknown difficulty level `{other}`"))),
        }
    }
}

impl Serialize for DifficultyLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DifficultyLevel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Code(i64),
        }
        let text = match Repr::deserialize(d)? {
            Repr::Name(s) => s,
            Repr::Code(c) => c.to_string(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether a predictor is a count or an ordinal code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Count,
    /// Ordinal with codes `1..=max`.
    Ordinal {
        max: i64,
    },
}

/// The fifteen item predictors, in canonical column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predictor {
    T1,
    T2,
    T3,
    C1,
    C2,
    C3,
    C4,
    C5,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl Predictor {
    pub const ALL: [Predictor; 15] = [
        Predictor::T1,
        Predictor::T2,
        Predictor::T3,
        Predictor::C1,
        Predictor::C2,
        Predictor::C3,
        Predictor::C4,
        Predictor::C5,
        Predictor::S1,
        Predictor::S2,
        Predictor::S3,
        Predictor::S4,
        Predictor::S5,
        Predictor::S6,
        Predictor::S7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        use Predictor::*;
        match self {
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            C1 => "C1",
            C2 => "C2",
            C3 => "C3",
            C4 => "C4",
            C5 => "C5",
            S1 => "S1",
            S2 => "S2",
            S3 => "S3",
            S4 => "S4",
            S5 => "S5",
            S6 => "S6",
            S7 => "S7",
        }
    }

    pub fn description(self) -> &'static str {
        use Predictor::*;
        match self {
            T1 => "Number of unknowns",
            T2 => "Number of conditions",
            T3 => "Numerical complexity",
            C1 => "Number of facts",
            C2 => "Number of concepts",
            C3 => "Number of procedures",
            C4 => "Combination of knowledge elements",
            C5 => "Number of prerequisite course outcomes",
            S1 => "Item presentation",
            S2 => "Number of hints",
            S3 => "Independency of unknowns",
            S4 => "Usage of technical notations",
            S5 => "Number of inferences",
            S6 => "Number of resources",
            S7 => "Number of assumptions",
        }
    }

    pub fn kind(self) -> VarKind {
        use Predictor::*;
        match self {
            T3 => VarKind::Ordinal { max: 3 },
            C4 => VarKind::Ordinal { max: 7 },
            S1 | S3 | S4 => VarKind::Ordinal { max: 2 },
            _ => VarKind::Count,
        }
    }

    pub fn is_ordinal(self) -> bool {
        matches!(self.kind(), VarKind::Ordinal { .. })
    }

    /// Human labels for ordinal codes, indexed by `code - 1`. Empty for counts.
    pub fn labels(self) -> &'static [&'static str] {
        use Predictor::*;
        match self {
            T3 => &["Simple", "Moderate", "Complex"],
            C4 => &["F", "P", "C", "F-P", "F-C", "C-P", "F-C-P"],
            S1 => &["Simple", "Complex"],
            S3 => &["Not dependent", "Dependent"],
            S4 => &["Technical notations present", "Technical notations absent"],
            _ => &[],
        }
    }

    /// Describes why `value` is not a legal code for this predictor, if it isn't.
    pub fn violation(self, value: i64) -> Option<String> {
        match self.kind() {
            VarKind::Count if value < 0 => Some(format!("{} must be a nonnegative integer", self.name())),
            VarKind::Count => None,
            VarKind::Ordinal { max } if !(1..=max).contains(&value) => {
                let domain: Vec<String> = (1..=max).map(|c| c.to_string()).collect();
                Some(format!("{} out of domain {{{}}}", self.name(), domain.join(",")))
            }
            VarKind::Ordinal { .. } => None,
        }
    }

    /// Parses a comma-separated predictor list such as `T2,C2,C3`.
    pub fn parse_list(text: &str) -> Result<Vec<Predictor>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let vars = text
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Predictor>>>()?;
        let mut seen = HashSet::new();
        for v in &vars {
            if !seen.insert(*v) {
                return Err(Error::InvalidInput(format!("variable {v} listed twice")));
            }
        }
        Ok(vars)
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Predictor::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable name `{s}`")))
    }
}

/// One item's fifteen predictor codes plus its optional difficulty label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ItemRecord", try_from = "ItemRecord")]
pub struct ItemCoding {
    pub item_id: String,
    codes: [i64; 15],
    pub difficulty: Option<DifficultyLevel>,
    pub course: Option<String>,
}

impl ItemCoding {
    /// Builds an item from codes in canonical predictor order. Codes are not
    /// validated here; see [`validate_coding`].
    pub fn new(item_id: impl Into<String>, codes: [i64; 15]) -> Self {
        ItemCoding {
            item_id: item_id.into(),
            codes,
            difficulty: None,
            course: None,
        }
    }

    pub fn with_difficulty(mut self, level: DifficultyLevel) -> Self {
        self.difficulty = Some(level);
        self
    }

    pub fn with_course(mut self, course: impl Into<String>) -> Self {
        self.course = Some(course.into());
        self
    }

    pub fn get(&self, var: Predictor) -> i64 {
        self.codes[var.index()]
    }

    pub fn set(&mut self, var: Predictor, value: i64) {
        self.codes[var.index()] = value;
    }

    pub fn codes(&self) -> &[i64; 15] {
        &self.codes
    }
}

/// Returns one message per violated coding rule; empty when the item is valid.
pub fn validate_coding(item: &ItemCoding) -> Vec<String> {
    Predictor::ALL
        .iter()
        .filter_map(|p| p.violation(item.get(*p)))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ItemRecord {
    item_id: String,
    T1: i64,
    T2: i64,
    T3: i64,
    C1: i64,
    C2: i64,
    C3: i64,
    C4: i64,
    C5: i64,
    S1: i64,
    S2: i64,
    S3: i64,
    S4: i64,
    S5: i64,
    S6: i64,
    S7: i64,
    D: Option<DifficultyLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    course: Option<String>,
}

impl From<ItemCoding> for ItemRecord {
    fn from(item: ItemCoding) -> Self {
        let c = item.codes;
        ItemRecord {
            item_id: item.item_id,
            T1: c[0],
            T2: c[1],
            T3: c[2],
            C1: c[3],
            C2: c[4],
            C3: c[5],
            C4: c[6],
            C5: c[7],
            S1: c[8],
            S2: c[9],
            S3: c[10],
            S4: c[11],
            S5: c[12],
            S6: c[13],
            S7: c[14],
            D: item.difficulty,
            course: item.course,
        }
    }
}

impl TryFrom<ItemRecord> for ItemCoding {
    type Error = Error;

    fn try_from(r: ItemRecord) -> Result<Self> {
        let item = ItemCoding {
            item_id: r.item_id,
            codes: [
                r.T1, r.T2, r.T3, r.C1, r.C2, r.C3, r.C4, r.C5, r.S1, r.S2, r.S3, r.S4, r.S5, r.S6, r.S7,
            ],
            difficulty: r.D,
            course: r.course,
        };
        let violations = validate_coding(&item);
        if violations.is_empty() {
            Ok(item)
        } else {
            Err(Error::Data(violations.join("; ")))
        }
    }
}

/// An ordered collection of coded items with unique ids.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<ItemCoding>", into = "Vec<ItemCoding>")]
pub struct Dataset {
    items: Vec<ItemCoding>,
}

impl Dataset {
    pub fn new(items: Vec<ItemCoding>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item.item_id.as_str()) {
                return Err(Error::Data(format!("duplicate item_id `{}`", item.item_id)));
            }
        }
        Ok(Dataset { items })
    }

    pub fn items(&self) -> &[ItemCoding] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// True iff the dataset is nonempty and every item carries a difficulty label.
    pub fn labeled(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.difficulty.is_some())
    }

    /// Difficulty labels in item order. Fails if any item is unlabeled.
    pub fn outcomes(&self) -> Result<Vec<DifficultyLevel>> {
        self.items
            .iter()
            .map(|i| {
                i.difficulty
                    .ok_or_else(|| Error::InvalidInput(format!("item `{}` has no difficulty label", i.item_id)))
            })
            .collect()
    }

    /// Distinct course tags in order of first appearance; `None` groups untagged items.
    pub fn courses(&self) -> Vec<Option<String>> {
        let mut out: Vec<Option<String>> = Vec::new();
        for item in &self.items {
            if !out.contains(&item.course) {
                out.push(item.course.clone());
            }
        }
        out
    }

    /// Sub-dataset with the items at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
        }
    }

    pub fn filter_course(&self, course: Option<&str>) -> Dataset {
        Dataset {
            items: self
                .items
                .iter()
                .filter(|i| i.course.as_deref() == course)
                .cloned()
                .collect(),
        }
    }

    /// Column of codes for one predictor.
    pub fn column(&self, var: Predictor) -> Vec<i64> {
        self.items.iter().map(|i| i.get(var)).collect()
    }
}

impl TryFrom<Vec<ItemCoding>> for Dataset {
    type Error = Error;

    fn try_from(items: Vec<ItemCoding>) -> Result<Self> {
        Dataset::new(items)
    }
}

impl From<Dataset> for Vec<ItemCoding> {
    fn from(d: Dataset) -> Self {
        d.items
    }
}

/// Builds the numeric design matrix: one row per item, one column per
/// variable, ordinal predictors entering as their integer codes.
pub fn encode_design(data: &Dataset, variables: &[Predictor]) -> DMatrix<f64> {
    DMatrix::from_fn(data.len(), variables.len(), |r, c| {
        data.items[r].get(variables[c]) as f64
    })
}

/// The item coded in the ripple-carry-adder worked example.
pub fn ripple_carry_adder_example() -> ItemCoding {
    ItemCoding::new("ex1", [3, 1, 2, 1, 3, 4, 7, 2, 1, 1, 2, 2, 0, 1, 1])
}
