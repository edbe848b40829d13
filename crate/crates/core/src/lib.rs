//! Item-difficulty estimation from structured item codings.
//!
//! The crate covers the item coding model and CSV interchange ([`item`]),
//! heterogeneous correlations ([`assoc`]), the proportional-odds cumulative
//! logit model ([`polr`]), variable selection and diagnostics ([`selection`])
//! and classification accuracy ([`evaluation`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assoc;
pub mod error;
pub mod evaluation;
pub mod item;
pub mod json;
pub mod polr;
pub mod selection;

pub use assoc::{correlation_matrix, Cell, CorrelationEntry, CorrelationKind, CorrelationMatrix};
pub use error::{Error, Result};
pub use evaluation::{accuracy, confusion, confusion_by_course, split, ConfusionMatrix};
pub use item::{
    describe, generate_synthetic, parse_dataset, serialize_dataset, Dataset, DifficultyLevel, ItemCoding, Marginals,
    Predictor,
};
pub use json::to_canonical_json;
pub use polr::{
    classify, coefficient_table, criteria, deserialize_model, fit, predict_probs, serialize_model, FitOptions,
    FittedModel, KConvention, ModelCriteria, PredictedProbabilities, WaldRow,
};
pub use selection::{
    evaluate_subsets, lr_test, stepwise_select, vif, Criterion, Direction, LrTestResult, SelectionOptions,
    SelectionTrace, VifReport,
};
