//! Criterion-based variable selection, nested-model likelihood-ratio tests and
//! variance inflation factors.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc::chi_sq_sf;
use crate::error::{Error, Result};
use crate::item::{encode_design, Dataset, Predictor};
use crate::polr::{fit, log_likelihood, FitOptions, FittedModel};

/// Multicollinearity flag threshold.
pub const VIF_THRESHOLD: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Aic,
    Bic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Forward,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepAction {
    Initial,
    Added,
    Removed,
}

/// Criteria of one fitted candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredModel {
    pub variables: Vec<Predictor>,
    pub aic: f64,
    pub bic: f64,
    pub deviance: f64,
}

impl ScoredModel {
    fn from_model(model: &FittedModel) -> Self {
        ScoredModel {
            variables: model.variables.clone(),
            aic: model.criteria.aic,
            bic: model.criteria.bic,
            deviance: model.criteria.deviance,
        }
    }

    pub fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    #[serde(flatten)]
    pub model: ScoredModel,
    pub action: StepAction,
    /// Variable added or removed by this step.
    pub variable: Option<Predictor>,
}

/// A candidate whose fit failed; it was skipped for that step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateFailure {
    pub step: usize,
    pub variables: Vec<Predictor>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub criterion: Criterion,
    pub direction: Direction,
    /// Accepted models, starting with the null model.
    pub steps: Vec<SelectionStep>,
    pub chosen: Vec<Predictor>,
    pub failures: Vec<CandidateFailure>,
    /// Neighbors evaluated in the final, non-improving round.
    pub final_neighbors: Vec<ScoredModel>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionOptions {
    pub criterion: Criterion,
    pub direction: Direction,
    pub fit: FitOptions,
    /// Worker threads for candidate fits within a step; 1 runs inline.
    pub threads: usize,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            criterion: Criterion::Aic,
            direction: Direction::Forward,
            fit: FitOptions::default(),
            threads: 1,
        }
    }
}

fn fit_scored(data: &Dataset, vars: &[Predictor], options: &FitOptions) -> Result<ScoredModel> {
    let model = fit(data, vars, options)?;
    if !model.converged {
        return Err(Error::Numerical(format!(
            "fit did not converge in {} iterations",
            options.max_iter
        )));
    }
    Ok(ScoredModel::from_model(&model))
}

fn fit_all(data: &Dataset, sets: &[Vec<Predictor>], options: &FitOptions, threads: usize) -> Vec<Result<ScoredModel>> {
    if threads <= 1 || sets.len() < 2 {
        return sets.iter().map(|v| fit_scored(data, v, options)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| sets.par_iter().map(|v| fit_scored(data, v, options)).collect()),
        Err(_) => sets.iter().map(|v| fit_scored(data, v, options)).collect(),
    }
}

/// Greedy stepwise search starting from the intercepts-only model.
///
/// Each round scores every single-variable addition (and, for
/// [`Direction::Both`], every removal) and applies the move with the lowest
/// criterion, provided it improves on the current model. Ties go to the move
/// listed first: additions in candidate order, then removals in model order.
pub fn stepwise_select(data: &Dataset, candidates: &[Predictor], options: &SelectionOptions) -> Result<SelectionTrace> {
    let criterion = options.criterion;
    let null = fit_scored(data, &[], &options.fit)?;
    let mut current = null.clone();
    let mut steps = vec![SelectionStep {
        model: null,
        action: StepAction::Initial,
        variable: None,
    }];
    let mut failures = Vec::new();
    let mut final_neighbors = Vec::new();

    loop {
        let mut moves: Vec<(StepAction, Predictor, Vec<Predictor>)> = candidates
            .iter()
            .filter(|c| !current.variables.contains(c))
            .map(|&c| {
                let mut vars = current.variables.clone();
                vars.push(c);
                (StepAction::Added, c, vars)
            })
            .collect();
        if options.direction == Direction::Both {
            for &v in &current.variables {
                let vars: Vec<Predictor> = current.variables.iter().copied().filter(|x| *x != v).collect();
                moves.push((StepAction::Removed, v, vars));
            }
        }
        if moves.is_empty() {
            break;
        }
        let sets: Vec<Vec<Predictor>> = moves.iter().map(|m| m.2.clone()).collect();
        let results = fit_all(data, &sets, &options.fit, options.threads);

        let mut best: Option<(usize, ScoredModel)> = None;
        let mut scored = Vec::new();
        for (i, result) in results.into_iter().enumerate() {
            match result {
                Ok(s) => {
                    let better = best
                        .as_ref()
                        .is_none_or(|(_, b)| s.value(criterion) < b.value(criterion));
                    if better {
                        best = Some((i, s.clone()));
                    }
                    scored.push(s);
                }
                Err(e) => failures.push(CandidateFailure {
                    step: steps.len(),
                    variables: moves[i].2.clone(),
                    reason: e.to_string(),
                }),
            }
        }
        match best {
            Some((i, s)) if s.value(criterion) < current.value(criterion) => {
                steps.push(SelectionStep {
                    model: s.clone(),
                    action: moves[i].0,
                    variable: Some(moves[i].1),
                });
                current = s;
            }
            _ => {
                final_neighbors = scored;
                break;
            }
        }
    }
    Ok(SelectionTrace {
        criterion,
        direction: options.direction,
        chosen: current.variables.clone(),
        steps,
        failures,
        final_neighbors,
    })
}

/// Outcome of scoring one user-supplied subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub variables: Vec<Predictor>,
    pub scored: Option<ScoredModel>,
    pub error: Option<String>,
}

/// Fits and scores each subset independently.
pub fn evaluate_subsets(
    data: &Dataset,
    subsets: &[Vec<Predictor>],
    options: &FitOptions,
    threads: usize,
) -> Vec<SubsetScore> {
    fit_all(data, subsets, options, threads)
        .into_iter()
        .zip(subsets)
        .map(|(r, vars)| match r {
            Ok(s) => SubsetScore {
                variables: vars.clone(),
                scored: Some(s),
                error: None,
            },
            Err(e) => SubsetScore {
                variables: vars.clone(),
                scored: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrTestResult {
    pub lr_statistic: f64,
    pub df: u32,
    pub p: f64,
}

impl LrTestResult {
    /// Test from a deviance difference; `df = 0` yields `p = 1`.
    pub fn from_statistic(lr_statistic: f64, df: u32) -> Self {
        let lr_statistic = lr_statistic.max(0.0);
        let p = if df == 0 { 1.0 } else { chi_sq_sf(lr_statistic, df) };
        LrTestResult { lr_statistic, df, p }
    }
}

fn loglik_on(model: &FittedModel, data: &Dataset) -> Result<f64> {
    let y = data.outcomes()?;
    let x = encode_design(data, &model.variables);
    log_likelihood(model.a1, model.a2, &model.slopes, &x, &y)
}

fn same_training_data(model: &FittedModel, data: &Dataset, ll: f64) -> bool {
    model.n_train == data.len() && (ll - model.loglik).abs() <= 1e-6 * model.loglik.abs().max(1.0)
}

/// Drop-in-deviance test of `reduced` against `full`.
///
/// The degrees of freedom are the number of extra slopes in `full`; slope-only
/// and all-parameter counts agree for nested models with shared intercepts.
pub fn lr_test(reduced: &FittedModel, full: &FittedModel, data: &Dataset) -> Result<LrTestResult> {
    if let Some(v) = reduced.variables.iter().find(|v| !full.variables.contains(v)) {
        return Err(Error::InvalidInput(format!(
            "models are not nested: {v} is in the reduced model only"
        )));
    }
    let ll_r = loglik_on(reduced, data)?;
    let ll_f = loglik_on(full, data)?;
    if !same_training_data(reduced, data, ll_r) || !same_training_data(full, data, ll_f) {
        return Err(Error::InvalidInput(
            "models were not fitted on the supplied data".into(),
        ));
    }
    let df = (full.variables.len() - reduced.variables.len()) as u32;
    Ok(LrTestResult::from_statistic(-2.0 * ll_r + 2.0 * ll_f, df))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VifEntry {
    pub variable: String,
    pub vif: f64,
    /// `vif > 5`.
    pub flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VifReport {
    pub entries: Vec<VifEntry>,
}

/// Relative singular-value cutoff for rank deficiency.
const RANK_TOL: f64 = 1e-10;

/// VIF for each column of a numeric design: regress the column on all others
/// with an intercept and report `1 / (1 − R²)`.
pub fn vif_design(x: &DMatrix<f64>, names: &[String]) -> Result<VifReport> {
    let (n, p) = x.shape();
    if names.len() != p {
        return Err(Error::Dimension(format!("{} names for {p} columns", names.len())));
    }
    if p < 2 {
        return Err(Error::InvalidInput("VIF needs at least two variables".into()));
    }
    if n <= p + 1 {
        return Err(Error::InvalidInput(format!(
            "VIF needs more than {} items for {p} variables, got {n}",
            p + 1
        )));
    }
    // Centering absorbs the intercept.
    let mut centered = x.clone();
    for mut col in centered.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let mut entries = Vec::with_capacity(p);
    for (j, name) in names.iter().enumerate() {
        let singular = || {
            Error::Singular(format!(
                "exactly collinear design when regressing {name} on the other variables"
            ))
        };
        let y: DVector<f64> = centered.column(j).into_owned();
        let sst = y.norm_squared();
        if !(sst > 0.0) {
            return Err(Error::Singular(format!("{name} is constant")));
        }
        let others = centered.clone().remove_column(j);
        let svd = others.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > RANK_TOL * smax) {
            return Err(singular());
        }
        let beta = svd.solve(&y, 0.0).map_err(|_| singular())?;
        let resid = &y - &others * beta;
        let one_minus_r2 = resid.norm_squared() / sst;
        if one_minus_r2 < 1e-12 {
            return Err(singular());
        }
        let vif = 1.0 / one_minus_r2;
        entries.push(VifEntry {
            variable: name.clone(),
            vif,
            flag: vif > VIF_THRESHOLD,
        });
    }
    Ok(VifReport { entries })
}

/// VIF over the integer-coded predictors of a dataset.
pub fn vif(data: &Dataset, variables: &[Predictor]) -> Result<VifReport> {
    let x = encode_design(data, variables);
    let names: Vec<String> = variables.iter().map(|v| v.name().to_string()).collect();
    vif_design(&x, &names)
}
