use std::collections::HashSet;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use itemgauge::assoc::Significance;
use itemgauge::evaluation::confusion_by_course;
use itemgauge::item::DescriptiveReport;
use itemgauge::selection::{evaluate_subsets, SubsetScore, VifReport};
use itemgauge::{
    accuracy, coefficient_table, confusion, correlation_matrix, criteria, describe, deserialize_model, fit,
    generate_synthetic, lr_test, parse_dataset, serialize_dataset, serialize_model, split, stepwise_select,
    to_canonical_json, vif, Cell, ConfusionMatrix, Dataset, DifficultyLevel, FitOptions, FittedModel, LrTestResult,
    Marginals, Predictor, SelectionOptions, SelectionTrace,
};

use crate::args::{FitArgs, Format, SelectArgs};
use crate::output::{fmt4, fmt_full, Table};
use crate::UsageError;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = read_text(path)?;
    parse_dataset(&text).with_context(|| format!("invalid item file `{}`", path.display()))
}

pub fn load_model(path: &Path) -> Result<FittedModel> {
    let text = read_text(path)?;
    deserialize_model(&text).with_context(|| format!("invalid model file `{}`", path.display()))
}

fn parse_vars(text: &str) -> Result<Vec<Predictor>> {
    Predictor::parse_list(text).map_err(|e| UsageError(e.to_string()).into())
}

fn converged(model: FittedModel) -> Result<FittedModel> {
    if model.converged {
        Ok(model)
    } else {
        Err(itemgauge::Error::Numerical(format!("fit did not converge in {} iterations", model.iterations)).into())
    }
}

pub fn describe_cmd(data: &Path, format: Format) -> Result<String> {
    let report = describe(&load_dataset(data)?)?;
    Ok(match format {
        Format::Json => to_canonical_json(&report),
        Format::Csv => describe_table(&report, true),
        Format::Table => describe_table(&report, false),
    })
}

fn describe_table(report: &DescriptiveReport, csv: bool) -> String {
    let mut numeric = Table::new(["variable", "mean", "sd"]);
    for s in &report.numeric {
        numeric.row([s.variable.name().to_string(), fmt4(s.mean), fmt4(s.sd)]);
    }
    let mut shares = Table::new(["variable", "code", "label", "share"]);
    for t in report.ordinal.iter().chain(&report.difficulty) {
        for c in &t.categories {
            shares.row([t.variable.clone(), c.code.to_string(), c.label.clone(), fmt4(c.share)]);
        }
    }
    if csv {
        let mut all = Table::new(["variable", "statistic", "code", "label", "value"]);
        for s in &report.numeric {
            all.row([s.variable.name(), "mean", "", "", &fmt_full(s.mean)]);
            all.row([s.variable.name(), "sd", "", "", &fmt_full(s.sd)]);
        }
        for t in report.ordinal.iter().chain(&report.difficulty) {
            for c in &t.categories {
                all.row([
                    t.variable.clone(),
                    "share".into(),
                    c.code.to_string(),
                    c.label.clone(),
                    fmt_full(c.share),
                ]);
            }
        }
        return all.to_csv();
    }
    format!("n = {}\n\n{}\n{}", report.n, numeric.render(), shares.render())
}

pub fn correlate_cmd(data: &Path, format: Format) -> Result<String> {
    let m = correlation_matrix(&load_dataset(data)?)?;
    if format == Format::Json {
        return Ok(to_canonical_json(&m));
    }
    let cell_text = |c: &Cell| match c {
        Cell::Estimated(e) => format!("{}{}", fmt4(e.rho), e.significance.stars()),
        Cell::Failed { .. } => "NA".to_string(),
    };
    let mut header = vec![String::new()];
    header.extend(m.variables.iter().cloned());
    let mut table = Table::new(header);
    for (i, name) in m.variables.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend((0..=i).map(|j| cell_text(&m.cells[i][j])));
        row.extend((i + 1..m.variables.len()).map(|_| String::new()));
        table.row(row);
    }
    let mut out = if format == Format::Csv {
        table.to_csv()
    } else {
        table.render()
    };
    if format == Format::Table {
        let failed: Vec<String> = m
            .variables
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                let m = &m;
                (0..i).filter_map(move |j| match &m.cells[i][j] {
                    Cell::Failed { reason, .. } => Some(format!("{a}-{}: {reason}", m.variables[j])),
                    Cell::Estimated(_) => None,
                })
            })
            .collect();
        out.push_str(&format!(
            "\n{} p < 0.05, {} p < 0.01\n",
            Significance::P05.stars(),
            Significance::P01.stars()
        ));
        for f in failed {
            out.push_str(&format!("not estimated: {f}\n"));
        }
    }
    Ok(out)
}

/// Items held out per course, stratified by level; file order is kept.
fn holdout_split(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let mut test_ids = HashSet::new();
    for course in data.courses() {
        let (_, test) = split(&data.filter_course(course.as_deref()), fraction, seed, true)?;
        test_ids.extend(test.items().iter().map(|i| i.item_id.clone()));
    }
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| test_ids.contains(&data.items()[i].item_id));
    Ok((data.subset(&train), data.subset(&test)))
}

pub fn fit_cmd(args: &FitArgs, format: Format) -> Result<String> {
    let data = load_dataset(&args.data)?;
    let vars = parse_vars(&args.vars)?;
    let options = FitOptions {
        k_convention: args.k.into(),
        ..FitOptions::default()
    };
    let (train, test) = match args.holdout {
        Some(f) if !(0.0..1.0).contains(&f) => {
            return Err(UsageError(format!("--holdout must lie in [0, 1), got {f}")).into())
        }
        Some(f) => {
            let (train, test) = holdout_split(&data, f, args.seed)?;
            (train, Some(test))
        }
        None => (data, None),
    };
    let model = converged(fit(&train, &vars, &options)?)?;
    let holdout = match &test {
        Some(t) if !t.is_empty() => Some(confusion(&model, t)?),
        _ => None,
    };
    let rows = coefficient_table(&model)?;
    let mut table = Table::new(["variable", "estimate", "odds_ratio", "std_error", "z", "p"]);
    let cell = |x: f64| if format == Format::Csv { fmt_full(x) } else { fmt4(x) };
    for r in &rows {
        table.row([
            r.variable.clone(),
            cell(r.estimate),
            cell(r.odds_ratio),
            cell(r.std_error),
            cell(r.z),
            cell(r.p),
        ]);
    }
    Ok(match format {
        Format::Json => serialize_model(&model),
        Format::Csv => table.to_csv(),
        Format::Table => {
            let c = &model.criteria;
            let names: Vec<&str> = model.variables.iter().map(|v| v.name()).collect();
            let mut out = format!(
                "model: {}\nn = {}, k convention {}\n\n{}\n",
                if names.is_empty() {
                    "(intercepts only)".to_string()
                } else {
                    names.join(", ")
                },
                model.n_train,
                c.k_convention.as_str(),
                table.render()
            );
            let mut summary = Table::new(["statistic", "value"]);
            summary.row(["loglik".to_string(), fmt4(model.loglik)]);
            summary.row(["deviance".to_string(), fmt4(c.deviance)]);
            summary.row(["AIC".to_string(), fmt4(c.aic)]);
            summary.row(["BIC".to_string(), fmt4(c.bic)]);
            summary.row(["McFadden R2".to_string(), fmt4(c.mcfadden)]);
            summary.row(["iterations".to_string(), model.iterations.to_string()]);
            out.push_str(&summary.render());
            if let Some(m) = holdout {
                out.push_str(&format!(
                    "\nholdout: {} items, accuracy {}\n",
                    m.total(),
                    fmt4(accuracy(&m)?)
                ));
            }
            out
        }
    })
}

fn join_vars(vars: &[Predictor]) -> String {
    vars.iter().map(|v| v.name()).collect::<Vec<_>>().join(",")
}

fn parse_subsets(text: &str) -> Result<Vec<Vec<Predictor>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('#'))
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let l = if l == "-" { "" } else { l };
            Predictor::parse_list(l).map_err(|e| UsageError(format!("subsets line {}: {e}", i + 1)).into())
        })
        .collect()
}

pub fn select_cmd(args: &SelectArgs, format: Format) -> Result<String> {
    let data = load_dataset(&args.data)?;
    let fit_options = FitOptions {
        k_convention: args.k.into(),
        ..FitOptions::default()
    };
    if args.threads == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    if let Some(path) = &args.subsets {
        let subsets = parse_subsets(&read_text(path)?)?;
        let scores = evaluate_subsets(&data, &subsets, &fit_options, args.threads);
        return Ok(subsets_output(&scores, format));
    }
    let candidates = match &args.candidates {
        Some(c) => parse_vars(c)?,
        None => Predictor::ALL.to_vec(),
    };
    let options = SelectionOptions {
        criterion: args.criterion.into(),
        direction: args.direction.into(),
        fit: fit_options,
        threads: args.threads,
    };
    let trace = stepwise_select(&data, &candidates, &options)?;
    Ok(trace_output(&trace, format))
}

fn trace_output(trace: &SelectionTrace, format: Format) -> String {
    if format == Format::Json {
        return to_canonical_json(trace);
    }
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { fmt_full(x) } else { fmt4(x) };
    let mut table = if csv {
        Table::new(["model", "variables", "aic", "bic", "deviance"])
    } else {
        Table::new(["model", "variables", "AIC", "BIC", "deviance", "step"])
    };
    for (i, s) in trace.steps.iter().enumerate() {
        let mut row = vec![
            format!("Model {i}"),
            join_vars(&s.model.variables),
            num(s.model.aic),
            num(s.model.bic),
            num(s.model.deviance),
        ];
        if !csv {
            row.push(match s.variable {
                Some(v) => format!("{:?} {v}", s.action).to_lowercase(),
                None => "initial".into(),
            });
        }
        table.row(row);
    }
    if csv {
        return table.to_csv();
    }
    let mut out = table.render();
    out.push_str(&format!("\nchosen: {}\n", join_vars(&trace.chosen)));
    for f in &trace.failures {
        out.push_str(&format!(
            "skipped at step {}: {} ({})\n",
            f.step,
            join_vars(&f.variables),
            f.reason
        ));
    }
    out
}

fn subsets_output(scores: &[SubsetScore], format: Format) -> String {
    if format == Format::Json {
        return to_canonical_json(scores);
    }
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { fmt_full(x) } else { fmt4(x) };
    let mut table = Table::new(["model", "variables", "aic", "bic", "deviance", "error"]);
    for (i, s) in scores.iter().enumerate() {
        let (aic, bic, dev) = match &s.scored {
            Some(m) => (num(m.aic), num(m.bic), num(m.deviance)),
            None => ("NA".into(), "NA".into(), "NA".into()),
        };
        table.row([
            format!("Model {}", i + 1),
            join_vars(&s.variables),
            aic,
            bic,
            dev,
            s.error.clone().unwrap_or_default(),
        ]);
    }
    if csv {
        table.to_csv()
    } else {
        table.render()
    }
}

/// One prediction as emitted by `predict` and the HTTP service.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub item_id: String,
    pub p_low: f64,
    pub p_moderate: f64,
    pub p_high: f64,
    pub level: DifficultyLevel,
}

pub fn predict_cmd(model: &Path, items: &Path, format: Format) -> Result<String> {
    let model = load_model(model)?;
    let data = load_dataset(items)?;
    let rows = data
        .items()
        .iter()
        .map(|item| {
            let p = model.predict_probs(item)?;
            Ok(PredictionRow {
                item_id: item.item_id.clone(),
                p_low: p.p_low,
                p_moderate: p.p_moderate,
                p_high: p.p_high,
                level: p.argmax(),
            })
        })
        .collect::<itemgauge::Result<Vec<_>>>()?;
    if format == Format::Json {
        return Ok(to_canonical_json(&rows));
    }
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { fmt_full(x) } else { fmt4(x) };
    let mut table = Table::new(["item_id", "p_low", "p_moderate", "p_high", "level"]);
    for r in &rows {
        table.row([
            r.item_id.clone(),
            num(r.p_low),
            num(r.p_moderate),
            num(r.p_high),
            r.level.name().to_string(),
        ]);
    }
    Ok(if csv { table.to_csv() } else { table.render() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationBlock {
    pub matrix: ConfusionMatrix,
    pub n: u64,
    pub accuracy: f64,
}

pub fn evaluate_cmd(model: &Path, items: &Path, by_course: bool, format: Format) -> Result<String> {
    let model = load_model(model)?;
    let data = load_dataset(items)?;
    let matrices = if by_course {
        confusion_by_course(&model, &data)?
    } else {
        vec![confusion(&model, &data)?]
    };
    let blocks = matrices
        .into_iter()
        .map(|m| {
            Ok(EvaluationBlock {
                n: m.total(),
                accuracy: accuracy(&m)?,
                matrix: m,
            })
        })
        .collect::<itemgauge::Result<Vec<_>>>()?;
    if format == Format::Json {
        return Ok(to_canonical_json(&blocks));
    }
    if format == Format::Csv {
        let mut table = Table::new(["course", "actual", "Low", "Moderate", "High", "accuracy"]);
        for b in &blocks {
            for level in DifficultyLevel::ALL {
                let row = b.matrix.counts[level.index()];
                table.row([
                    b.matrix.course.clone().unwrap_or_default(),
                    level.name().to_string(),
                    row[0].to_string(),
                    row[1].to_string(),
                    row[2].to_string(),
                    fmt_full(b.accuracy),
                ]);
            }
        }
        return Ok(table.to_csv());
    }
    let mut out = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let course = b.matrix.course.as_deref().unwrap_or("all items");
        out.push_str(&format!("{course}: accuracy {} ({} items)\n", fmt4(b.accuracy), b.n));
        let mut table = Table::new(["actual \\ predicted", "Low", "Moderate", "High"]);
        let sums = b.matrix.row_sums();
        for level in DifficultyLevel::ALL {
            let row = b.matrix.counts[level.index()];
            table.row([
                format!("{} ({})", level.name(), sums[level.index()]),
                row[0].to_string(),
                row[1].to_string(),
                row[2].to_string(),
            ]);
        }
        out.push_str(&table.render());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrRow {
    pub model: String,
    #[serde(flatten)]
    pub test: LrTestResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseReport {
    /// Absent when the model has fewer than two variables.
    pub vif: Option<VifReport>,
    pub lr_tests: Vec<LrRow>,
    pub mcfadden: f64,
}

pub fn diagnose_cmd(model: &Path, data: &Path, format: Format) -> Result<String> {
    let model = load_model(model)?;
    let data = load_dataset(data)?;
    let vif_report = if model.variables.len() >= 2 {
        Some(vif(&data, &model.variables)?)
    } else {
        None
    };
    let options = FitOptions {
        k_convention: model.criteria.k_convention,
        ..FitOptions::default()
    };
    let null = converged(fit(&data, &[], &options)?)?;
    let reduced = converged(fit(&data, &model.variables, &options)?)?;
    let full = converged(fit(&data, &Predictor::ALL, &options)?)?;
    let lr_tests = vec![
        LrRow {
            model: "reduced".into(),
            test: lr_test(&null, &reduced, &data)?,
        },
        LrRow {
            model: "full".into(),
            test: lr_test(&null, &full, &data)?,
        },
        LrRow {
            model: "residual".into(),
            test: lr_test(&reduced, &full, &data)?,
        },
    ];
    let report = DiagnoseReport {
        vif: vif_report,
        lr_tests,
        mcfadden: criteria(&model, &data)?.mcfadden,
    };
    if format == Format::Json {
        return Ok(to_canonical_json(&report));
    }
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { fmt_full(x) } else { fmt4(x) };
    let mut vif_table = Table::new(["variable", "vif", "flag"]);
    for e in report.vif.iter().flat_map(|r| &r.entries) {
        vif_table.row([e.variable.clone(), num(e.vif), e.flag.to_string()]);
    }
    let mut lr_table = Table::new(["model", "lr_statistic", "df", "p"]);
    for r in &report.lr_tests {
        lr_table.row([
            r.model.clone(),
            num(r.test.lr_statistic),
            r.test.df.to_string(),
            num(r.test.p),
        ]);
    }
    if csv {
        let mut all = Table::new(["section", "name", "value", "df", "p", "flag"]);
        for e in report.vif.iter().flat_map(|r| &r.entries) {
            all.row(["vif", &e.variable, &num(e.vif), "", "", &e.flag.to_string()]);
        }
        for r in &report.lr_tests {
            all.row([
                "lr_test",
                &r.model,
                &num(r.test.lr_statistic),
                &r.test.df.to_string(),
                &num(r.test.p),
                "",
            ]);
        }
        all.row(["mcfadden", "model", &num(report.mcfadden), "", "", ""]);
        return Ok(all.to_csv());
    }
    let vif_text = if report.vif.is_some() {
        vif_table.render()
    } else {
        "not computed: fewer than two variables\n".to_string()
    };
    Ok(format!(
        "variance inflation factors (flag above 5)\n{vif_text}\ndrop in deviance\n{}\nMcFadden R2: {}\n",
        lr_table.render(),
        fmt4(report.mcfadden)
    ))
}

pub fn synth_cmd(
    n: usize,
    seed: u64,
    model: Option<&Path>,
    marginals: Option<&Path>,
    format: Format,
) -> Result<String> {
    let model = model.map(load_model).transpose()?;
    let marginals = match marginals {
        Some(path) => serde_json::from_str::<Marginals>(&read_text(path)?)
            .map_err(|e| itemgauge::Error::Schema(e.to_string()))
            .with_context(|| format!("invalid marginals file `{}`", path.display()))?,
        None => Marginals::reference(),
    };
    let data = generate_synthetic(&marginals, model.as_ref(), n, seed)?;
    Ok(match format {
        Format::Json => to_canonical_json(&data),
        Format::Csv | Format::Table => serialize_dataset(&data),
    })
}
