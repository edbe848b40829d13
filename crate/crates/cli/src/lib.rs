//! Command-line front end and HTTP service for itemgauge.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numerical failure (non-convergence, singularity, separation).

mod args;
mod commands;
mod output;
pub mod service;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};

use anyhow::{Context, Result};
use clap::Parser;

pub use args::{Cli, Command, Format};
pub use commands::{DiagnoseReport, EvaluationBlock, LrRow, PredictionRow};

/// A command-line usage problem detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<itemgauge::Error>() {
            return if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_DATA };
        }
    }
    EXIT_DATA
}

fn execute(cli: &Cli) -> Result<Option<String>> {
    let format = cli.format;
    let text = match &cli.command {
        Command::Describe { data } => commands::describe_cmd(data, format)?,
        Command::Correlate { data } => commands::correlate_cmd(data, format)?,
        Command::Fit(args) => commands::fit_cmd(args, format)?,
        Command::Select(args) => commands::select_cmd(args, format)?,
        Command::Predict { model, items } => commands::predict_cmd(model, items, format)?,
        Command::Evaluate {
            model,
            items,
            by_course,
        } => commands::evaluate_cmd(model, items, *by_course, format)?,
        Command::Diagnose { model, data } => commands::diagnose_cmd(model, data, format)?,
        Command::Synth {
            n,
            seed,
            model,
            marginals,
        } => commands::synth_cmd(*n, *seed, model.as_deref(), marginals.as_deref(), format)?,
        Command::Serve {
            model,
            port,
            host,
            ui_dir,
        } => {
            let model = commands::load_model(model)?;
            let ip: IpAddr = host
                .parse()
                .map_err(|_| UsageError(format!("invalid --host `{host}`")))?;
            let runtime = tokio::runtime::Runtime::new().context("cannot start runtime")?;
            runtime
                .block_on(service::serve(model, SocketAddr::new(ip, *port), ui_dir.clone()))
                .context("server failed")?;
            return Ok(None);
        }
    };
    Ok(Some(text))
}

/// Runs one invocation, writing results to `out` (or `--out`) and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| {
        let Some(text) = text else { return Ok(()) };
        match &cli.out {
            Some(path) => std::fs::write(path, &text).with_context(|| format!("cannot write `{}`", path.display())),
            None => out.write_all(text.as_bytes()).context("cannot write output"),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}
