use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> anyhow::Result<ExitCode> {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = itemgauge_cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    io::stdout().flush()?;
    Ok(ExitCode::from(code))
}
