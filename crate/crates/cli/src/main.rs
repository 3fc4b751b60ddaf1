mod args;
mod commands;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command};
use commands::{CliError, Report};
use output::{emit, Header};

const OUT_DIR_VAR: &str = "CRITSPIN_OUT_DIR";

fn params<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("arguments serialize")
}

fn dispatch(cli: &Cli) -> Result<(&'static str, Value, Report), CliError> {
    Ok(match &cli.command {
        Command::Cumulants(a) => ("cumulants", params(a), commands::cumulants(a)?),
        Command::LimitLaw(a) => ("limit-law", params(a), commands::limit_law(a)?),
        Command::Rate(a) => ("rate", params(a), commands::rate(a, cli.format)?),
        Command::LocalLimit(a) => ("local-limit", params(a), commands::local_limit(a)?),
        Command::Deviations(a) => ("deviations", params(a), commands::deviations(a)?),
        Command::Residue(a) => ("residue", params(a), commands::residue(a)?),
        Command::Sample(a) => ("sample", params(a), commands::sample(a, cli.seed)?),
    })
}

/// Runs one invocation and returns the exit code: 0 on success, 1 when a
/// check fails or a computation breaks down, 2 on a usage error.
pub fn run<I, S>(argv: I, out_dir: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let (command, params, rep) = match dispatch(&cli) {
        Ok(r) => r,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 2;
        }
        Err(CliError::Failure(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 1;
        }
    };
    let header = Header { command, params, version: env!("CARGO_PKG_VERSION"), seed: cli.seed };
    let path = cli.out.clone().or_else(|| out_dir.map(|d| d.join(format!("{command}.{}", cli.format.extension()))));
    let written = match &path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|q| !q.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    let _ = writeln!(stderr, "error: {}: {e}", parent.display());
                    return 1;
                }
            }
            File::create(p).and_then(|f| emit(&header, &rep.table, cli.format, BufWriter::new(f)))
        }
        None => emit(&header, &rep.table, cli.format, &mut *stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return 1;
    }
    if !rep.passed {
        let _ = writeln!(stderr, "check failed");
        return 1;
    }
    0
}

fn main() {
    let out_dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from);
    let code = run(std::env::args_os(), out_dir, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
