//! `polyspec` command-line front end.

mod commands;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use commands::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or arguments (exit 1).
    Usage(String),
    /// Numerical non-convergence or exhausted budget (exit 2).
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<polyspec::Error> for CliError {
    fn from(e: polyspec::Error) -> Self {
        use polyspec::Error::*;
        match e {
            NonConvergence(_) | Budget(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "polyspec", version, about = "Spectral functions, exchange asymptotics and GGA audits on tessellating polytopes")]
struct Cli {
    /// JSON file whose keys override the command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON report, CSV table and plot files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exchange constants c_x1, c_fs and c_bl for (n, s).
    Constants(ConstantsArgs),
    /// E_x and E_x^ctm on a λ grid with a two-term fit.
    ExchangeScan(ExchangeArgs),
    /// Counting function against the two-term Weyl law.
    WeylScan(WeylArgs),
    /// Sampled norms of S_λ − S_λ^ctm on a λ grid.
    SpectralError(ErrorArgs),
    /// Semi-local functional F(λ) on a λ grid with a two-term fit.
    SemilocalScan(SemilocalArgs),
    /// Both sides of the GGA surface constraint.
    GgaAudit(GgaArgs),
    /// Bounded strict-tessellation certificate.
    TessellateCheck(TessellateArgs),
}

/// Overlays the keys of the JSON object in `path` on the flag values.
fn merge_config<T: Serialize + DeserializeOwned>(args: T, path: Option<&Path>, command: &str) -> Result<(T, Value), CliError> {
    let mut value = serde_json::to_value(&args).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let Value::Object(file) = file else {
            return Err(CliError::Usage("config file must hold a JSON object".into()));
        };
        let Value::Object(target) = &mut value else { unreachable!() };
        for (k, v) in file {
            if k == "command" {
                if v.as_str() != Some(command) {
                    return Err(CliError::Usage(format!("config is for command {v}, not '{command}'")));
                }
                continue;
            }
            if !target.contains_key(&k) {
                return Err(CliError::Usage(format!("unknown config key '{k}' for '{command}'")));
            }
            target.insert(k, v);
        }
    }
    let args: T = serde_json::from_value(value).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let echo = serde_json::to_value(&args).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((args, echo))
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(v) = std::env::var("POLYSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("POLYSPEC_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    threads_from_env()?;
    let cfg = cli.config.as_deref();
    macro_rules! go {
        ($args:expr, $name:literal, $f:ident) => {{
            let (args, echo) = merge_config($args, cfg, $name)?;
            let out = $f(&args, &echo)?;
            output::write_outputs($name, &out, cli.out.as_deref())?;
            out.code
        }};
    }
    Ok(match cli.command {
        Command::Constants(a) => go!(a, "constants", cmd_constants),
        Command::ExchangeScan(a) => go!(a, "exchange-scan", cmd_exchange_scan),
        Command::WeylScan(a) => go!(a, "weyl-scan", cmd_weyl_scan),
        Command::SpectralError(a) => go!(a, "spectral-error", cmd_spectral_error),
        Command::SemilocalScan(a) => go!(a, "semilocal-scan", cmd_semilocal_scan),
        Command::GgaAudit(a) => go!(a, "gga-audit", cmd_gga_audit),
        Command::TessellateCheck(a) => go!(a, "tessellate-check", cmd_tessellate_check),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
