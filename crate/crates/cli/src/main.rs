//! `magband`: band-structure studies of magnetic waveguides from declarative configs.
//!
//! Every subcommand writes a CSV table (stdout unless `--out`) whose leading
//! `#` lines record the tool version, the SHA-256 of the resolved config,
//! grids and tolerances, and optionally a JSON run report (`--report`).
//! Exit codes: 0 ok, 2 validation, 3 solver, 4 certificate failed.

mod commands;
mod config;
mod error;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{BottomConfig, Scan};
use crate::error::{CliError, EXIT_CERTIFICATE};

#[derive(Parser)]
#[command(name = "magband", version, about = "Spectral laboratory for magnetic waveguides")]
struct Cli {
    /// Worker threads for parallel scans; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// TOML configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run report destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Band scan with flatness verdict and optional asymptote matching.
    Bands(Io),
    /// Spectral bottom of the parallel layer over a field range.
    Bottom {
        #[command(flatten)]
        io: Io,
        /// Field values as `start:stop:count`, overriding the config.
        #[arg(long)]
        b0: Option<String>,
    },
    /// Exact and near coincidences of the flat-layer levels.
    Degeneracy(Io),
    /// Thin-layer gap study.
    Thin(Io),
    /// Field validation, band scan and non-constancy certificate.
    Iwatsuka(Io),
    /// Geometric assumption report.
    Check(Io),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bands(_) => "bands",
            Command::Bottom { .. } => "bottom",
            Command::Degeneracy(_) => "degeneracy",
            Command::Thin(_) => "thin",
            Command::Iwatsuka(_) => "iwatsuka",
            Command::Check(_) => "check",
        }
    }

    fn io(&self) -> &Io {
        match self {
            Command::Bands(io)
            | Command::Degeneracy(io)
            | Command::Thin(io)
            | Command::Iwatsuka(io)
            | Command::Check(io)
            | Command::Bottom { io, .. } => io,
        }
    }
}

fn required_config(io: &Io) -> Result<&Path, CliError> {
    io.config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))
}

/// Hash of the resolved configuration, so flag overrides are covered too.
fn config_hash<T: Serialize>(cfg: &T) -> Result<(serde_json::Value, String), CliError> {
    let value = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let bytes = serde_json::to_vec(&value).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((value, hex::encode(Sha256::digest(bytes))))
}

fn dispatch(command: &Command) -> Result<(commands::Run, serde_json::Value, String), CliError> {
    fn with<T: Serialize>(
        cfg: T,
        run: impl FnOnce(&T) -> Result<commands::Run, CliError>,
    ) -> Result<(commands::Run, serde_json::Value, String), CliError> {
        let (value, hash) = config_hash(&cfg)?;
        Ok((run(&cfg)?, value, hash))
    }
    match command {
        Command::Bands(io) => with(config::load(required_config(io)?)?, commands::bands),
        Command::Bottom { io, b0 } => {
            let cfg = match (b0, &io.config) {
                (Some(range), _) => BottomConfig { b0: Scan::Range(range.clone()) },
                (None, Some(path)) => config::load(path)?,
                (None, None) => return Err(CliError::Config("give --b0 or --config".into())),
            };
            with(cfg, commands::bottom)
        }
        Command::Degeneracy(io) => with(config::load(required_config(io)?)?, commands::degeneracy),
        Command::Thin(io) => with(config::load(required_config(io)?)?, commands::thin),
        Command::Iwatsuka(io) => with(config::load(required_config(io)?)?, commands::iwatsuka),
        Command::Check(io) => with(config::load(required_config(io)?)?, commands::check),
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let name = cli.command.name();
    let io = cli.command.io();
    let (run, config, hash) = dispatch(&cli.command)?;
    let version = env!("CARGO_PKG_VERSION");
    let mut table = run.table;
    table.comments.insert(0, format!("magband {version} {name}"));
    table.comments.insert(1, format!("config sha256: {hash}"));
    match &io.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(&mut w)?;
            w.flush()?;
        }
        None => table.write(std::io::stdout().lock())?,
    }
    if let Some(path) = &io.report {
        let report = json!({
            "command": name,
            "version": version,
            "config_sha256": hash,
            "inputs": config,
            "grid": run.grid,
            "tolerances": run.tolerances,
            "outputs": run.outputs,
            "certificate_failed": run.certificate_failed,
            "runtime_seconds": start.elapsed().as_secs_f64(),
        });
        let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    Ok(!run.certificate_failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "command": cli.command.name(), "kind": "validation", "exit_code": 2, "message": e.to_string() }));
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CERTIFICATE as u8),
        Err(e) => {
            let record = e.record(cli.command.name());
            eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
