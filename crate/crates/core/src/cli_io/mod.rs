//! Command-line front end: configuration files, subcommand dispatch, CSV /
//! JSON outputs and run manifests.
//!
//! Every subcommand reads one configuration, writes its data tables to
//! `--out` and a `<command>.manifest.json` holding the resolved
//! configuration, tool version, wall time and derived scalars. Exit codes:
//! 0 on success, 2 for invalid input, 3 for numeric failures.

pub mod commands;
pub mod config;
pub mod sweep;
pub mod table;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

pub use config::{parse_config, parse_config_str, RunConfig};
pub use table::{Cell, Table};

use crate::error::{Error, Result};
use commands::CommandOutput;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandName {
    Spectrum,
    Winding,
    Eps,
    Dos,
    BoundStates,
    Evolve,
    Profile,
    Classify,
    Fit,
    Sweep,
}

impl CommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandName::Spectrum => "spectrum",
            CommandName::Winding => "winding",
            CommandName::Eps => "eps",
            CommandName::Dos => "dos",
            CommandName::BoundStates => "bound-states",
            CommandName::Evolve => "evolve",
            CommandName::Profile => "profile",
            CommandName::Classify => "classify",
            CommandName::Fit => "fit",
            CommandName::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "nhemitter", version, about = "Quantum emitters in lossy non-Hermitian lattices")]
pub struct Cli {
    /// Subcommand to run.
    #[arg(value_enum)]
    pub command: CommandName,
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Format of the data tables; manifests are always JSON.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Override a configuration key, e.g. `--set emitter.g=0.8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: usize,
    pub format: Format,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub data_files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub exit_code: i32,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn write_table(table: &Table, dir: &Path, format: Format) -> Result<PathBuf> {
    let path = match format {
        Format::Csv => dir.join(format!("{}.csv", table.name)),
        Format::Json => dir.join(format!("{}.json", table.name)),
    };
    let file = BufWriter::new(File::create(&path)?);
    match format {
        Format::Csv => table.write_csv(file)?,
        Format::Json => serde_json::to_writer_pretty(file, &table.to_json())?,
    }
    Ok(path)
}

/// Runs one subcommand on a validated configuration and writes its outputs.
pub fn run_subcommand(name: CommandName, cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary> {
    let start = Instant::now();
    let mut exit_code = 0;
    let output = match name {
        CommandName::Spectrum => commands::spectrum(cfg)?,
        CommandName::Winding => commands::winding(cfg)?,
        CommandName::Eps => commands::eps(cfg)?,
        CommandName::Dos => commands::dos(cfg)?,
        CommandName::BoundStates => commands::bound_states(cfg)?,
        CommandName::Evolve => commands::evolve(cfg)?,
        CommandName::Profile => commands::profile(cfg)?,
        CommandName::Classify => commands::classify(cfg)?,
        CommandName::Fit => commands::fit(cfg)?,
        CommandName::Sweep => {
            let (table, ok) = sweep::run_sweep(cfg, opts.jobs.max(1))?;
            let total = table.rows.len();
            if ok == 0 {
                exit_code = 3;
            }
            let mut out = CommandOutput::default();
            out.derived.insert("points".into(), json!(total));
            out.derived.insert("succeeded".into(), json!(ok));
            out.tables.push(table);
            out
        }
    };
    std::fs::create_dir_all(&opts.out)?;
    let mut data_files = Vec::new();
    for t in &output.tables {
        data_files.push(write_table(t, &opts.out, opts.format)?);
    }
    for w in &output.warnings {
        log::warn!("{w}");
    }
    let file_names: Vec<Value> = data_files
        .iter()
        .filter_map(|p| p.file_name().map(|f| Value::String(f.to_string_lossy().into_owned())))
        .collect();
    let manifest = json!({
        "tool": "nhemitter",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name.as_str(),
        "config": cfg,
        "format": match opts.format { Format::Csv => "csv", Format::Json => "json" },
        "jobs": opts.jobs,
        "outputs": file_names,
        "derived": Value::Object(output.derived),
        "warnings": output.warnings,
        "exit_code": exit_code,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    let manifest_path = opts.out.join(format!("{}.manifest.json", name.as_str()));
    serde_json::to_writer_pretty(BufWriter::new(File::create(&manifest_path)?), &manifest)?;
    Ok(RunSummary {
        data_files,
        manifest: manifest_path,
        exit_code,
    })
}

/// Parses the configuration and runs the command; returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = parse_config(&cli.config, &cli.overrides).and_then(|cfg| {
        if cli.command == CommandName::Sweep && cfg.sweep.is_none() {
            return Err(Error::Validation(vec!["sweep requires a `sweep` section in the configuration".into()]));
        }
        let opts = RunOptions {
            out: cli.out.clone(),
            jobs: cli.jobs.unwrap_or_else(default_jobs),
            format: cli.format,
        };
        run_subcommand(cli.command, &cfg, &opts)
    });
    match result {
        Ok(summary) => {
            for f in &summary.data_files {
                log::info!("wrote {}", f.display());
            }
            summary.exit_code
        }
        Err(Error::Validation(violations)) => {
            eprintln!("error: invalid configuration");
            for v in &violations {
                eprintln!("  - {v}");
            }
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
