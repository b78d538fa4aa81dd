//! Command-line front end. Every command reads one JSON config, computes
//! its artifacts in memory and only then writes them, together with
//! `run.json` and `manifest.json`, into the output directory.
//!
//! Exit status: 0 on success, 2 for an invalid config or input file,
//! 3 for a numerical failure, 4 for an I/O failure.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{ConfigError, RunConfig};
pub use output::{Artifact, Format};

#[derive(Debug, Parser)]
#[command(
    name = "eocavity",
    version,
    about = "Triply resonant electro-optic cavity transducer toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, default_value = "eocavity.json")]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long, global = true, env = "EOCAVITY_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Encoding of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Optical resonances around the laser.
    ModesOptical,
    /// Frequencies, volumes and linewidths of the configured microwave modes.
    ModesMicrowave,
    /// Single-photon coupling rate for the first microwave mode.
    G0,
    /// Air gap and laser setting for exact triple resonance.
    Tune,
    /// Transduction map over an air-gap or wavelength axis and drive frequency.
    Sweep,
    /// Transduction efficiency against drive frequency at the operating point.
    Spectrum,
    /// Optical normal-mode splitting spectrum under a strong microwave drive.
    Nms,
    /// Noise budget at the operating point.
    Noise,
    /// Antenna coupling that minimizes the noise temperature.
    OptimizeCoupling,
    /// Fit measured traces.
    Fit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ModesOptical => "modes-optical",
            Command::ModesMicrowave => "modes-microwave",
            Command::G0 => "g0",
            Command::Tune => "tune",
            Command::Sweep => "sweep",
            Command::Spectrum => "spectrum",
            Command::Nms => "nms",
            Command::Noise => "noise",
            Command::OptimizeCoupling => "optimize-coupling",
            Command::Fit => "fit",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Everything a command needs besides its own config sections.
pub struct Context {
    pub text: String,
    pub path: PathBuf,
    pub format: Format,
    pub threads: usize,
}

impl Context {
    fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }

    fn config_error(&self, line: usize, column: usize, message: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}:{line}:{column}: {message}", self.path.display()))
    }

    fn config_error_at(&self, key_path: &[&str], message: impl std::fmt::Display) -> CliError {
        let (line, column) = config::locate(&self.text, key_path);
        self.config_error(line, column, message)
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    toolkit: &'static str,
    version: &'static str,
    command: &'static str,
    format: &'static str,
    config: &'a RunConfig,
}

/// Runs a command and returns the artifacts, `run.json` last.
pub fn execute(command: Command, cfg: RunConfig, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
    let (resolved, mut artifacts) = commands::dispatch(command, cfg, ctx)?;
    let record = RunRecord {
        toolkit: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        format: match ctx.format {
            Format::Csv => "csv",
            Format::Json => "json",
        },
        config: &resolved,
    };
    artifacts.push(Artifact::json("run.json", &record));
    Ok(artifacts)
}

fn run_parsed(cli: &Cli) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", cli.config.display())))?;
    let ctx = Context {
        text,
        path: cli.config.clone(),
        format: match cli.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        threads: cli
            .threads
            .map(usize::from)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let cfg = config::parse(&ctx.text).map_err(|e| ctx.config_error(e.line, e.column, e.message))?;
    let artifacts = execute(cli.command, cfg, &ctx)?;
    output::write_all(&cli.out, &artifacts)
        .map_err(|e| CliError::Io(format!("cannot write to {}: {e}", cli.out.display())))?;
    Ok(artifacts.into_iter().map(|a| a.name).collect())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_parsed(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", cli.out.join(f).display());
            }
            println!("{}", cli.out.join("manifest.json").display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
