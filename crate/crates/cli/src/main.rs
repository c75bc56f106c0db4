//! `fwlab`: batch driver for simulations, breaking studies, entropy
//! verification, traveling waves and parameter sweeps.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a run
//! aborts, 2 for usage and configuration errors.

mod commands;
mod config;
mod error;
mod presets;
mod report;
mod trajio;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};

#[derive(Parser)]
#[command(name = "fwlab", version, about = "Fornberg-Whitham simulation and verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the strong or finite-volume solver and report conservation.
    Simulate(RunArgs),
    /// Check the wave-breaking criterion against a strong run.
    Breaking(RunArgs),
    /// Weak-form, Kružkov, Oleinik and conservation checks.
    Verify(RunArgs),
    /// Build a peakon or cusp profile and fit its defect.
    Wave(RunArgs),
    /// Viscosity or resolution sweep, run in parallel.
    Sweep(RunArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "fwlab-out")]
    out: PathBuf,
    /// Bundled preset, applied before the file and inline settings.
    #[arg(long)]
    preset: Option<String>,
    /// Inline key=value settings.
    settings: Vec<String>,
}

fn execute(name: &str, args: &RunArgs) -> Result<Report, CliError> {
    let mut cfg = RunConfig::load(name, args.preset.as_deref(), args.config.as_deref(), &args.settings)?;
    let out = OutDir::create(&args.out)?;
    let report = match name {
        "simulate" => commands::simulate::run(&mut cfg, &out)?,
        "breaking" => commands::breaking::run(&mut cfg, &out)?,
        "verify" => commands::verify::run(&mut cfg, &out)?,
        "wave" => commands::wave::run(&mut cfg, &out)?,
        "sweep" => commands::sweep::run(&mut cfg, &out)?,
        _ => unreachable!("clap restricts the verbs"),
    };
    out.write_json("report.json", &report)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Breaking(a) => ("breaking", a),
        Command::Verify(a) => ("verify", a),
        Command::Wave(a) => ("wave", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Presets => {
            for name in presets::names() {
                println!("{name}");
            }
            return ExitCode::SUCCESS;
        }
    };
    match execute(name, args) {
        Ok(report) => {
            print!("{}", report.summary());
            println!("report: {}", args.out.join("report.json").display());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("fwlab {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
