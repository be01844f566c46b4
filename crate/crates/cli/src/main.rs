use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cp_pressure_cli::{emit_tables, run, CliError, ExperimentConfig, Overrides, RunReport, TaskKind};

#[derive(Parser)]
#[command(name = "cppressure", version, about = "Caratheodory-Pesin pressure experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cover pressure along increasing depths, with capacity pressures.
    Pressure(Common),
    /// Lower and upper capacity pressures.
    Capacity(Common),
    /// Multifractal curve T(q) with its Legendre spectrum.
    Spectrum(Common),
    /// Correlation entropies against cylinder Renyi sums.
    Correlation(Common),
    /// Variational inequality and Gibbs identity.
    VpCheck(Common),
    /// Pressure of frequency-typical sets.
    InverseVp(Common),
    /// Strict gap for the arccot potential on the line.
    GapExample(Common),
    /// Line covers against circle covers of the compactification.
    TransferCheck(Common),
    /// Every task in the configuration, or the randomized property suite.
    Suite(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bisection tolerance, overriding the configuration.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for sampling-based checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load(kind: Option<TaskKind>, common: &Common) -> Result<ExperimentConfig, CliError> {
    let overrides = Overrides { tol: common.tol, seed: common.seed };
    if let Some(t) = common.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config { path: "--tol".into(), message: "must be positive and finite".into() });
        }
    }
    if common.jobs == 0 {
        return Err(CliError::Config { path: "--jobs".into(), message: "must be positive".into() });
    }
    match (&common.config, kind) {
        (Some(path), Some(kind)) => ExperimentConfig::from_file(path, overrides)?.select(kind),
        (Some(path), None) => {
            let config = ExperimentConfig::from_file(path, overrides)?;
            if config.tasks.is_empty() {
                config.select(TaskKind::PropertySuite)
            } else {
                Ok(config)
            }
        }
        (None, Some(kind)) => ExperimentConfig::default_for(kind, overrides),
        (None, None) => ExperimentConfig::default_for(TaskKind::PropertySuite, overrides),
    }
}

fn print(report: &RunReport) {
    for task in &report.tasks {
        println!(
            "{} {} ({}) {:.3}s",
            if task.passed() { "PASS" } else { "FAIL" },
            task.name,
            task.kind,
            task.wall_clock.as_secs_f64()
        );
        for v in &task.values {
            match v.oracle_value {
                Some(o) => println!("  {} = {} (oracle {} = {}, tol {:e})", v.name, v.value, v.oracle, o, v.tolerance),
                None => println!("  {} = {} ({}, tol {:e})", v.name, v.value, v.oracle, v.tolerance),
            }
        }
        for c in task.checks.iter().filter(|c| !c.passed) {
            println!("  failed: {} = {:e} (bound {:e})", c.name, c.value, c.bound);
        }
        for w in &task.warnings {
            println!("  warning: {w}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Pressure(c) => (Some(TaskKind::Pressure), c),
        Command::Capacity(c) => (Some(TaskKind::Capacity), c),
        Command::Spectrum(c) => (Some(TaskKind::Spectrum), c),
        Command::Correlation(c) => (Some(TaskKind::Correlation), c),
        Command::VpCheck(c) => (Some(TaskKind::VpCheck), c),
        Command::InverseVp(c) => (Some(TaskKind::InverseVp), c),
        Command::GapExample(c) => (Some(TaskKind::GapExample), c),
        Command::TransferCheck(c) => (Some(TaskKind::TransferCheck), c),
        Command::Suite(c) => (None, c),
    };
    let outcome = load(kind, common).and_then(|config| {
        let report = run(&config, common.jobs)?;
        let dir = common.out.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        emit_tables(&report, &dir)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            print(&report);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
