use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use suitability::config::{Command, OutputFormat, RunConfig};
use suitability::report::{
    analyze_csv, analyze_text, run_analyze, run_simulate, run_sweep, simulation_csv, simulation_text, sweep_csv,
    sweep_text, to_json,
};
use suitability::sim::VerdictLevel;
use suitability::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_INSECURE: u8 = 4;

/// Suitability analysis of a two-state polarization QKD link.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic suitability tables, leak ratios and security verdict.
    Analyze(Common),
    /// Monte Carlo exchange compared against the analytic model.
    Simulate(Common),
    /// Analytic report over a one-parameter grid (set sweep.* keys).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set source.mu=0.5`.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// text, json or csv.
    #[arg(short, long)]
    format: Option<String>,
    /// Exit with status 4 when the verdict is INSECURE.
    #[arg(long)]
    fail_on_insecure: bool,
}

fn load(command: Command, args: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            key: path.display().to_string(),
            reason: e.to_string(),
        })?;
        cfg.apply_text(&text)?;
    }
    cfg.apply_overrides(args.overrides.iter().map(String::as_str))?;
    if let Some(f) = &args.format {
        cfg.output_format = f.parse()?;
    }
    if let Some(p) = &args.output {
        cfg.output_path = Some(p.clone());
    }
    cfg.command = command;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &RunConfig) -> Result<(String, VerdictLevel), Error> {
    let format = cfg.output_format;
    Ok(match cfg.command {
        Command::Analyze => {
            let r = run_analyze(cfg)?;
            let text = match format {
                OutputFormat::Text => analyze_text(&r),
                OutputFormat::Json => to_json(&r),
                OutputFormat::Csv => analyze_csv(&r),
            };
            (text, r.verdict)
        }
        Command::Simulate => {
            let r = run_simulate(cfg)?;
            let text = match format {
                OutputFormat::Text => simulation_text(&r),
                OutputFormat::Json => to_json(&r),
                OutputFormat::Csv => simulation_csv(&r),
            };
            (text, r.comparison.analytic_verdict)
        }
        Command::Sweep => {
            let rows = run_sweep(cfg)?;
            let worst = rows
                .iter()
                .map(|r| r.report.verdict)
                .max()
                .unwrap_or(VerdictLevel::Secure);
            let text = match format {
                OutputFormat::Text => sweep_text(&rows),
                OutputFormat::Json => to_json(&rows),
                OutputFormat::Csv => sweep_csv(&rows),
            };
            (text, worst)
        }
    })
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidParameter { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let cfg = match load(command, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let (text, verdict) = match run(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cfg.output_path {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
        None => print!("{text}"),
    }
    if args.fail_on_insecure && verdict == VerdictLevel::Insecure {
        return ExitCode::from(EXIT_INSECURE);
    }
    ExitCode::SUCCESS
}
