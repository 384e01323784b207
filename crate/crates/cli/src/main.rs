use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use shvel::reproduction::PinvTolerance;
use shvel_cli::{CliError, Command, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "shvel",
    version,
    about = "Region-wide velocity fields and loudspeaker reproduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Pressure and velocity of the scenario's source(s) on the grid.
    Field(RunArgs),
    /// Velocity- and pressure-matching weights and reproduced fields.
    Reproduce(RunArgs),
    /// Conditioning and direction errors over the frequency sweep.
    Sweep(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Relative singular-value cut-off for the pseudoinverse.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn execute(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    let (command, args) = match cli.command {
        Sub::Field(a) => (Command::Field, a),
        Sub::Reproduce(a) => (Command::Reproduce, a),
        Sub::Sweep(a) => (Command::Sweep, a),
    };
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let mut scenario = Scenario::load(&args.scenario)?;
    if let Some(dir) = args.out {
        scenario.output_dir = dir;
    }
    if let Some(t) = args.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(
                CliError::validation("tolerance", format!("must be positive, got {t}")).into(),
            );
        }
        scenario.tolerance = PinvTolerance::Relative(t);
    }
    Ok(shvel_cli::run(command, &scenario)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.render().to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprint!("{message}");
            eprintln!(
                "error: {}",
                serde_json::json!({ "kind": "usage", "message": first })
            );
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let line = match e.downcast_ref::<CliError>() {
                Some(c) => c.to_json(),
                None => serde_json::json!({ "kind": "internal", "message": format!("{e:#}") })
                    .to_string(),
            };
            eprintln!("error: {line}");
            ExitCode::FAILURE
        }
    }
}
