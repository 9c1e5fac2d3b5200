//! `fredfam`: scenario runner for index and Weyl-spectrum experiments.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 error.

mod config;
mod runner;

use clap::{Parser, Subcommand};
use config::ScenarioConfig;
use runner::{run_scenario, Status};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fredfam", version, about = "Index theory for operator families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and emit a JSON result.
    Run {
        /// Path to the TOML scenario config.
        config: PathBuf,
        /// Write the JSON result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write plot data (CSV) here, when the payload is plottable.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Override the grid step h of the scenario grid.
        #[arg(long)]
        grid_h: Option<f64>,
        /// Override the angular sample count.
        #[arg(long)]
        theta_samples: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, plot, grid_h, theta_samples } => {
            match execute(&config, out.as_deref(), plot.as_deref(), grid_h, theta_samples) {
                Ok(status) => ExitCode::from(status.exit_code() as u8),
                Err(message) => {
                    eprintln!("error: {message}");
                    ExitCode::from(Status::Error.exit_code() as u8)
                }
            }
        }
    }
}

fn execute(
    config_path: &Path,
    out: Option<&Path>,
    plot: Option<&Path>,
    grid_h: Option<f64>,
    theta_samples: Option<usize>,
) -> Result<Status, String> {
    let raw = fs::read(config_path)
        .map_err(|e| format!("cannot read {}: {e}", config_path.display()))?;
    let mut config: ScenarioConfig = toml::from_str(
        std::str::from_utf8(&raw).map_err(|e| format!("config is not UTF-8: {e}"))?,
    )
    .map_err(|e| format!("invalid config: {e}"))?;

    if let Some(h) = grid_h {
        match &mut config.inputs.grid {
            Some(grid) => grid.h = h,
            None => return Err("--grid-h given but the scenario has no grid".into()),
        }
    }
    if let Some(n) = theta_samples {
        config.tolerances.theta_samples = Some(n);
    }

    let result = run_scenario(&config, &raw)?;

    let json = serde_json::to_string_pretty(&result.to_json())
        .map_err(|e| format!("serialization failed: {e}"))?;
    match out {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => println!("{json}"),
    }

    if let Some(path) = plot {
        let data = result
            .plot
            .as_ref()
            .ok_or("payload is not plottable (no grid set or curve samples)")?;
        write_atomic(path, runner::plot_csv(data).as_bytes())?;
    }

    Ok(result.status)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("cannot move into place: {e}"))
}
