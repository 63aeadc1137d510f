//! Batch driver for the complex Ginzburg-Landau laboratory.
//!
//! Exit codes: 0 = run completed (blowup detection is a result, not an
//! error), 2 = usage or config parse failure, 3 = the initial condition
//! could not be resolved to a finite field.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cgl::domain::Params;
use commands::SweepArgs;

#[derive(Parser)]
#[command(name = "cgl", version, about = "complex Ginzburg-Landau laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify and evaluate the spatially homogeneous equation
    /// v' = e^{i theta}|v|^alpha v + gamma v.
    Ode(OdeArgs),
    /// Run a simulation described by a key = value config file.
    Simulate { config: PathBuf },
    /// Evaluate every applicable blowup/global-existence condition on the
    /// configured initial data.
    Check {
        config: PathBuf,
        /// Report the small-data threshold under this interpolation constant
        /// as well as under the built-in estimate.
        #[arg(long)]
        gn_constant: Option<f64>,
    },
    /// Classify the (alpha, theta) plane by which blowup conditions hold.
    Sweep(SweepCli),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct OdeArgs {
    /// Initial value, `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    v0: String,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Comma-separated times at which to print the solution.
    #[arg(long, allow_hyphen_values = true)]
    times: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepCli {
    #[arg(long, default_value_t = 0.0)]
    alpha_min: f64,
    #[arg(long, default_value_t = 10.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = -std::f64::consts::FRAC_PI_4)]
    theta_min: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta_max: f64,
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    /// Output directory for regions.csv and the plot script.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn data_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn load_config(path: &PathBuf) -> Result<config::RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    config::parse_config(&text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Ode(args) => {
            let v0 = match config::parse_complex(&args.v0) {
                Ok(v) => v,
                Err(e) => return usage_error(&format!("--v0: {e}")),
            };
            let params = match Params::new(args.theta, args.alpha, args.gamma, args.dim) {
                Ok(p) => p,
                Err(e) => return usage_error(&e.to_string()),
            };
            let times: Vec<f64> = match args.times.as_deref() {
                None => Vec::new(),
                Some(list) => {
                    match list
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                    {
                        Ok(ts) => ts,
                        Err(_) => return usage_error(&format!("--times: bad list `{list}`")),
                    }
                }
            };
            match commands::cmd_ode(v0, &params, &times) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_error(&e),
            }
        }
        Command::Simulate { config } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            let u0 = match config::resolve_initial(&cfg.initial, &cfg.grid) {
                Ok(f) => f,
                Err(e) => return data_error(&e.to_string()),
            };
            match commands::cmd_simulate(&cfg, &u0) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_error(&e),
            }
        }
        Command::Check {
            config,
            gn_constant,
        } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            let u0 = match config::resolve_initial(&cfg.initial, &cfg.grid) {
                Ok(f) => f,
                Err(e) => return data_error(&e.to_string()),
            };
            match commands::cmd_check(&cfg, &u0, gn_constant) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_error(&e),
            }
        }
        Command::Sweep(args) => {
            let sweep = SweepArgs {
                alpha_range: (args.alpha_min, args.alpha_max),
                theta_range: (args.theta_min, args.theta_max),
                resolution: (args.resolution, args.resolution),
            };
            match commands::cmd_sweep(&sweep, &args.out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_error(&e),
            }
        }
    }
}
