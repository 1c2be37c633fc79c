//! `netcert` — certification runner for the three-source quantum network.
//!
//! Subcommands: `verify-all`, `bell`, `correlations`, `noise-sweep`,
//! `extract`, `upb-check`. Exit codes: 0 all pass, 1 condition/distance
//! failure, 2 precondition failure, 3 I/O or configuration error.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, CommandOutput, Outcome, StateChoice};
use config::{apply_config_file, parse_config_file, parse_noise, RunConfig};

#[derive(Parser)]
#[command(name = "netcert", version, about = "Quantum-network measurement certification")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with key = value lines (CLI flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for all randomness; printed in every report.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Per-source visibilities v_A,v_B,v_C in [0,1].
    #[arg(long, global = true, value_name = "vA,vB,vC")]
    noise: Option<String>,

    /// Junk dimension per side for scrambling (1 or 2).
    #[arg(long, global = true, value_name = "DIM")]
    junk_dim: Option<usize>,

    /// Random restarts for the see-saw product search.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    /// Output format: json, csv or table.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Write output to this file instead of stdout; relative paths honour
    /// NETCERT_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Tolerance for exact algebraic/probability identities.
    #[arg(long, global = true, value_name = "X")]
    tolerance_algebraic: Option<f64>,

    /// Tolerance for iteratively computed quantities.
    #[arg(long, global = true, value_name = "X")]
    tolerance_iterative: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every certification suite and structural check.
    VerifyAll,
    /// Bounds, observed value and SOS residual of one Bell inequality.
    Bell {
        /// Eve outcome index of the inequality (0..=7).
        #[arg(long, default_value_t = 0)]
        l: usize,
    },
    /// Dump the correlation tensor slice for one Eve measurement.
    Correlations {
        /// Eve setting (0..=2).
        #[arg(long, default_value_t = 0)]
        e: usize,
    },
    /// Bell/Mermin values and suite pass counts over a visibility grid,
    /// plus the classical-bound crossing v*.
    NoiseSweep {
        /// Comma-separated visibilities.
        #[arg(long, value_name = "v1,v2,...", default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
        grid: String,
    },
    /// Scramble the reference experiment with the seed, verify all
    /// conditions, extract and compare against the reference forms.
    Extract {
        /// Scramble into the −Y branch of the third observables.
        #[arg(long, default_value_t = false)]
        negate_y: bool,
    },
    /// UPB verification, PPT and bound-entanglement verdict.
    UpbCheck {
        /// State to analyse: gamma/4 (default), ghz:L, or maximally-mixed.
        #[arg(long, default_value = "gamma/4")]
        state: String,
    },
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let map = parse_config_file(&text).map_err(CliError::Config)?;
        apply_config_file(&mut cfg, &map).map_err(CliError::Config)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(noise) = &common.noise {
        cfg.noise = parse_noise(noise).map_err(CliError::Config)?;
    }
    if let Some(j) = common.junk_dim {
        cfg.junk_dim = j;
    }
    if let Some(r) = common.restarts {
        cfg.restarts = r;
    }
    if let Some(f) = &common.format {
        cfg.format = f.parse().map_err(CliError::Config)?;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(t) = common.tolerance_algebraic {
        cfg.tolerance_algebraic = t;
    }
    if let Some(t) = common.tolerance_iterative {
        cfg.tolerance_iterative = t;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, output: &CommandOutput) -> Result<(), CliError> {
    match cfg.resolved_out() {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
                }
            }
            std::fs::write(&path, &output.text)
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = build_config(&cli.common)?;
    let output = match &cli.command {
        Command::VerifyAll => commands::cmd_verify_all(&cfg)?,
        Command::Bell { l } => commands::cmd_bell(&cfg, *l)?,
        Command::Correlations { e } => commands::cmd_correlations(&cfg, *e)?,
        Command::NoiseSweep { grid } => {
            let vs: Result<Vec<f64>, _> =
                grid.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vs = vs.map_err(|e| CliError::Config(format!("bad grid: {e}")))?;
            commands::cmd_noise_sweep(&cfg, &vs)?
        }
        Command::Extract { negate_y } => commands::cmd_extract(&cfg, *negate_y)?,
        Command::UpbCheck { state } => {
            let choice: StateChoice = state.parse().map_err(CliError::Config)?;
            commands::cmd_upb_check(&cfg, choice)?
        }
    };
    emit(&cfg, &output)?;
    Ok(output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(CommandOutput { outcome: Outcome::Pass, .. }) => ExitCode::from(0),
        Ok(CommandOutput { outcome: Outcome::ConditionFailure, .. }) => ExitCode::from(1),
        Err(CliError::Precondition(msg)) => {
            eprintln!("netcert: precondition failure: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("netcert: configuration error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("netcert: I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}
