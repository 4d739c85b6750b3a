//! `sim` — command-line front end for the Monte Carlo harness.
//!
//! Three subcommands cover the workflows: `run` executes one scenario from a
//! JSON config, `sweep` re-runs it across an axis, and `preset` reproduces a
//! canned experiment family. Results land as one CSV or JSON table per
//! scenario id in the output directory. Exit code 0 means success, 2 a
//! configuration problem, 1 anything else (I/O, thread pool).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beamsim::harness::{
    load_config, preset_names, preset_with, run_monte_carlo, sweep, write_records, CurveRecord,
    EmitFormat, HarnessError, ScenarioConfig, SweepAxis,
};

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Deterministic simulator for adaptive beamforming in interference networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory to write result tables into (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output encoding: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Override the Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the scenario described by a JSON config file.
    ///
    /// A config listing several snr_db points is expanded into an SNR sweep
    /// automatically.
    Run {
        /// Path to the scenario config (JSON).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-run a base scenario across one swept axis.
    Sweep {
        /// Path to the base scenario config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Axis to sweep: training_length, cycles, snr_db, or lambda.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values, e.g. "2,4,8,16".
        #[arg(long)]
        values: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a canned experiment family (fig1 through fig5).
    Preset {
        /// Family name: fig1, fig2, fig3, fig4, or fig5.
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn apply_overrides(cfg: &mut ScenarioConfig, output: &OutputArgs) {
    if let Some(t) = output.trials {
        cfg.n_trials = t;
    }
    if let Some(s) = output.seed {
        cfg.seed = s;
    }
}

fn parse_values(text: &str) -> Result<Vec<f64>, HarnessError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| {
                HarnessError::ConfigParse(format!("axis value {s:?} is not a number"))
            })
        })
        .collect()
}

/// Writes one table per scenario id, preserving first-appearance order, and
/// reports each file on stdout.
fn write_grouped(
    records: &[CurveRecord],
    format: EmitFormat,
    out_dir: &Path,
) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.scenario_id.as_str()) {
            order.push(&r.scenario_id);
        }
    }
    for id in order {
        let group: Vec<CurveRecord> = records
            .iter()
            .filter(|r| r.scenario_id == id)
            .cloned()
            .collect();
        let path = out_dir.join(format!("{id}.{}", format.extension()));
        write_records(&group, format, &path)?;
        println!("wrote {} ({} rows)", path.display(), group.len());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.cmd {
        Cmd::Run { config, output } => {
            let format = EmitFormat::parse(&output.format)?;
            let mut cfg = load_config(&config)?;
            apply_overrides(&mut cfg, &output);
            let records = if cfg.snr_db.len() > 1 {
                let snrs = cfg.snr_db.clone();
                sweep(&cfg, SweepAxis::SnrDb, &snrs)?
            } else {
                run_monte_carlo(&cfg)?
            };
            write_grouped(&records, format, &output.out)
        }
        Cmd::Sweep {
            config,
            axis,
            values,
            output,
        } => {
            let format = EmitFormat::parse(&output.format)?;
            let mut cfg = load_config(&config)?;
            apply_overrides(&mut cfg, &output);
            let axis = SweepAxis::parse(&axis)?;
            let values = parse_values(&values)?;
            let records = sweep(&cfg, axis, &values)?;
            write_grouped(&records, format, &output.out)
        }
        Cmd::Preset { name, output } => {
            let format = EmitFormat::parse(&output.format)?;
            if !preset_names().contains(&name.as_str()) {
                return Err(HarnessError::ConfigParse(format!(
                    "unknown preset {name:?}; available: {}",
                    preset_names().join(", ")
                )));
            }
            let records = preset_with(&name, output.trials, output.seed)?;
            write_grouped(&records, format, &output.out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::ConfigInvalid(_)
                | HarnessError::ConfigParse(_)
                | HarnessError::TableParse(_) => ExitCode::from(2),
                HarnessError::Io(_) | HarnessError::Phy(_) => ExitCode::from(1),
            }
        }
    }
}
