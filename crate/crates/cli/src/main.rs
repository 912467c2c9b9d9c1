//! `greyvalve`: grey-box control-valve modeling from the command line.
//!
//! Pipeline: `simulate` telemetry from a JSON scenario, `train` a hybrid
//! or direct flow model, `predict` on new data, `evaluate` the
//! predictions, and `faults` to list the actuator fault catalog.

mod commands;
mod features;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{KernelChoice, TrainArgs, TrainMode};
use greyvalve_core::hybrid::FeatureSet;

#[derive(Parser)]
#[command(
    name = "greyvalve",
    version,
    about = "Grey-box control-valve modeling: simulate telemetry, fit flow models, predict, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeaturesArg {
    /// Upstream pressure, downstream pressure, stroke
    P1p2x,
    /// Pressures, stroke and temperature
    P1p2xt,
}

impl From<FeaturesArg> for FeatureSet {
    fn from(v: FeaturesArg) -> Self {
        match v {
            FeaturesArg::P1p2x => FeatureSet::P1P2X,
            FeaturesArg::P1p2xt => FeatureSet::P1P2XT,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Learn the effective flow area and run it through the orifice equation
    Hybrid,
    /// Regress flow directly on the features
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Rbf,
    Linear,
    Poly,
}

#[derive(Subcommand)]
enum Command {
    /// Generate telemetry CSV from a simulation scenario (JSON)
    Simulate {
        /// Scenario file; see the README for the schema
        #[arg(long)]
        config: PathBuf,
        /// Output telemetry CSV path
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's random seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit a flow model on telemetry and save it as JSON
    Train {
        /// Training CSV (sensed columns are preferred over bare ones)
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "p1p2x")]
        features: FeaturesArg,
        #[arg(long, value_enum, default_value = "hybrid")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "rbf")]
        kernel: KernelArg,
        /// RBF bandwidth; defaults to the median-distance heuristic
        #[arg(long)]
        sigma: Option<f64>,
        /// Regularization constant
        #[arg(long, default_value_t = 1e6)]
        c: f64,
        /// Polynomial kernel degree (only with --kernel poly; default 2)
        #[arg(long)]
        degree: Option<u32>,
        /// Polynomial kernel offset (only with --kernel poly; default 1)
        #[arg(long)]
        offset: Option<f64>,
        /// Output model JSON path
        #[arg(long)]
        model_out: PathBuf,
        /// Append the features of this many previous samples to each row
        #[arg(long, default_value_t = 0, value_name = "K")]
        lagged: usize,
        /// Drop rows whose flow target is zero before training/evaluation
        #[arg(long)]
        skip_zero_targets: bool,
    },
    /// Apply a saved model to a data file, appending a q_pred column
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score q_pred against ground-truth q (RMSE, MAPE %, Err_max %)
    Evaluate {
        /// CSV with the q_pred column (and q, unless --truth is given)
        #[arg(long)]
        pred: PathBuf,
        /// Separate ground-truth CSV with the q column
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Drop rows whose true flow is zero instead of failing
        #[arg(long)]
        skip_zero_targets: bool,
    },
    /// List the actuator fault catalog (id, description, interval, type)
    Faults,
}

/// Kernel flags only make sense together with their kernel family.
fn resolve_kernel_flags(
    kernel: KernelArg,
    sigma: Option<f64>,
    degree: Option<u32>,
    offset: Option<f64>,
) -> Result<KernelChoice, commands::CliError> {
    let usage = |msg: &str| commands::CliError::Usage(msg.to_string());
    match kernel {
        KernelArg::Rbf => {
            if degree.is_some() || offset.is_some() {
                return Err(usage("--degree/--offset only apply to --kernel poly"));
            }
            Ok(KernelChoice::Rbf { sigma })
        }
        KernelArg::Linear => {
            if sigma.is_some() || degree.is_some() || offset.is_some() {
                return Err(usage(
                    "--kernel linear takes none of --sigma/--degree/--offset",
                ));
            }
            Ok(KernelChoice::Linear)
        }
        KernelArg::Poly => {
            if sigma.is_some() {
                return Err(usage("--sigma only applies to --kernel rbf"));
            }
            Ok(KernelChoice::Polynomial {
                degree: degree.unwrap_or(2),
                offset: offset.unwrap_or(1.0),
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), commands::CliError> {
    match cli.command {
        Command::Simulate { config, out, seed } => commands::cmd_simulate(&config, &out, seed),
        Command::Train {
            data,
            features,
            mode,
            kernel,
            sigma,
            c,
            degree,
            offset,
            model_out,
            lagged,
            skip_zero_targets,
        } => {
            let kernel = resolve_kernel_flags(kernel, sigma, degree, offset)?;
            commands::cmd_train(&TrainArgs {
                data,
                feature_set: features.into(),
                mode: match mode {
                    ModeArg::Hybrid => TrainMode::Hybrid,
                    ModeArg::Direct => TrainMode::Direct,
                },
                kernel,
                c,
                model_out,
                lagged,
                skip_zero_targets,
            })
        }
        Command::Predict { model, data, out } => commands::cmd_predict(&model, &data, &out),
        Command::Evaluate {
            pred,
            truth,
            skip_zero_targets,
        } => commands::cmd_evaluate(&pred, truth.as_deref(), skip_zero_targets),
        Command::Faults => {
            commands::cmd_faults();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
