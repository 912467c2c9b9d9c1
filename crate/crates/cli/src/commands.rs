//! The five subcommands. Every command is deterministic given its inputs
//! and the seed flag; outputs are written atomically (temp file + rename).
//!
//! Exit code contract: 0 success, 2 input/validation error, 3 I/O error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use greyvalve_core::hybrid::{fit_hybrid, DensityLaw, FeatureSet, HybridSample};
use greyvalve_core::lssvm::{self, Dataset, KernelSpec};
use greyvalve_core::metrics::{evaluate, EvaluationReport};
use greyvalve_core::persist::{hybrid_to_json, lssvm_to_json, model_from_json, SavedModel};
use greyvalve_core::simulator::{self, faults::CATALOG, GeometryConfig, SimConfig};
use greyvalve_core::telemetry::{format_float, write_csv};
use greyvalve_core::{FluidProperties, ValveGeometry};

use crate::features::{base_names, extract_features, resolve_column};
use crate::table::Table;

/// Failure classified by exit code: 2 for input/validation problems,
/// 3 for I/O.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) | Self::Io(msg) => f.write_str(msg),
        }
    }
}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Output paths are checked before any work starts.
fn ensure_writable_dir(path: &Path) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if parent.is_dir() {
        Ok(())
    } else {
        Err(CliError::Io(format!(
            "output directory {} does not exist",
            parent.display()
        )))
    }
}

/// Writes via a sibling temp file and rename, so a crash never leaves a
/// half-written output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn cmd_simulate(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    ensure_writable_dir(out)?;
    let text = read_file(config)?;
    let mut cfg: SimConfig = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: {e}", config.display())))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(usage)?;
    let records = simulator::run(&cfg).map_err(usage)?;
    write_atomic(out, &write_csv(&records))?;
    println!("{} records written to {}", records.len(), out.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    Hybrid,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    Rbf { sigma: Option<f64> },
    Linear,
    Polynomial { degree: u32, offset: f64 },
}

pub struct TrainArgs {
    pub data: PathBuf,
    pub feature_set: FeatureSet,
    pub mode: TrainMode,
    pub kernel: KernelChoice,
    pub c: f64,
    pub model_out: PathBuf,
    pub lagged: usize,
    pub skip_zero_targets: bool,
}

/// Mechanism constants assumed by CLI-trained hybrid models. The learned
/// area absorbs any constant factor, so flow predictions do not depend on
/// these values; they only fix the scale in which the area is reported.
fn default_model_geometry() -> ValveGeometry {
    let g = GeometryConfig::default();
    ValveGeometry {
        ac: 0.0,
        beta: g.beta,
        cv: g.cv,
        epsilon: g.epsilon,
        fl: g.fl,
    }
}

fn resolve_kernel(choice: KernelChoice, rows: &[Vec<f64>]) -> Result<KernelSpec<f64>, CliError> {
    let kernel = match choice {
        KernelChoice::Rbf { sigma: Some(sigma) } => KernelSpec::Rbf { sigma },
        KernelChoice::Rbf { sigma: None } => {
            // Median-distance heuristic in the z-scored feature space the
            // trainer will actually use.
            let probe = Dataset::from_rows(rows.to_vec(), vec![0.0; rows.len()])
                .map_err(usage)?
                .with_zscore();
            KernelSpec::Rbf {
                sigma: probe.rbf_bandwidth_heuristic(),
            }
        }
        KernelChoice::Linear => KernelSpec::Linear,
        KernelChoice::Polynomial { degree, offset } => KernelSpec::Polynomial { degree, offset },
    };
    kernel.validate().map_err(usage)?;
    Ok(kernel)
}

fn print_report(report: &EvaluationReport<f64>) {
    println!("{report}");
    println!("{}", EvaluationReport::<f64>::csv_header());
    println!("{}", report.to_csv_row());
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    ensure_writable_dir(&args.model_out)?;
    let text = read_file(&args.data)?;
    let mut table = Table::parse(&text).map_err(usage)?;

    if args.skip_zero_targets {
        let q = resolve_column(&table, "q").map_err(usage)?;
        table.retain_rows(|i| q[i] != 0.0);
    }
    let targets_by_row = resolve_column(&table, "q").map_err(usage)?;
    let fm = extract_features(&table, args.feature_set.names(), args.lagged).map_err(usage)?;
    let targets: Vec<f64> = fm.source_rows.iter().map(|&i| targets_by_row[i]).collect();
    if fm.rows.len() < 2 {
        return Err(usage(format!(
            "degenerate data: need at least 2 usable rows, got {}",
            fm.rows.len()
        )));
    }
    let kernel = resolve_kernel(args.kernel, &fm.rows)?;
    let fluid = FluidProperties::water();

    let (model_json, predictions) = match args.mode {
        TrainMode::Hybrid => {
            let samples: Vec<HybridSample<f64>> = fm
                .rows
                .iter()
                .zip(&targets)
                .map(|(row, &q)| HybridSample {
                    features: row.clone(),
                    q,
                    pvc: row[1],
                })
                .collect();
            let density_law = args
                .feature_set
                .includes_temperature()
                .then(|| DensityLaw::water_like(fluid.rho1));
            let model = fit_hybrid(
                &samples,
                args.feature_set,
                &default_model_geometry(),
                &fluid,
                &kernel,
                args.c,
                density_law,
            )
            .map_err(usage)?;
            let predictions = samples
                .iter()
                .map(|s| model.predict_flow(&s.features))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(usage)?;
            let json = hybrid_to_json(&model, &fm.names, args.lagged).map_err(usage)?;
            (json, predictions)
        }
        TrainMode::Direct => {
            let data = Dataset::from_rows(fm.rows.clone(), targets.clone())
                .map_err(usage)?
                .with_zscore();
            let model = lssvm::train(&data, &kernel, args.c).map_err(usage)?;
            let predictions = fm
                .rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(usage)?;
            let json = lssvm_to_json(&model, &fm.names, args.lagged).map_err(usage)?;
            (json, predictions)
        }
    };

    // Evaluate before writing anything, so a zero-flow target (undefined
    // MAPE) aborts with no side effects; --skip-zero-targets pre-filters.
    let report = evaluate(&targets, &predictions).map_err(usage)?;
    write_atomic(&args.model_out, &model_json)?;
    println!(
        "trained {} model on {} samples from {}",
        match args.mode {
            TrainMode::Hybrid => "hybrid",
            TrainMode::Direct => "direct",
        },
        fm.rows.len(),
        args.data.display()
    );
    print_report(&report);
    println!("model written to {}", args.model_out.display());
    Ok(())
}

pub fn cmd_predict(model_path: &Path, data: &Path, out: &Path) -> Result<(), CliError> {
    ensure_writable_dir(out)?;
    let saved = model_from_json(&read_file(model_path)?).map_err(usage)?;
    let text = read_file(data)?;
    let mut table = Table::parse(&text).map_err(usage)?;

    let base = base_names(saved.feature_names(), saved.lagged());
    let base_refs: Vec<&str> = base.iter().map(String::as_str).collect();
    let fm = extract_features(&table, &base_refs, saved.lagged()).map_err(usage)?;

    let mut column = vec![String::new(); table.len()];
    for (j, row) in fm.rows.iter().enumerate() {
        let line = fm.source_rows[j] + 2;
        let value = match &saved {
            SavedModel::Lssvm(m) => m
                .model
                .predict(row)
                .map_err(|e| usage(format!("line {line}: {e}")))?,
            SavedModel::Hybrid(m) => m
                .model
                .predict_flow(row)
                .map_err(|e| usage(format!("line {line}: {e}")))?,
        };
        column[fm.source_rows[j]] = format_float(value);
    }
    table.push_column("q_pred", column);
    write_atomic(out, &table.to_csv())?;
    println!("{} predictions written to {}", fm.rows.len(), out.display());
    Ok(())
}

pub fn cmd_evaluate(
    pred: &Path,
    truth: Option<&Path>,
    skip_zero_targets: bool,
) -> Result<(), CliError> {
    let pred_table = Table::parse(&read_file(pred)?).map_err(usage)?;
    let predictions = pred_table.f64_column("q_pred").map_err(usage)?;
    let targets = match truth {
        Some(path) => {
            let truth_table = Table::parse(&read_file(path)?).map_err(usage)?;
            if truth_table.len() != pred_table.len() {
                return Err(usage(format!(
                    "row count mismatch: {} has {} rows, {} has {}",
                    path.display(),
                    truth_table.len(),
                    pred.display(),
                    pred_table.len()
                )));
            }
            truth_table.f64_column("q").map_err(usage)?
        }
        None => pred_table.f64_column("q").map_err(usage)?,
    };
    let (y, yhat): (Vec<f64>, Vec<f64>) = targets
        .into_iter()
        .zip(predictions)
        .filter(|(t, _)| !(skip_zero_targets && *t == 0.0))
        .unzip();
    if y.is_empty() {
        return Err(usage("no rows to evaluate"));
    }
    let report = evaluate(&y, &yhat).map_err(usage)?;
    print_report(&report);
    Ok(())
}

pub fn cmd_faults() {
    for info in &CATALOG {
        println!(
            "{:<4} {:<52} {:<7} {}",
            info.id, info.description, info.interval, info.development
        );
    }
}
