//! Subcommand definitions and dispatch.
//!
//! `generate` writes a synthetic dataset CSV; `train` fits one checkpoint
//! per model kind on a feature CSV; `evaluate` and `curves` re-score saved
//! checkpoints on (new) data; `full-run` executes the complete standardize →
//! train → evaluate → reliability-curve workflow under stratified k-fold
//! cross-validation and emits `report.json` plus plot-ready curve CSVs.
//!
//! Option precedence: built-in defaults, then the `--config` JSON file, then
//! explicit flags.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use vqsafe_core::eval::{run_experiment, CurveConfig, Dataset, Scaler};
use vqsafe_core::metrics::{accuracy, argmax_labels, f1_macro, mse_prob, rga_multiclass};
use vqsafe_core::model::ModelKind;
use vqsafe_core::perturb::{
    feature_importance_ranking, rga_removal_curve, rge_removal_curve, rgr_fgsm_curve,
    rgr_noise_curve, NoiseGrid,
};
use vqsafe_core::seed::derive_seed;
use vqsafe_core::synthetic::{generate_synthetic, SyntheticSpec};
use vqsafe_core::train::{train_model, TrainConfig};

use crate::checkpoint::{load_model, save_model, StoredModel, TrainConfigJson};
use crate::csvio::{load_dataset_csv, save_dataset_csv, write_rg_curve_csv};
use crate::report::emit_report;
use crate::CliError;

#[derive(Parser)]
#[command(
    name = "vqsafe",
    version,
    about = "Hybrid variational-quantum classifier with rank-graduation reliability evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic Gaussian-blob dataset to <out>/dataset.csv
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        features: Option<usize>,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train one checkpoint per kind on the full dataset
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Score saved checkpoints on a dataset, writing evaluation.json
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        /// Directory holding model_<kind>.json; defaults to --out
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Recompute reliability curves for saved checkpoints on a dataset
    Curves {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Full cross-validated experiment: report.json plus mean curve CSVs
    FullRun {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<String>,
    synthetic: Option<SyntheticJson>,
    kinds: Option<Vec<String>>,
    train: Option<TrainOverrides>,
    curves: Option<CurveOverrides>,
    folds: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SyntheticJson {
    n_samples: usize,
    n_features: usize,
    n_classes: usize,
    separation: f64,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TrainOverrides {
    learning_rate: Option<f64>,
    batch_size: Option<usize>,
    epochs: Option<usize>,
    adam_beta1: Option<f64>,
    adam_beta2: Option<f64>,
    adam_epsilon: Option<f64>,
    l2_strength: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CurveOverrides {
    noise_multipliers: Option<Vec<f64>>,
    fgsm_epsilons: Option<Vec<f64>>,
    sample_removal_fractions: Option<Vec<f64>>,
    feature_removal_fractions: Option<Vec<f64>>,
}

/// Parse arguments and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("vqsafe: {}", err);
            err.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate { out, config, samples, features, classes, separation, seed } => {
            generate(out, config, samples, features, classes, separation, seed)
        }
        Command::Train { data, out, kinds, seed, config } => train(data, out, kinds, seed, config),
        Command::Evaluate { data, models, out, kinds, config } => {
            evaluate(data, models, out, kinds, config)
        }
        Command::Curves { data, models, out, kinds, seed, config } => {
            curves(data, models, out, kinds, seed, config)
        }
        Command::FullRun { data, out, kinds, folds, seed, config } => {
            full_run(data, out, kinds, folds, seed, config)
        }
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse config {}: {}", path.display(), e)))
}

fn parse_kinds(flag: Option<&str>, config: &FileConfig) -> Result<Vec<ModelKind>, CliError> {
    let names: Vec<String> = match (flag, &config.kinds) {
        (Some(s), _) => s.split(',').map(|p| p.trim().to_string()).collect(),
        (None, Some(list)) => list.clone(),
        (None, None) => vec!["qml".into(), "mlp".into(), "linear".into()],
    };
    let mut kinds = Vec::new();
    for name in &names {
        let kind: ModelKind = name
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown model kind {:?}", name)))?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Usage("no model kinds given".into()));
    }
    Ok(kinds)
}

fn train_config_from(config: &FileConfig, seed: u64) -> TrainConfig {
    let mut out = TrainConfig { seed, ..TrainConfig::default() };
    if let Some(t) = &config.train {
        if let Some(v) = t.learning_rate {
            out.learning_rate = v;
        }
        if let Some(v) = t.batch_size {
            out.batch_size = v;
        }
        if let Some(v) = t.epochs {
            out.epochs = v;
        }
        if let Some(v) = t.adam_beta1 {
            out.adam_beta1 = v;
        }
        if let Some(v) = t.adam_beta2 {
            out.adam_beta2 = v;
        }
        if let Some(v) = t.adam_epsilon {
            out.adam_epsilon = v;
        }
        if let Some(v) = t.l2_strength {
            out.l2_strength = v;
        }
    }
    out
}

fn curve_config_from(config: &FileConfig) -> CurveConfig {
    let mut out = CurveConfig::default();
    if let Some(c) = &config.curves {
        if let Some(v) = &c.noise_multipliers {
            out.noise_multipliers = v.clone();
        }
        if let Some(v) = &c.fgsm_epsilons {
            out.fgsm_epsilons = v.clone();
        }
        if let Some(v) = &c.sample_removal_fractions {
            out.sample_removal_fractions = v.clone();
        }
        if let Some(v) = &c.feature_removal_fractions {
            out.feature_removal_fractions = v.clone();
        }
    }
    out
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    load_dataset_csv(path)
        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {}", path.display(), e)))
}

// Seed streams for the standalone train subcommand.
fn kind_tag(kind: ModelKind) -> u64 {
    match kind {
        ModelKind::Qml => 0x10,
        ModelKind::Mlp => 0x11,
        ModelKind::Linear => 0x12,
    }
}

fn generate(
    out: PathBuf,
    config: Option<PathBuf>,
    samples: Option<usize>,
    features: Option<usize>,
    classes: Option<usize>,
    separation: Option<f64>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let file = load_file_config(config.as_deref())?;
    let base = file.synthetic.as_ref();
    let spec = SyntheticSpec {
        n_samples: samples.or(base.map(|s| s.n_samples)).unwrap_or(600),
        n_features: features.or(base.map(|s| s.n_features)).unwrap_or(64),
        n_classes: classes.or(base.map(|s| s.n_classes)).unwrap_or(3),
        separation: separation.or(base.map(|s| s.separation)).unwrap_or(6.0),
        seed: seed.or(base.and_then(|s| s.seed)).or(file.seed).unwrap_or(0),
    };
    let dataset = generate_synthetic(&spec).map_err(CliError::data)?;
    ensure_dir(&out)?;
    let path = out.join("dataset.csv");
    save_dataset_csv(&dataset, &path).map_err(CliError::runtime)?;
    eprintln!(
        "generated {} samples x {} features, {} classes -> {}",
        spec.n_samples,
        spec.n_features,
        spec.n_classes,
        path.display()
    );
    Ok(())
}

fn train(
    data: PathBuf,
    out: PathBuf,
    kinds: Option<String>,
    seed: Option<u64>,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = load_file_config(config.as_deref())?;
    let kinds = parse_kinds(kinds.as_deref(), &file)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let dataset = load_data(&data)?;

    let scaler = Scaler::fit(dataset.features()).map_err(CliError::runtime)?;
    let standardized = scaler.transform(dataset.features()).map_err(CliError::runtime)?;
    let train_split = Dataset::new(standardized, dataset.labels().to_vec(), dataset.n_classes())
        .map_err(CliError::runtime)?;

    ensure_dir(&out)?;
    for kind in kinds {
        let config = {
            let mut c = train_config_from(&file, 0);
            c.seed = derive_seed(seed, kind_tag(kind));
            c
        };
        let model = train_model(kind, &train_split, &config).map_err(CliError::runtime)?;
        let stored = StoredModel {
            model,
            scaler: scaler.clone(),
            seed,
            config: TrainConfigJson::from_config(&config),
        };
        let path = out.join(format!("model_{}.json", kind.as_str()));
        save_model(&stored, &path).map_err(CliError::runtime)?;
        eprintln!("trained {} -> {}", kind.as_str(), path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalEntry {
    kind: String,
    f1_macro: f64,
    accuracy: f64,
    mse: f64,
    rga: f64,
}

#[derive(Serialize)]
struct EvalJson {
    dataset: String,
    models: Vec<EvalEntry>,
}

fn load_checkpoints(
    dir: &Path,
    kinds: &[ModelKind],
) -> Result<Vec<(ModelKind, StoredModel)>, CliError> {
    kinds
        .iter()
        .map(|&kind| {
            let path = dir.join(format!("model_{}.json", kind.as_str()));
            load_model(&path)
                .map(|stored| (kind, stored))
                .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))
        })
        .collect()
}

fn evaluate(
    data: PathBuf,
    models: Option<PathBuf>,
    out: PathBuf,
    kinds: Option<String>,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = load_file_config(config.as_deref())?;
    let kinds = parse_kinds(kinds.as_deref(), &file)?;
    let dataset = load_data(&data)?;
    let models_dir = models.unwrap_or_else(|| out.clone());
    let stored = load_checkpoints(&models_dir, &kinds)?;

    let mut entries = Vec::new();
    for (kind, stored) in stored {
        if stored.model.n_features() != dataset.n_features() {
            return Err(CliError::Data(format!(
                "{} expects {} features, dataset has {}",
                kind.as_str(),
                stored.model.n_features(),
                dataset.n_features()
            )));
        }
        let x = stored.scaler.transform(dataset.features()).map_err(CliError::runtime)?;
        let probs = stored.model.predict_matrix(&x).map_err(CliError::runtime)?;
        let predicted = argmax_labels(&probs);
        entries.push(EvalEntry {
            kind: kind.as_str().into(),
            f1_macro: f1_macro(dataset.labels(), &predicted).map_err(CliError::runtime)?,
            accuracy: accuracy(dataset.labels(), &predicted).map_err(CliError::runtime)?,
            mse: mse_prob(dataset.labels(), &probs).map_err(CliError::runtime)?,
            rga: rga_multiclass(dataset.labels(), &probs).map_err(CliError::runtime)?,
        });
    }

    ensure_dir(&out)?;
    let json = EvalJson { dataset: data.display().to_string(), models: entries };
    let mut text = serde_json::to_string_pretty(&json).expect("eval serializes");
    text.push('\n');
    fs::write(out.join("evaluation.json"), text).map_err(CliError::runtime)?;
    Ok(())
}

fn curves(
    data: PathBuf,
    models: Option<PathBuf>,
    out: PathBuf,
    kinds: Option<String>,
    seed: Option<u64>,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = load_file_config(config.as_deref())?;
    let kinds = parse_kinds(kinds.as_deref(), &file)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let curve_config = curve_config_from(&file);
    let dataset = load_data(&data)?;
    let models_dir = models.unwrap_or_else(|| out.clone());
    let stored = load_checkpoints(&models_dir, &kinds)?;
    ensure_dir(&out)?;

    for (kind, stored) in stored {
        let x = stored.scaler.transform(dataset.features()).map_err(CliError::runtime)?;
        let labels = dataset.labels();
        let split = Dataset::new(x.clone(), labels.to_vec(), dataset.n_classes())
            .map_err(CliError::runtime)?;
        let ranking = feature_importance_ranking(&split, derive_seed(seed, 0x02))
            .map_err(CliError::runtime)?;
        let grid = NoiseGrid::from_features(&x, curve_config.noise_multipliers.clone())
            .map_err(CliError::runtime)?;
        let probs = stored.model.predict_matrix(&x).map_err(CliError::runtime)?;

        let written = [
            (
                "rga_removal",
                rga_removal_curve(&probs, labels, &curve_config.sample_removal_fractions)
                    .map_err(CliError::runtime)?,
            ),
            (
                "rgr_noise",
                rgr_noise_curve(&stored.model, &x, labels, &grid, derive_seed(seed, 0x03))
                    .map_err(CliError::runtime)?,
            ),
            (
                "rgr_fgsm",
                rgr_fgsm_curve(&stored.model, &x, labels, &curve_config.fgsm_epsilons)
                    .map_err(CliError::runtime)?,
            ),
            (
                "rge_removal",
                rge_removal_curve(
                    &stored.model,
                    &x,
                    labels,
                    &ranking,
                    &curve_config.feature_removal_fractions,
                )
                .map_err(CliError::runtime)?,
            ),
        ];
        for (variant, curve) in &written {
            let path = out.join(format!("curve_{}_{}.csv", kind.as_str(), variant));
            write_rg_curve_csv(curve, &path).map_err(CliError::runtime)?;
        }
    }
    Ok(())
}

fn full_run(
    data: Option<PathBuf>,
    out: PathBuf,
    kinds: Option<String>,
    folds: Option<usize>,
    seed: Option<u64>,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = load_file_config(config.as_deref())?;
    let kinds = parse_kinds(kinds.as_deref(), &file)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let k = folds.or(file.folds).unwrap_or(5);
    let train_config = train_config_from(&file, 0);
    let curve_config = curve_config_from(&file);

    let (dataset, descriptor) = match (&data, &file.data, &file.synthetic) {
        (Some(path), _, _) => (load_data(path)?, path.display().to_string()),
        (None, Some(path), _) => {
            let path = PathBuf::from(path);
            (load_data(&path)?, path.display().to_string())
        }
        (None, None, Some(synth)) => {
            let spec = SyntheticSpec {
                n_samples: synth.n_samples,
                n_features: synth.n_features,
                n_classes: synth.n_classes,
                separation: synth.separation,
                seed: synth.seed.unwrap_or(seed),
            };
            let descriptor = format!(
                "synthetic(n={},d={},classes={},separation={},seed={})",
                spec.n_samples, spec.n_features, spec.n_classes, spec.separation, spec.seed
            );
            (generate_synthetic(&spec).map_err(CliError::data)?, descriptor)
        }
        (None, None, None) => {
            return Err(CliError::Usage(
                "provide --data or a data/synthetic entry in --config".into(),
            ))
        }
    };

    let report = run_experiment(&dataset, &kinds, &train_config, &curve_config, k, seed)
        .map_err(CliError::runtime)?;
    ensure_dir(&out)?;
    let written = emit_report(&report, &descriptor, &out).map_err(CliError::runtime)?;
    eprintln!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}
