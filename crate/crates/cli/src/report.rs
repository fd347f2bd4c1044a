//! `report.json` and plot-ready curve CSVs.
//!
//! The report holds per-fold and aggregated (mean ± sample std) values for
//! every model kind plus provenance (config hash, seed, dataset descriptor).
//! One `curve_<kind>_<variant>.csv` per curve carries the across-fold mean
//! score per level, directly plottable.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use vqsafe_core::eval::{ExperimentReport, FoldOutcome, MetricSummary, ModelReport};
use vqsafe_core::metrics::RgCurve;

use crate::csvio::write_curve_csv;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl From<MetricSummary> for MeanStd {
    fn from(s: MetricSummary) -> Self {
        MeanStd { mean: s.mean, std: s.std }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FoldJson {
    pub fold: usize,
    pub f1_macro: f64,
    pub accuracy: f64,
    pub mse: f64,
    pub rga: f64,
    pub aurga: f64,
    pub aurgr_noise: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aurgr_fgsm: Option<f64>,
    pub aurge: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SummaryJson {
    pub f1_macro: MeanStd,
    pub accuracy: MeanStd,
    pub mse: MeanStd,
    pub rga: MeanStd,
    pub aurga: MeanStd,
    pub aurgr_noise: MeanStd,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aurgr_fgsm: Option<MeanStd>,
    pub aurge: MeanStd,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelJson {
    pub kind: String,
    pub per_fold: Vec<FoldJson>,
    pub summary: SummaryJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportJson {
    pub dataset: String,
    pub seed: u64,
    pub folds: usize,
    pub config_hash: String,
    pub models: Vec<ModelJson>,
}

fn fold_json(outcome: &FoldOutcome) -> FoldJson {
    FoldJson {
        fold: outcome.fold,
        f1_macro: outcome.f1_macro,
        accuracy: outcome.accuracy,
        mse: outcome.mse,
        rga: outcome.rga,
        aurga: outcome.rga_curve.area,
        aurgr_noise: outcome.rgr_noise_curve.area,
        aurgr_fgsm: outcome.rgr_fgsm_curve.as_ref().map(|c| c.area),
        aurge: outcome.rge_curve.area,
    }
}

fn model_json(model: &ModelReport) -> ModelJson {
    ModelJson {
        kind: model.kind.as_str().into(),
        per_fold: model.folds.iter().map(fold_json).collect(),
        summary: SummaryJson {
            f1_macro: model.summary.f1_macro.into(),
            accuracy: model.summary.accuracy.into(),
            mse: model.summary.mse.into(),
            rga: model.summary.rga.into(),
            aurga: model.summary.aurga.into(),
            aurgr_noise: model.summary.aurgr_noise.into(),
            aurgr_fgsm: model.summary.aurgr_fgsm.map(Into::into),
            aurge: model.summary.aurge.into(),
        },
    }
}

pub fn build_report_json(report: &ExperimentReport, dataset: &str) -> ReportJson {
    ReportJson {
        dataset: dataset.into(),
        seed: report.seed,
        folds: report.k,
        config_hash: format!("{:016x}", report.config_hash),
        models: report.models.iter().map(model_json).collect(),
    }
}

/// Mean score per level across folds. Levels are grid values shared between
/// folds; a level missing from some folds (degenerate removal points)
/// averages over the folds that carry it.
pub fn mean_curve(curves: &[&RgCurve]) -> (Vec<f64>, Vec<f64>) {
    let mut acc: Vec<(f64, Vec<f64>)> = Vec::new();
    for curve in curves {
        for (&level, &score) in curve.levels.iter().zip(&curve.scores) {
            match acc.iter_mut().find(|(l, _)| *l == level) {
                Some((_, scores)) => scores.push(score),
                None => acc.push((level, vec![score])),
            }
        }
    }
    acc.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite levels"));
    let levels = acc.iter().map(|(l, _)| *l).collect();
    let scores =
        acc.iter().map(|(_, s)| s.iter().sum::<f64>() / s.len() as f64).collect();
    (levels, scores)
}

/// Write `report.json` and one mean-curve CSV per (kind, variant) into
/// `out_dir`. Returns the paths written.
pub fn emit_report(
    report: &ExperimentReport,
    dataset: &str,
    out_dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let json = build_report_json(report, dataset);
    let path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);

    for model in &report.models {
        let kind = model.kind.as_str();
        let variants: [(&str, Vec<&RgCurve>); 3] = [
            ("rga_removal", model.folds.iter().map(|f| &f.rga_curve).collect()),
            ("rgr_noise", model.folds.iter().map(|f| &f.rgr_noise_curve).collect()),
            ("rge_removal", model.folds.iter().map(|f| &f.rge_curve).collect()),
        ];
        for (variant, curves) in variants {
            let (levels, scores) = mean_curve(&curves);
            let path = out_dir.join(format!("curve_{}_{}.csv", kind, variant));
            write_curve_csv(&levels, &scores, &path)?;
            written.push(path);
        }
        let fgsm: Vec<&RgCurve> =
            model.folds.iter().filter_map(|f| f.rgr_fgsm_curve.as_ref()).collect();
        if !fgsm.is_empty() {
            let (levels, scores) = mean_curve(&fgsm);
            let path = out_dir.join(format!("curve_{}_rgr_fgsm.csv", kind));
            write_curve_csv(&levels, &scores, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}
