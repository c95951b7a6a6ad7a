//! Stratified k-fold cross-validation, confusion-matrix accounting and
//! precision/recall/F-measure reporting. The positive class is always
//! `Successful`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train_on_rows, ModelSpec};
use crate::error::{Error, Result};
use crate::features::EncodedDataset;
use crate::ingest::Label;
use crate::selection::FeatureScore;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub false_neg: u64,
    pub false_pos: u64,
    pub true_neg: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: Label, predicted: Label) {
        match (actual, predicted) {
            (Label::Successful, Label::Successful) => self.true_pos += 1,
            (Label::Successful, Label::Unsuccessful) => self.false_neg += 1,
            (Label::Unsuccessful, Label::Successful) => self.false_pos += 1,
            (Label::Unsuccessful, Label::Unsuccessful) => self.true_neg += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        self.true_pos += other.true_pos;
        self.false_neg += other.false_neg;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
    }
}

/// Precision, recall and F-measure. Degenerate 0/0 cases are reported as
/// zero with the matching flag set, never as NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub f_defined: bool,
}

/// Recall = TP/(TP+FN), precision = TP/(TP+FP), F = 2PR/(P+R).
pub fn precision_recall_f1(cm: &ConfusionMatrix) -> Metrics {
    let (precision, precision_defined) = ratio(cm.true_pos, cm.true_pos + cm.false_pos);
    let (recall, recall_defined) = ratio(cm.true_pos, cm.true_pos + cm.false_neg);
    let (f_measure, f_defined) = f_from(precision, recall);
    Metrics {
        precision,
        recall,
        f_measure,
        precision_defined,
        recall_defined,
        f_defined,
    }
}

fn ratio(numerator: u64, denominator: u64) -> (f64, bool) {
    if denominator == 0 {
        (0.0, false)
    } else {
        (numerator as f64 / denominator as f64, true)
    }
}

/// Harmonic mean of precision and recall; 0 (flagged) when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    f_from(precision, recall).0
}

fn f_from(precision: f64, recall: f64) -> (f64, bool) {
    if precision + recall == 0.0 {
        (0.0, false)
    } else {
        (2.0 * precision * recall / (precision + recall), true)
    }
}

/// Split indices into `k` disjoint stratified folds: per-fold class counts
/// differ from the ideal proportion by at most one, deterministically for
/// a given seed.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("folds must be >= 2, got {k}")));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, label) in labels.iter().enumerate() {
        by_class[crate::classifiers::class_index(*label)].push(i);
    }
    for (class, indices) in by_class.iter().enumerate() {
        if indices.len() < k {
            let name = if class == 0 {
                "successful"
            } else {
                "unsuccessful"
            };
            return Err(Error::Stratification(format!(
                "class '{name}' has {} instances, needs at least {k}",
                indices.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for indices in by_class.iter_mut() {
        indices.shuffle(&mut rng);
        for (i, &row) in indices.iter().enumerate() {
            folds[i % k].push(row);
        }
    }
    for fold in folds.iter_mut() {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// One fold's held-out confusion matrix and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

/// Mean of per-fold metrics (the "averaged" aggregation) next to metrics
/// pooled from the summed confusion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: ModelSpec,
    pub folds: usize,
    pub seed: u64,
    pub feature_subset: Option<Vec<String>>,
    pub per_fold: Vec<FoldResult>,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f_measure: f64,
    pub degenerate_folds: usize,
    pub pooled_confusion: ConfusionMatrix,
    pub pooled: Metrics,
}

/// Stratified k-fold cross-validation. Per fold, the model (and all of its
/// preprocessing: imputation means, category tables, standardization) is
/// fitted on the k-1 training folds only and evaluated on the held-out
/// fold. Training errors are annotated with the fold index.
pub fn cross_validate(
    ds: &EncodedDataset,
    spec: &ModelSpec,
    k: usize,
    seed: u64,
    feature_subset: Option<&[String]>,
) -> Result<EvaluationReport> {
    let restricted;
    let ds = match feature_subset {
        Some(sources) => {
            restricted = ds.select_sources(sources)?;
            &restricted
        }
        None => ds,
    };

    let folds = stratified_folds(&ds.labels, k, seed)?;
    let mut per_fold = Vec::with_capacity(k);
    let mut pooled_confusion = ConfusionMatrix::default();

    for (fold_idx, held_out) in folds.iter().enumerate() {
        let held: std::collections::BTreeSet<usize> = held_out.iter().copied().collect();
        let train_rows: Vec<usize> = (0..ds.num_rows()).filter(|i| !held.contains(i)).collect();
        let model = train_on_rows(ds, &train_rows, spec)
            .map_err(|e| Error::Training(format!("fold {fold_idx}: {e}")))?;

        let mut confusion = ConfusionMatrix::default();
        for &row in held_out {
            let prediction = model.predict(&ds.rows[row])?;
            confusion.record(ds.labels[row], prediction.label);
        }
        pooled_confusion.add(&confusion);
        per_fold.push(FoldResult {
            fold: fold_idx,
            metrics: precision_recall_f1(&confusion),
            confusion,
        });
    }

    let n = per_fold.len() as f64;
    let mean_precision = per_fold.iter().map(|f| f.metrics.precision).sum::<f64>() / n;
    let mean_recall = per_fold.iter().map(|f| f.metrics.recall).sum::<f64>() / n;
    let mean_f_measure = per_fold.iter().map(|f| f.metrics.f_measure).sum::<f64>() / n;
    let degenerate_folds = per_fold
        .iter()
        .filter(|f| {
            !(f.metrics.precision_defined && f.metrics.recall_defined && f.metrics.f_defined)
        })
        .count();

    Ok(EvaluationReport {
        model: spec.clone(),
        folds: k,
        seed,
        feature_subset: feature_subset.map(|s| s.to_vec()),
        per_fold,
        mean_precision,
        mean_recall,
        mean_f_measure,
        degenerate_folds,
        pooled: precision_recall_f1(&pooled_confusion),
        pooled_confusion,
    })
}

/// The `k` highest-IG names from an aggregate ranking.
pub fn top_k_subset(ranking: &[FeatureScore], k: usize) -> Result<Vec<String>> {
    if k > ranking.len() {
        return Err(Error::Range(format!(
            "asked for top {k} of {} ranked features",
            ranking.len()
        )));
    }
    let mut sorted: Vec<&FeatureScore> = ranking.iter().collect();
    sorted.sort_by_key(|s| s.rank_ig);
    Ok(sorted.iter().take(k).map(|s| s.feature.clone()).collect())
}
