//! Primal linear SVM trained by seeded stochastic subgradient descent on
//! the hinge loss with step 1/(lambda * t). Numeric features are
//! standardized with training statistics; categorical features expand to
//! one indicator column per category slot.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{count_classes, NumericImputer, Prediction};
use crate::error::{Error, Result};
use crate::features::{EncodedDataset, FeatureKind, FeatureValue};
use crate::ingest::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// L2 regularization strength.
    pub lambda: f64,
    /// Full passes over the training data.
    pub epochs: usize,
    /// Seed for the per-epoch shuffle.
    pub seed: u64,
    /// Hinge-loss weight for the positive class; 1.0 keeps the plain
    /// unweighted objective.
    pub positive_weight: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-2,
            epochs: 50,
            seed: 42,
            positive_weight: 1.0,
        }
    }
}

/// Mapping from dictionary features to model-space columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvmColumn {
    /// Standardized numeric feature.
    Numeric { feature: usize },
    /// 0/1 indicator for one category slot of a categorical feature with
    /// `slots` slots in total; out-of-range and missing values land in the
    /// last (reserved missing) slot.
    Indicator {
        feature: usize,
        slot: usize,
        slots: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub params: SvmParams,
    pub columns: Vec<SvmColumn>,
    /// Per-column (mean, std) fitted on training rows; identity for
    /// indicator columns.
    pub standardization: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Full-pass objective after each epoch.
    pub objective_trace: Vec<f64>,
}

fn build_columns(ds: &EncodedDataset) -> Vec<SvmColumn> {
    let mut columns = Vec::new();
    for (feature, descriptor) in ds.features.iter().enumerate() {
        match &descriptor.kind {
            FeatureKind::Numeric => columns.push(SvmColumn::Numeric { feature }),
            FeatureKind::Categorical { .. } => {
                let slots = descriptor.kind.slots();
                for slot in 0..slots {
                    columns.push(SvmColumn::Indicator {
                        feature,
                        slot,
                        slots,
                    });
                }
            }
        }
    }
    columns
}

pub(crate) fn train(
    ds: &EncodedDataset,
    rows: &[usize],
    imputer: &NumericImputer,
    params: &SvmParams,
) -> Result<LinearSvmModel> {
    if params.lambda <= 0.0 {
        return Err(Error::Precondition(format!(
            "lambda must be positive, got {}",
            params.lambda
        )));
    }
    if params.epochs == 0 {
        return Err(Error::Precondition("epochs must be at least 1".into()));
    }
    let class_counts = count_classes(ds, rows);
    if class_counts[0] == 0 || class_counts[1] == 0 {
        return Err(Error::Training(
            "svm needs both classes in the training data".into(),
        ));
    }

    let columns = build_columns(ds);
    let filled: Vec<Vec<FeatureValue>> = rows.iter().map(|&r| imputer.fill(&ds.rows[r])).collect();

    // standardization statistics from training rows only
    let mut standardization = vec![(0.0f64, 1.0f64); columns.len()];
    for (c, column) in columns.iter().enumerate() {
        if let SvmColumn::Numeric { feature } = column {
            let values: Vec<f64> = filled
                .iter()
                .filter_map(|row| row[*feature].as_number())
                .collect();
            if values.is_empty() {
                continue;
            }
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            standardization[c] = (mean, if std > 0.0 { std } else { 1.0 });
        }
    }

    let vectors: Vec<Vec<f64>> = filled
        .iter()
        .map(|row| vectorize(row, &columns, &standardization))
        .collect();
    let targets: Vec<f64> = rows
        .iter()
        .map(|&r| {
            if ds.labels[r] == Label::Successful {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let hinge_weights: Vec<f64> = targets
        .iter()
        .map(|&y| if y > 0.0 { params.positive_weight } else { 1.0 })
        .collect();

    let mut weights = vec![0.0f64; columns.len()];
    let mut bias = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    let mut step = 0u64;
    let mut objective_trace = Vec::with_capacity(params.epochs);

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            step += 1;
            let eta = 1.0 / (params.lambda * step as f64);
            let margin = targets[i] * (dot(&weights, &vectors[i]) + bias);
            let decay = 1.0 - eta * params.lambda;
            for w in weights.iter_mut() {
                *w *= decay;
            }
            if margin < 1.0 {
                let scale = eta * hinge_weights[i] * targets[i];
                for (w, x) in weights.iter_mut().zip(&vectors[i]) {
                    *w += scale * x;
                }
                bias += scale;
            }
        }
        objective_trace.push(objective(
            &weights,
            bias,
            &vectors,
            &targets,
            &hinge_weights,
            params.lambda,
        ));
    }

    Ok(LinearSvmModel {
        params: params.clone(),
        columns,
        standardization,
        weights,
        bias,
        objective_trace,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `lambda/2 * ||w||^2` plus the mean (class-weighted) hinge loss.
pub fn objective(
    weights: &[f64],
    bias: f64,
    vectors: &[Vec<f64>],
    targets: &[f64],
    hinge_weights: &[f64],
    lambda: f64,
) -> f64 {
    let norm2: f64 = weights.iter().map(|w| w * w).sum();
    let hinge: f64 = vectors
        .iter()
        .zip(targets)
        .zip(hinge_weights)
        .map(|((x, &y), &cw)| cw * (1.0 - y * (dot(weights, x) + bias)).max(0.0))
        .sum::<f64>()
        / vectors.len() as f64;
    lambda / 2.0 * norm2 + hinge
}

fn vectorize(
    row: &[FeatureValue],
    columns: &[SvmColumn],
    standardization: &[(f64, f64)],
) -> Vec<f64> {
    columns
        .iter()
        .zip(standardization)
        .map(|(column, (mean, std))| match column {
            SvmColumn::Numeric { feature } => match row[*feature].as_number() {
                Some(v) => (v - mean) / std,
                None => 0.0, // imputed upstream; a stray missing centers out
            },
            SvmColumn::Indicator {
                feature,
                slot,
                slots,
            } => {
                let row_slot = match row[*feature] {
                    FeatureValue::Category(i) if i < *slots => i,
                    _ => slots - 1,
                };
                f64::from(row_slot == *slot)
            }
        })
        .collect()
}

impl LinearSvmModel {
    /// Signed hyperplane distance as confidence; a logistic squash of the
    /// raw margin as the normalized successfulness. A zero weight vector
    /// is the documented degenerate case: distance 0, label Unsuccessful.
    pub fn predict(&self, row: &[FeatureValue]) -> Prediction {
        let x = vectorize(row, &self.columns, &self.standardization);
        let norm = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Prediction {
                label: Label::Unsuccessful,
                confidence: 0.0,
                successfulness: 0.5,
            };
        }
        let margin = dot(&self.weights, &x) + self.bias;
        Prediction {
            label: if margin >= 0.0 {
                Label::Successful
            } else {
                Label::Unsuccessful
            },
            confidence: margin / norm,
            successfulness: 1.0 / (1.0 + (-margin).exp()),
        }
    }
}
