//! Naive Bayes with Laplace-smoothed category tables and per-class
//! Gaussian likelihoods for numeric features.

use serde::{Deserialize, Serialize};

use crate::classifiers::{count_classes, NumericImputer, Prediction};
use crate::error::{Error, Result};
use crate::features::{EncodedDataset, FeatureKind, FeatureValue};
use crate::ingest::Label;

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    /// Additive smoothing constant for category likelihoods.
    pub smoothing: f64,
    /// Exponent applied to class frequencies before normalization; 1.0
    /// keeps the raw priors, 0.0 flattens them to uniform.
    pub prior_exponent: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            smoothing: 1.0,
            prior_exponent: 1.0,
        }
    }
}

/// Per-feature conditional distribution, `[successful, unsuccessful]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NbFeature {
    /// Smoothed likelihood per category slot; each class's table sums to 1.
    Categorical { likelihood: [Vec<f64>; 2] },
    /// Gaussian per class with a floored variance.
    Gaussian { mean: [f64; 2], variance: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub params: NbParams,
    pub priors: [f64; 2],
    pub features: Vec<NbFeature>,
}

pub(crate) fn train(
    ds: &EncodedDataset,
    rows: &[usize],
    imputer: &NumericImputer,
    params: &NbParams,
) -> Result<NaiveBayesModel> {
    if params.smoothing <= 0.0 {
        return Err(Error::Precondition(format!(
            "smoothing must be positive, got {}",
            params.smoothing
        )));
    }
    let class_counts = count_classes(ds, rows);
    if class_counts[0] == 0 || class_counts[1] == 0 {
        return Err(Error::Training(
            "naive bayes needs both classes in the training data".into(),
        ));
    }

    let damped = [
        (class_counts[0] as f64 / rows.len() as f64).powf(params.prior_exponent),
        (class_counts[1] as f64 / rows.len() as f64).powf(params.prior_exponent),
    ];
    let prior_norm = damped[0] + damped[1];
    let priors = [damped[0] / prior_norm, damped[1] / prior_norm];

    let filled: Vec<Vec<FeatureValue>> = rows.iter().map(|&r| imputer.fill(&ds.rows[r])).collect();
    let labels: Vec<Label> = rows.iter().map(|&r| ds.labels[r]).collect();

    let features = (0..ds.num_features())
        .map(|f| match &ds.features[f].kind {
            FeatureKind::Categorical { .. } => {
                let slots = ds.features[f].kind.slots();
                let mut counts = [vec![0u64; slots], vec![0u64; slots]];
                for (row, label) in filled.iter().zip(&labels) {
                    let class = crate::classifiers::class_index(*label);
                    counts[class][row[f].slot(&ds.features[f].kind)] += 1;
                }
                let likelihood = [0, 1].map(|class| {
                    let total = class_counts[class] as f64 + params.smoothing * slots as f64;
                    counts[class]
                        .iter()
                        .map(|&c| (c as f64 + params.smoothing) / total)
                        .collect()
                });
                NbFeature::Categorical { likelihood }
            }
            FeatureKind::Numeric => {
                let mut mean = [0.0f64; 2];
                let mut variance = [0.0f64; 2];
                for class in 0..2 {
                    let values: Vec<f64> = filled
                        .iter()
                        .zip(&labels)
                        .filter(|(_, l)| crate::classifiers::class_index(**l) == class)
                        .filter_map(|(row, _)| row[f].as_number())
                        .collect();
                    let n = values.len() as f64;
                    let mu = if values.is_empty() {
                        0.0
                    } else {
                        values.iter().sum::<f64>() / n
                    };
                    let var = if values.is_empty() {
                        VARIANCE_FLOOR
                    } else {
                        (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n)
                            .max(VARIANCE_FLOOR)
                    };
                    mean[class] = mu;
                    variance[class] = var;
                }
                NbFeature::Gaussian { mean, variance }
            }
        })
        .collect();

    Ok(NaiveBayesModel {
        params: params.clone(),
        priors,
        features,
    })
}

impl NaiveBayesModel {
    /// Posterior of the successful class, computed in log space. The
    /// posterior is both the confidence and the successfulness score.
    pub fn predict(&self, row: &[FeatureValue]) -> Prediction {
        let mut log_scores = [self.priors[0].ln(), self.priors[1].ln()];
        for (feature, value) in self.features.iter().zip(row) {
            for (class, score) in log_scores.iter_mut().enumerate() {
                *score += match feature {
                    NbFeature::Categorical { likelihood } => {
                        let table = &likelihood[class];
                        let slot = match value {
                            FeatureValue::Category(i) if *i < table.len() => *i,
                            // unknown or missing categories use the
                            // reserved missing slot
                            _ => table.len() - 1,
                        };
                        table[slot].ln()
                    }
                    NbFeature::Gaussian { mean, variance } => match value.as_number() {
                        Some(x) => {
                            let var = variance[class];
                            -0.5 * (2.0 * std::f64::consts::PI * var).ln()
                                - (x - mean[class]).powi(2) / (2.0 * var)
                        }
                        None => 0.0,
                    },
                };
            }
        }
        let posterior = 1.0 / (1.0 + (log_scores[1] - log_scores[0]).exp());
        Prediction {
            label: if posterior >= 0.5 {
                Label::Successful
            } else {
                Label::Unsuccessful
            },
            confidence: posterior,
            successfulness: posterior,
        }
    }
}
