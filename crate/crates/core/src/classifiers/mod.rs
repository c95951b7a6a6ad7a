//! The three porting-success classifiers. Each exposes a hard label plus a
//! normalized successfulness score in `[0, 1]`; what that score means
//! differs per family (posterior, leaf frequency, squashed margin).

mod naive_bayes;
mod svm;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{EncodedDataset, FeatureDescriptor, FeatureValue, ResolvedPolicy};
use crate::ingest::{Label, Repository};

pub use naive_bayes::{NaiveBayesModel, NbFeature, NbParams};
pub use svm::{LinearSvmModel, SvmColumn, SvmParams};
pub use tree::{DecisionTreeModel, TreeNode, TreeParams};

/// A classified instance: hard label, family-specific confidence, and the
/// normalized successfulness score. `label` is `Successful` exactly when
/// `successfulness >= 0.5`, except for the documented zero-weight SVM
/// degenerate case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub confidence: f64,
    pub successfulness: f64,
}

/// Training hyperparameters, tagged by model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    NaiveBayes(NbParams),
    DecisionTree(TreeParams),
    LinearSvm(SvmParams),
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::NaiveBayes(_) => "nb",
            ModelSpec::DecisionTree(_) => "tree",
            ModelSpec::LinearSvm(_) => "svm",
        }
    }
}

/// Per-feature training means used to fill missing numeric cells. Fitted
/// on training rows only so held-out data never leaks into a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericImputer {
    pub means: Vec<Option<f64>>,
}

impl NumericImputer {
    pub fn fit(ds: &EncodedDataset, rows: &[usize]) -> NumericImputer {
        let means = (0..ds.num_features())
            .map(|f| {
                if !ds.features[f].kind.is_numeric() {
                    return None;
                }
                let mut sum = 0.0;
                let mut count = 0usize;
                for &r in rows {
                    if let Some(v) = ds.rows[r][f].as_number() {
                        sum += v;
                        count += 1;
                    }
                }
                Some(if count > 0 { sum / count as f64 } else { 0.0 })
            })
            .collect();
        NumericImputer { means }
    }

    /// Replace missing numeric cells with the stored training means.
    pub fn fill(&self, row: &[FeatureValue]) -> Vec<FeatureValue> {
        row.iter()
            .zip(&self.means)
            .map(|(value, mean)| match (value, mean) {
                (FeatureValue::Missing, Some(m)) => FeatureValue::Number(*m),
                (v, _) => *v,
            })
            .collect()
    }
}

/// Family-specific learned parameters; the JSON document is tagged by the
/// family's variant name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyModel {
    NaiveBayes(NaiveBayesModel),
    DecisionTree(DecisionTreeModel),
    LinearSvm(LinearSvmModel),
}

/// A trained classifier together with everything needed to score new
/// rows: the feature dictionary, the resolved encoding policy, and the
/// imputation means fitted on its training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub repository: Repository,
    pub policy: ResolvedPolicy,
    pub features: Vec<FeatureDescriptor>,
    pub imputer: NumericImputer,
    pub model: FamilyModel,
}

impl TrainedModel {
    pub fn family_name(&self) -> &'static str {
        match &self.model {
            FamilyModel::NaiveBayes(_) => "nb",
            FamilyModel::DecisionTree(_) => "tree",
            FamilyModel::LinearSvm(_) => "svm",
        }
    }

    /// Classify one row laid out like the model's feature dictionary.
    pub fn predict(&self, row: &[FeatureValue]) -> Result<Prediction> {
        if row.len() != self.features.len() {
            return Err(Error::Compatibility(vec![format!(
                "row has {} values, dictionary has {} features",
                row.len(),
                self.features.len()
            )]));
        }
        let filled = self.imputer.fill(row);
        Ok(match &self.model {
            FamilyModel::NaiveBayes(nb) => nb.predict(&filled),
            FamilyModel::DecisionTree(tree) => tree.predict(&filled),
            FamilyModel::LinearSvm(svm) => svm.predict(&filled),
        })
    }
}

/// Train on every row of the dataset.
pub fn train(ds: &EncodedDataset, spec: &ModelSpec) -> Result<TrainedModel> {
    let rows: Vec<usize> = (0..ds.num_rows()).collect();
    train_on_rows(ds, &rows, spec)
}

/// Train on a row subset. Everything fitted here (imputation means,
/// category tables, split thresholds, standardization) comes from the
/// given rows only.
pub fn train_on_rows(
    ds: &EncodedDataset,
    rows: &[usize],
    spec: &ModelSpec,
) -> Result<TrainedModel> {
    if rows.is_empty() {
        return Err(Error::Training("cannot train on an empty dataset".into()));
    }
    let imputer = NumericImputer::fit(ds, rows);
    let model = match spec {
        ModelSpec::NaiveBayes(params) => {
            FamilyModel::NaiveBayes(naive_bayes::train(ds, rows, &imputer, params)?)
        }
        ModelSpec::DecisionTree(params) => {
            FamilyModel::DecisionTree(tree::train(ds, rows, &imputer, params)?)
        }
        ModelSpec::LinearSvm(params) => {
            FamilyModel::LinearSvm(svm::train(ds, rows, &imputer, params)?)
        }
    };
    Ok(TrainedModel {
        repository: ds.repository,
        policy: ds.policy.clone(),
        features: ds.features.clone(),
        imputer,
        model,
    })
}

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    model: TrainedModel,
}

/// Serialize a model to its versioned JSON document.
pub fn save_model(model: &TrainedModel) -> String {
    let doc = ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

/// Load a model document; version mismatches and malformed documents are
/// persistence errors and never yield a partial model.
pub fn load_model(text: &str) -> Result<TrainedModel> {
    let doc: ModelDocument = serde_json::from_str(text)
        .map_err(|e| Error::Persistence(format!("invalid model document: {e}")))?;
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Persistence(format!(
            "unsupported model format version {}",
            doc.format_version
        )));
    }
    Ok(doc.model)
}

pub(crate) fn class_index(label: Label) -> usize {
    match label {
        Label::Successful => 0,
        Label::Unsuccessful => 1,
    }
}

pub(crate) fn count_classes(ds: &EncodedDataset, rows: &[usize]) -> [u64; 2] {
    let mut counts = [0u64; 2];
    for &r in rows {
        counts[class_index(ds.labels[r])] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::naive_bayes::tests::categorical_dataset;
    use crate::classifiers::svm::tests::separable_blobs;
    use crate::classifiers::tree::tests::tennis_dataset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_categorical(seed: u64) -> EncodedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..40)
            .map(|i| {
                (
                    vec![rng.gen_range(0..3), rng.gen_range(0..4)],
                    if i % 3 == 0 {
                        Label::Successful
                    } else {
                        Label::Unsuccessful
                    },
                )
            })
            .collect();
        categorical_dataset(&[3, 4], rows)
    }

    #[test]
    fn nb_round_trip_preserves_posteriors_on_random_probes() {
        let ds = random_categorical(17);
        let model = train(&ds, &ModelSpec::NaiveBayes(NbParams::default())).unwrap();
        let loaded = load_model(&save_model(&model)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..100 {
            let probe = vec![
                FeatureValue::Category(rng.gen_range(0..4)),
                FeatureValue::Category(rng.gen_range(0..5)),
            ];
            let a = model.predict(&probe).unwrap();
            let b = loaded.predict(&probe).unwrap();
            assert_eq!(a.successfulness.to_bits(), b.successfulness.to_bits());
            assert_eq!(a.label, b.label);
        }
    }

    #[test]
    fn corrupted_document_is_a_persistence_error() {
        let ds = random_categorical(19);
        let model = train(&ds, &ModelSpec::NaiveBayes(NbParams::default())).unwrap();
        let mut text = save_model(&model);
        text.truncate(text.len() / 2);
        assert!(matches!(load_model(&text), Err(Error::Persistence(_))));
        assert!(matches!(load_model("{}"), Err(Error::Persistence(_))));
    }

    #[test]
    fn version_mismatch_is_a_persistence_error() {
        let ds = random_categorical(20);
        let model = train(&ds, &ModelSpec::NaiveBayes(NbParams::default())).unwrap();
        let text = save_model(&model).replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(matches!(load_model(&text), Err(Error::Persistence(_))));
    }

    #[test]
    fn reloaded_tree_reproduces_leaf_counts_exactly() {
        let ds = tennis_dataset();
        let model = train(&ds, &ModelSpec::DecisionTree(TreeParams::default())).unwrap();
        let loaded = load_model(&save_model(&model)).unwrap();
        let (before, after) = match (&model.model, &loaded.model) {
            (FamilyModel::DecisionTree(a), FamilyModel::DecisionTree(b)) => {
                (a.leaf_counts(), b.leaf_counts())
            }
            _ => panic!("expected trees"),
        };
        assert_eq!(before, after);
        assert_eq!(model, loaded);
    }

    #[test]
    fn svm_round_trip_predicts_identically() {
        let ds = separable_blobs(60, 5);
        let model = train(&ds, &ModelSpec::LinearSvm(SvmParams::default())).unwrap();
        let loaded = load_model(&save_model(&model)).unwrap();
        for row in &ds.rows {
            let a = model.predict(row).unwrap();
            let b = loaded.predict(row).unwrap();
            assert_eq!(a.successfulness.to_bits(), b.successfulness.to_bits());
            assert_eq!(a.confidence.to_bits(), b.confidence.to_bits());
        }
    }

    #[test]
    fn predict_rejects_wrong_row_width() {
        let ds = random_categorical(23);
        let model = train(&ds, &ModelSpec::NaiveBayes(NbParams::default())).unwrap();
        assert!(matches!(
            model.predict(&[FeatureValue::Category(0)]),
            Err(Error::Compatibility(_))
        ));
    }

    #[test]
    fn successfulness_threshold_matches_label_for_every_family() {
        let ds = random_categorical(29);
        for spec in [
            ModelSpec::NaiveBayes(NbParams::default()),
            ModelSpec::DecisionTree(TreeParams::default()),
            ModelSpec::LinearSvm(SvmParams::default()),
        ] {
            let model = train(&ds, &spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            for _ in 0..60 {
                let probe = vec![
                    FeatureValue::Category(rng.gen_range(0..4)),
                    FeatureValue::Category(rng.gen_range(0..5)),
                ];
                let p = model.predict(&probe).unwrap();
                assert_eq!(
                    p.label == Label::Successful,
                    p.successfulness >= 0.5,
                    "{}: successfulness {} with label {:?}",
                    model.family_name(),
                    p.successfulness,
                    p.label
                );
            }
        }
    }
}
