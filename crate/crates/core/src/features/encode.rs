use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    days_since, popularity_score, vitality_score, weighted_rating, PopularityInputs, RatingInputs,
    VitalityInputs,
};
use crate::ingest::{AttrKind, AttrValue, Label, ProjectRecord, Repository, Schema};

pub const COMPOSITE_VITALITY: &str = "vitality_score";
pub const COMPOSITE_POPULARITY: &str = "popularity_score";
pub const COMPOSITE_WEIGHTED_RATING: &str = "weighted_rating";

/// How a feature stores its values. Categorical features use dense indices
/// `0..categories.len()`, with `categories.len()` itself reserved as the
/// dedicated missing/unknown category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Categorical { categories: Vec<String> },
}

impl FeatureKind {
    pub fn binary() -> FeatureKind {
        FeatureKind::Categorical {
            categories: vec!["0".to_string(), "1".to_string()],
        }
    }

    /// Number of category slots including the reserved missing slot.
    pub fn slots(&self) -> usize {
        match self {
            FeatureKind::Numeric => 0,
            FeatureKind::Categorical { categories } => categories.len() + 1,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, FeatureKind::Numeric)
    }
}

/// Provenance of a feature: how its value is derived from raw attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureEncoding {
    PassThrough,
    Log1p,
    DaysSince,
    CategoryIndex,
    SetMember { value: String },
    MissingIndicator { of: String },
    Vitality,
    Popularity,
    WeightedRating,
}

/// One column of the encoded matrix. `source` is the logical attribute
/// group the feature belongs to, used for aggregate ranking and top-k
/// feature subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub kind: FeatureKind,
    pub source: String,
    pub encoding: FeatureEncoding,
}

/// A single encoded cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureValue {
    Number(f64),
    Category(usize),
    Missing,
}

impl FeatureValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, FeatureValue::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            FeatureValue::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Category slot for a categorical feature, mapping `Missing` to the
    /// reserved missing slot and clamping out-of-range indices to it.
    pub fn slot(&self, kind: &FeatureKind) -> usize {
        let missing = match kind {
            FeatureKind::Categorical { categories } => categories.len(),
            FeatureKind::Numeric => 0,
        };
        match self {
            FeatureValue::Category(i) if *i <= missing => *i,
            _ => missing,
        }
    }
}

/// Run parameters that shape the encoding. `as_of` anchors every
/// days-since computation so runs are reproducible. `global_mean_rating`
/// is resolved from the data when absent and echoed back in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPolicy {
    pub as_of: NaiveDate,
    pub min_votes: f64,
    pub rating_bounds: (f64, f64),
    pub global_mean_rating: Option<f64>,
    pub log1p: BTreeSet<String>,
}

impl ResolvedPolicy {
    pub fn new(as_of: NaiveDate) -> ResolvedPolicy {
        ResolvedPolicy {
            as_of,
            min_votes: 20.0,
            rating_bounds: (1.0, 10.0),
            global_mean_rating: None,
            log1p: BTreeSet::new(),
        }
    }

    fn rating_in_bounds(&self, r: f64) -> bool {
        r >= self.rating_bounds.0 && r <= self.rating_bounds.1
    }
}

/// Immutable matrix of encoded feature vectors with a parallel label
/// vector and the feature dictionary that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedDataset {
    pub repository: Repository,
    pub features: Vec<FeatureDescriptor>,
    pub policy: ResolvedPolicy,
    pub rows: Vec<Vec<FeatureValue>>,
    pub labels: Vec<Label>,
}

impl EncodedDataset {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    /// `[successful, unsuccessful]` counts.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for label in &self.labels {
            match label {
                Label::Successful => counts[0] += 1,
                Label::Unsuccessful => counts[1] += 1,
            }
        }
        counts
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Restrict the dataset to features whose `source` appears in the
    /// given list. Errors when a requested source matches nothing.
    pub fn select_sources(&self, sources: &[String]) -> Result<EncodedDataset> {
        let wanted: BTreeSet<&str> = sources.iter().map(String::as_str).collect();
        let known: BTreeSet<&str> = self.features.iter().map(|f| f.source.as_str()).collect();
        let missing: Vec<String> = wanted
            .iter()
            .filter(|s| !known.contains(**s))
            .map(|s| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Compatibility(missing));
        }
        let keep: Vec<usize> = self
            .features
            .iter()
            .enumerate()
            .filter(|(_, f)| wanted.contains(f.source.as_str()))
            .map(|(i, _)| i)
            .collect();
        Ok(EncodedDataset {
            repository: self.repository,
            features: keep.iter().map(|&i| self.features[i].clone()).collect(),
            policy: self.policy.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| keep.iter().map(|&i| row[i]).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    /// Columnar JSON document for caching encoded datasets on disk.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DatasetDoc::from(self)).expect("dataset serializes")
    }

    pub fn from_json(text: &str) -> Result<EncodedDataset> {
        let doc: DatasetDoc = serde_json::from_str(text)
            .map_err(|e| Error::Persistence(format!("invalid dataset document: {e}")))?;
        doc.into_dataset()
    }
}

/// Columnar serialization of [`EncodedDataset`].
#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetDoc {
    pub format_version: u32,
    pub repository: Repository,
    pub policy: ResolvedPolicy,
    pub features: Vec<FeatureDescriptor>,
    pub labels: Vec<Label>,
    pub columns: Vec<Vec<FeatureValue>>,
}

const DATASET_FORMAT_VERSION: u32 = 1;

impl From<&EncodedDataset> for DatasetDoc {
    fn from(ds: &EncodedDataset) -> DatasetDoc {
        let columns = (0..ds.num_features())
            .map(|f| ds.rows.iter().map(|row| row[f]).collect())
            .collect();
        DatasetDoc {
            format_version: DATASET_FORMAT_VERSION,
            repository: ds.repository,
            policy: ds.policy.clone(),
            features: ds.features.clone(),
            labels: ds.labels.clone(),
            columns,
        }
    }
}

impl DatasetDoc {
    pub fn into_dataset(self) -> Result<EncodedDataset> {
        if self.format_version != DATASET_FORMAT_VERSION {
            return Err(Error::Persistence(format!(
                "unsupported dataset format version {}",
                self.format_version
            )));
        }
        if self.columns.len() != self.features.len() {
            return Err(Error::Persistence("column/feature count mismatch".into()));
        }
        let n = self.labels.len();
        if self.columns.iter().any(|c| c.len() != n) {
            return Err(Error::Persistence("ragged dataset columns".into()));
        }
        let rows = (0..n)
            .map(|r| self.columns.iter().map(|c| c[r]).collect())
            .collect();
        Ok(EncodedDataset {
            repository: self.repository,
            features: self.features,
            policy: self.policy,
            rows,
            labels: self.labels,
        })
    }
}

/// Encode labeled records into a feature matrix.
///
/// Feature order is deterministic: schema order for emitted attributes
/// (multi-categorical attributes expand to one membership feature per
/// observed category, lexicographically), then composite scores, then
/// was-missing indicators for numeric features that have missing values.
pub fn encode(
    records: &[ProjectRecord],
    schema: &Schema,
    policy: &ResolvedPolicy,
) -> Result<EncodedDataset> {
    schema.validate()?;
    let mut resolved = policy.clone();
    if let Some(c) = resolved.global_mean_rating {
        if !resolved.rating_in_bounds(c) {
            return Err(Error::Config(format!(
                "global mean rating {c} outside rating bounds {:?}",
                resolved.rating_bounds
            )));
        }
    }

    if records.is_empty() {
        return Ok(EncodedDataset {
            repository: schema.repository,
            features: Vec::new(),
            policy: resolved,
            rows: Vec::new(),
            labels: Vec::new(),
        });
    }

    let mut labels = Vec::with_capacity(records.len());
    for record in records {
        if record.repository != schema.repository {
            return Err(Error::Schema(format!(
                "record '{}' is from {} but schema describes {}",
                record.project_id, record.repository, schema.repository
            )));
        }
        match record.label {
            Some(label) => labels.push(label),
            None => {
                return Err(Error::Precondition(format!(
                    "record '{}' is unlabeled",
                    record.project_id
                )))
            }
        }
    }

    let mut features = build_descriptors(records, schema, &resolved)?;

    if resolved.global_mean_rating.is_none()
        && features
            .iter()
            .any(|f| f.encoding == FeatureEncoding::WeightedRating)
    {
        resolved.global_mean_rating = mean_rating(records, &resolved);
    }

    // First pass over the rows with the base dictionary.
    let mut rows: Vec<Vec<FeatureValue>> = records
        .iter()
        .map(|record| encode_record(record, &features, &resolved))
        .collect::<Result<_>>()?;

    // Companion indicators for numeric features observed missing.
    let indicator_of: Vec<usize> = features
        .iter()
        .enumerate()
        .filter(|(idx, f)| f.kind.is_numeric() && rows.iter().any(|row| row[*idx].is_missing()))
        .map(|(idx, _)| idx)
        .collect();
    for &idx in &indicator_of {
        let companion = features[idx].clone();
        features.push(FeatureDescriptor {
            name: format!("{}__missing", companion.name),
            kind: FeatureKind::binary(),
            source: companion.source.clone(),
            encoding: FeatureEncoding::MissingIndicator { of: companion.name },
        });
        for row in rows.iter_mut() {
            let flag = usize::from(row[idx].is_missing());
            row.push(FeatureValue::Category(flag));
        }
    }

    Ok(EncodedDataset {
        repository: schema.repository,
        features,
        policy: resolved,
        rows,
        labels,
    })
}

fn build_descriptors(
    records: &[ProjectRecord],
    schema: &Schema,
    policy: &ResolvedPolicy,
) -> Result<Vec<FeatureDescriptor>> {
    let mut features: Vec<FeatureDescriptor> = Vec::new();

    for attr in schema.attributes.iter().filter(|a| a.emit) {
        match attr.kind {
            AttrKind::Numeric => {
                let encoding = if policy.log1p.contains(&attr.name) {
                    FeatureEncoding::Log1p
                } else {
                    FeatureEncoding::PassThrough
                };
                features.push(FeatureDescriptor {
                    name: attr.name.clone(),
                    kind: FeatureKind::Numeric,
                    source: attr.name.clone(),
                    encoding,
                });
            }
            AttrKind::Categorical => {
                let mut observed = BTreeSet::new();
                for record in records {
                    if let AttrValue::Text(s) = record.field(&attr.name) {
                        observed.insert(s.clone());
                    }
                }
                features.push(FeatureDescriptor {
                    name: attr.name.clone(),
                    kind: FeatureKind::Categorical {
                        categories: observed.into_iter().collect(),
                    },
                    source: attr.name.clone(),
                    encoding: FeatureEncoding::CategoryIndex,
                });
            }
            AttrKind::MultiCategorical => {
                let mut observed = BTreeSet::new();
                for record in records {
                    if let AttrValue::Set(set) = record.field(&attr.name) {
                        observed.extend(set.iter().cloned());
                    }
                }
                for value in observed {
                    features.push(FeatureDescriptor {
                        name: format!("{}={}", attr.name, value),
                        kind: FeatureKind::binary(),
                        source: attr.name.clone(),
                        encoding: FeatureEncoding::SetMember { value },
                    });
                }
            }
            AttrKind::Date => {
                features.push(FeatureDescriptor {
                    name: format!("{}_days", attr.name),
                    kind: FeatureKind::Numeric,
                    source: attr.name.clone(),
                    encoding: FeatureEncoding::DaysSince,
                });
            }
        }
    }

    if schema.repository == Repository::FreshMeat {
        if schema.has("versions", AttrKind::Numeric)
            && schema.has("first_release", AttrKind::Date)
            && schema.has("latest_release", AttrKind::Date)
        {
            features.push(composite(COMPOSITE_VITALITY, FeatureEncoding::Vitality));
        }
        if schema.has("url_hits", AttrKind::Numeric)
            && schema.has("portal_hits", AttrKind::Numeric)
            && schema.has("subscriptions", AttrKind::Numeric)
        {
            features.push(composite(COMPOSITE_POPULARITY, FeatureEncoding::Popularity));
        }
        if schema.has("rating", AttrKind::Numeric) && schema.has("votes", AttrKind::Numeric) {
            features.push(composite(
                COMPOSITE_WEIGHTED_RATING,
                FeatureEncoding::WeightedRating,
            ));
        }
    }

    let mut seen = BTreeSet::new();
    for f in &features {
        if !seen.insert(f.name.as_str()) {
            return Err(Error::Schema(format!(
                "feature name collision: '{}' produced twice",
                f.name
            )));
        }
    }
    Ok(features)
}

fn composite(name: &str, encoding: FeatureEncoding) -> FeatureDescriptor {
    FeatureDescriptor {
        name: name.to_string(),
        kind: FeatureKind::Numeric,
        source: name.to_string(),
        encoding,
    }
}

fn mean_rating(records: &[ProjectRecord], policy: &ResolvedPolicy) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for record in records {
        if let AttrValue::Number(r) = record.field("rating") {
            if policy.rating_in_bounds(*r) {
                sum += r;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Encode one record against a fixed feature dictionary. Used both while
/// building datasets and when scoring new projects against a trained
/// model's dictionary; unknown categories land in the missing slot.
pub fn encode_record(
    record: &ProjectRecord,
    features: &[FeatureDescriptor],
    policy: &ResolvedPolicy,
) -> Result<Vec<FeatureValue>> {
    let mut values: Vec<FeatureValue> = Vec::with_capacity(features.len());
    for descriptor in features {
        let value = match &descriptor.encoding {
            FeatureEncoding::PassThrough => match record.field(&descriptor.source) {
                AttrValue::Number(v) if v.is_finite() => FeatureValue::Number(*v),
                _ => FeatureValue::Missing,
            },
            FeatureEncoding::Log1p => match record.field(&descriptor.source) {
                AttrValue::Number(v) if v.is_finite() && *v >= 0.0 => {
                    FeatureValue::Number(v.ln_1p())
                }
                _ => FeatureValue::Missing,
            },
            FeatureEncoding::DaysSince => match record.field(&descriptor.source) {
                AttrValue::Date(d) => match days_since(*d, policy.as_of) {
                    Ok(days) => FeatureValue::Number(days as f64),
                    Err(_) => FeatureValue::Missing,
                },
                _ => FeatureValue::Missing,
            },
            FeatureEncoding::CategoryIndex => {
                let categories = match &descriptor.kind {
                    FeatureKind::Categorical { categories } => categories,
                    FeatureKind::Numeric => {
                        return Err(Error::Schema(format!(
                            "feature '{}' is category-encoded but numeric-kinded",
                            descriptor.name
                        )))
                    }
                };
                match record.field(&descriptor.source) {
                    AttrValue::Text(s) => match categories.binary_search(s) {
                        Ok(idx) => FeatureValue::Category(idx),
                        Err(_) => FeatureValue::Category(categories.len()),
                    },
                    _ => FeatureValue::Category(categories.len()),
                }
            }
            FeatureEncoding::SetMember { value } => match record.field(&descriptor.source) {
                AttrValue::Set(set) => FeatureValue::Category(usize::from(set.contains(value))),
                _ => FeatureValue::Category(2),
            },
            FeatureEncoding::Vitality => encode_vitality(record, policy),
            FeatureEncoding::Popularity => encode_popularity(record),
            FeatureEncoding::WeightedRating => encode_weighted_rating(record, policy),
            FeatureEncoding::MissingIndicator { of } => {
                let companion = features
                    .iter()
                    .position(|f| &f.name == of)
                    .filter(|idx| *idx < values.len())
                    .ok_or_else(|| {
                        Error::Schema(format!(
                            "indicator '{}' has no preceding companion '{}'",
                            descriptor.name, of
                        ))
                    })?;
                FeatureValue::Category(usize::from(values[companion].is_missing()))
            }
        };
        values.push(value);
    }
    Ok(values)
}

fn numeric_field(record: &ProjectRecord, name: &str) -> Option<f64> {
    match record.field(name) {
        AttrValue::Number(v) if v.is_finite() => Some(*v),
        _ => None,
    }
}

fn date_field(record: &ProjectRecord, name: &str) -> Option<NaiveDate> {
    match record.field(name) {
        AttrValue::Date(d) => Some(*d),
        _ => None,
    }
}

fn encode_vitality(record: &ProjectRecord, policy: &ResolvedPolicy) -> FeatureValue {
    let inputs = match (
        numeric_field(record, "versions"),
        date_field(record, "first_release"),
        date_field(record, "latest_release"),
    ) {
        (Some(versions), Some(first), Some(latest)) => {
            let t0 = match days_since(first, policy.as_of) {
                Ok(d) => d as f64,
                Err(_) => return FeatureValue::Missing,
            };
            let tn = match days_since(latest, policy.as_of) {
                Ok(d) => d as f64,
                Err(_) => return FeatureValue::Missing,
            };
            VitalityInputs {
                versions,
                days_since_first: t0,
                days_since_latest: tn,
            }
        }
        _ => return FeatureValue::Missing,
    };
    match vitality_score(&inputs) {
        Ok(v) if v.is_finite() => FeatureValue::Number(v),
        _ => FeatureValue::Missing,
    }
}

fn encode_popularity(record: &ProjectRecord) -> FeatureValue {
    let inputs = match (
        numeric_field(record, "url_hits"),
        numeric_field(record, "portal_hits"),
        numeric_field(record, "subscriptions"),
    ) {
        (Some(a), Some(b), Some(c)) => PopularityInputs {
            url_hits: a,
            portal_hits: b,
            subscriptions: c,
        },
        _ => return FeatureValue::Missing,
    };
    match popularity_score(&inputs) {
        Ok(v) if v.is_finite() => FeatureValue::Number(v),
        _ => FeatureValue::Missing,
    }
}

fn encode_weighted_rating(record: &ProjectRecord, policy: &ResolvedPolicy) -> FeatureValue {
    let global_mean = match policy.global_mean_rating {
        Some(c) => c,
        None => return FeatureValue::Missing,
    };
    let (rating, votes) = match (
        numeric_field(record, "rating"),
        numeric_field(record, "votes"),
    ) {
        (Some(r), Some(v)) if policy.rating_in_bounds(r) && v >= 0.0 => (r, v),
        _ => return FeatureValue::Missing,
    };
    let inputs = RatingInputs {
        mean_rating: rating,
        votes,
        min_votes: policy.min_votes,
        global_mean,
    };
    match weighted_rating(&inputs) {
        Ok(v) if v.is_finite() => FeatureValue::Number(v),
        _ => FeatureValue::Missing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AttrSpec;

    fn sf_schema(attrs: Vec<AttrSpec>) -> Schema {
        Schema {
            repository: Repository::SourceForge,
            attributes: attrs,
        }
    }

    fn record(id: &str, fields: Vec<(&str, AttrValue)>, label: Option<Label>) -> ProjectRecord {
        ProjectRecord {
            project_id: id.to_string(),
            repository: Repository::SourceForge,
            name: id.to_string(),
            raw_fields: fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            label,
        }
    }

    fn policy() -> ResolvedPolicy {
        ResolvedPolicy::new(NaiveDate::from_ymd_opt(2008, 6, 1).unwrap())
    }

    fn set(values: &[&str]) -> AttrValue {
        AttrValue::Set(values.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn multi_categorical_expands_lexicographically() {
        let schema = sf_schema(vec![AttrSpec::new("os", AttrKind::MultiCategorical)]);
        let records = vec![
            record(
                "a",
                vec![("os", set(&["linux", "bsd"]))],
                Some(Label::Successful),
            ),
            record(
                "b",
                vec![("os", set(&["windows"]))],
                Some(Label::Unsuccessful),
            ),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        let names: Vec<&str> = ds.features.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, vec!["os=bsd", "os=linux", "os=windows"]);
        assert_eq!(
            ds.rows[0],
            vec![
                FeatureValue::Category(1),
                FeatureValue::Category(1),
                FeatureValue::Category(0)
            ]
        );
    }

    #[test]
    fn all_numeric_fixture_matches_hand_encoding() {
        let schema = sf_schema(vec![
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("rank", AttrKind::Numeric),
        ]);
        let records = vec![
            record(
                "a",
                vec![
                    ("downloads", AttrValue::Number(10.0)),
                    ("rank", AttrValue::Number(1.0)),
                ],
                Some(Label::Successful),
            ),
            record(
                "b",
                vec![
                    ("downloads", AttrValue::Number(0.0)),
                    ("rank", AttrValue::Number(2.0)),
                ],
                Some(Label::Unsuccessful),
            ),
            record(
                "c",
                vec![
                    ("downloads", AttrValue::Number(5.5)),
                    ("rank", AttrValue::Number(3.0)),
                ],
                Some(Label::Unsuccessful),
            ),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        let expected = vec![
            vec![FeatureValue::Number(10.0), FeatureValue::Number(1.0)],
            vec![FeatureValue::Number(0.0), FeatureValue::Number(2.0)],
            vec![FeatureValue::Number(5.5), FeatureValue::Number(3.0)],
        ];
        assert_eq!(ds.rows, expected);
        assert_eq!(ds.labels.len(), 3);
    }

    #[test]
    fn empty_record_list_yields_empty_dataset() {
        let schema = sf_schema(vec![AttrSpec::new("downloads", AttrKind::Numeric)]);
        let ds = encode(&[], &schema, &policy()).unwrap();
        assert!(ds.features.is_empty());
        assert!(ds.rows.is_empty());
        assert!(ds.labels.is_empty());
    }

    #[test]
    fn unlabeled_record_is_precondition_error() {
        let schema = sf_schema(vec![AttrSpec::new("downloads", AttrKind::Numeric)]);
        let records = vec![record(
            "a",
            vec![("downloads", AttrValue::Number(1.0))],
            None,
        )];
        assert!(matches!(
            encode(&records, &schema, &policy()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn mixed_repositories_is_schema_error() {
        let schema = Schema::freshmeat();
        let records = vec![record("a", vec![], Some(Label::Successful))];
        assert!(matches!(
            encode(&records, &schema, &policy()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn descriptor_count_matches_schema_accounting() {
        // 2 numeric + 1 categorical + multi-categorical with 4 observed
        // categories, fully observed: 2 + 1 + 4 descriptors.
        let schema = sf_schema(vec![
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("rank", AttrKind::Numeric),
            AttrSpec::new("license", AttrKind::Categorical),
            AttrSpec::new("os", AttrKind::MultiCategorical),
        ]);
        let records = vec![
            record(
                "a",
                vec![
                    ("downloads", AttrValue::Number(1.0)),
                    ("rank", AttrValue::Number(2.0)),
                    ("license", AttrValue::Text("gpl".into())),
                    ("os", set(&["linux", "bsd"])),
                ],
                Some(Label::Successful),
            ),
            record(
                "b",
                vec![
                    ("downloads", AttrValue::Number(3.0)),
                    ("rank", AttrValue::Number(4.0)),
                    ("license", AttrValue::Text("mit".into())),
                    ("os", set(&["windows", "macos"])),
                ],
                Some(Label::Unsuccessful),
            ),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        assert_eq!(ds.num_features(), 2 + 1 + 4);
    }

    #[test]
    fn categorical_missing_goes_to_reserved_slot() {
        let schema = sf_schema(vec![AttrSpec::new("license", AttrKind::Categorical)]);
        let records = vec![
            record(
                "a",
                vec![("license", AttrValue::Text("gpl".into()))],
                Some(Label::Successful),
            ),
            record("b", vec![], Some(Label::Unsuccessful)),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        // one observed category, missing slot = index 1
        assert_eq!(ds.rows[0][0], FeatureValue::Category(0));
        assert_eq!(ds.rows[1][0], FeatureValue::Category(1));
    }

    #[test]
    fn numeric_missing_gets_companion_indicator() {
        let schema = sf_schema(vec![AttrSpec::new("downloads", AttrKind::Numeric)]);
        let records = vec![
            record(
                "a",
                vec![("downloads", AttrValue::Number(9.0))],
                Some(Label::Successful),
            ),
            record("b", vec![], Some(Label::Unsuccessful)),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        assert_eq!(ds.num_features(), 2);
        assert_eq!(ds.features[1].name, "downloads__missing");
        assert_eq!(ds.features[1].source, "downloads");
        assert_eq!(ds.rows[0][1], FeatureValue::Category(0));
        assert_eq!(ds.rows[1][0], FeatureValue::Missing);
        assert_eq!(ds.rows[1][1], FeatureValue::Category(1));
    }

    fn fm_record(id: &str, fields: Vec<(&str, AttrValue)>) -> ProjectRecord {
        ProjectRecord {
            project_id: id.to_string(),
            repository: Repository::FreshMeat,
            name: id.to_string(),
            raw_fields: fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            label: Some(Label::Successful),
        }
    }

    #[test]
    fn freshmeat_composites_are_computed() {
        let schema = Schema::freshmeat();
        let d = |s: &str| AttrValue::Date(NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap());
        let mut records = vec![
            fm_record(
                "a",
                vec![
                    ("versions", AttrValue::Number(5.0)),
                    // as_of 2008-06-01: first => 400 days, latest => 10 days
                    ("first_release", d("2007-04-28")),
                    ("latest_release", d("2008-05-22")),
                    ("url_hits", AttrValue::Number(30.0)),
                    ("portal_hits", AttrValue::Number(6.0)),
                    ("subscriptions", AttrValue::Number(3.0)),
                    ("rating", AttrValue::Number(8.0)),
                    ("votes", AttrValue::Number(60.0)),
                ],
            ),
            fm_record(
                "b",
                vec![
                    ("rating", AttrValue::Number(4.0)),
                    ("votes", AttrValue::Number(0.0)),
                ],
            ),
        ];
        records[1].label = Some(Label::Unsuccessful);
        let ds = encode(&records, &schema, &policy()).unwrap();

        // computed global mean rating: (8 + 4) / 2 = 6
        assert_eq!(ds.policy.global_mean_rating, Some(6.0));

        let vit = ds.feature_index(COMPOSITE_VITALITY).unwrap();
        let pop = ds.feature_index(COMPOSITE_POPULARITY).unwrap();
        let wr = ds.feature_index(COMPOSITE_WEIGHTED_RATING).unwrap();
        assert_eq!(ds.rows[0][vit], FeatureValue::Number(200.0));
        assert_eq!(ds.rows[0][pop], FeatureValue::Number(12.0));
        // 0.75 * 8 + 0.25 * 6 = 7.5
        assert_eq!(ds.rows[0][wr], FeatureValue::Number(7.5));
        // zero votes: WR collapses to the global mean
        assert_eq!(ds.rows[1][wr], FeatureValue::Number(6.0));
        // missing inputs leave the composite missing, not zero
        assert_eq!(ds.rows[1][vit], FeatureValue::Missing);
    }

    #[test]
    fn sourceforge_has_no_composites() {
        let schema = Schema::sourceforge();
        let records = vec![record(
            "a",
            vec![("downloads", AttrValue::Number(1.0))],
            Some(Label::Successful),
        )];
        let ds = encode(&records, &schema, &policy()).unwrap();
        assert!(ds.feature_index(COMPOSITE_VITALITY).is_none());
        assert!(ds.feature_index(COMPOSITE_POPULARITY).is_none());
        assert!(ds.feature_index(COMPOSITE_WEIGHTED_RATING).is_none());
    }

    #[test]
    fn encode_is_deterministic() {
        let schema = Schema::sourceforge();
        let records: Vec<ProjectRecord> = (0..20)
            .map(|i| {
                let mut r = record(
                    &format!("p{i}"),
                    vec![
                        ("downloads", AttrValue::Number(i as f64)),
                        ("license", AttrValue::Text(format!("l{}", i % 3))),
                        ("os", set(&["linux"])),
                    ],
                    Some(if i % 4 == 0 {
                        Label::Successful
                    } else {
                        Label::Unsuccessful
                    }),
                );
                r.raw_fields.insert(
                    "operating_system".into(),
                    set(if i % 2 == 0 {
                        &["linux", "bsd"]
                    } else {
                        &["windows"]
                    }),
                );
                r.raw_fields.remove("os");
                r
            })
            .collect();
        let a = encode(&records, &schema, &policy()).unwrap();
        let b = encode(&records, &schema, &policy()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn dataset_json_round_trip() {
        let schema = sf_schema(vec![
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("license", AttrKind::Categorical),
        ]);
        let records = vec![
            record(
                "a",
                vec![
                    ("downloads", AttrValue::Number(1.5)),
                    ("license", AttrValue::Text("gpl".into())),
                ],
                Some(Label::Successful),
            ),
            record("b", vec![], Some(Label::Unsuccessful)),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        let back = EncodedDataset::from_json(&ds.to_json()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn select_sources_keeps_groups_and_rejects_unknown() {
        let schema = sf_schema(vec![
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("os", AttrKind::MultiCategorical),
        ]);
        let records = vec![
            record(
                "a",
                vec![
                    ("downloads", AttrValue::Number(1.0)),
                    ("os", set(&["linux", "bsd"])),
                ],
                Some(Label::Successful),
            ),
            record(
                "b",
                vec![("os", set(&["windows"]))],
                Some(Label::Unsuccessful),
            ),
        ];
        let ds = encode(&records, &schema, &policy()).unwrap();
        let subset = ds.select_sources(&["os".to_string()]).unwrap();
        assert!(subset.features.iter().all(|f| f.source == "os"));
        assert_eq!(subset.num_features(), 3);
        assert!(matches!(
            ds.select_sources(&["nope".to_string()]),
            Err(Error::Compatibility(_))
        ));
    }
}
