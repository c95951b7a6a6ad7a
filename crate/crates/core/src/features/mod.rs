//! Composite quality scores and attribute encoding.
//!
//! The three composite scores (vitality, popularity, weighted rating) exist
//! only for FreshMeat data; SourceForge datasets simply do not carry them.

mod encode;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use encode::{
    encode, encode_record, DatasetDoc, EncodedDataset, FeatureDescriptor, FeatureEncoding,
    FeatureKind, FeatureValue, ResolvedPolicy, COMPOSITE_POPULARITY, COMPOSITE_VITALITY,
    COMPOSITE_WEIGHTED_RATING,
};

/// Inputs to the vitality score: number of versions, days since the first
/// upload and days since the latest upload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalityInputs {
    pub versions: f64,
    pub days_since_first: f64,
    pub days_since_latest: f64,
}

/// Inputs to the popularity score: hits on the project's own URL, hits on
/// its portal page, and subscription count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopularityInputs {
    pub url_hits: f64,
    pub portal_hits: f64,
    pub subscriptions: f64,
}

/// Inputs to the weighted rating: the project's mean rating, its vote
/// count, the minimum vote mass, and the catalog-wide mean vote.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingInputs {
    pub mean_rating: f64,
    pub votes: f64,
    pub min_votes: f64,
    pub global_mean: f64,
}

/// Release activity normalized by recency: `versions * days_since_first /
/// days_since_latest`.
pub fn vitality_score(inputs: &VitalityInputs) -> Result<f64> {
    if inputs.days_since_latest == 0.0 {
        return Err(Error::Domain(
            "vitality score undefined: zero days since latest release".into(),
        ));
    }
    if inputs.versions < 1.0
        || inputs.days_since_latest < 0.0
        || inputs.days_since_first < inputs.days_since_latest
    {
        return Err(Error::Domain(format!(
            "vitality inputs out of range: versions={}, first={}, latest={}",
            inputs.versions, inputs.days_since_first, inputs.days_since_latest
        )));
    }
    Ok(inputs.versions * inputs.days_since_first / inputs.days_since_latest)
}

/// `sqrt((url_hits + portal_hits) * (subscriptions + 1))`.
pub fn popularity_score(inputs: &PopularityInputs) -> Result<f64> {
    if inputs.url_hits < 0.0 || inputs.portal_hits < 0.0 || inputs.subscriptions < 0.0 {
        return Err(Error::Domain(
            "popularity inputs must be non-negative".into(),
        ));
    }
    Ok(((inputs.url_hits + inputs.portal_hits) * (inputs.subscriptions + 1.0)).sqrt())
}

/// Shrinks the project's mean rating toward the catalog mean:
/// `(v/(v+m))*R + (m/(v+m))*C`. With zero votes this is exactly `C`; as
/// votes grow it approaches `R`.
pub fn weighted_rating(inputs: &RatingInputs) -> Result<f64> {
    if inputs.votes < 0.0 || inputs.min_votes < 1.0 {
        return Err(Error::Domain(format!(
            "rating inputs out of range: votes={}, min_votes={}",
            inputs.votes, inputs.min_votes
        )));
    }
    let total = inputs.votes + inputs.min_votes;
    Ok(inputs.votes / total * inputs.mean_rating + inputs.min_votes / total * inputs.global_mean)
}

/// Whole days between two dates; errors when `as_of` precedes the start.
pub fn days_since(start: NaiveDate, as_of: NaiveDate) -> Result<i64> {
    let days = (as_of - start).num_days();
    if days < 0 {
        return Err(Error::Domain(format!(
            "as_of {as_of} precedes date {start}"
        )));
    }
    Ok(days)
}
