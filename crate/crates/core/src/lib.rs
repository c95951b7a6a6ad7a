//! Mining and classification toolkit for open-source-repository metadata:
//! parses portal dumps and ports inventories, labels projects by whether
//! they were ported into both FreeBSD Ports and Gentoo Portage, derives
//! composite quality features, ranks features by Information Gain and
//! Chi-Square, and trains three classifiers (Naive Bayes, decision tree,
//! linear SVM) whose confidence doubles as a successfulness score.

pub mod classifiers;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod ingest;
pub mod report;
pub mod selection;
pub mod synth;

pub use error::{Error, Result};
