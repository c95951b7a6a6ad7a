//! Seeded synthetic corpus generation for demos, benchmarks and
//! end-to-end testing. The label is driven by the `popularity` and
//! `downloads` attributes plus Gaussian noise, so informative-feature
//! rankings and classifier quality have a known ground truth.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ingest::{
    AttrKind, AttrSpec, AttrValue, PortsInventory, PortsSource, ProjectRecord, Repository, Schema,
};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub projects: usize,
    pub seed: u64,
    /// Standard deviation of the label noise added to the latent score.
    pub noise: f64,
    /// Fraction of projects labeled successful.
    pub positive_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            projects: 1000,
            seed: 42,
            noise: 0.2,
            positive_rate: 0.3,
        }
    }
}

/// Generated corpus: unlabeled records plus ports inventories built so
/// that `label_projects` reproduces the generator's intended labels.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub schema: Schema,
    pub records: Vec<ProjectRecord>,
    pub freebsd: PortsInventory,
    pub gentoo: PortsInventory,
    /// Names the generator intended to be successful.
    pub intended_successful: Vec<String>,
}

/// Schema of the synthetic corpus: the two signal attributes, assorted
/// noise attributes of every kind.
pub fn synthetic_schema() -> Schema {
    Schema {
        repository: Repository::FreshMeat,
        attributes: vec![
            AttrSpec::new("popularity", AttrKind::Numeric),
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("developers", AttrKind::Numeric),
            AttrSpec::new("donors", AttrKind::Numeric),
            AttrSpec::new("license", AttrKind::Categorical),
            AttrSpec::new("operating_system", AttrKind::MultiCategorical),
            AttrSpec::new("language", AttrKind::MultiCategorical),
            AttrSpec::new("registration_date", AttrKind::Date),
        ],
    }
}

const LICENSES: [&str; 4] = ["gpl", "lgpl", "bsd", "mit"];
const SYSTEMS: [&str; 4] = ["linux", "bsd", "windows", "macos"];
const LANGUAGES: [&str; 5] = ["c", "cpp", "python", "java", "perl"];

pub fn synthetic_corpus(config: &SynthConfig) -> SynthCorpus {
    let schema = synthetic_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");

    let mut records = Vec::with_capacity(config.projects);
    let mut latent_scores = Vec::with_capacity(config.projects);
    for i in 0..config.projects {
        let z_pop: f64 = unit.sample(&mut rng);
        let z_dl: f64 = unit.sample(&mut rng);
        let noise: f64 = unit.sample(&mut rng) * config.noise;
        latent_scores.push(0.65 * z_pop + 0.45 * z_dl + noise);

        let popularity = (50.0 + 20.0 * z_pop).max(0.0);
        let downloads = (1000.0 + 600.0 * z_dl).max(0.0).floor();

        let mut fields: BTreeMap<String, AttrValue> = BTreeMap::new();
        fields.insert("popularity".into(), AttrValue::Number(popularity));
        fields.insert("downloads".into(), AttrValue::Number(downloads));
        fields.insert(
            "developers".into(),
            AttrValue::Number(rng.gen_range(1.0f64..30.0).floor()),
        );
        fields.insert(
            "donors".into(),
            AttrValue::Number(rng.gen_range(0.0f64..10.0).floor()),
        );
        fields.insert(
            "license".into(),
            AttrValue::Text(LICENSES[rng.gen_range(0..LICENSES.len())].to_string()),
        );
        fields.insert(
            "operating_system".into(),
            AttrValue::Set(
                SYSTEMS
                    .iter()
                    .filter(|_| rng.gen_bool(0.4))
                    .map(|s| s.to_string())
                    .collect(),
            ),
        );
        fields.insert(
            "language".into(),
            AttrValue::Set(
                [LANGUAGES[rng.gen_range(0..LANGUAGES.len())]]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
        );
        let day_offset = rng.gen_range(0..3000);
        let date =
            NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + chrono::Duration::days(day_offset);
        fields.insert("registration_date".into(), AttrValue::Date(date));

        records.push(ProjectRecord {
            project_id: format!("p{i:06}"),
            repository: schema.repository,
            name: format!("proj{i:06}"),
            raw_fields: fields,
            label: None,
        });
    }

    // empirical threshold so exactly ~positive_rate of projects succeed
    let mut sorted = latent_scores.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = ((1.0 - config.positive_rate) * config.projects as f64) as usize;
    let threshold = sorted[cut.min(config.projects - 1)];

    let intended_successful: Vec<String> = records
        .iter()
        .zip(&latent_scores)
        .filter(|(_, &score)| score >= threshold)
        .map(|(record, _)| record.name.clone())
        .collect();

    // both inventories carry the successful names plus disjoint decoys
    let mut freebsd_names: std::collections::BTreeSet<String> =
        intended_successful.iter().cloned().collect();
    let mut gentoo_names = freebsd_names.clone();
    for i in 0..config.projects / 10 {
        freebsd_names.insert(format!("fbdecoy{i:05}"));
        gentoo_names.insert(format!("gtdecoy{i:05}"));
    }

    SynthCorpus {
        schema,
        records,
        freebsd: PortsInventory {
            source: PortsSource::FreeBsdPorts,
            names: freebsd_names,
        },
        gentoo: PortsInventory {
            source: PortsSource::GentooPortage,
            names: gentoo_names,
        },
        intended_successful,
    }
}
