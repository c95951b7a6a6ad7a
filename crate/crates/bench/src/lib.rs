//! Shared dataset setup for the pipeline benchmarks.

use chrono::NaiveDate;
use portent::features::{encode, EncodedDataset, ResolvedPolicy};
use portent::ingest::label_projects;
use portent::synth::{synthetic_corpus, SynthConfig};

pub fn bench_dataset(projects: usize) -> EncodedDataset {
    let corpus = synthetic_corpus(&SynthConfig {
        projects,
        seed: 7,
        noise: 0.15,
        positive_rate: 0.3,
    });
    let labeled = label_projects(corpus.records.clone(), &corpus.freebsd, &corpus.gentoo);
    let policy = ResolvedPolicy::new(NaiveDate::from_ymd_opt(2008, 6, 1).unwrap());
    encode(&labeled, &corpus.schema, &policy).unwrap()
}
