//! Cross-module property tests: dump round-trips, labeling laws, and
//! dataset caching.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use portent::features::{encode, EncodedDataset, ResolvedPolicy};
use portent::ingest::{
    label_projects, parse_projects, write_projects, AttrKind, AttrSpec, AttrValue, Label,
    PortsInventory, PortsSource, ProjectRecord, Repository, Schema,
};
use proptest::prelude::*;

fn test_schema() -> Schema {
    Schema {
        repository: Repository::SourceForge,
        attributes: vec![
            AttrSpec::new("downloads", AttrKind::Numeric),
            AttrSpec::new("license", AttrKind::Categorical),
            AttrSpec::new("operating_system", AttrKind::MultiCategorical),
            AttrSpec::new("registration_date", AttrKind::Date),
        ],
    }
}

fn attr_value() -> impl Strategy<Value = AttrValue> {
    prop_oneof![
        2 => (-1e6f64..1e6).prop_map(|v| AttrValue::Number((v * 100.0).round() / 100.0)),
        2 => "[a-z]{1,8}".prop_map(AttrValue::Text),
        2 => proptest::collection::btree_set("[a-z]{1,6}", 1..4).prop_map(AttrValue::Set),
        1 => (0i64..15000).prop_map(|d| {
            AttrValue::Date(NaiveDate::from_ymd_opt(1990, 1, 1).unwrap() + chrono::Duration::days(d))
        }),
        1 => Just(AttrValue::Missing),
    ]
}

fn record_strategy(index: usize) -> impl Strategy<Value = ProjectRecord> {
    (attr_value(), attr_value(), attr_value(), attr_value()).prop_map(
        move |(downloads, license, os, date)| {
            // kinds must match the schema for a faithful dump round-trip
            let mut raw_fields = BTreeMap::new();
            raw_fields.insert(
                "downloads".to_string(),
                match downloads {
                    AttrValue::Number(v) => AttrValue::Number(v),
                    _ => AttrValue::Missing,
                },
            );
            raw_fields.insert(
                "license".to_string(),
                match license {
                    AttrValue::Text(s) => AttrValue::Text(s),
                    _ => AttrValue::Missing,
                },
            );
            raw_fields.insert(
                "operating_system".to_string(),
                match os {
                    AttrValue::Set(s) => AttrValue::Set(s),
                    _ => AttrValue::Missing,
                },
            );
            raw_fields.insert(
                "registration_date".to_string(),
                match date {
                    AttrValue::Date(d) => AttrValue::Date(d),
                    _ => AttrValue::Missing,
                },
            );
            ProjectRecord {
                project_id: format!("id{index}"),
                repository: Repository::SourceForge,
                name: format!("proj{index}"),
                raw_fields,
                label: None,
            }
        },
    )
}

fn records_strategy(max: usize) -> impl Strategy<Value = Vec<ProjectRecord>> {
    proptest::collection::vec(any::<()>(), 0..max).prop_flat_map(|slots| {
        slots
            .iter()
            .enumerate()
            .map(|(i, _)| record_strategy(i))
            .collect::<Vec<_>>()
    })
}

fn inventory(source: PortsSource, names: BTreeSet<String>) -> PortsInventory {
    PortsInventory { source, names }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dump_round_trip_preserves_records(records in records_strategy(12)) {
        let schema = test_schema();
        let mut buffer = Vec::new();
        write_projects(&mut buffer, &records, &schema, b',').unwrap();
        let reparsed = parse_projects(buffer.as_slice(), &schema, b',').unwrap();
        prop_assert_eq!(records, reparsed.records);
    }

    #[test]
    fn labeling_is_idempotent_and_counts_the_intersection(
        records in records_strategy(20),
        fb_subset in proptest::collection::btree_set(0usize..20, 0..10),
        gt_subset in proptest::collection::btree_set(0usize..20, 0..10),
    ) {
        let freebsd = inventory(
            PortsSource::FreeBsdPorts,
            fb_subset.iter().map(|i| format!("proj{i}")).collect(),
        );
        let gentoo = inventory(
            PortsSource::GentooPortage,
            gt_subset.iter().map(|i| format!("proj{i}")).collect(),
        );
        let once = label_projects(records, &freebsd, &gentoo);
        let twice = label_projects(once.clone(), &freebsd, &gentoo);
        prop_assert_eq!(&once, &twice);

        let record_names: BTreeSet<&str> = once.iter().map(|r| r.name.as_str()).collect();
        let expected = record_names
            .iter()
            .filter(|n| freebsd.contains(n) && gentoo.contains(n))
            .count();
        let successful = once
            .iter()
            .filter(|r| r.label == Some(Label::Successful))
            .count();
        prop_assert_eq!(successful, expected);
    }

    #[test]
    fn dataset_cache_round_trips(records in records_strategy(10)) {
        let schema = test_schema();
        let labeled: Vec<ProjectRecord> = records
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.label = Some(if i % 3 == 0 { Label::Successful } else { Label::Unsuccessful });
                r
            })
            .collect();
        let policy = ResolvedPolicy::new(NaiveDate::from_ymd_opt(2008, 6, 1).unwrap());
        let ds = encode(&labeled, &schema, &policy).unwrap();
        let back = EncodedDataset::from_json(&ds.to_json()).unwrap();
        prop_assert_eq!(ds, back);
    }
}
