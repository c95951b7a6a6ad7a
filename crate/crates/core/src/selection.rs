//! Feature scoring by Information Gain and Chi-Square, with equal-width
//! discretization of continuous features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::stratified_folds;
use crate::features::{EncodedDataset, FeatureKind};

/// Per-class instance counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDistribution {
    pub counts: Vec<u64>,
}

impl ClassDistribution {
    pub fn new(counts: Vec<u64>) -> ClassDistribution {
        ClassDistribution { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Instance counts per feature value and class, positive class first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub rows: Vec<[u64; 2]>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<[u64; 2]>) -> ContingencyTable {
        ContingencyTable { rows }
    }

    pub fn with_values(num_values: usize) -> ContingencyTable {
        ContingencyTable {
            rows: vec![[0, 0]; num_values],
        }
    }

    pub fn add(&mut self, value: usize, positive: bool) {
        self.rows[value][usize::from(!positive)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r[0] + r[1]).sum()
    }

    pub fn class_marginals(&self) -> [u64; 2] {
        let mut m = [0u64; 2];
        for row in &self.rows {
            m[0] += row[0];
            m[1] += row[1];
        }
        m
    }
}

/// Expected information needed to classify: `-sum p_i log2 p_i` in bits.
/// Empty distributions and zero-probability terms contribute zero.
pub fn entropy(dist: &ClassDistribution) -> f64 {
    let total = dist.total();
    if total == 0 {
        return 0.0;
    }
    let mut bits = 0.0;
    for &count in &dist.counts {
        if count > 0 {
            let p = count as f64 / total as f64;
            bits -= p * p.log2();
        }
    }
    bits
}

/// Expected information after partitioning by the feature: the weighted
/// average of per-value class entropies.
pub fn conditional_entropy(table: &ContingencyTable) -> f64 {
    let total = table.total();
    if total == 0 {
        return 0.0;
    }
    let mut expected = 0.0;
    for row in &table.rows {
        let weight = row[0] + row[1];
        if weight == 0 {
            continue;
        }
        let part = entropy(&ClassDistribution::new(vec![row[0], row[1]]));
        expected += weight as f64 / total as f64 * part;
    }
    expected
}

/// Entropy reduction gained by branching on the feature.
pub fn information_gain(table: &ContingencyTable) -> f64 {
    let marginals = table.class_marginals();
    let class_entropy = entropy(&ClassDistribution::new(marginals.to_vec()));
    let gain = class_entropy - conditional_entropy(table);
    // exact-arithmetic identities can land a hair below zero in floats
    gain.max(0.0)
}

/// Chi-square association between the feature and the class. Rows with a
/// zero value-marginal are dropped; a zero class-marginal yields zero.
pub fn chi_square(table: &ContingencyTable) -> f64 {
    let n = table.total();
    if n == 0 {
        return 0.0;
    }
    let marginals = table.class_marginals();
    if marginals[0] == 0 || marginals[1] == 0 {
        return 0.0;
    }
    let n = n as f64;
    let mut statistic = 0.0;
    for row in &table.rows {
        let value_marginal = row[0] + row[1];
        if value_marginal == 0 {
            continue;
        }
        for class in 0..2 {
            let expected = marginals[class] as f64 * value_marginal as f64 / n;
            let observed = row[class] as f64;
            statistic += (observed - expected).powi(2) / expected;
        }
    }
    statistic
}

/// Equal-width bin edges, reusable on held-out data: values outside
/// `[min, max]` clamp into the end bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinEdges {
    pub min: f64,
    pub max: f64,
    pub bins: usize,
}

impl BinEdges {
    pub fn bin_of(&self, x: f64) -> usize {
        if self.max <= self.min {
            return 0;
        }
        let raw = (self.bins as f64 * (x - self.min) / (self.max - self.min)).floor();
        (raw.max(0.0) as usize).min(self.bins - 1)
    }
}

/// Map a numeric column into `bins` equal-width bins. Missing values pass
/// through as missing; constant columns map everything to bin 0.
pub fn discretize_equal_width(
    values: &[Option<f64>],
    bins: usize,
) -> Result<(Vec<Option<usize>>, BinEdges)> {
    if bins < 2 {
        return Err(Error::Precondition(format!(
            "bins must be >= 2, got {bins}"
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for value in values.iter().flatten() {
        min = min.min(*value);
        max = max.max(*value);
    }
    let edges = if min > max {
        BinEdges {
            min: 0.0,
            max: 0.0,
            bins,
        }
    } else {
        BinEdges { min, max, bins }
    };
    let binned = values.iter().map(|v| v.map(|x| edges.bin_of(x))).collect();
    Ok((binned, edges))
}

/// One feature's scores under both measures, with 1-based ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub information_gain: f64,
    pub chi_square: f64,
    pub rank_ig: usize,
    pub rank_chi: usize,
}

fn contingency_for_feature(
    ds: &EncodedDataset,
    feature: usize,
    bins: usize,
) -> Result<ContingencyTable> {
    let kind = &ds.features[feature].kind;
    let positives: Vec<bool> = ds
        .labels
        .iter()
        .map(|l| *l == crate::ingest::Label::Successful)
        .collect();

    match kind {
        FeatureKind::Numeric => {
            let column: Vec<Option<f64>> =
                ds.rows.iter().map(|row| row[feature].as_number()).collect();
            let (binned, _) = discretize_equal_width(&column, bins)?;
            // missing values form their own partition value after the bins
            let mut table = ContingencyTable::with_values(bins + 1);
            for (value, positive) in binned.iter().zip(&positives) {
                table.add(value.unwrap_or(bins), *positive);
            }
            Ok(table)
        }
        FeatureKind::Categorical { .. } => {
            let mut table = ContingencyTable::with_values(kind.slots());
            for (row, positive) in ds.rows.iter().zip(&positives) {
                table.add(row[feature].slot(kind), *positive);
            }
            Ok(table)
        }
    }
}

fn assign_ranks(scores: &mut [FeatureScore]) {
    let mut by_ig: Vec<usize> = (0..scores.len()).collect();
    by_ig.sort_by(|&a, &b| {
        scores[b]
            .information_gain
            .partial_cmp(&scores[a].information_gain)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| scores[a].feature.cmp(&scores[b].feature))
    });
    for (rank, &idx) in by_ig.iter().enumerate() {
        scores[idx].rank_ig = rank + 1;
    }

    let mut by_chi: Vec<usize> = (0..scores.len()).collect();
    by_chi.sort_by(|&a, &b| {
        scores[b]
            .chi_square
            .partial_cmp(&scores[a].chi_square)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| scores[a].feature.cmp(&scores[b].feature))
    });
    for (rank, &idx) in by_chi.iter().enumerate() {
        scores[idx].rank_chi = rank + 1;
    }
}

fn score_rows(
    ds: &EncodedDataset,
    row_indices: Option<&[usize]>,
    bins: usize,
) -> Result<Vec<(f64, f64)>> {
    let view = match row_indices {
        None => ds.clone(),
        Some(idx) => EncodedDataset {
            repository: ds.repository,
            features: ds.features.clone(),
            policy: ds.policy.clone(),
            rows: idx.iter().map(|&i| ds.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| ds.labels[i]).collect(),
        },
    };
    (0..view.num_features())
        .map(|f| {
            let table = contingency_for_feature(&view, f, bins)?;
            Ok((information_gain(&table), chi_square(&table)))
        })
        .collect()
}

/// Score every feature by Information Gain and Chi-Square on the full
/// dataset, assign ranks (descending score, ties broken by feature name)
/// and return the list sorted by IG rank.
pub fn rank_features(ds: &EncodedDataset, bins: usize) -> Result<Vec<FeatureScore>> {
    if ds.num_rows() == 0 || ds.num_features() == 0 {
        return Err(Error::Precondition("cannot rank an empty dataset".into()));
    }
    let raw = score_rows(ds, None, bins)?;
    let mut scores: Vec<FeatureScore> = ds
        .features
        .iter()
        .zip(raw)
        .map(|(f, (ig, chi))| FeatureScore {
            feature: f.name.clone(),
            information_gain: ig,
            chi_square: chi,
            rank_ig: 0,
            rank_chi: 0,
        })
        .collect();
    assign_ranks(&mut scores);
    scores.sort_by_key(|s| s.rank_ig);
    Ok(scores)
}

/// Aggregate per-source-attribute scores: the maximum over a source's
/// expanded features, re-ranked. This is the view used for top-k feature
/// reduction and the readable ranking table.
pub fn rank_sources(ds: &EncodedDataset, bins: usize) -> Result<Vec<FeatureScore>> {
    let per_feature = rank_features(ds, bins)?;
    aggregate_by_source(ds, &per_feature)
}

fn aggregate_by_source(
    ds: &EncodedDataset,
    per_feature: &[FeatureScore],
) -> Result<Vec<FeatureScore>> {
    let mut by_source: std::collections::BTreeMap<&str, (f64, f64)> =
        std::collections::BTreeMap::new();
    for score in per_feature {
        let idx = ds
            .feature_index(&score.feature)
            .ok_or_else(|| Error::Precondition(format!("unknown feature '{}'", score.feature)))?;
        let source = ds.features[idx].source.as_str();
        let entry = by_source.entry(source).or_insert((0.0, 0.0));
        entry.0 = entry.0.max(score.information_gain);
        entry.1 = entry.1.max(score.chi_square);
    }
    let mut scores: Vec<FeatureScore> = by_source
        .into_iter()
        .map(|(source, (ig, chi))| FeatureScore {
            feature: source.to_string(),
            information_gain: ig,
            chi_square: chi,
            rank_ig: 0,
            rank_chi: 0,
        })
        .collect();
    assign_ranks(&mut scores);
    scores.sort_by_key(|s| s.rank_ig);
    Ok(scores)
}

/// Cross-validated scoring: mean of per-training-split scores over `k`
/// stratified folds. Offered alongside the full-dataset mode because the
/// aggregation behind published per-feature numbers is ambiguous.
pub fn rank_features_fold_mean(
    ds: &EncodedDataset,
    bins: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<FeatureScore>> {
    if ds.num_rows() == 0 || ds.num_features() == 0 {
        return Err(Error::Precondition("cannot rank an empty dataset".into()));
    }
    let folds = stratified_folds(&ds.labels, k, seed)?;
    let mut sums = vec![(0.0, 0.0); ds.num_features()];
    for held_out in &folds {
        let held: std::collections::BTreeSet<usize> = held_out.iter().copied().collect();
        let train: Vec<usize> = (0..ds.num_rows()).filter(|i| !held.contains(i)).collect();
        let raw = score_rows(ds, Some(&train), bins)?;
        for (sum, (ig, chi)) in sums.iter_mut().zip(raw) {
            sum.0 += ig;
            sum.1 += chi;
        }
    }
    let mut scores: Vec<FeatureScore> = ds
        .features
        .iter()
        .zip(sums)
        .map(|(f, (ig, chi))| FeatureScore {
            feature: f.name.clone(),
            information_gain: ig / k as f64,
            chi_square: chi / k as f64,
            rank_ig: 0,
            rank_chi: 0,
        })
        .collect();
    assign_ranks(&mut scores);
    scores.sort_by_key(|s| s.rank_ig);
    Ok(scores)
}

/// Aggregate fold-mean scores by source attribute.
pub fn rank_sources_fold_mean(
    ds: &EncodedDataset,
    bins: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<FeatureScore>> {
    let per_feature = rank_features_fold_mean(ds, bins, k, seed)?;
    aggregate_by_source(ds, &per_feature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-4;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&ClassDistribution::new(vec![10, 0])), 0.0);
        assert_eq!(entropy(&ClassDistribution::new(vec![7, 7])), 1.0);
        let mixed = entropy(&ClassDistribution::new(vec![9, 5]));
        assert!((mixed - 0.9403).abs() < TOL, "{mixed}");
        assert_eq!(entropy(&ClassDistribution::new(vec![])), 0.0);
        assert_eq!(entropy(&ClassDistribution::new(vec![0, 0])), 0.0);
    }

    /// Play-tennis style fixture: value rows are (positive, negative)
    /// counts per attribute value; 9 positive / 5 negative overall.
    fn outlook() -> ContingencyTable {
        ContingencyTable::new(vec![[2, 3], [4, 0], [3, 2]])
    }

    #[test]
    fn conditional_entropy_examples() {
        // single-valued attribute degenerates to the class entropy
        let degenerate = ContingencyTable::new(vec![[9, 5]]);
        assert!((conditional_entropy(&degenerate) - 0.9403).abs() < TOL);

        // perfectly separating attribute on balanced classes
        let perfect = ContingencyTable::new(vec![[7, 0], [0, 7]]);
        assert_eq!(conditional_entropy(&perfect), 0.0);

        let e = conditional_entropy(&outlook());
        assert!((e - 0.6935).abs() < TOL, "{e}");
    }

    #[test]
    fn information_gain_examples() {
        let constant = ContingencyTable::new(vec![[9, 5]]);
        assert!(information_gain(&constant).abs() < 1e-12);

        let perfect = ContingencyTable::new(vec![[7, 0], [0, 7]]);
        assert!((information_gain(&perfect) - 1.0).abs() < 1e-12);

        let gain = information_gain(&outlook());
        assert!((gain - 0.2467).abs() < TOL, "{gain}");
    }

    #[test]
    fn gain_is_zero_for_independent_feature() {
        // feature value independent of label with exact counts
        let independent = ContingencyTable::new(vec![[10, 10], [20, 20]]);
        assert!(information_gain(&independent) < 1e-12);
    }

    #[test]
    fn chi_square_examples() {
        let independent = ContingencyTable::new(vec![[5, 5], [5, 5]]);
        assert_eq!(chi_square(&independent), 0.0);

        let perfect = ContingencyTable::new(vec![[10, 0], [0, 10]]);
        assert_eq!(chi_square(&perfect), 20.0);

        let mixed = chi_square(&ContingencyTable::new(vec![[20, 10], [10, 20]]));
        assert!((mixed - 6.6667).abs() < TOL, "{mixed}");
    }

    #[test]
    fn chi_square_zero_class_marginal_is_zero() {
        let one_sided = ContingencyTable::new(vec![[5, 0], [7, 0]]);
        assert_eq!(chi_square(&one_sided), 0.0);
    }

    #[test]
    fn discretize_mapping_rule() {
        let values: Vec<Option<f64>> = (0..=10).map(|i| Some(i as f64)).collect();
        let (binned, edges) = discretize_equal_width(&values, 2).unwrap();
        for (i, bin) in binned.iter().enumerate() {
            let expected = if i <= 4 { 0 } else { 1 };
            assert_eq!(bin.unwrap(), expected, "value {i}");
        }
        // max clamps into the last bin
        assert_eq!(edges.bin_of(10.0), 1);
        // out-of-range values clamp into the end bins
        assert_eq!(edges.bin_of(-5.0), 0);
        assert_eq!(edges.bin_of(50.0), 1);
    }

    #[test]
    fn discretize_constant_column() {
        let values = vec![Some(3.0); 8];
        let (binned, _) = discretize_equal_width(&values, 4).unwrap();
        assert!(binned.iter().all(|b| *b == Some(0)));
    }

    #[test]
    fn discretize_passes_missing_through() {
        let values = vec![Some(1.0), None, Some(2.0)];
        let (binned, _) = discretize_equal_width(&values, 2).unwrap();
        assert_eq!(binned[1], None);
    }

    #[test]
    fn discretize_rejects_one_bin() {
        assert!(matches!(
            discretize_equal_width(&[Some(1.0)], 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn discretize_uniform_values_spread_evenly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let values: Vec<Option<f64>> = (0..1000).map(|_| Some(rng.gen_range(0.0..1.0))).collect();
        let (binned, _) = discretize_equal_width(&values, 10).unwrap();
        let mut histogram = [0usize; 10];
        for bin in binned.iter().flatten() {
            histogram[*bin] += 1;
        }
        for (bin, &count) in histogram.iter().enumerate() {
            assert!(
                (count as i64 - 100).abs() <= 40,
                "bin {bin} holds {count} values"
            );
        }
    }

    use crate::features::{FeatureDescriptor, FeatureEncoding, FeatureValue, ResolvedPolicy};
    use crate::ingest::{Label, Repository};

    fn numeric_dataset(columns: Vec<(&str, &str, Vec<f64>)>, labels: Vec<Label>) -> EncodedDataset {
        let features = columns
            .iter()
            .map(|(name, source, _)| FeatureDescriptor {
                name: name.to_string(),
                kind: FeatureKind::Numeric,
                source: source.to_string(),
                encoding: FeatureEncoding::PassThrough,
            })
            .collect();
        let rows = (0..labels.len())
            .map(|r| {
                columns
                    .iter()
                    .map(|(_, _, values)| FeatureValue::Number(values[r]))
                    .collect()
            })
            .collect();
        EncodedDataset {
            repository: Repository::SourceForge,
            features,
            policy: ResolvedPolicy::new(chrono::NaiveDate::from_ymd_opt(2008, 6, 1).unwrap()),
            rows,
            labels,
        }
    }

    #[test]
    fn single_feature_ranks_first_under_both_measures() {
        let labels: Vec<Label> = (0..10)
            .map(|i| {
                if i < 4 {
                    Label::Successful
                } else {
                    Label::Unsuccessful
                }
            })
            .collect();
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ds = numeric_dataset(vec![("x", "x", values)], labels);
        let scores = rank_features(&ds, 5).unwrap();
        assert_eq!(scores.len(), 1);
        assert_eq!(scores[0].rank_ig, 1);
        assert_eq!(scores[0].rank_chi, 1);
    }

    #[test]
    fn median_split_feature_dominates_both_rankings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let n = 200;
        let informative: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let noise: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut sorted = informative.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[n / 2];
        let labels: Vec<Label> = informative
            .iter()
            .map(|&v| {
                if v > median {
                    Label::Successful
                } else {
                    Label::Unsuccessful
                }
            })
            .collect();
        let ds = numeric_dataset(
            vec![("noise", "noise", noise), ("signal", "signal", informative)],
            labels,
        );
        let scores = rank_features(&ds, 10).unwrap();
        // IG and chi-square agree on the top feature for strong signal
        assert_eq!(scores[0].feature, "signal");
        assert_eq!(scores[0].rank_ig, 1);
        assert_eq!(scores[0].rank_chi, 1);
    }

    #[test]
    fn empty_dataset_is_a_precondition_error() {
        let ds = numeric_dataset(vec![("x", "x", vec![])], vec![]);
        assert!(matches!(
            rank_features(&ds, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ranking_is_deterministic_with_lexicographic_ties() {
        // two identical constant features tie at zero gain; ranks must be
        // assigned by name order
        let labels: Vec<Label> = (0..6)
            .map(|i| {
                if i < 3 {
                    Label::Successful
                } else {
                    Label::Unsuccessful
                }
            })
            .collect();
        let ds = numeric_dataset(
            vec![
                ("zeta", "zeta", vec![1.0; 6]),
                ("alpha", "alpha", vec![1.0; 6]),
            ],
            labels,
        );
        let a = rank_features(&ds, 10).unwrap();
        let b = rank_features(&ds, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].feature, "alpha");
        assert_eq!(a[0].rank_ig, 1);
        assert_eq!(a[1].feature, "zeta");
        assert_eq!(a[1].rank_ig, 2);
    }

    #[test]
    fn sources_aggregate_expanded_features_by_max() {
        let labels: Vec<Label> = (0..8)
            .map(|i| {
                if i % 2 == 0 {
                    Label::Successful
                } else {
                    Label::Unsuccessful
                }
            })
            .collect();
        // os=linux perfectly tracks the label, os=bsd is constant
        let linux: Vec<f64> = (0..8).map(|i| f64::from(i % 2 == 0)).collect();
        let bsd = vec![1.0; 8];
        let noise: Vec<f64> = (0..8).map(|i| f64::from(i < 4)).collect();
        let ds = numeric_dataset(
            vec![
                ("os=linux", "os", linux),
                ("os=bsd", "os", bsd),
                ("donors", "donors", noise),
            ],
            labels,
        );
        let sources = rank_sources(&ds, 4).unwrap();
        assert_eq!(sources.len(), 2);
        assert_eq!(sources[0].feature, "os");
        assert!((sources[0].information_gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fold_mean_scores_average_training_splits() {
        let labels: Vec<Label> = (0..40)
            .map(|i| {
                if i % 4 == 0 {
                    Label::Successful
                } else {
                    Label::Unsuccessful
                }
            })
            .collect();
        let values: Vec<f64> = (0..40).map(|i| f64::from(i % 4 == 0)).collect();
        let ds = numeric_dataset(vec![("x", "x", values)], labels);
        let scores = rank_features_fold_mean(&ds, 4, 5, 42).unwrap();
        // the feature fully determines the label in every training split
        let full = rank_features(&ds, 4).unwrap();
        assert!((scores[0].information_gain - full[0].information_gain).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn entropy_permutation_invariant_and_maximal_when_balanced(
            counts in proptest::collection::vec(0u64..200, 2..6)
        ) {
            let forward = entropy(&ClassDistribution::new(counts.clone()));
            let mut reversed = counts.clone();
            reversed.reverse();
            prop_assert!((forward - entropy(&ClassDistribution::new(reversed))).abs() < 1e-12);

            let m = counts.len() as u64;
            let balanced = entropy(&ClassDistribution::new(vec![60; counts.len()]));
            prop_assert!(forward <= balanced + 1e-12);
            prop_assert!((balanced - (m as f64).log2()).abs() < 1e-12);
        }

        #[test]
        fn chi_square_invariances(rows in proptest::collection::vec((0u64..50, 0u64..50), 1..6)) {
            let table = ContingencyTable::new(rows.iter().map(|&(a, b)| [a, b]).collect());
            let swapped = ContingencyTable::new(rows.iter().map(|&(a, b)| [b, a]).collect());
            let mut shuffled_rows: Vec<[u64;2]> = rows.iter().map(|&(a, b)| [a, b]).collect();
            shuffled_rows.reverse();
            let shuffled = ContingencyTable::new(shuffled_rows);

            let x = chi_square(&table);
            prop_assert!((x - chi_square(&swapped)).abs() < 1e-9);
            prop_assert!((x - chi_square(&shuffled)).abs() < 1e-9);
            // bounded by n for two classes
            prop_assert!(x <= table.total() as f64 + 1e-9);
        }

        #[test]
        fn count_scaling_scales_chi_and_preserves_gain(
            rows in proptest::collection::vec((0u64..40, 0u64..40), 1..5),
            k in 2u64..6,
        ) {
            let table = ContingencyTable::new(rows.iter().map(|&(a, b)| [a, b]).collect());
            let scaled = ContingencyTable::new(rows.iter().map(|&(a, b)| [a * k, b * k]).collect());
            prop_assert!((chi_square(&scaled) - k as f64 * chi_square(&table)).abs() < 1e-6);
            prop_assert!((information_gain(&scaled) - information_gain(&table)).abs() < 1e-9);
        }

        #[test]
        fn gain_bounded_by_class_entropy(rows in proptest::collection::vec((0u64..50, 0u64..50), 1..6)) {
            let table = ContingencyTable::new(rows.iter().map(|&(a, b)| [a, b]).collect());
            let class_entropy = entropy(&ClassDistribution::new(table.class_marginals().to_vec()));
            let gain = information_gain(&table);
            prop_assert!(gain >= 0.0);
            prop_assert!(gain <= class_entropy + 1e-12);
        }
    }
}
