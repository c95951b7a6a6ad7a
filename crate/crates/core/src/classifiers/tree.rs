//! Greedy top-down decision tree induction with information gain as the
//! split criterion: multi-way splits on categorical features, binary
//! midpoint-threshold splits on numeric features, no pruning.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classifiers::{class_index, NumericImputer, Prediction};
use crate::error::{Error, Result};
use crate::features::{EncodedDataset, FeatureKind, FeatureValue};
use crate::ingest::Label;
use crate::selection::{information_gain, ContingencyTable};

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Maximum split depth; `None` grows until purity or zero gain.
    pub max_depth: Option<u32>,
    /// Minimum rows each side of a split must keep.
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_leaf: 1,
        }
    }
}

/// Tree nodes in an index arena; node 0 is the root. Internal nodes keep
/// their training class counts and the gain of the chosen split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        counts: [u64; 2],
    },
    CategoricalSplit {
        feature: usize,
        gain: f64,
        counts: [u64; 2],
        /// child node per observed category slot
        children: BTreeMap<usize, usize>,
        /// fallback child for unseen or missing categories: the child
        /// that received the most training rows
        majority: usize,
    },
    NumericSplit {
        feature: usize,
        threshold: f64,
        gain: f64,
        counts: [u64; 2],
        left: usize,
        right: usize,
        majority: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub params: TreeParams,
    pub nodes: Vec<TreeNode>,
}

enum Split {
    Categorical {
        feature: usize,
        gain: f64,
        groups: BTreeMap<usize, Vec<usize>>,
    },
    Numeric {
        feature: usize,
        gain: f64,
        threshold: f64,
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

impl Split {
    fn gain(&self) -> f64 {
        match self {
            Split::Categorical { gain, .. } => *gain,
            Split::Numeric { gain, .. } => *gain,
        }
    }
}

struct Builder<'a> {
    rows: &'a [Vec<FeatureValue>],
    labels: &'a [Label],
    kinds: &'a [FeatureKind],
    params: &'a TreeParams,
    nodes: Vec<TreeNode>,
}

pub(crate) fn train(
    ds: &EncodedDataset,
    rows: &[usize],
    imputer: &NumericImputer,
    params: &TreeParams,
) -> Result<DecisionTreeModel> {
    if params.min_leaf < 1 {
        return Err(Error::Precondition("min_leaf must be at least 1".into()));
    }
    let filled: Vec<Vec<FeatureValue>> = rows.iter().map(|&r| imputer.fill(&ds.rows[r])).collect();
    let labels: Vec<Label> = rows.iter().map(|&r| ds.labels[r]).collect();
    let kinds: Vec<FeatureKind> = ds.features.iter().map(|f| f.kind.clone()).collect();

    let mut builder = Builder {
        rows: &filled,
        labels: &labels,
        kinds: &kinds,
        params,
        nodes: Vec::new(),
    };
    let index: Vec<usize> = (0..filled.len()).collect();
    builder.build(&index, 0, &BTreeSet::new());
    Ok(DecisionTreeModel {
        params: params.clone(),
        nodes: builder.nodes,
    })
}

impl<'a> Builder<'a> {
    fn build(&mut self, rows: &[usize], depth: u32, used_categorical: &BTreeSet<usize>) -> usize {
        let counts = self.counts(rows);
        let depth_ok = self.params.max_depth.is_none_or(|limit| depth < limit);
        if counts[0] == 0 || counts[1] == 0 || rows.len() < 2 || !depth_ok {
            return self.leaf(counts);
        }

        let split = match self.best_split(rows, used_categorical) {
            Some(split) if split.gain() > MIN_GAIN => split,
            _ => return self.leaf(counts),
        };

        match split {
            Split::Categorical {
                feature,
                gain,
                groups,
            } => {
                let slot = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { counts }); // placeholder
                let mut children = BTreeMap::new();
                let mut majority = 0usize;
                let mut majority_size = 0usize;
                let mut used = used_categorical.clone();
                used.insert(feature);
                for (value, group) in groups {
                    let child = self.build(&group, depth + 1, &used);
                    if group.len() > majority_size {
                        majority_size = group.len();
                        majority = child;
                    }
                    children.insert(value, child);
                }
                self.nodes[slot] = TreeNode::CategoricalSplit {
                    feature,
                    gain,
                    counts,
                    children,
                    majority,
                };
                slot
            }
            Split::Numeric {
                feature,
                gain,
                threshold,
                left,
                right,
            } => {
                let slot = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { counts }); // placeholder
                let left_len = left.len();
                let left_child = self.build(&left, depth + 1, used_categorical);
                let right_child = self.build(&right, depth + 1, used_categorical);
                self.nodes[slot] = TreeNode::NumericSplit {
                    feature,
                    threshold,
                    gain,
                    counts,
                    left: left_child,
                    right: right_child,
                    majority: if left_len >= right.len() {
                        left_child
                    } else {
                        right_child
                    },
                };
                slot
            }
        }
    }

    fn leaf(&mut self, counts: [u64; 2]) -> usize {
        self.nodes.push(TreeNode::Leaf { counts });
        self.nodes.len() - 1
    }

    fn counts(&self, rows: &[usize]) -> [u64; 2] {
        let mut counts = [0u64; 2];
        for &r in rows {
            counts[class_index(self.labels[r])] += 1;
        }
        counts
    }

    fn best_split(&self, rows: &[usize], used_categorical: &BTreeSet<usize>) -> Option<Split> {
        let mut best: Option<Split> = None;
        for feature in 0..self.kinds.len() {
            let candidate = match &self.kinds[feature] {
                FeatureKind::Categorical { .. } => {
                    if used_categorical.contains(&feature) {
                        continue;
                    }
                    self.categorical_split(rows, feature)
                }
                FeatureKind::Numeric => self.numeric_split(rows, feature),
            };
            if let Some(candidate) = candidate {
                if best
                    .as_ref()
                    .is_none_or(|b| candidate.gain() > b.gain() + MIN_GAIN)
                {
                    best = Some(candidate);
                }
            }
        }
        best
    }

    fn categorical_split(&self, rows: &[usize], feature: usize) -> Option<Split> {
        let kind = &self.kinds[feature];
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &r in rows {
            groups
                .entry(self.rows[r][feature].slot(kind))
                .or_default()
                .push(r);
        }
        if groups.len() < 2 {
            return None;
        }
        if groups.values().any(|g| g.len() < self.params.min_leaf) {
            return None;
        }
        let mut table = ContingencyTable::with_values(groups.len());
        for (i, group) in groups.values().enumerate() {
            for &r in group {
                table.add(i, self.labels[r] == Label::Successful);
            }
        }
        Some(Split::Categorical {
            feature,
            gain: information_gain(&table),
            groups,
        })
    }

    fn numeric_split(&self, rows: &[usize], feature: usize) -> Option<Split> {
        let mut ordered: Vec<(f64, usize)> = rows
            .iter()
            .filter_map(|&r| self.rows[r][feature].as_number().map(|v| (v, r)))
            .collect();
        if ordered.len() < 2 {
            return None;
        }
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

        let totals = {
            let mut t = [0u64; 2];
            for &(_, r) in &ordered {
                t[class_index(self.labels[r])] += 1;
            }
            t
        };

        let mut best: Option<(f64, f64, usize)> = None; // (gain, threshold, left count)
        let mut left = [0u64; 2];
        for i in 0..ordered.len() - 1 {
            left[class_index(self.labels[ordered[i].1])] += 1;
            if ordered[i].0 >= ordered[i + 1].0 {
                continue; // not a boundary between distinct values
            }
            let left_n = i + 1;
            let right_n = ordered.len() - left_n;
            if left_n < self.params.min_leaf || right_n < self.params.min_leaf {
                continue;
            }
            let table = ContingencyTable::new(vec![
                [left[0], left[1]],
                [totals[0] - left[0], totals[1] - left[1]],
            ]);
            let gain = information_gain(&table);
            if best.is_none_or(|(g, _, _)| gain > g + MIN_GAIN) {
                let threshold = ordered[i].0 + (ordered[i + 1].0 - ordered[i].0) / 2.0;
                best = Some((gain, threshold, left_n));
            }
        }

        best.map(|(gain, threshold, _)| {
            let (left, right): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| {
                self.rows[r][feature]
                    .as_number()
                    .is_some_and(|v| v <= threshold)
            });
            Split::Numeric {
                feature,
                gain,
                threshold,
                left,
                right,
            }
        })
    }
}

impl DecisionTreeModel {
    /// Route a row to its leaf; missing or unseen categories take the
    /// child with the largest training count.
    pub fn predict(&self, row: &[FeatureValue]) -> Prediction {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf { counts } => {
                    let successfulness =
                        (counts[0] as f64 + 1.0) / ((counts[0] + counts[1]) as f64 + 2.0);
                    return Prediction {
                        label: if successfulness >= 0.5 {
                            Label::Successful
                        } else {
                            Label::Unsuccessful
                        },
                        confidence: successfulness,
                        successfulness,
                    };
                }
                TreeNode::CategoricalSplit {
                    feature,
                    children,
                    majority,
                    ..
                } => {
                    node = match row[*feature] {
                        FeatureValue::Category(slot) => {
                            children.get(&slot).copied().unwrap_or(*majority)
                        }
                        _ => *majority,
                    };
                }
                TreeNode::NumericSplit {
                    feature,
                    threshold,
                    left,
                    right,
                    majority,
                    ..
                } => {
                    node = match row[*feature].as_number() {
                        Some(v) => {
                            if v <= *threshold {
                                *left
                            } else {
                                *right
                            }
                        }
                        None => *majority,
                    };
                }
            }
        }
    }

    /// Number of training rows that reached each leaf, in arena order.
    pub fn leaf_counts(&self) -> Vec<[u64; 2]> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Leaf { counts } => Some(*counts),
                _ => None,
            })
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.depth_of(0)
    }

    fn depth_of(&self, node: usize) -> usize {
        match &self.nodes[node] {
            TreeNode::Leaf { .. } => 0,
            TreeNode::CategoricalSplit { children, .. } => {
                1 + children
                    .values()
                    .map(|&c| self.depth_of(c))
                    .max()
                    .unwrap_or(0)
            }
            TreeNode::NumericSplit { left, right, .. } => {
                1 + self.depth_of(*left).max(self.depth_of(*right))
            }
        }
    }
}
