//! Plain-text report rendering: a ranking table in the familiar
//! feature/IG/chi-square layout and an evaluation table with precision,
//! recall and F-measure per condition.

use serde::{Deserialize, Serialize};

use crate::evaluation::EvaluationReport;
use crate::ingest::{Label, Repository};
use crate::selection::FeatureScore;

/// Ranking results for one dataset: scores computed on the full dataset,
/// and optionally the per-fold mean variant, both at feature and at
/// source-attribute granularity. `mode` labels tell report readers which
/// aggregation produced which numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub repository: Repository,
    pub bins: usize,
    pub full_dataset: RankingScores,
    pub fold_mean: Option<FoldMeanScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingScores {
    pub mode: String,
    pub per_source: Vec<FeatureScore>,
    pub per_feature: Vec<FeatureScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMeanScores {
    pub mode: String,
    pub folds: usize,
    pub seed: u64,
    pub per_source: Vec<FeatureScore>,
    pub per_feature: Vec<FeatureScore>,
}

/// One scored project, for the scoring output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectScore {
    pub project_id: String,
    pub label: Label,
    pub successfulness: f64,
}

fn score_table(scores: &[FeatureScore], header: &str) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    out.push_str(&format!(
        "{:<34} {:>18} {:>14}\n",
        "Feature", "Information Gain", "Chi-Square"
    ));
    for score in scores {
        out.push_str(&format!(
            "{:<34} {:>18.4} {:>14.3}\n",
            score.feature, score.information_gain, score.chi_square
        ));
    }
    out
}

/// Render the ranking report: source-attribute table first (the readable
/// analog of a published per-feature table), expanded features below.
pub fn render_ranking(report: &RankingReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Feature ranking for {} (bins = {})\n\n",
        report.repository, report.bins
    ));
    out.push_str(&score_table(
        &report.full_dataset.per_source,
        &format!("Source attributes, {}:", report.full_dataset.mode),
    ));
    out.push('\n');
    out.push_str(&score_table(
        &report.full_dataset.per_feature,
        &format!("Expanded features, {}:", report.full_dataset.mode),
    ));
    if let Some(fold_mean) = &report.fold_mean {
        out.push('\n');
        out.push_str(&score_table(
            &fold_mean.per_source,
            &format!(
                "Source attributes, {} (k = {}, seed = {}):",
                fold_mean.mode, fold_mean.folds, fold_mean.seed
            ),
        ));
    }
    out
}

fn family_label(report: &EvaluationReport) -> &'static str {
    match report.model {
        crate::classifiers::ModelSpec::NaiveBayes(_) => "NB",
        crate::classifiers::ModelSpec::DecisionTree(_) => "Tree",
        crate::classifiers::ModelSpec::LinearSvm(_) => "SVM",
    }
}

/// Render an evaluation report as a small table: the run's condition row
/// with precision, recall and F-measure under the repository name,
/// followed by the pooled counts and the per-fold breakdown.
pub fn render_evaluation(report: &EvaluationReport, repository: Repository) -> String {
    let condition = match &report.feature_subset {
        Some(subset) => format!("Top-{} Features", subset.len()),
        None => "All Features".to_string(),
    };
    let row_label = format!("{} {}", family_label(report), condition);

    let mut out = String::new();
    out.push_str(&format!("{:<28} {:>44}\n", "", repository));
    out.push_str(&format!(
        "{:<28} {:>14} {:>14} {:>14}\n",
        "", "Precision", "Recall", "F-Measure"
    ));
    out.push_str(&format!(
        "{:<28} {:>14.2} {:>14.2} {:>14.2}\n",
        row_label, report.mean_precision, report.mean_recall, report.mean_f_measure
    ));
    out.push_str(&format!(
        "\nMean of {} folds (seed {}); {} degenerate fold(s) flagged as zero.\n",
        report.folds, report.seed, report.degenerate_folds
    ));
    let pooled = &report.pooled_confusion;
    out.push_str(&format!(
        "Pooled counts: TP {} / FN {} / FP {} / TN {}  ->  P {:.4}, R {:.4}, F {:.4}\n",
        pooled.true_pos,
        pooled.false_neg,
        pooled.false_pos,
        pooled.true_neg,
        report.pooled.precision,
        report.pooled.recall,
        report.pooled.f_measure
    ));
    if let Some(subset) = &report.feature_subset {
        out.push_str(&format!("Feature subset: {}\n", subset.join(", ")));
    }
    out.push('\n');
    out.push_str(&format!(
        "{:<6} {:>6} {:>6} {:>6} {:>6} {:>10} {:>10} {:>10}\n",
        "Fold", "TP", "FN", "FP", "TN", "P", "R", "F"
    ));
    for fold in &report.per_fold {
        out.push_str(&format!(
            "{:<6} {:>6} {:>6} {:>6} {:>6} {:>10.4} {:>10.4} {:>10.4}\n",
            fold.fold,
            fold.confusion.true_pos,
            fold.confusion.false_neg,
            fold.confusion.false_pos,
            fold.confusion.true_neg,
            fold.metrics.precision,
            fold.metrics.recall,
            fold.metrics.f_measure
        ));
    }
    out
}

/// Render project scores, already sorted by descending successfulness.
pub fn render_scores(scores: &[ProjectScore]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>14} {:>16}\n",
        "Project", "Label", "Successfulness"
    ));
    for score in scores {
        let label = match score.label {
            Label::Successful => "successful",
            Label::Unsuccessful => "unsuccessful",
        };
        out.push_str(&format!(
            "{:<28} {:>14} {:>16.6}\n",
            score.project_id, label, score.successfulness
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_table_lists_features_in_ig_order() {
        let report = RankingReport {
            repository: Repository::FreshMeat,
            bins: 10,
            full_dataset: RankingScores {
                mode: "full dataset".into(),
                per_source: vec![
                    FeatureScore {
                        feature: "popularity".into(),
                        information_gain: 0.324,
                        chi_square: 1793.254,
                        rank_ig: 1,
                        rank_chi: 1,
                    },
                    FeatureScore {
                        feature: "subscriptions".into(),
                        information_gain: 0.319,
                        chi_square: 1756.487,
                        rank_ig: 2,
                        rank_chi: 3,
                    },
                ],
                per_feature: vec![],
            },
            fold_mean: None,
        };
        let text = render_ranking(&report);
        let popularity = text.find("popularity").unwrap();
        let subscriptions = text.find("subscriptions").unwrap();
        assert!(popularity < subscriptions);
        assert!(text.contains("0.3240"));
        assert!(text.contains("1793.254"));
    }

    #[test]
    fn scores_render_with_labels() {
        let scores = vec![
            ProjectScore {
                project_id: "vim".into(),
                label: Label::Successful,
                successfulness: 0.97,
            },
            ProjectScore {
                project_id: "abandonware".into(),
                label: Label::Unsuccessful,
                successfulness: 0.03,
            },
        ];
        let text = render_scores(&scores);
        assert!(text.contains("vim"));
        assert!(text.contains("successful"));
    }
}
