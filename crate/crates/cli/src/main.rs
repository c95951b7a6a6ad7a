//! Command-line driver: rank, eval, train and score subcommands over
//! repository metadata dumps and ports inventories. All randomness flows
//! from the configured seed; reruns with the same configuration produce
//! byte-identical outputs.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use portent::classifiers::{load_model, save_model, train, TrainedModel};
use portent::error::{Error, Result};
use portent::evaluation::{cross_validate, top_k_subset, EvaluationReport};
use portent::features::{
    encode, encode_record, EncodedDataset, FeatureDescriptor, FeatureEncoding,
};
use portent::ingest::{
    label_projects, label_stats, parse_ports, parse_projects, AttrKind, PortsSource, ProjectRecord,
    Schema,
};
use portent::report::{
    render_evaluation, render_ranking, render_scores, FoldMeanScores, ProjectScore, RankingReport,
    RankingScores,
};
use portent::selection::{
    rank_features, rank_features_fold_mean, rank_sources, rank_sources_fold_mean,
};

use config::{resolve, FeatureMode, FileConfig, FlagOverrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "portent",
    about = "Mine repository metadata, rank quality features, and train porting-success classifiers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank features by Information Gain and Chi-Square
    Rank(RunArgs),
    /// Cross-validate a classifier and report precision/recall/F-measure
    Eval(RunArgs),
    /// Train a classifier on the full labeled dataset and persist it
    Train(RunArgs),
    /// Score unlabeled projects with a persisted model
    Score(ScoreArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config file; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Repository the dump comes from: freshmeat or sourceforge
    #[arg(long)]
    repo: Option<String>,
    /// Project dump (delimited text with a header row)
    #[arg(long)]
    input: Option<PathBuf>,
    /// FreeBSD Ports inventory (one name per line, '#' comments)
    #[arg(long)]
    freebsd: Option<PathBuf>,
    /// Gentoo Portage inventory
    #[arg(long)]
    gentoo: Option<PathBuf>,
    /// Schema descriptor JSON overriding the built-in one
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Cell delimiter of the dump
    #[arg(long)]
    delimiter: Option<char>,
    /// Anchor date (YYYY-MM-DD) for all days-since features
    #[arg(long = "as-of")]
    as_of: Option<String>,
    /// Equal-width bins for discretizing continuous features
    #[arg(long)]
    bins: Option<usize>,
    /// Cross-validation folds
    #[arg(long)]
    folds: Option<usize>,
    /// Master seed for folds and seeded trainers
    #[arg(long)]
    seed: Option<u64>,
    /// Classifier family: nb, tree or svm
    #[arg(long)]
    model: Option<String>,
    /// Feature set: all, topk or top<N>
    #[arg(long)]
    features: Option<String>,
    /// k for the top-k feature subset
    #[arg(long)]
    k: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compute per-fold mean feature scores in rankings
    #[arg(long = "fold-mean")]
    fold_mean: Option<bool>,
    /// NB smoothing constant
    #[arg(long)]
    smoothing: Option<f64>,
    /// NB prior dampening exponent (1 = off)
    #[arg(long = "prior-exponent")]
    prior_exponent: Option<f64>,
    /// Tree depth limit
    #[arg(long = "max-depth")]
    max_depth: Option<u32>,
    /// Minimum rows per tree split side
    #[arg(long = "min-leaf")]
    min_leaf: Option<usize>,
    /// SVM regularization strength
    #[arg(long)]
    lambda: Option<f64>,
    /// SVM training epochs
    #[arg(long)]
    epochs: Option<usize>,
    /// SVM shuffle seed (defaults to the master seed)
    #[arg(long = "svm-seed")]
    svm_seed: Option<u64>,
    /// SVM positive-class hinge weight (1 = off)
    #[arg(long = "positive-weight")]
    positive_weight: Option<f64>,
    /// Minimum vote mass for the weighted rating
    #[arg(long = "min-votes")]
    min_votes: Option<f64>,
    /// Rating scale bounds, e.g. --rating-bounds 1 10
    #[arg(long = "rating-bounds", num_args = 2)]
    rating_bounds: Option<Vec<f64>>,
    /// Fixed catalog mean rating (computed from data when absent)
    #[arg(long = "global-mean-rating")]
    global_mean_rating: Option<f64>,
    /// Numeric attributes to log1p-transform before training
    #[arg(long, value_delimiter = ',')]
    log1p: Option<Vec<String>>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Persisted model document from `portent train`
    #[arg(long = "model-file")]
    model_file: PathBuf,
    /// Projects to score (same dump format, labels not required)
    #[arg(long)]
    input: PathBuf,
    /// Schema descriptor overriding the built-in one for the model's portal
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Cell delimiter of the dump
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let rating_bounds = match self.rating_bounds {
            Some(bounds) if bounds.len() == 2 => Some((bounds[0], bounds[1])),
            Some(_) => return Err(Error::Config("--rating-bounds takes two values".into())),
            None => None,
        };
        resolve(
            FlagOverrides {
                repo: self.repo,
                input: self.input,
                freebsd: self.freebsd,
                gentoo: self.gentoo,
                schema: self.schema,
                delimiter: self.delimiter,
                as_of: self.as_of,
                bins: self.bins,
                folds: self.folds,
                seed: self.seed,
                model: self.model,
                features: self.features,
                k: self.k,
                out: self.out,
                fold_mean: self.fold_mean,
                smoothing: self.smoothing,
                prior_exponent: self.prior_exponent,
                max_depth: self.max_depth,
                min_leaf: self.min_leaf,
                lambda: self.lambda,
                epochs: self.epochs,
                svm_seed: self.svm_seed,
                positive_weight: self.positive_weight,
                min_votes: self.min_votes,
                rating_bounds,
                global_mean_rating: self.global_mean_rating,
                log1p: self.log1p,
            },
            file,
        )
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rank(args) => args.into_config().and_then(cmd_rank),
        Command::Eval(args) => args.into_config().and_then(cmd_eval),
        Command::Train(args) => args.into_config().and_then(cmd_train),
        Command::Score(args) => cmd_score(args),
    };
    if let Err(error) = outcome {
        let line = serde_json::json!({ "error": error.code(), "message": error.to_string() });
        eprintln!("{line}");
        std::process::exit(error.exit_code());
    }
}

/// Parse, label and encode the configured dataset, echoing parse warnings
/// and labeling match counts to stderr for the operator to audit.
fn load_dataset(config: &RunConfig) -> Result<EncodedDataset> {
    let schema = config.load_schema()?;
    let input = fs::File::open(&config.input)?;
    let outcome = parse_projects(input, &schema, config.delimiter as u8)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    let freebsd = parse_ports(fs::File::open(&config.freebsd)?, PortsSource::FreeBsdPorts)?;
    let gentoo = parse_ports(fs::File::open(&config.gentoo)?, PortsSource::GentooPortage)?;
    let labeled = label_projects(outcome.records, &freebsd, &gentoo);
    let stats = label_stats(&labeled, &freebsd, &gentoo);
    eprintln!(
        "labeled {} projects: {} successful (freebsd matches {}, gentoo matches {})",
        stats.total, stats.successful, stats.freebsd_matches, stats.gentoo_matches
    );

    encode(&labeled, &schema, &config.policy)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_outputs(out: &Path, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(out)?;
    for (name, contents) in files {
        write_atomic(&out.join(name), contents)?;
        println!("wrote {}", out.join(name).display());
    }
    Ok(())
}

#[derive(Serialize)]
struct RankingDoc<'a> {
    config: &'a RunConfig,
    ranking: &'a RankingReport,
}

fn build_ranking(config: &RunConfig, ds: &EncodedDataset) -> Result<RankingReport> {
    let per_feature = rank_features(ds, config.bins)?;
    let per_source = rank_sources(ds, config.bins)?;
    let fold_mean = if config.fold_mean {
        match rank_features_fold_mean(ds, config.bins, config.folds, config.seed) {
            Ok(scores) => Some(FoldMeanScores {
                mode: "mean over per-fold training splits".into(),
                folds: config.folds,
                seed: config.seed,
                per_source: rank_sources_fold_mean(ds, config.bins, config.folds, config.seed)?,
                per_feature: scores,
            }),
            Err(Error::Stratification(reason)) => {
                eprintln!("warning: skipping fold-mean scores: {reason}");
                None
            }
            Err(other) => return Err(other),
        }
    } else {
        None
    };
    Ok(RankingReport {
        repository: ds.repository,
        bins: config.bins,
        full_dataset: RankingScores {
            mode: "full dataset".into(),
            per_source,
            per_feature,
        },
        fold_mean,
    })
}

fn cmd_rank(config: RunConfig) -> Result<()> {
    let ds = load_dataset(&config)?;
    let ranking = build_ranking(&config, &ds)?;
    let doc = RankingDoc {
        config: &config,
        ranking: &ranking,
    };
    write_outputs(
        &config.out,
        &[
            ("ranking.json", to_pretty_json(&doc)),
            ("ranking.txt", render_ranking(&ranking)),
        ],
    )
}

#[derive(Serialize)]
struct EvaluationDoc<'a> {
    config: &'a RunConfig,
    evaluation: &'a EvaluationReport,
}

/// Resolve the feature subset for top-k runs: rank first, then take the
/// k highest-IG source attributes.
fn feature_subset(config: &RunConfig, ds: &EncodedDataset) -> Result<Option<Vec<String>>> {
    match config.features {
        FeatureMode::All => Ok(None),
        FeatureMode::TopK => {
            let sources = rank_sources(ds, config.bins)?;
            Ok(Some(top_k_subset(&sources, config.k)?))
        }
    }
}

fn cmd_eval(config: RunConfig) -> Result<()> {
    let ds = load_dataset(&config)?;
    let subset = feature_subset(&config, &ds)?;
    let evaluation = cross_validate(
        &ds,
        &config.model,
        config.folds,
        config.seed,
        subset.as_deref(),
    )?;
    let doc = EvaluationDoc {
        config: &config,
        evaluation: &evaluation,
    };
    write_outputs(
        &config.out,
        &[
            ("report.json", to_pretty_json(&doc)),
            ("report.txt", render_evaluation(&evaluation, ds.repository)),
        ],
    )
}

fn cmd_train(config: RunConfig) -> Result<()> {
    let ds = load_dataset(&config)?;
    let subset = feature_subset(&config, &ds)?;
    let ds = match &subset {
        Some(sources) => ds.select_sources(sources)?,
        None => ds,
    };
    let model = train(&ds, &config.model)?;
    eprintln!(
        "trained {} model on {} rows, {} features",
        model.family_name(),
        ds.num_rows(),
        ds.num_features()
    );
    write_outputs(&config.out, &[("model.json", save_model(&model))])
}

/// Attributes the model's dictionary needs from the scoring schema,
/// reported when absent.
fn check_compatibility(features: &[FeatureDescriptor], schema: &Schema) -> Result<()> {
    let mut missing = std::collections::BTreeSet::new();
    let mut require = |name: &str, kind: AttrKind| {
        if !schema.has(name, kind) {
            missing.insert(format!("{name} ({kind:?})"));
        }
    };
    for descriptor in features {
        match &descriptor.encoding {
            FeatureEncoding::PassThrough | FeatureEncoding::Log1p => {
                require(&descriptor.source, AttrKind::Numeric)
            }
            FeatureEncoding::DaysSince => require(&descriptor.source, AttrKind::Date),
            FeatureEncoding::CategoryIndex => require(&descriptor.source, AttrKind::Categorical),
            FeatureEncoding::SetMember { .. } => {
                require(&descriptor.source, AttrKind::MultiCategorical)
            }
            FeatureEncoding::Vitality => {
                require("versions", AttrKind::Numeric);
                require("first_release", AttrKind::Date);
                require("latest_release", AttrKind::Date);
            }
            FeatureEncoding::Popularity => {
                require("url_hits", AttrKind::Numeric);
                require("portal_hits", AttrKind::Numeric);
                require("subscriptions", AttrKind::Numeric);
            }
            FeatureEncoding::WeightedRating => {
                require("rating", AttrKind::Numeric);
                require("votes", AttrKind::Numeric);
            }
            FeatureEncoding::MissingIndicator { .. } => {}
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Compatibility(missing.into_iter().collect()))
    }
}

#[derive(Serialize)]
struct ScoresDoc<'a> {
    model_file: &'a Path,
    input: &'a Path,
    /// resolved encoding policy (as-of date, rating knobs) echoed from
    /// the model so the scoring run is reproducible from this file alone
    policy: &'a portent::features::ResolvedPolicy,
    scores: &'a [ProjectScore],
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let text = fs::read_to_string(&args.model_file).map_err(|e| {
        Error::Config(format!(
            "cannot read model {}: {e}",
            args.model_file.display()
        ))
    })?;
    let model: TrainedModel = load_model(&text)?;

    let schema = match &args.schema {
        Some(path) => Schema::from_json(fs::File::open(path)?)?,
        None => Schema::builtin(model.repository),
    };
    if schema.repository != model.repository {
        return Err(Error::Compatibility(vec![format!(
            "model is for {} but schema describes {}",
            model.repository, schema.repository
        )]));
    }
    check_compatibility(&model.features, &schema)?;

    let input = fs::File::open(&args.input)?;
    let outcome = parse_projects(input, &schema, args.delimiter as u8)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    let mut scores = Vec::with_capacity(outcome.records.len());
    for record in &outcome.records {
        scores.push(score_record(record, &model)?);
    }
    scores.sort_by(|a, b| {
        b.successfulness
            .partial_cmp(&a.successfulness)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.project_id.cmp(&b.project_id))
    });

    let doc = ScoresDoc {
        model_file: &args.model_file,
        input: &args.input,
        policy: &model.policy,
        scores: &scores,
    };
    write_outputs(
        &args.out,
        &[
            ("scores.json", to_pretty_json(&doc)),
            ("scores.txt", render_scores(&scores)),
        ],
    )
}

fn score_record(record: &ProjectRecord, model: &TrainedModel) -> Result<ProjectScore> {
    let row = encode_record(record, &model.features, &model.policy)?;
    let prediction = model.predict(&row)?;
    Ok(ProjectScore {
        project_id: record.project_id.clone(),
        label: prediction.label,
        successfulness: prediction.successfulness,
    })
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
