//! Run configuration: defaults, optional JSON config file, CLI flag
//! overrides (flags win), and validation. Every resolved run embeds this
//! configuration in its reports so runs are reproducible byte for byte.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use portent::classifiers::{ModelSpec, NbParams, SvmParams, TreeParams};
use portent::error::{Error, Result};
use portent::features::ResolvedPolicy;
use portent::ingest::{Repository, Schema};

/// Which feature set a run trains on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    All,
    TopK,
}

/// Optional JSON config file; same keys as the flags.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub repo: Option<String>,
    pub input: Option<PathBuf>,
    pub freebsd: Option<PathBuf>,
    pub gentoo: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub delimiter: Option<char>,
    pub as_of: Option<String>,
    pub bins: Option<usize>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub model: Option<String>,
    pub features: Option<String>,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
    pub fold_mean: Option<bool>,
    pub smoothing: Option<f64>,
    pub prior_exponent: Option<f64>,
    pub max_depth: Option<u32>,
    pub min_leaf: Option<usize>,
    pub lambda: Option<f64>,
    pub epochs: Option<usize>,
    pub svm_seed: Option<u64>,
    pub positive_weight: Option<f64>,
    pub min_votes: Option<f64>,
    pub rating_bounds: Option<(f64, f64)>,
    pub global_mean_rating: Option<f64>,
    pub log1p: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag values as parsed; `None` falls back to the config file, then to
/// the built-in default.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub repo: Option<String>,
    pub input: Option<PathBuf>,
    pub freebsd: Option<PathBuf>,
    pub gentoo: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub delimiter: Option<char>,
    pub as_of: Option<String>,
    pub bins: Option<usize>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub model: Option<String>,
    pub features: Option<String>,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
    pub fold_mean: Option<bool>,
    pub smoothing: Option<f64>,
    pub prior_exponent: Option<f64>,
    pub max_depth: Option<u32>,
    pub min_leaf: Option<usize>,
    pub lambda: Option<f64>,
    pub epochs: Option<usize>,
    pub svm_seed: Option<u64>,
    pub positive_weight: Option<f64>,
    pub min_votes: Option<f64>,
    pub rating_bounds: Option<(f64, f64)>,
    pub global_mean_rating: Option<f64>,
    pub log1p: Option<Vec<String>>,
}

/// Fully resolved run configuration, embedded verbatim in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub repo: Repository,
    pub input: PathBuf,
    pub freebsd: PathBuf,
    pub gentoo: PathBuf,
    pub schema: Option<PathBuf>,
    pub delimiter: char,
    pub as_of: NaiveDate,
    pub bins: usize,
    pub folds: usize,
    pub seed: u64,
    pub model: ModelSpec,
    pub features: FeatureMode,
    pub k: usize,
    pub fold_mean: bool,
    pub policy: ResolvedPolicy,
    pub out: PathBuf,
}

fn parse_repo(name: &str) -> Result<Repository> {
    match name {
        "freshmeat" => Ok(Repository::FreshMeat),
        "sourceforge" => Ok(Repository::SourceForge),
        other => Err(Error::Config(format!(
            "unknown repository '{other}', expected freshmeat or sourceforge"
        ))),
    }
}

/// `all`, `topk`, or `top<digits>` (which also fixes k).
fn parse_features(value: &str) -> Result<(FeatureMode, Option<usize>)> {
    match value {
        "all" => Ok((FeatureMode::All, None)),
        "topk" => Ok((FeatureMode::TopK, None)),
        other => match other
            .strip_prefix("top")
            .and_then(|d| d.parse::<usize>().ok())
        {
            Some(k) if k > 0 => Ok((FeatureMode::TopK, Some(k))),
            _ => Err(Error::Config(format!(
                "unknown feature mode '{other}', expected all, topk or top<N>"
            ))),
        },
    }
}

pub fn resolve(flags: FlagOverrides, file: FileConfig) -> Result<RunConfig> {
    let repo = parse_repo(
        &flags
            .repo
            .or(file.repo)
            .ok_or_else(|| Error::Config("missing --repo".into()))?,
    )?;
    let input = flags
        .input
        .or(file.input)
        .ok_or_else(|| Error::Config("missing --input".into()))?;
    let freebsd = flags
        .freebsd
        .or(file.freebsd)
        .ok_or_else(|| Error::Config("missing --freebsd".into()))?;
    let gentoo = flags
        .gentoo
        .or(file.gentoo)
        .ok_or_else(|| Error::Config("missing --gentoo".into()))?;
    let as_of_text = flags
        .as_of
        .or(file.as_of)
        .ok_or_else(|| Error::Config("missing --as-of (required for reproducible runs)".into()))?;
    let as_of = NaiveDate::parse_from_str(&as_of_text, "%Y-%m-%d")
        .map_err(|e| Error::Config(format!("invalid --as-of '{as_of_text}': {e}")))?;

    let (features, k_from_mode) =
        parse_features(flags.features.or(file.features).as_deref().unwrap_or("all"))?;
    let k = flags.k.or(k_from_mode).or(file.k).unwrap_or(5);

    let bins = flags.bins.or(file.bins).unwrap_or(10);
    let folds = flags.folds.or(file.folds).unwrap_or(10);
    let seed = flags.seed.or(file.seed).unwrap_or(42);
    let fold_mean = flags.fold_mean.or(file.fold_mean).unwrap_or(true);

    let model_name = flags.model.or(file.model).unwrap_or_else(|| "nb".into());
    let model = match model_name.as_str() {
        "nb" => ModelSpec::NaiveBayes(NbParams {
            smoothing: flags.smoothing.or(file.smoothing).unwrap_or(1.0),
            prior_exponent: flags.prior_exponent.or(file.prior_exponent).unwrap_or(1.0),
        }),
        "tree" => ModelSpec::DecisionTree(TreeParams {
            max_depth: flags.max_depth.or(file.max_depth),
            min_leaf: flags.min_leaf.or(file.min_leaf).unwrap_or(1),
        }),
        "svm" => ModelSpec::LinearSvm(SvmParams {
            lambda: flags.lambda.or(file.lambda).unwrap_or(1e-2),
            epochs: flags.epochs.or(file.epochs).unwrap_or(50),
            seed: flags.svm_seed.or(file.svm_seed).unwrap_or(seed),
            positive_weight: flags
                .positive_weight
                .or(file.positive_weight)
                .unwrap_or(1.0),
        }),
        other => {
            return Err(Error::Config(format!(
                "unknown model '{other}', expected nb, tree or svm"
            )))
        }
    };

    let mut policy = ResolvedPolicy::new(as_of);
    policy.min_votes = flags.min_votes.or(file.min_votes).unwrap_or(20.0);
    policy.rating_bounds = flags
        .rating_bounds
        .or(file.rating_bounds)
        .unwrap_or((1.0, 10.0));
    policy.global_mean_rating = flags.global_mean_rating.or(file.global_mean_rating);
    policy.log1p = flags
        .log1p
        .or(file.log1p)
        .map(BTreeSet::from_iter)
        .unwrap_or_default();

    let config = RunConfig {
        repo,
        input,
        freebsd,
        gentoo,
        schema: flags.schema.or(file.schema),
        delimiter: flags.delimiter.or(file.delimiter).unwrap_or(','),
        as_of,
        bins,
        folds,
        seed,
        model,
        features,
        k,
        fold_mean,
        policy,
        out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (label, path) in [
            ("--input", &self.input),
            ("--freebsd", &self.freebsd),
            ("--gentoo", &self.gentoo),
        ] {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "{label} path does not exist: {}",
                    path.display()
                )));
            }
        }
        if let Some(schema) = &self.schema {
            if !schema.exists() {
                return Err(Error::Config(format!(
                    "--schema path does not exist: {}",
                    schema.display()
                )));
            }
        }
        if self.folds < 2 {
            return Err(Error::Config(format!(
                "--folds must be at least 2, got {}",
                self.folds
            )));
        }
        if self.bins < 2 {
            return Err(Error::Config(format!(
                "--bins must be at least 2, got {}",
                self.bins
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("--k must be at least 1".into()));
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::Config(
                "--delimiter must be an ASCII character".into(),
            ));
        }
        Ok(())
    }

    pub fn load_schema(&self) -> Result<Schema> {
        let schema = match &self.schema {
            Some(path) => {
                let file = std::fs::File::open(path)?;
                Schema::from_json(file)?
            }
            None => Schema::builtin(self.repo),
        };
        if schema.repository != self.repo {
            return Err(Error::Config(format!(
                "schema describes {} but --repo is {}",
                schema.repository, self.repo
            )));
        }
        Ok(schema)
    }
}
