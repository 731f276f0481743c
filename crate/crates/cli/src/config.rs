//! Flat `key = value` pipeline configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use sha2::{Digest, Sha256};
use trendlens::category::ThresholdRule;
use trendlens::corpus::SourceClass;
use trendlens::trend::EdgeWeighting;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub source_class: SourceClass,
    pub path: PathBuf,
    /// LDA topics of the selected model whose articles are dropped.
    pub remove_topics: BTreeSet<usize>,
    /// File with one article id per line to drop after review.
    pub remove_articles: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Latest plausible publication date; `None` means the day of the run.
    pub as_of: Option<NaiveDate>,
    /// Sorted by name.
    pub datasets: Vec<DatasetSpec>,
    pub keywords: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub vocab_min_df: u32,
    pub vocab_max_df_ratio: f64,
    pub lda_grid: Vec<usize>,
    pub lda_alpha: Option<f64>,
    pub lda_beta: f64,
    pub lda_iterations: usize,
    pub lda_burn_in: usize,
    pub coherence_top_n: usize,
    pub terms_max_len: usize,
    pub terms_min_freq: u64,
    pub general_corpus: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub label_sheets: Vec<PathBuf>,
    pub threshold_rule: ThresholdRule,
    pub edge_weighting: EdgeWeighting,
    pub alpha: f64,
    pub max_lag: usize,
    pub smoothing: bool,
    /// Rolling TLCC window in months; 0 disables it.
    pub tlcc_window: usize,
    pub tlcc_step: usize,
    /// Every setting as written (seed excluded), for hashing.
    entries: BTreeMap<String, String>,
}

const GLOBAL_KEYS: &[&str] = &[
    "output_dir",
    "seed",
    "as_of",
    "keywords",
    "stopwords",
    "vocab.min_df",
    "vocab.max_df_ratio",
    "lda.grid",
    "lda.alpha",
    "lda.beta",
    "lda.iterations",
    "lda.burn_in",
    "coherence.top_n",
    "terms.max_len",
    "terms.min_freq",
    "terms.general_corpus",
    "terms.synonyms",
    "taxonomy",
    "labels",
    "threshold.rule",
    "trends.edge_weighting",
    "stats.alpha",
    "stats.max_lag",
    "stats.smoothing",
    "stats.tlcc_window",
    "stats.tlcc_step",
];

const DATASET_KEYS: &[&str] = &["source", "path", "remove_topics", "remove_articles"];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Splits the text into `key = value` entries. Later duplicates are an
/// error; `#` starts a comment line.
fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut entries = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().to_string();
        if entries
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            return Err(usage(format!("config line {}: `{key}` set twice", n + 1)));
        }
    }
    Ok(entries)
}

struct Reader<'a> {
    entries: &'a BTreeMap<String, String>,
    base: &'a Path,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| usage(format!("config `{key}`: cannot parse `{v}`"))),
        }
    }

    fn path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        self.raw(key).map(|v| self.existing(key, v)).transpose()
    }

    fn existing(&self, key: &str, value: &str) -> Result<PathBuf, CliError> {
        let p = self.base.join(value);
        if !p.is_file() {
            return Err(usage(format!(
                "config `{key}`: file `{}` does not exist",
                p.display()
            )));
        }
        Ok(p)
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config `{}`: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let entries = parse_entries(text)?;
        let r = Reader {
            entries: &entries,
            base,
        };

        let mut datasets: BTreeMap<String, BTreeMap<&str, &str>> = BTreeMap::new();
        for (key, value) in &entries {
            if GLOBAL_KEYS.contains(&key.as_str()) {
                continue;
            }
            let parts: Vec<&str> = key.split('.').collect();
            match parts.as_slice() {
                ["dataset", name, field] if DATASET_KEYS.contains(field) => {
                    if !valid_name(name) {
                        return Err(usage(format!(
                            "dataset name `{name}` must use lowercase letters, digits, `_` or `-`"
                        )));
                    }
                    datasets
                        .entry(name.to_string())
                        .or_default()
                        .insert(field, value.as_str());
                }
                _ => return Err(usage(format!("unknown config key `{key}`"))),
            }
        }
        if datasets.is_empty() {
            return Err(usage(
                "config defines no datasets (`dataset.<name>.path = ...`)",
            ));
        }
        let datasets = datasets
            .into_iter()
            .map(|(name, fields)| {
                let key = |f: &str| format!("dataset.{name}.{f}");
                let source_class = fields
                    .get("source")
                    .ok_or_else(|| usage(format!("`{}` is required", key("source"))))?
                    .parse::<SourceClass>()
                    .map_err(|e| usage(format!("`{}`: {e}", key("source"))))?;
                let path = fields
                    .get("path")
                    .ok_or_else(|| usage(format!("`{}` is required", key("path"))))?;
                let path = r.existing(&key("path"), path)?;
                let remove_topics = fields
                    .get("remove_topics")
                    .map(|v| parse_list::<usize>(&key("remove_topics"), v))
                    .transpose()?
                    .unwrap_or_default()
                    .into_iter()
                    .collect();
                let remove_articles = fields
                    .get("remove_articles")
                    .filter(|v| !v.is_empty())
                    .map(|v| r.existing(&key("remove_articles"), v))
                    .transpose()?;
                Ok(DatasetSpec {
                    name,
                    source_class,
                    path,
                    remove_topics,
                    remove_articles,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let as_of = r
            .raw("as_of")
            .map(|v| {
                NaiveDate::parse_from_str(v, "%Y-%m-%d")
                    .map_err(|_| usage(format!("config `as_of`: expected YYYY-MM-DD, got `{v}`")))
            })
            .transpose()?;
        let lda_grid = match r.raw("lda.grid") {
            Some(v) => parse_list("lda.grid", v)?,
            None => trendlens::topic::DEFAULT_GRID.to_vec(),
        };
        let lda_iterations = r.parse("lda.iterations", 1000)?;
        let lda_burn_in = r.parse("lda.burn_in", 800)?;
        if lda_burn_in >= lda_iterations {
            return Err(usage("`lda.burn_in` must be below `lda.iterations`"));
        }
        let label_sheets = match r.raw("labels") {
            Some(v) => v
                .split(',')
                .map(|p| r.existing("labels", p.trim()))
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let threshold_rule = match r.raw("threshold.rule") {
            Some(v) => v
                .parse()
                .map_err(|e| usage(format!("config `threshold.rule`: {e}")))?,
            None => ThresholdRule::default(),
        };
        let edge_weighting = match r.raw("trends.edge_weighting") {
            None | Some("dominance") => EdgeWeighting::Dominance,
            Some("relevance") => EdgeWeighting::Relevance,
            Some(v) => {
                return Err(usage(format!(
                    "config `trends.edge_weighting`: unknown `{v}`"
                )))
            }
        };
        let smoothing = match r.raw("stats.smoothing") {
            None | Some("none") => false,
            Some("ma3") => true,
            Some(v) => return Err(usage(format!("config `stats.smoothing`: unknown `{v}`"))),
        };
        let alpha: f64 = r.parse("stats.alpha", trendlens::stats::DEFAULT_ALPHA)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(usage("`stats.alpha` must lie in (0, 1)"));
        }

        let mut hashed = entries.clone();
        hashed.remove("seed");
        Ok(PipelineConfig {
            output_dir: base.join(r.raw("output_dir").unwrap_or("out")),
            seed: r.parse("seed", 1)?,
            as_of,
            datasets,
            keywords: r.path("keywords")?,
            stopwords: r.path("stopwords")?,
            vocab_min_df: r.parse("vocab.min_df", 2)?,
            vocab_max_df_ratio: r.parse("vocab.max_df_ratio", 0.5)?,
            lda_grid,
            lda_alpha: r
                .raw("lda.alpha")
                .map(|_| r.parse("lda.alpha", 0.0))
                .transpose()?,
            lda_beta: r.parse("lda.beta", 0.01)?,
            lda_iterations,
            lda_burn_in,
            coherence_top_n: r.parse("coherence.top_n", 10)?,
            terms_max_len: r.parse("terms.max_len", 3)?,
            terms_min_freq: r.parse("terms.min_freq", 2)?,
            general_corpus: r.path("terms.general_corpus")?,
            synonyms: r.path("terms.synonyms")?,
            taxonomy: r.path("taxonomy")?,
            label_sheets,
            threshold_rule,
            edge_weighting,
            alpha,
            max_lag: r.parse("stats.max_lag", trendlens::stats::DEFAULT_MAX_LAG)?,
            smoothing,
            tlcc_window: r.parse("stats.tlcc_window", 0)?,
            tlcc_step: r.parse("stats.tlcc_step", 6)?,
            entries: hashed,
        })
    }

    /// SHA-256 over the settings as written, excluding the seed.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| usage(format!("config `{key}`: cannot parse `{s}`")))
        })
        .collect()
}
