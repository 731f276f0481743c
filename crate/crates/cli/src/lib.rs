//! Batch pipeline behind the `trendlens` command.
//!
//! Every stage reads the outputs of earlier stages from the output
//! directory, writes its own files under `<output_dir>/<stage>/`, and
//! records input and output digests in `manifest.json`. A stage whose
//! inputs are unchanged and whose outputs are intact is skipped.

pub mod config;
pub mod manifest;
mod report;
mod stages;

pub use report::REPORT_FILE;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use config::PipelineConfig;
use manifest::{outputs_intact, sha256_bytes, sha256_file, Manifest, StageRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad arguments or configuration.
    Usage(String),
    /// Bad or missing input data, or an inconsistent output directory.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<trendlens::Error> for CliError {
    fn from(e: trendlens::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Model,
    Terms,
    Categorize,
    Trends,
    Stats,
    Report,
}

impl Stage {
    pub const PIPELINE: [Stage; 7] = [
        Stage::Ingest,
        Stage::Model,
        Stage::Terms,
        Stage::Categorize,
        Stage::Trends,
        Stage::Stats,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Model => "model",
            Stage::Terms => "terms",
            Stage::Categorize => "categorize",
            Stage::Trends => "trends",
            Stage::Stats => "stats",
            Stage::Report => "report",
        }
    }

    /// Stages whose outputs this one reads.
    pub fn upstream(self) -> &'static [Stage] {
        match self {
            Stage::Ingest => &[],
            Stage::Model => &[Stage::Ingest],
            Stage::Terms => &[Stage::Model],
            Stage::Categorize => &[Stage::Model, Stage::Terms],
            Stage::Trends => &[Stage::Model, Stage::Categorize],
            Stage::Stats => &[Stage::Categorize, Stage::Trends],
            Stage::Report => &[
                Stage::Ingest,
                Stage::Model,
                Stage::Terms,
                Stage::Categorize,
                Stage::Trends,
                Stage::Stats,
            ],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub force: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: Stage,
    /// Inputs were unchanged and outputs intact, so nothing was recomputed.
    pub skipped: bool,
}

/// Files produced by a stage, buffered until the stage succeeds.
#[derive(Default)]
pub(crate) struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
}

impl Outputs {
    pub(crate) fn put(&mut self, rel: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(rel.into(), bytes);
    }
}

/// Runs `stages` in order against the configuration at `config_path`.
pub fn run(
    stages: &[Stage],
    config_path: &Path,
    opts: RunOptions,
) -> Result<Vec<StageOutcome>, CliError> {
    let mut cfg = PipelineConfig::load(config_path)?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out.display())))?;

    let hash = cfg.hash();
    let mut manifest = match Manifest::load(&out)? {
        Some(m) if (m.config_hash != hash || m.seed != cfg.seed) && !opts.force => {
            return Err(CliError::Data(format!(
                "{} was produced with a different configuration or seed; \
                 pass --force to recompute with the current one",
                out.display()
            )));
        }
        Some(m) => m,
        None => Manifest::default(),
    };
    manifest.config_hash = hash;
    manifest.seed = cfg.seed;

    let mut outcomes = Vec::new();
    for &stage in stages {
        let skipped = run_stage(stage, &cfg, &mut manifest, opts.force)?;
        outcomes.push(StageOutcome { stage, skipped });
    }
    Ok(outcomes)
}

fn check_upstream(stage: Stage, out: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let missing: Vec<&str> = stage
        .upstream()
        .iter()
        .filter(|u| {
            manifest
                .stages
                .get(u.name())
                .is_none_or(|r| !outputs_intact(out, r))
        })
        .map(|u| u.name())
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    Err(CliError::Data(format!(
        "stage `{stage}` needs the outputs of {}; run {} first",
        missing
            .iter()
            .map(|m| format!("`{m}`"))
            .collect::<Vec<_>>()
            .join(", "),
        if missing.len() == 1 { "it" } else { "them" }
    )))
}

fn stage_inputs(
    stage: Stage,
    cfg: &PipelineConfig,
    manifest: &Manifest,
) -> Result<BTreeMap<String, String>, CliError> {
    let mut inputs = BTreeMap::new();
    inputs.insert("config".to_string(), manifest.config_hash.clone());
    inputs.insert("seed".to_string(), cfg.seed.to_string());
    for u in stage.upstream() {
        let record = &manifest.stages[u.name()];
        let listing = serde_json::to_vec(&record.outputs).expect("digest map serializes");
        inputs.insert(format!("stage:{u}"), sha256_bytes(&listing));
    }
    for (label, path) in stages::external_inputs(stage, cfg) {
        inputs.insert(format!("file:{label}"), sha256_file(&path)?);
    }
    if stage == Stage::Ingest {
        inputs.insert("as_of".to_string(), stages::as_of(cfg).to_string());
    }
    Ok(inputs)
}

fn run_stage(
    stage: Stage,
    cfg: &PipelineConfig,
    manifest: &mut Manifest,
    force: bool,
) -> Result<bool, CliError> {
    let out = cfg.output_dir.as_path();
    check_upstream(stage, out, manifest)?;
    let inputs = stage_inputs(stage, cfg, manifest)?;
    if let Some(prev) = manifest.stages.get(stage.name()).filter(|_| !force) {
        if prev.inputs == inputs && outputs_intact(out, prev) {
            return Ok(true);
        }
    }

    let mut outputs = Outputs::default();
    stages::execute(stage, cfg, &mut outputs)?;

    let stage_dir = out.join(stage.name());
    if stage_dir.exists() {
        std::fs::remove_dir_all(&stage_dir)
            .map_err(|e| CliError::Data(format!("cannot clear {}: {e}", stage_dir.display())))?;
    }
    let mut record = StageRecord {
        inputs,
        outputs: BTreeMap::new(),
    };
    for (rel, bytes) in outputs.files {
        debug_assert!(rel.starts_with(&format!("{stage}/")));
        let path = out.join(&rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
        }
        std::fs::write(&path, &bytes)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        record.outputs.insert(rel, sha256_bytes(&bytes));
    }
    manifest.stages.insert(stage.name().to_string(), record);
    manifest.save(out)?;
    Ok(false)
}
