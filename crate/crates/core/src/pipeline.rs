//! Manifest-driven orchestration: run the configured filters over each
//! dataset, attribute every removal to exactly one filter, and aggregate
//! per-dataset and total statistics.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::{
    keyword_filter, length_filter, number_filter, symbol_filter, ContentConfig,
};
use crate::dedup::{self, DedupConfig, DedupIndex};
use crate::ingest::{read_bitext, write_audit, write_bitext, write_report, FilePairSource, IngestError};
use crate::langscript::{
    builtin_profiles, language_filter, load_profiles_dir, script_filter, LangError, LangProfile,
    LangScriptConfig,
};
use crate::model::{BitextRecord, NormalizedRecord, ReasonCode, Verdict};

pub const EMPTY_FILTER_NAME: &str = "empty";

/// The individually enableable filter stages. Whatever order a manifest
/// lists them in, they always run in [`CANONICAL_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Length,
    Symbol,
    Keyword,
    Language,
    Script,
    Number,
    Dedup,
}

/// Execution order of the stages. Cheap local checks run first; dedup is
/// last because it needs dataset-global state. Removal attribution goes
/// to the first failing stage, so this order is part of the contract.
pub const CANONICAL_ORDER: [FilterKind; 7] = [
    FilterKind::Length,
    FilterKind::Symbol,
    FilterKind::Keyword,
    FilterKind::Language,
    FilterKind::Script,
    FilterKind::Number,
    FilterKind::Dedup,
];

fn all_filters() -> Vec<FilterKind> {
    CANONICAL_ORDER.to_vec()
}

/// One dataset's input files and filter configuration.
///
/// Unknown keys are tolerated here (a side effect of flattening the file
/// pair fields); `validate_manifest` covers the semantic checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetEntry {
    #[serde(flatten)]
    pub source: FilePairSource,
    /// Which stages run for this dataset; order is normalized to
    /// [`CANONICAL_ORDER`] at execution time. Defaults to all of them.
    #[serde(default = "all_filters")]
    pub enabled_filters: Vec<FilterKind>,
    #[serde(default)]
    pub dedup: DedupConfig,
    #[serde(default)]
    pub langscript: LangScriptConfig,
    #[serde(default)]
    pub content: ContentConfig,
}

impl DatasetEntry {
    pub fn enabled(&self, kind: FilterKind) -> bool {
        self.enabled_filters.contains(&kind)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub datasets: Vec<DatasetEntry>,
    pub output_dir: PathBuf,
    /// Directory of `*.profile` files for the language filter. When
    /// absent, the profiles bundled with the crate are used.
    #[serde(default)]
    pub profiles_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {detail}")]
    ManifestRead { path: PathBuf, detail: String },
    #[error("invalid manifest: {}", .issues.join("; "))]
    InvalidManifest { issues: Vec<String> },
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

/// Reads and parses a manifest. Relative paths inside the file (inputs,
/// output_dir, profiles_dir) are resolved against the manifest's own
/// directory, so a manifest works no matter where it is invoked from.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| PipelineError::ManifestRead {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let rebase = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(p.as_path());
        }
    };
    for entry in &mut manifest.datasets {
        rebase(&mut entry.source.src_path);
        rebase(&mut entry.source.tgt_path);
    }
    rebase(&mut manifest.output_dir);
    if let Some(dir) = &mut manifest.profiles_dir {
        rebase(dir);
    }
    Ok(manifest)
}

/// Manifest problems, one message per issue; empty = valid.
pub fn validate_manifest(manifest: &DatasetManifest) -> Vec<String> {
    let mut issues = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    for (i, entry) in manifest.datasets.iter().enumerate() {
        let at = |field: &str, msg: String| format!("datasets[{i}].{field}: {msg}");
        let id = &entry.source.dataset_id;
        if id.is_empty() {
            issues.push(at("dataset_id", "must not be empty".to_string()));
        }
        if id.contains('/') || id.contains('\\') {
            issues.push(at("dataset_id", format!("{id:?} must not contain path separators")));
        }
        if !seen_ids.insert(id.clone()) {
            issues.push(at("dataset_id", format!("{id:?} appears more than once")));
        }
        if entry.source.src_lang == entry.source.tgt_lang {
            issues.push(at("src_lang", "source and target language are the same".to_string()));
        }
        let mut seen_filters = std::collections::BTreeSet::new();
        for kind in &entry.enabled_filters {
            if !seen_filters.insert(*kind) {
                issues.push(at("enabled_filters", format!("{kind:?} listed twice")));
            }
        }
        if entry.dedup.partial_min_chars == 0 {
            issues.push(at("dedup.partial_min_chars", "must be at least 1".to_string()));
        }
        for msg in entry.langscript.validate() {
            issues.push(at("langscript", msg));
        }
        for msg in entry.content.validate() {
            issues.push(at("content", msg));
        }
    }
    issues
}

/// Removal tallies for one dataset (or the TOTAL over all of them).
#[derive(Debug, Clone)]
pub struct FilterStats {
    pub dataset_id: String,
    pub lang_pair: String,
    pub before: u64,
    pub after: u64,
    removed_by_reason: BTreeMap<ReasonCode, u64>,
}

impl FilterStats {
    pub fn new(dataset_id: impl Into<String>, lang_pair: impl Into<String>, before: u64) -> Self {
        FilterStats {
            dataset_id: dataset_id.into(),
            lang_pair: lang_pair.into(),
            before,
            after: before,
            removed_by_reason: BTreeMap::new(),
        }
    }

    pub fn record_removal(&mut self, reason: ReasonCode) {
        *self.removed_by_reason.entry(reason).or_insert(0) += 1;
    }

    pub fn set_after(&mut self, after: u64) {
        self.after = after;
    }

    pub fn removed(&self, reason: ReasonCode) -> u64 {
        self.removed_by_reason.get(&reason).copied().unwrap_or(0)
    }

    pub fn total_removed(&self) -> u64 {
        self.removed_by_reason.values().sum()
    }

    /// Every record is either kept or counted under exactly one reason.
    pub fn assert_conserved(&self) {
        assert_eq!(
            self.before,
            self.after + self.total_removed(),
            "conservation violated for {}: before {} != after {} + removed {}",
            self.dataset_id,
            self.before,
            self.after,
            self.total_removed(),
        );
    }
}

/// Component-wise sum of per-dataset stats into the TOTAL row.
pub fn merge_stats(stats: &[FilterStats]) -> FilterStats {
    let mut total = FilterStats::new("TOTAL", "ALL", 0);
    let mut after = 0;
    for s in stats {
        total.before += s.before;
        after += s.after;
        for (&reason, &count) in &s.removed_by_reason {
            *total.removed_by_reason.entry(reason).or_insert(0) += count;
        }
    }
    total.set_after(after);
    total
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for the per-record stages. `None` uses the default
    /// pool size. Never changes output bytes, only throughput.
    pub workers: Option<usize>,
    /// Where to write the report TSV (per-dataset rows plus TOTAL).
    pub report_path: Option<PathBuf>,
    /// Where to write the audit TSV of every removal.
    pub audit_path: Option<PathBuf>,
}

/// What one pipeline run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub per_dataset: Vec<FilterStats>,
    pub total: FilterStats,
    /// Datasets that failed (bad files, mismatched line counts) while the
    /// others went through. Non-empty failures mean a nonzero exit.
    pub failures: Vec<(String, PipelineError)>,
}

impl RunSummary {
    /// Report rows: one per dataset, then the TOTAL row.
    pub fn report_rows(&self) -> Vec<FilterStats> {
        let mut rows = self.per_dataset.clone();
        rows.push(self.total.clone());
        rows
    }
}

fn stateless_verdict(
    record: &NormalizedRecord,
    entry: &DatasetEntry,
    profiles: &[LangProfile],
) -> Verdict {
    if record.src_norm.is_empty() || record.tgt_norm.is_empty() {
        return Verdict::remove(ReasonCode::Empty, EMPTY_FILTER_NAME);
    }
    for kind in CANONICAL_ORDER {
        if kind == FilterKind::Dedup || !entry.enabled(kind) {
            continue;
        }
        let verdict = match kind {
            FilterKind::Length => length_filter(record, &entry.content),
            FilterKind::Symbol => symbol_filter(record, &entry.content),
            FilterKind::Keyword => keyword_filter(record, &entry.content),
            FilterKind::Language => language_filter(record, profiles, &entry.langscript),
            FilterKind::Script => script_filter(record, &entry.langscript),
            FilterKind::Number => number_filter(record, &entry.content),
            FilterKind::Dedup => unreachable!("dedup is not a stateless stage"),
        };
        if verdict.is_remove() {
            return verdict;
        }
    }
    Verdict::keep()
}

/// Filters one dataset's records: the stateless chain first, then the
/// dedup pass over its survivors. Returns the final verdicts, input order.
pub fn judge_records(
    normalized: &[NormalizedRecord],
    entry: &DatasetEntry,
    profiles: &[LangProfile],
) -> Vec<Verdict> {
    let mut verdicts: Vec<Verdict> = normalized
        .par_iter()
        .map(|record| stateless_verdict(record, entry, profiles))
        .collect();
    if entry.enabled(FilterKind::Dedup) {
        let survivors: Vec<usize> = verdicts
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_keep())
            .map(|(i, _)| i)
            .collect();
        let index = DedupIndex::build(survivors.iter().map(|&i| &normalized[i]));
        for &i in &survivors {
            let verdict = dedup::check(&normalized[i], &index, &entry.dedup);
            if verdict.is_remove() {
                verdicts[i] = verdict;
            }
        }
    }
    verdicts
}

fn process_dataset(
    entry: &DatasetEntry,
    profiles: &[LangProfile],
    output_dir: &Path,
    audit: &mut Vec<(BitextRecord, Verdict)>,
) -> Result<FilterStats, PipelineError> {
    let records = read_bitext(&entry.source)?;
    let lang_pair = format!("{}-{}", entry.source.src_lang, entry.source.tgt_lang);
    let mut stats = FilterStats::new(&entry.source.dataset_id, lang_pair, records.len() as u64);

    let normalized: Vec<NormalizedRecord> =
        records.into_par_iter().map(NormalizedRecord::new).collect();
    let verdicts = judge_records(&normalized, entry, profiles);

    let mut kept = Vec::new();
    for (record, verdict) in normalized.iter().zip(&verdicts) {
        if verdict.is_keep() {
            kept.push(&record.record);
        } else {
            stats.record_removal(verdict.reason());
            audit.push((record.record.clone(), verdict.clone()));
        }
    }
    let out_src = output_dir.join(format!(
        "{}.{}",
        entry.source.dataset_id, entry.source.src_lang
    ));
    let out_tgt = output_dir.join(format!(
        "{}.{}",
        entry.source.dataset_id, entry.source.tgt_lang
    ));
    let (written, _) = write_bitext(kept.iter().copied(), &out_src, &out_tgt)?;
    stats.set_after(written);
    stats.assert_conserved();
    Ok(stats)
}

/// Runs the whole manifest. Datasets run in manifest order; a dataset
/// that fails is reported in `failures` without aborting the rest. The
/// report and audit files are written when paths are configured.
pub fn run_pipeline(
    manifest: &DatasetManifest,
    options: &RunOptions,
) -> Result<RunSummary, PipelineError> {
    let issues = validate_manifest(manifest);
    if !issues.is_empty() {
        return Err(PipelineError::InvalidManifest { issues });
    }
    std::fs::create_dir_all(&manifest.output_dir).map_err(|e| PipelineError::Io {
        path: manifest.output_dir.clone(),
        source: e,
    })?;

    let needs_language = manifest
        .datasets
        .iter()
        .any(|entry| entry.enabled(FilterKind::Language));
    let profiles: Vec<LangProfile> = if needs_language {
        match &manifest.profiles_dir {
            Some(dir) => load_profiles_dir(dir)?,
            None => builtin_profiles().to_vec(),
        }
    } else {
        Vec::new()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::WorkerPool(e.to_string()))?;

    let mut per_dataset = Vec::new();
    let mut failures = Vec::new();
    let mut audit = Vec::new();
    pool.install(|| {
        for entry in &manifest.datasets {
            match process_dataset(entry, &profiles, &manifest.output_dir, &mut audit) {
                Ok(stats) => per_dataset.push(stats),
                Err(err) => failures.push((entry.source.dataset_id.clone(), err)),
            }
        }
    });

    let total = merge_stats(&per_dataset);
    total.assert_conserved();
    let summary = RunSummary {
        per_dataset,
        total,
        failures,
    };
    if let Some(path) = &options.report_path {
        write_report(&summary.report_rows(), path)?;
    }
    if let Some(path) = &options.audit_path {
        write_audit(&audit, path)?;
    }
    Ok(summary)
}
