//! Bitext hygiene for multilingual MT corpora.
//!
//! The crate turns noisy parallel text into training-ready data through a
//! fixed chain of cheap, explainable filters: length and markup checks,
//! glued localization keywords, trigram language identification with a
//! script cross-check, digit-run agreement, and four kinds of
//! deduplication. Every removal carries a reason code and the name of the
//! filter that claimed it, so a run can be audited line by line and its
//! shrinkage reported per dataset.
//!
//! Entry points:
//! - [`pipeline::run_pipeline`] drives a whole manifest of datasets.
//! - [`pipeline::judge_records`] scores one dataset in memory.
//! - [`langscript::detect_language`] is the standalone detector.
//! - [`preformat`] rewrites cleaned bitext for multilingual training.
//! - [`synthbench`] measures the chain against labeled synthetic noise.

pub mod content;
pub mod dedup;
pub mod ingest;
pub mod langscript;
pub mod model;
pub mod pipeline;
pub mod preformat;
pub mod synthbench;

pub use content::ContentConfig;
pub use dedup::DedupConfig;
pub use ingest::{read_bitext, write_bitext, FilePairSource, IngestError};
pub use langscript::{
    build_profile, detect_language, Detection, LangProfile, LangScriptConfig,
};
pub use model::{
    normalize_text, BitextRecord, LanguageCode, NormalizedRecord, ReasonCode, Verdict,
};
pub use pipeline::{
    judge_records, run_pipeline, DatasetEntry, DatasetManifest, FilterKind, FilterStats,
    PipelineError, RunOptions, RunSummary,
};
