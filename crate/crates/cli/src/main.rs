//! Command-line front end for the bitext hygiene toolkit.
//!
//! Exit status contract: 0 on success; 1 when the invocation is invalid
//! (bad flags, malformed manifest or profile, impossible parameters); 2
//! when a valid invocation fails at runtime (unreadable files, datasets
//! that cannot be processed). `--help` on any subcommand exits 0.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use bitext_core::ingest::{read_bitext, render_report, FilePairSource, IngestError};
use bitext_core::langscript::{build_profile, write_profile, LangError};
use bitext_core::model::LanguageCode;
use bitext_core::pipeline::{read_manifest, run_pipeline, validate_manifest, PipelineError, RunOptions};
use bitext_core::preformat::{emit_directions, write_preformat};
use bitext_core::synthbench::{
    evaluate_labels, generate, generate_clean, read_labels, removals_from_audit, write_labels,
    CorruptionClass, CorruptionSpec, Label, SynthError,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bitext",
    version,
    about = "Filter, audit, and repackage parallel text corpora",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the filter pipeline over a dataset manifest
    Filter(FilterArgs),
    /// Rewrite cleaned bitext as direction-tagged training files
    Preformat(PreformatArgs),
    /// Generate a labeled synthetic corpus for benchmarking the filters
    Synth(SynthArgs),
    /// Score a filter run's removals against synthetic ground truth
    Evaluate(EvaluateArgs),
    /// Build a language profile from a seed text
    BuildProfile(BuildProfileArgs),
    /// Check a manifest file and report every problem in it
    ValidateManifest(ValidateManifestArgs),
}

#[derive(Args)]
struct FilterArgs {
    /// Dataset manifest (JSON)
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Override the manifest's output directory
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Also write the report TSV here (it always prints to stdout)
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Write a TSV of every removed record and the reason it was removed
    #[arg(long, value_name = "FILE")]
    audit: Option<PathBuf>,
    /// Worker threads (default: all cores); changes speed, never output bytes
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Directory of *.profile files for language identification. Wins over
    /// $BITEXT_PROFILES_DIR, which wins over the manifest; with none of
    /// the three, the built-in profiles are used
    #[arg(long, value_name = "DIR")]
    profiles_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PreformatArgs {
    /// Source-side text file, one segment per line
    #[arg(long, value_name = "FILE")]
    src: PathBuf,
    /// Target-side text file, aligned line by line with --src
    #[arg(long, value_name = "FILE")]
    tgt: PathBuf,
    /// Language of the source file (two-letter code)
    #[arg(long, value_name = "LANG")]
    src_lang: String,
    /// Language of the target file (two-letter code)
    #[arg(long, value_name = "LANG")]
    tgt_lang: String,
    /// Directory for train.src, train.tgt, and special_tokens.txt
    #[arg(long, value_name = "DIR")]
    output_dir: PathBuf,
    /// Also emit the reverse direction of every pair
    #[arg(long)]
    bidirectional: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory for the corpus pair and its labels file
    #[arg(long, value_name = "DIR")]
    output_dir: PathBuf,
    /// Dataset id; names the output files
    #[arg(long, default_value = "synth", value_name = "ID")]
    dataset_id: String,
    /// Records in the clean corpus before corruption
    #[arg(long, default_value_t = 10_000, value_name = "N")]
    count: usize,
    /// Seed for both generation and corruption
    #[arg(long, default_value_t = 13, value_name = "N")]
    seed: u64,
    /// Fraction of records corrupted per class
    #[arg(long, default_value_t = 0.10, value_name = "RATE")]
    rate: f64,
    /// File of foreign-language lines used by the swap class; without it
    /// that class is skipped
    #[arg(long, value_name = "FILE")]
    foreign: Option<PathBuf>,
    /// Source language of the generated pair
    #[arg(long, default_value = "en", value_name = "LANG")]
    src_lang: String,
    /// Target language of the generated pair
    #[arg(long, default_value = "id", value_name = "LANG")]
    tgt_lang: String,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Ground-truth labels TSV written by `synth`
    #[arg(long, value_name = "FILE")]
    labels: PathBuf,
    /// Audit TSV written by `filter --audit`
    #[arg(long, value_name = "FILE")]
    audit: PathBuf,
    /// Dataset id to score (an audit file may hold several)
    #[arg(long, value_name = "ID")]
    dataset_id: String,
    /// Also write the score TSV here (it always prints to stdout)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildProfileArgs {
    /// Plain-text sample of the language, the bigger the better
    #[arg(long, value_name = "FILE")]
    seed_text: PathBuf,
    /// Language the sample is written in (two-letter code)
    #[arg(long, value_name = "LANG")]
    lang: String,
    /// Output file; name it <lang>.profile inside a profiles directory
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateManifestArgs {
    /// Manifest file to check
    #[arg(value_name = "FILE")]
    manifest: PathBuf,
}

/// A failed run and which exit status it earns.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn validation(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

/// Manifests and profiles are configuration — getting them wrong is a
/// validation failure. Everything else that breaks mid-run is runtime.
fn classify_pipeline(err: PipelineError) -> Failure {
    match &err {
        PipelineError::ManifestRead { .. } | PipelineError::InvalidManifest { .. } => {
            validation(err)
        }
        PipelineError::Lang(lang_err) => match lang_err {
            LangError::Io { .. } => runtime(err),
            _ => validation(err),
        },
        _ => runtime(err),
    }
}

fn classify_synth(err: SynthError) -> Failure {
    match &err {
        // Infeasible parameters: the rates, the count, or the foreign
        // corpus the flags named cannot produce the corpus asked for.
        SynthError::InvalidRates { .. }
        | SynthError::InsufficientCleanRecords { .. }
        | SynthError::MissingForeignCorpus { .. } => validation(err),
        SynthError::Io { .. } | SynthError::MalformedFile { .. } => runtime(err),
    }
}

fn classify_lang(err: LangError) -> Failure {
    match &err {
        LangError::Io { .. } => runtime(err),
        _ => validation(err),
    }
}

fn parse_lang(code: &str, flag: &str) -> Result<LanguageCode, Failure> {
    LanguageCode::new(code)
        .map_err(|e| validation(anyhow!("{flag}: {e}")))
}

fn create_dir(dir: &std::path::Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| runtime(anyhow!("creating {}: {e}", dir.display())))
}

fn read_text(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| runtime(anyhow!("{}: {e}", path.display())))
}

fn write_text(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| runtime(anyhow!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes; anything else is a
            // usage problem. clap routes the text to the right stream.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Filter(args) => cmd_filter(args),
        Command::Preformat(args) => cmd_preformat(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::BuildProfile(args) => cmd_build_profile(args),
        Command::ValidateManifest(args) => cmd_validate_manifest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn cmd_filter(args: FilterArgs) -> Result<(), Failure> {
    let mut manifest = read_manifest(&args.manifest).map_err(classify_pipeline)?;
    if let Some(dir) = args.output_dir {
        manifest.output_dir = dir;
    }
    let env_profiles = std::env::var_os("BITEXT_PROFILES_DIR")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    if let Some(dir) = args.profiles_dir.or(env_profiles) {
        manifest.profiles_dir = Some(dir);
    }
    let options = RunOptions {
        workers: args.workers,
        report_path: args.report,
        audit_path: args.audit,
    };
    let summary = run_pipeline(&manifest, &options).map_err(classify_pipeline)?;
    print!("{}", render_report(&summary.report_rows()));
    if summary.failures.is_empty() {
        return Ok(());
    }
    for (dataset_id, err) in &summary.failures {
        eprintln!("dataset {dataset_id} failed: {err}");
    }
    Err(runtime(anyhow!(
        "{} of {} datasets failed",
        summary.failures.len(),
        summary.failures.len() + summary.per_dataset.len()
    )))
}

fn cmd_preformat(args: PreformatArgs) -> Result<(), Failure> {
    let src_lang = parse_lang(&args.src_lang, "--src-lang")?;
    let tgt_lang = parse_lang(&args.tgt_lang, "--tgt-lang")?;
    if src_lang == tgt_lang {
        return Err(validation(anyhow!(
            "--src-lang and --tgt-lang are both {src_lang}; a pair needs two languages"
        )));
    }
    let source = FilePairSource {
        dataset_id: "preformat".to_string(),
        src_path: args.src,
        tgt_path: args.tgt,
        src_lang,
        tgt_lang,
    };
    let records = read_bitext(&source).map_err(|e: IngestError| runtime(e))?;
    let examples = emit_directions(&records, args.bidirectional);
    create_dir(&args.output_dir)?;
    let out_src = args.output_dir.join("train.src");
    let out_tgt = args.output_dir.join("train.tgt");
    let out_tokens = args.output_dir.join("special_tokens.txt");
    write_preformat(&examples, &out_src, &out_tgt, &out_tokens).map_err(runtime)?;
    println!(
        "wrote {} training examples from {} records to {}",
        examples.len(),
        records.len(),
        args.output_dir.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Failure> {
    let src_lang = parse_lang(&args.src_lang, "--src-lang")?;
    let tgt_lang = parse_lang(&args.tgt_lang, "--tgt-lang")?;
    if src_lang == tgt_lang {
        return Err(validation(anyhow!(
            "--src-lang and --tgt-lang are both {src_lang}; a pair needs two languages"
        )));
    }
    let mut spec = CorruptionSpec::uniform(args.seed, args.rate);
    let foreign_lines: Option<Vec<String>> = match &args.foreign {
        Some(path) => Some(read_text(path)?.lines().map(String::from).collect()),
        None => {
            spec.rates.insert(CorruptionClass::ForeignSwap, 0.0);
            None
        }
    };
    let clean = generate_clean(args.count, args.seed, &args.dataset_id, src_lang, tgt_lang);
    let corpus = generate(&clean, &spec, foreign_lines.as_deref()).map_err(classify_synth)?;

    create_dir(&args.output_dir)?;
    let out_src = args.output_dir.join(format!("{}.{src_lang}", args.dataset_id));
    let out_tgt = args.output_dir.join(format!("{}.{tgt_lang}", args.dataset_id));
    let out_labels = args.output_dir.join(format!("{}.labels.tsv", args.dataset_id));
    bitext_core::ingest::write_bitext(corpus.records.iter(), &out_src, &out_tgt)
        .map_err(runtime)?;
    write_labels(&corpus, &out_labels).map_err(classify_synth)?;

    // A ready-to-run manifest next to the corpus, so filtering it is one
    // command. Paths inside are relative to the manifest's directory.
    let manifest = serde_json::json!({
        "datasets": [{
            "dataset_id": args.dataset_id,
            "src_path": format!("{}.{src_lang}", args.dataset_id),
            "tgt_path": format!("{}.{tgt_lang}", args.dataset_id),
            "src_lang": src_lang,
            "tgt_lang": tgt_lang,
        }],
        "output_dir": "filtered",
    });
    let manifest_path = args.output_dir.join(format!("{}.manifest.json", args.dataset_id));
    let mut manifest_text = serde_json::to_string_pretty(&manifest).expect("static JSON shape");
    manifest_text.push('\n');
    write_text(&manifest_path, &manifest_text)?;
    let corrupted = corpus
        .labels
        .values()
        .filter(|label| matches!(label, Label::Corrupted(_)))
        .count();
    println!(
        "wrote {} records ({corrupted} corrupted) to {}",
        corpus.records.len(),
        args.output_dir.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let labels = read_labels(&args.labels).map_err(classify_synth)?;
    let removals = removals_from_audit(&args.audit, &args.dataset_id).map_err(classify_synth)?;
    let report = evaluate_labels(&labels, &removals);
    let rendered = report.render_tsv();
    print!("{rendered}");
    if let Some(path) = &args.out {
        write_text(path, &rendered)?;
    }
    Ok(())
}

fn cmd_build_profile(args: BuildProfileArgs) -> Result<(), Failure> {
    let lang = parse_lang(&args.lang, "--lang")?;
    let seed_text = read_text(&args.seed_text)?;
    let profile = build_profile(&seed_text, lang).map_err(classify_lang)?;
    write_profile(&profile, &args.out).map_err(classify_lang)?;
    println!(
        "wrote {lang} profile ({} distinct trigrams from {} total) to {}",
        profile.sorted_counts().len(),
        profile.total_trigrams(),
        args.out.display()
    );
    Ok(())
}

fn cmd_validate_manifest(args: ValidateManifestArgs) -> Result<(), Failure> {
    let manifest = read_manifest(&args.manifest).map_err(classify_pipeline)?;
    let issues = validate_manifest(&manifest);
    if issues.is_empty() {
        println!(
            "manifest OK: {} dataset(s), output_dir {}",
            manifest.datasets.len(),
            manifest.output_dir.display()
        );
        return Ok(());
    }
    for issue in &issues {
        eprintln!("{issue}");
    }
    Err(validation(anyhow!(
        "manifest {} has {} problem(s)",
        args.manifest.display(),
        issues.len()
    )))
}
