//! Synthetic noise harness: corrupt a clean corpus in labeled, seeded,
//! guaranteed-detectable ways, then score filter verdicts against the
//! labels. This is how the repo turns "the filters help" into numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::content::same_digit_runs;
use crate::langscript::scripts_of;
use crate::model::{normalize_text, BitextRecord, LanguageCode, ReasonCode};

/// The noise classes, in the order they claim records during generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CorruptionClass {
    /// Swap the targets of two adjacent records.
    Misalign,
    /// Re-insert a full copy of an earlier record.
    DupInject,
    /// Overwrite the target with the source text.
    CopySrc,
    /// Embed the source inside a longer fabricated target.
    PartialEmbed,
    /// Glue a localization keyword onto the end of the target.
    KeywordGlue,
    /// Change one digit of one digit run on one side.
    NumberPerturb,
    /// Replace one side with a line of foreign-script text.
    ForeignSwap,
    /// Pad one side past the length cap.
    Overlength,
}

pub const ALL_CLASSES: [CorruptionClass; 8] = [
    CorruptionClass::Misalign,
    CorruptionClass::DupInject,
    CorruptionClass::CopySrc,
    CorruptionClass::PartialEmbed,
    CorruptionClass::KeywordGlue,
    CorruptionClass::NumberPerturb,
    CorruptionClass::ForeignSwap,
    CorruptionClass::Overlength,
];

impl CorruptionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CorruptionClass::Misalign => "MISALIGN",
            CorruptionClass::DupInject => "DUP_INJECT",
            CorruptionClass::CopySrc => "COPY_SRC",
            CorruptionClass::PartialEmbed => "PARTIAL_EMBED",
            CorruptionClass::KeywordGlue => "KEYWORD_GLUE",
            CorruptionClass::NumberPerturb => "NUMBER_PERTURB",
            CorruptionClass::ForeignSwap => "FOREIGN_SWAP",
            CorruptionClass::Overlength => "OVERLENGTH",
        }
    }
}

impl fmt::Display for CorruptionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_CLASSES
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown corruption class {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Clean,
    Corrupted(CorruptionClass),
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Clean => "CLEAN",
            Label::Corrupted(class) => class.as_str(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "CLEAN" {
            return Ok(Label::Clean);
        }
        CorruptionClass::from_str(s).map(Label::Corrupted)
    }
}

/// How much of each class to inject, and with what seed.
#[derive(Debug, Clone)]
pub struct CorruptionSpec {
    pub seed: u64,
    pub rates: BTreeMap<CorruptionClass, f64>,
}

impl CorruptionSpec {
    /// Every class at the same rate.
    pub fn uniform(seed: u64, rate: f64) -> Self {
        CorruptionSpec {
            seed,
            rates: ALL_CLASSES.into_iter().map(|c| (c, rate)).collect(),
        }
    }

    pub fn rate(&self, class: CorruptionClass) -> f64 {
        self.rates.get(&class).copied().unwrap_or(0.0)
    }

    fn validate(&self) -> Result<(), SynthError> {
        let mut sum = 0.0;
        for (&class, &rate) in &self.rates {
            if !(0.0..=1.0).contains(&rate) {
                return Err(SynthError::InvalidRates {
                    detail: format!("rate {rate} for {class} outside [0, 1]"),
                });
            }
            sum += rate;
        }
        if sum > 1.0 + 1e-9 {
            return Err(SynthError::InvalidRates {
                detail: format!("rates sum to {sum}, more than the whole corpus"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("not enough eligible clean records for {class}: needed {needed}, found {found}")]
    InsufficientCleanRecords {
        class: CorruptionClass,
        needed: usize,
        found: usize,
    },
    #[error("foreign-language corpus missing or too small: {detail}")]
    MissingForeignCorpus { detail: String },
    #[error("invalid corruption rates: {detail}")]
    InvalidRates { detail: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line_no}: {detail}")]
    MalformedFile {
        path: PathBuf,
        line_no: u64,
        detail: String,
    },
}

/// A corpus whose every record carries a ground-truth label.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub records: Vec<BitextRecord>,
    pub labels: BTreeMap<u64, Label>,
}

impl LabeledCorpus {
    pub fn label(&self, line_no: u64) -> Label {
        self.labels[&line_no]
    }
}

const SRC_FRAMES: usize = 8;

fn src_frame(idx: usize, tok: &str, num: &str) -> String {
    match idx % SRC_FRAMES {
        0 => format!("Record {tok} notes entry {num} for the northern district archive."),
        1 => format!("The council filed report {tok} under case number {num} yesterday."),
        2 => format!("Survey team {tok} measured section {num} of the coastal road."),
        3 => format!("Delivery {tok} arrived at warehouse {num} before the morning shift."),
        4 => format!("Inspector {tok} approved permit {num} for the harbor extension."),
        5 => format!("The library catalogued volume {num} with shelf mark {tok} today."),
        6 => format!("Station {tok} logged reading {num} during the evening survey."),
        _ => format!("Committee members reviewed file {tok} and minute {num} this week."),
    }
}

fn tgt_frame(idx: usize, tok: &str, num: &str) -> String {
    match idx % SRC_FRAMES {
        0 => format!("Catatan {tok} menandai entri {num} untuk arsip distrik bagian utara"),
        1 => format!("Dewan mengajukan laporan {tok} dengan nomor perkara {num} kemarin sore"),
        2 => format!("Tim survei {tok} mengukur bagian {num} dari jalan pesisir itu"),
        3 => format!("Kiriman {tok} tiba di gudang {num} sebelum giliran kerja pagi"),
        4 => format!("Pengawas {tok} menyetujui izin {num} untuk perluasan pelabuhan baru"),
        5 => format!("Perpustakaan mencatat jilid {num} dengan tanda rak {tok} hari ini"),
        6 => format!("Stasiun {tok} mencatat pembacaan {num} selama survei petang tadi"),
        _ => format!("Anggota komite meninjau berkas {tok} dan notulen {num} minggu ini"),
    }
}

/// Six-letter code for an index: a bijection onto lowercase strings, so
/// every record carries a token no other record shares.
fn letter_token(mut i: usize) -> String {
    let mut out = [b'a'; 6];
    for slot in out.iter_mut().rev() {
        *slot = b'a' + (i % 26) as u8;
        i /= 26;
    }
    String::from_utf8(out.to_vec()).unwrap()
}

/// Generates a corpus that passes every filter: unique sides (a per-record
/// letter token), agreeing digit runs on both sides, pure Latin text,
/// nothing over-length, no markup symbols, no glued keywords, and targets
/// ending in a lowercase letter so keyword gluing stays applicable.
pub fn generate_clean(
    count: usize,
    seed: u64,
    dataset_id: &str,
    src_lang: LanguageCode,
    tgt_lang: LanguageCode,
) -> Vec<BitextRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let tok = letter_token(i);
            let num = format!("{:06}", i + 1);
            let src = src_frame(rng.gen_range(0..SRC_FRAMES), &tok, &num);
            let tgt = tgt_frame(rng.gen_range(0..SRC_FRAMES), &tok, &num);
            BitextRecord::new(dataset_id.to_string(), i as u64 + 1, src_lang, tgt_lang, src, tgt)
                .expect("generator languages differ")
        })
        .collect()
}

struct Assigner {
    labels: Vec<Label>,
    /// Records that must stay clean AND unmodified (duplicate sources).
    locked: Vec<bool>,
    order: Vec<usize>,
}

impl Assigner {
    fn free(&self, i: usize) -> bool {
        self.labels[i] == Label::Clean && !self.locked[i]
    }
}

/// Applies each corruption class to `floor(rate × n)` records, chosen by
/// a seeded shuffle, each guaranteed detectable by construction. Records
/// keep their ids and line numbers; only texts change. Requires records
/// sorted by ascending line_no (the natural file order).
pub fn generate(
    clean: &[BitextRecord],
    spec: &CorruptionSpec,
    foreign: Option<&[String]>,
) -> Result<LabeledCorpus, SynthError> {
    spec.validate()?;
    assert!(
        clean.windows(2).all(|w| w[0].line_no < w[1].line_no),
        "input records must be sorted by line_no"
    );
    let n = clean.len();
    let mut records = clean.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut state = Assigner {
        labels: vec![Label::Clean; n],
        locked: vec![false; n],
        order,
    };

    // Foreign lines usable for swapping: long enough to be judged, and
    // carrying at least one non-Latin-script letter so the mismatch is
    // visible on script grounds even when detector confidence dips.
    let mut seen_foreign = std::collections::HashSet::new();
    let foreign_lines: Vec<&String> = foreign
        .unwrap_or(&[])
        .iter()
        .filter(|line| {
            let norm = normalize_text(line);
            norm.chars().count() >= 20
                && scripts_of(&norm).iter().any(|s| s != "Latin")
                && seen_foreign.insert(norm)
        })
        .collect();
    let mut next_foreign = 0usize;

    for class in ALL_CLASSES {
        let mut needed = (spec.rate(class) * n as f64).floor() as usize;
        if class == CorruptionClass::Misalign {
            needed -= needed % 2;
        }
        if needed == 0 {
            continue;
        }
        if class == CorruptionClass::ForeignSwap {
            if foreign.is_none() {
                return Err(SynthError::MissingForeignCorpus {
                    detail: "a foreign corpus is required when the swap rate is nonzero".into(),
                });
            }
            if foreign_lines.len() < needed {
                return Err(SynthError::MissingForeignCorpus {
                    detail: format!(
                        "need {needed} usable lines (non-Latin, ≥20 chars), found {}",
                        foreign_lines.len()
                    ),
                });
            }
        }
        let mut found = 0usize;
        let mut cursor = 0usize;
        while found < needed && cursor < state.order.len() {
            let i = state.order[cursor];
            cursor += 1;
            if !state.free(i) {
                continue;
            }
            match class {
                CorruptionClass::Misalign => {
                    let j = i + 1;
                    if j >= n || !state.free(j) {
                        continue;
                    }
                    // Both halves must end up number-mismatched, or the
                    // swap would not be guaranteed visible.
                    if same_digit_runs(&records[i].src_text, &records[j].tgt_text)
                        || same_digit_runs(&records[j].src_text, &records[i].tgt_text)
                    {
                        continue;
                    }
                    let tmp = std::mem::take(&mut records[i].tgt_text);
                    records[i].tgt_text = std::mem::replace(&mut records[j].tgt_text, tmp);
                    state.labels[i] = Label::Corrupted(class);
                    state.labels[j] = Label::Corrupted(class);
                    found += 2;
                }
                CorruptionClass::DupInject => {
                    // Copy an earlier clean record onto this one; the
                    // source is then locked so it stays the intact first
                    // occurrence.
                    let Some(source) = (0..i).find(|&k| state.free(k)) else {
                        continue;
                    };
                    records[i].src_text = records[source].src_text.clone();
                    records[i].tgt_text = records[source].tgt_text.clone();
                    state.locked[source] = true;
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::CopySrc => {
                    if normalize_text(&records[i].src_text).is_empty() {
                        continue;
                    }
                    records[i].tgt_text = records[i].src_text.clone();
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::PartialEmbed => {
                    let src_norm = normalize_text(&records[i].src_text);
                    if src_norm.chars().count() < 10 {
                        continue;
                    }
                    records[i].tgt_text =
                        format!("Salinan arsip berikut memuat {}", records[i].src_text);
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::KeywordGlue => {
                    let trimmed = records[i].tgt_text.trim_end();
                    let Some(last) = normalize_text(trimmed).chars().next_back() else {
                        continue;
                    };
                    if !(last.is_lowercase() || last.is_ascii_digit()) {
                        continue;
                    }
                    records[i].tgt_text = format!("{trimmed}Comment");
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::NumberPerturb => {
                    let side_is_src = rng.gen_bool(0.5);
                    let perturbed = {
                        let text = if side_is_src {
                            &records[i].src_text
                        } else {
                            &records[i].tgt_text
                        };
                        perturb_last_digit(text)
                    };
                    let Some(new_text) = perturbed else {
                        // No digit run on the chosen side; try the other.
                        let other = if side_is_src {
                            perturb_last_digit(&records[i].tgt_text)
                        } else {
                            perturb_last_digit(&records[i].src_text)
                        };
                        let Some(new_text) = other else {
                            continue;
                        };
                        if side_is_src {
                            records[i].tgt_text = new_text;
                        } else {
                            records[i].src_text = new_text;
                        }
                        state.labels[i] = Label::Corrupted(class);
                        found += 1;
                        continue;
                    };
                    if side_is_src {
                        records[i].src_text = new_text;
                    } else {
                        records[i].tgt_text = new_text;
                    }
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::ForeignSwap => {
                    let line = foreign_lines[next_foreign];
                    next_foreign += 1;
                    if rng.gen_bool(0.5) {
                        records[i].src_text = line.clone();
                    } else {
                        records[i].tgt_text = line.clone();
                    }
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
                CorruptionClass::Overlength => {
                    let side_is_src = rng.gen_bool(0.5);
                    let text = if side_is_src {
                        &mut records[i].src_text
                    } else {
                        &mut records[i].tgt_text
                    };
                    let have = normalize_text(text).chars().count();
                    let pad = 501usize.saturating_sub(have);
                    text.push(' ');
                    text.extend(std::iter::repeat('x').take(pad.max(1)));
                    state.labels[i] = Label::Corrupted(class);
                    found += 1;
                }
            }
        }
        if found < needed {
            return Err(SynthError::InsufficientCleanRecords {
                class,
                needed,
                found,
            });
        }
    }

    let labels = records
        .iter()
        .zip(&state.labels)
        .map(|(record, &label)| (record.line_no, label))
        .collect();
    Ok(LabeledCorpus { records, labels })
}

/// Increments the final digit of the last digit run (mod 10), yielding a
/// different run and therefore a different digit-run multiset. None when
/// the text has no digits.
fn perturb_last_digit(text: &str) -> Option<String> {
    let last_digit_idx = text
        .char_indices()
        .filter(|(_, c)| c.is_ascii_digit())
        .map(|(i, _)| i)
        .next_back()?;
    let mut bytes = text.as_bytes().to_vec();
    bytes[last_digit_idx] = b'0' + (bytes[last_digit_idx] - b'0' + 1) % 10;
    Some(String::from_utf8(bytes).expect("digit replacement preserves UTF-8"))
}

/// Which corruption classes a removal reason legitimately fires on. Used
/// for precision: removing a MISALIGN record for NUMBER_MISMATCH is
/// correct; removing a KEYWORD_GLUE record for it would not be.
pub fn matching_classes(reason: ReasonCode) -> &'static [CorruptionClass] {
    match reason {
        ReasonCode::TooLong => &[CorruptionClass::Overlength],
        ReasonCode::Keyword => &[CorruptionClass::KeywordGlue],
        ReasonCode::NumberMismatch => {
            &[CorruptionClass::NumberPerturb, CorruptionClass::Misalign]
        }
        ReasonCode::LangForeign | ReasonCode::ScriptMismatch => &[CorruptionClass::ForeignSwap],
        ReasonCode::DupPair | ReasonCode::DupSide => &[CorruptionClass::DupInject],
        ReasonCode::DupIdentical => &[CorruptionClass::CopySrc],
        ReasonCode::DupPartial => &[CorruptionClass::PartialEmbed],
        ReasonCode::None | ReasonCode::Empty | ReasonCode::Symbol => &[],
    }
}

#[derive(Debug, Clone)]
pub struct ClassRow {
    pub class: CorruptionClass,
    pub labeled: u64,
    pub removed: u64,
    pub recall: f64,
}

#[derive(Debug, Clone)]
pub struct ReasonRow {
    pub reason: ReasonCode,
    pub removed: u64,
    pub matching: u64,
    pub precision: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub per_class: Vec<ClassRow>,
    pub per_reason: Vec<ReasonRow>,
    pub clean_total: u64,
    pub clean_removed: u64,
    /// (label, removal reason) occurrence counts for removed records.
    pub confusion: BTreeMap<(Label, ReasonCode), u64>,
}

impl EvalReport {
    pub fn recall(&self, class: CorruptionClass) -> f64 {
        self.per_class
            .iter()
            .find(|row| row.class == class)
            .map_or(1.0, |row| row.recall)
    }

    pub fn clean_false_removal_rate(&self) -> f64 {
        if self.clean_total == 0 {
            0.0
        } else {
            self.clean_removed as f64 / self.clean_total as f64
        }
    }

    /// Two-block TSV: per-class recall, then per-reason precision, then
    /// the clean false-removal line.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from("class\tlabeled\tremoved\trecall\n");
        for row in &self.per_class {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.4}\n",
                row.class, row.labeled, row.removed, row.recall
            ));
        }
        out.push_str("\nreason\tremoved\tmatching\tprecision\n");
        for row in &self.per_reason {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.4}\n",
                row.reason, row.removed, row.matching, row.precision
            ));
        }
        out.push_str(&format!(
            "\nCLEAN\t{}\t{}\t{:.4}\n",
            self.clean_total,
            self.clean_removed,
            self.clean_false_removal_rate()
        ));
        out
    }
}

/// Scores removal verdicts against ground truth. `removals` maps line_no
/// to the removal reason; lines absent from it were kept.
pub fn evaluate(corpus: &LabeledCorpus, removals: &BTreeMap<u64, ReasonCode>) -> EvalReport {
    evaluate_labels(&corpus.labels, removals)
}

/// [`evaluate`] from a bare label map — all the scoring needs, and what a
/// labels file read back with [`read_labels`] provides.
pub fn evaluate_labels(
    labels: &BTreeMap<u64, Label>,
    removals: &BTreeMap<u64, ReasonCode>,
) -> EvalReport {
    let mut labeled: BTreeMap<CorruptionClass, u64> = BTreeMap::new();
    let mut removed_per_class: BTreeMap<CorruptionClass, u64> = BTreeMap::new();
    let mut clean_total = 0u64;
    let mut clean_removed = 0u64;
    let mut confusion: BTreeMap<(Label, ReasonCode), u64> = BTreeMap::new();

    for (&line_no, &label) in labels {
        let removal = removals.get(&line_no);
        if let Some(&reason) = removal {
            *confusion.entry((label, reason)).or_insert(0) += 1;
        }
        match label {
            Label::Clean => {
                clean_total += 1;
                if removal.is_some() {
                    clean_removed += 1;
                }
            }
            Label::Corrupted(class) => {
                *labeled.entry(class).or_insert(0) += 1;
                if removal.is_some() {
                    *removed_per_class.entry(class).or_insert(0) += 1;
                }
            }
        }
    }

    let per_class = ALL_CLASSES
        .into_iter()
        .map(|class| {
            let labeled = labeled.get(&class).copied().unwrap_or(0);
            let removed = removed_per_class.get(&class).copied().unwrap_or(0);
            let recall = if labeled == 0 {
                1.0
            } else {
                removed as f64 / labeled as f64
            };
            ClassRow {
                class,
                labeled,
                removed,
                recall,
            }
        })
        .collect();

    let per_reason = ReasonCode::REMOVAL_REASONS
        .into_iter()
        .map(|reason| {
            let removed: u64 = confusion
                .iter()
                .filter(|((_, r), _)| *r == reason)
                .map(|(_, &count)| count)
                .sum();
            let matching: u64 = confusion
                .iter()
                .filter(|((label, r), _)| {
                    *r == reason
                        && matches!(label, Label::Corrupted(c) if matching_classes(reason).contains(c))
                })
                .map(|(_, &count)| count)
                .sum();
            let precision = if removed == 0 {
                1.0
            } else {
                matching as f64 / removed as f64
            };
            ReasonRow {
                reason,
                removed,
                matching,
                precision,
            }
        })
        .collect();

    EvalReport {
        per_class,
        per_reason,
        clean_total,
        clean_removed,
        confusion,
    }
}

/// Writes the ground-truth labels: one `line_no<TAB>label` row per record.
pub fn write_labels(corpus: &LabeledCorpus, path: &Path) -> Result<(), SynthError> {
    let mut out = String::new();
    for (line_no, label) in &corpus.labels {
        out.push_str(&format!("{line_no}\t{label}\n"));
    }
    std::fs::write(path, out).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_labels(path: &Path) -> Result<BTreeMap<u64, Label>, SynthError> {
    let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut labels = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let malformed = |detail: String| SynthError::MalformedFile {
            path: path.to_path_buf(),
            line_no: i as u64 + 1,
            detail,
        };
        let (line_no, label) = line
            .split_once('\t')
            .ok_or_else(|| malformed("expected `line_no<TAB>label`".into()))?;
        let line_no: u64 = line_no
            .parse()
            .map_err(|_| malformed(format!("bad line number {line_no:?}")))?;
        let label: Label = label.parse().map_err(malformed)?;
        labels.insert(line_no, label);
    }
    Ok(labels)
}

/// Rebuilds the removal map for one dataset from an audit file written by
/// the filter run: line_no → reason.
pub fn removals_from_audit(
    path: &Path,
    dataset_id: &str,
) -> Result<BTreeMap<u64, ReasonCode>, SynthError> {
    let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut removals = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let malformed = |detail: String| SynthError::MalformedFile {
            path: path.to_path_buf(),
            line_no: i as u64 + 1,
            detail,
        };
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        let line_no = fields
            .next()
            .ok_or_else(|| malformed("missing line_no column".into()))?;
        let reason = fields
            .next()
            .ok_or_else(|| malformed("missing reason column".into()))?;
        if id != dataset_id {
            continue;
        }
        let line_no: u64 = line_no
            .parse()
            .map_err(|_| malformed(format!("bad line number {line_no:?}")))?;
        let reason: ReasonCode = reason
            .parse()
            .map_err(|_| malformed(format!("unknown reason {reason:?}")))?;
        removals.insert(line_no, reason);
    }
    Ok(removals)
}
