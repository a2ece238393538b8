//! Character-trigram language identification and Unicode-script checks.
//!
//! The detector is self-contained: profiles are trigram frequency tables
//! built from seed text shipped with the crate (or from operator-supplied
//! corpora via `build_profile`). A script fast-path short-circuits text
//! whose letters overwhelmingly belong to a script that only one allowed
//! language uses.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::{BuildHasherDefault, Hasher};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_script::{Script, UnicodeScript};

use crate::model::{normalize_text, LanguageCode, NormalizedRecord, ReasonCode, Verdict};

pub const LANGUAGE_FILTER_NAME: &str = "language";
pub const SCRIPT_FILTER_NAME: &str = "script";

/// Probability assigned to trigrams absent from a profile.
pub const SMOOTHING_FLOOR: f64 = 1e-7;

/// Minimum seed size, counted in normalized characters.
pub const MIN_SEED_CHARS: usize = 10_000;

/// Letter share a single script needs before the fast path may fire.
const FAST_PATH_SHARE: f64 = 0.9;

#[derive(Debug, Error)]
pub enum LangError {
    #[error("seed corpus has {have} characters after normalization, need at least {MIN_SEED_CHARS}")]
    InsufficientSeed { have: usize },
    #[error("no language profiles loaded")]
    NoProfiles,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line_no}: malformed profile: {detail}")]
    MalformedProfile {
        path: PathBuf,
        line_no: u64,
        detail: String,
    },
}

/// A trigram packed into one integer: three scalar values of 21 bits
/// each. Equality of packed keys is equality of trigrams.
type PackedTrigram = u64;

fn pack_trigram(a: char, b: char, c: char) -> PackedTrigram {
    (a as u64) | (b as u64) << 21 | (c as u64) << 42
}

/// Deterministic single-round multiplicative hasher for packed trigrams.
/// SipHash's protection against adversarial keys buys nothing here and
/// dominates scoring time; this hash is a fixed function of the key, so
/// lookup behavior (and with it every output byte) stays reproducible
/// across runs.
#[derive(Default)]
struct TrigramHasher(u64);

impl Hasher for TrigramHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        // Fallback for key types the score tables never use.
        for &byte in bytes {
            self.0 = (self.0 ^ u64::from(byte)).wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, n: u64) {
        let mut hash = (self.0 ^ n).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        hash ^= hash >> 32;
        self.0 = hash;
    }
}

type TrigramBuild = BuildHasherDefault<TrigramHasher>;

fn ln_floor() -> f64 {
    static LN_FLOOR: OnceLock<f64> = OnceLock::new();
    *LN_FLOOR.get_or_init(|| SMOOTHING_FLOOR.ln())
}

/// Trigram frequency table for one language.
#[derive(Debug, Clone)]
pub struct LangProfile {
    pub lang: LanguageCode,
    counts: HashMap<Box<str>, u64>,
    total_trigrams: u64,
    /// ln(count / total) keyed by the packed trigram — what the scoring
    /// loop reads, precomputed so scoring is one cheap lookup per trigram
    /// occurrence.
    log_freqs: HashMap<PackedTrigram, f64, TrigramBuild>,
}

impl LangProfile {
    fn from_counts(lang: LanguageCode, counts: HashMap<Box<str>, u64>) -> Self {
        let total_trigrams: u64 = counts.values().sum();
        let log_freqs = counts
            .iter()
            .map(|(tri, &c)| {
                let mut chars = tri.chars();
                let key = pack_trigram(
                    chars.next().expect("trigrams have three characters"),
                    chars.next().expect("trigrams have three characters"),
                    chars.next().expect("trigrams have three characters"),
                );
                let p = (c as f64 / total_trigrams as f64).max(SMOOTHING_FLOOR);
                (key, p.ln())
            })
            .collect();
        LangProfile {
            lang,
            counts,
            total_trigrams,
            log_freqs,
        }
    }

    pub fn total_trigrams(&self) -> u64 {
        self.total_trigrams
    }

    /// Relative frequency of one trigram (0.0 when unseen).
    pub fn freq(&self, trigram: &str) -> f64 {
        self.counts
            .get(trigram)
            .map_or(0.0, |&c| c as f64 / self.total_trigrams as f64)
    }

    fn log_prob(&self, trigram: PackedTrigram) -> f64 {
        self.log_freqs
            .get(&trigram)
            .copied()
            .unwrap_or_else(ln_floor)
    }

    /// Trigrams sorted by descending count, then trigram — the order the
    /// profile file format uses.
    pub fn sorted_counts(&self) -> Vec<(&str, u64)> {
        let mut entries: Vec<(&str, u64)> = self
            .counts
            .iter()
            .map(|(tri, &c)| (tri.as_ref(), c))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries
    }
}

/// Appends the trigrams of one line (normalized, lowercased, padded with a
/// single boundary space on each end) to `counts`; returns the normalized
/// character count of the line.
fn count_line_trigrams(line: &str, counts: &mut HashMap<Box<str>, u64>) -> usize {
    let norm = normalize_text(line);
    if norm.is_empty() {
        return 0;
    }
    let chars_seen = norm.chars().count();
    let padded: Vec<char> = std::iter::once(' ')
        .chain(norm.to_lowercase().chars())
        .chain(std::iter::once(' '))
        .collect();
    let mut key = String::with_capacity(12);
    for window in padded.windows(3) {
        key.clear();
        key.extend(window);
        if let Some(n) = counts.get_mut(key.as_str()) {
            *n += 1;
        } else {
            counts.insert(key.clone().into_boxed_str(), 1);
        }
    }
    chars_seen
}

/// Builds a profile from seed text (one or more lines). Fails unless the
/// seed has at least [`MIN_SEED_CHARS`] characters after normalization.
pub fn build_profile(seed_text: &str, lang: LanguageCode) -> Result<LangProfile, LangError> {
    let mut counts = HashMap::new();
    let mut have = 0usize;
    for line in seed_text.lines() {
        have += count_line_trigrams(line, &mut counts);
    }
    if have < MIN_SEED_CHARS {
        return Err(LangError::InsufficientSeed { have });
    }
    Ok(LangProfile::from_counts(lang, counts))
}

/// Serializes a profile: header `lang<TAB>total`, then one
/// `trigram<TAB>count` line per trigram, highest count first.
pub fn render_profile(profile: &LangProfile) -> String {
    let mut out = String::new();
    writeln!(out, "{}\t{}", profile.lang, profile.total_trigrams).unwrap();
    for (tri, count) in profile.sorted_counts() {
        writeln!(out, "{tri}\t{count}").unwrap();
    }
    out
}

pub fn write_profile(profile: &LangProfile, path: &Path) -> Result<(), LangError> {
    std::fs::write(path, render_profile(profile)).map_err(|source| LangError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_profile(path: &Path) -> Result<LangProfile, LangError> {
    let text = std::fs::read_to_string(path).map_err(|source| LangError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |line_no: u64, detail: &str| LangError::MalformedProfile {
        path: path.to_path_buf(),
        line_no,
        detail: detail.to_string(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let (lang_field, total_field) = header
        .split_once('\t')
        .ok_or_else(|| malformed(1, "header is not `lang<TAB>total`"))?;
    let lang = LanguageCode::new(lang_field)
        .map_err(|e| malformed(1, &format!("bad language code: {e}")))?;
    let declared_total: u64 = total_field
        .parse()
        .map_err(|_| malformed(1, "total is not an integer"))?;
    let mut counts = HashMap::new();
    for (i, line) in lines.enumerate() {
        let line_no = i as u64 + 2;
        let (tri, count_field) = line
            .split_once('\t')
            .ok_or_else(|| malformed(line_no, "expected `trigram<TAB>count`"))?;
        if tri.chars().count() != 3 {
            return Err(malformed(line_no, "trigram is not three characters"));
        }
        let count: u64 = count_field
            .parse()
            .map_err(|_| malformed(line_no, "count is not an integer"))?;
        if counts.insert(tri.to_string().into_boxed_str(), count).is_some() {
            return Err(malformed(line_no, "duplicate trigram"));
        }
    }
    let total: u64 = counts.values().sum();
    if total != declared_total {
        return Err(malformed(
            1,
            &format!("declared total {declared_total} but counts sum to {total}"),
        ));
    }
    Ok(LangProfile::from_counts(lang, counts))
}

/// Loads every `*.profile` file in a directory, in file-name order.
pub fn load_profiles_dir(dir: &Path) -> Result<Vec<LangProfile>, LangError> {
    let entries = std::fs::read_dir(dir).map_err(|source| LangError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "profile"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(LangError::NoProfiles);
    }
    paths.iter().map(|p| read_profile(p)).collect()
}

/// Profiles built from the seed corpora shipped with the crate: the six
/// task languages plus Japanese, Arabic, and Turkish decoys so that text
/// in a known-noise language scores somewhere meaningful.
pub fn builtin_profiles() -> &'static [LangProfile] {
    static PROFILES: OnceLock<Vec<LangProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        let seeds: [(&str, &str); 9] = [
            ("en", include_str!("../data/seeds/en.txt")),
            ("id", include_str!("../data/seeds/id.txt")),
            ("jv", include_str!("../data/seeds/jv.txt")),
            ("ms", include_str!("../data/seeds/ms.txt")),
            ("ta", include_str!("../data/seeds/ta.txt")),
            ("tl", include_str!("../data/seeds/tl.txt")),
            ("ja", include_str!("../data/seeds/ja.txt")),
            ("ar", include_str!("../data/seeds/ar.txt")),
            ("tr", include_str!("../data/seeds/tr.txt")),
        ];
        seeds
            .into_iter()
            .map(|(code, text)| {
                let lang = LanguageCode::new(code).expect("seed language codes are valid");
                build_profile(text, lang).expect("bundled seed corpora exceed the size floor")
            })
            .collect()
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LangScriptConfig {
    /// Languages a record may legitimately be written in. Detecting one of
    /// these — even the wrong one for the side — never removes.
    pub allowed_langs: BTreeSet<LanguageCode>,
    /// Confidence the detector must reach before its verdict counts.
    pub confidence_threshold: f64,
    /// Sides shorter than this (normalized characters) are never judged.
    pub min_chars_for_langid: usize,
    /// Scripts each language is expected to be written in; anything else
    /// on a side is foreign to it.
    pub expected_scripts: BTreeMap<LanguageCode, BTreeSet<String>>,
}

impl Default for LangScriptConfig {
    fn default() -> Self {
        let latin = || BTreeSet::from(["Latin".to_string()]);
        let mut expected_scripts = BTreeMap::new();
        for code in ["en", "id", "jv", "ms", "tl"] {
            expected_scripts.insert(LanguageCode::new(code).unwrap(), latin());
        }
        expected_scripts.insert(
            LanguageCode::new("ta").unwrap(),
            BTreeSet::from(["Tamil".to_string(), "Latin".to_string()]),
        );
        LangScriptConfig {
            allowed_langs: LanguageCode::task_defaults().into_iter().collect(),
            confidence_threshold: 0.9,
            min_chars_for_langid: 20,
            expected_scripts,
        }
    }
}

impl LangScriptConfig {
    /// Configuration problems, as human-readable messages; empty = valid.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.allowed_langs.is_empty() {
            issues.push("allowed_langs must not be empty".to_string());
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            issues.push(format!(
                "confidence_threshold {} outside [0, 1]",
                self.confidence_threshold
            ));
        }
        for scripts in self.expected_scripts.values() {
            for name in scripts {
                if Script::from_full_name(name).is_none() {
                    issues.push(format!("unknown Unicode script name {name:?}"));
                }
            }
        }
        issues
    }
}

/// Outcome of language identification on one text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    /// Text too short to judge.
    Undetermined,
    Detected(LanguageCode, f64),
}

impl Detection {
    pub fn lang(&self) -> Option<LanguageCode> {
        match self {
            Detection::Undetermined => None,
            Detection::Detected(lang, _) => Some(*lang),
        }
    }
}

/// `ch.script()` with a fast path for the ASCII range, which the script
/// tables would otherwise binary-search for every Latin letter. ASCII
/// letters are Latin; all other ASCII characters are Common.
fn char_script(ch: char) -> Script {
    if ch.is_ascii() {
        if ch.is_ascii_alphabetic() {
            Script::Latin
        } else {
            Script::Common
        }
    } else {
        ch.script()
    }
}

/// Unicode scripts of the letter characters in `text`. Common, Inherited,
/// and Unknown are excluded; digits and punctuation carry no script here.
pub fn scripts_of(text: &str) -> BTreeSet<String> {
    let mut scripts = BTreeSet::new();
    for ch in text.chars().filter(|c| c.is_alphabetic()) {
        let script = char_script(ch);
        if matches!(script, Script::Common | Script::Inherited | Script::Unknown) {
            continue;
        }
        scripts.insert(script.full_name().to_string());
    }
    scripts
}

/// Identifies the language of `text`.
///
/// Texts shorter than `min_chars_for_langid` after normalization come back
/// [`Detection::Undetermined`]. When one script covers ≥ 90% of the
/// letters and exactly one allowed language expects that script, that
/// language is returned with confidence 1.0 without consulting profiles.
/// Otherwise every profile scores the text by mean trigram log-likelihood
/// (unseen trigrams floored at [`SMOOTHING_FLOOR`]) and the confidence is
/// the softmax weight of the winner.
pub fn detect_language(
    text: &str,
    profiles: &[LangProfile],
    cfg: &LangScriptConfig,
) -> Result<Detection, LangError> {
    detect_normalized(&normalize_text(text), profiles, cfg)
}

/// [`detect_language`] for text that is already in normalized form — the
/// filter pipeline stores record sides that way, and normalization is
/// idempotent, so skipping the second pass changes nothing but time.
fn detect_normalized(
    norm: &str,
    profiles: &[LangProfile],
    cfg: &LangScriptConfig,
) -> Result<Detection, LangError> {
    if profiles.is_empty() {
        return Err(LangError::NoProfiles);
    }

    // One walk gathers everything the cheap pre-checks need: the char
    // count and a per-script letter tally. A text rarely carries more than
    // two or three scripts; a flat vec beats hashing at that size.
    let mut char_count = 0usize;
    let mut letters = 0usize;
    let mut by_script: Vec<(Script, usize)> = Vec::new();
    for ch in norm.chars() {
        char_count += 1;
        if !ch.is_alphabetic() {
            continue;
        }
        let script = char_script(ch);
        if matches!(script, Script::Common | Script::Inherited | Script::Unknown) {
            continue;
        }
        letters += 1;
        match by_script.iter_mut().find(|(s, _)| *s == script) {
            Some(entry) => entry.1 += 1,
            None => by_script.push((script, 1)),
        }
    }
    if char_count < cfg.min_chars_for_langid {
        return Ok(Detection::Undetermined);
    }

    // Script fast path: when one script covers at least FAST_PATH_SHARE of
    // the letters and exactly one allowed language expects it, the
    // profiles never get a say.
    let dominant = by_script
        .iter()
        .find(|&&(_, n)| n as f64 >= FAST_PATH_SHARE * letters as f64)
        .map(|&(script, _)| script);
    if let Some(script) = dominant {
        let name = script.full_name();
        let mut candidates = cfg.allowed_langs.iter().filter(|lang| {
            cfg.expected_scripts
                .get(lang)
                .is_some_and(|scripts| scripts.iter().any(|s| s == name))
        });
        if let (Some(&only), None) = (candidates.next(), candidates.next()) {
            return Ok(Detection::Detected(only, 1.0));
        }
    }

    // The trigram sequence of the padded, lowercased text, built once and
    // scored against every profile.
    let lower = norm.to_lowercase();
    let mut trigrams: Vec<PackedTrigram> = Vec::with_capacity(lower.len() + 2);
    let mut two_back = '\0';
    let mut one_back = '\0';
    let mut seen = 0usize;
    for ch in std::iter::once(' ')
        .chain(lower.chars())
        .chain(std::iter::once(' '))
    {
        seen += 1;
        if seen >= 3 {
            trigrams.push(pack_trigram(two_back, one_back, ch));
        }
        two_back = one_back;
        one_back = ch;
    }
    if trigrams.is_empty() {
        return Ok(Detection::Undetermined);
    }

    // Score per profile, then order by language code so that summation
    // order — and with it the exact confidence value — does not depend on
    // the order profiles were supplied in.
    let mut scored: Vec<(LanguageCode, f64)> = profiles
        .iter()
        .map(|profile| {
            let sum: f64 = trigrams.iter().map(|&tri| profile.log_prob(tri)).sum();
            (profile.lang, sum / trigrams.len() as f64)
        })
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0));

    let (mut best_lang, mut best_score) = scored[0];
    for &(lang, score) in &scored[1..] {
        if score > best_score {
            best_lang = lang;
            best_score = score;
        }
    }
    let denom: f64 = scored.iter().map(|&(_, s)| (s - best_score).exp()).sum();
    Ok(Detection::Detected(best_lang, 1.0 / denom))
}

/// Removes records where either side confidently reads as a language
/// outside `allowed_langs`. Detecting an allowed language — even the
/// wrong one for that side — keeps the record, as does an undetermined
/// result. With no profiles the filter has no opinion and keeps.
pub fn language_filter(
    record: &NormalizedRecord,
    profiles: &[LangProfile],
    cfg: &LangScriptConfig,
) -> Verdict {
    for side in [&record.src_norm, &record.tgt_norm] {
        match detect_normalized(side, profiles, cfg) {
            Err(LangError::NoProfiles) => return Verdict::keep(),
            Err(_) => unreachable!("detect_language only fails on missing profiles"),
            Ok(Detection::Undetermined) => {}
            Ok(Detection::Detected(lang, confidence)) => {
                if confidence >= cfg.confidence_threshold && !cfg.allowed_langs.contains(&lang) {
                    return Verdict::remove(ReasonCode::LangForeign, LANGUAGE_FILTER_NAME);
                }
            }
        }
    }
    Verdict::keep()
}

/// Removes records whose foreign scripts are not mirrored on both sides.
///
/// "Foreign" is relative to the union of the expected scripts of the
/// pair's two languages: Tamil on the English side of an en–ta pair is
/// not foreign, because the pair legitimately carries Tamil. A script
/// outside that union must appear on both sides or the record goes.
pub fn script_filter(record: &NormalizedRecord, cfg: &LangScriptConfig) -> Verdict {
    let mut expected: BTreeSet<&str> = BTreeSet::new();
    for lang in [record.record.src_lang, record.record.tgt_lang] {
        if let Some(scripts) = cfg.expected_scripts.get(&lang) {
            expected.extend(scripts.iter().map(String::as_str));
        }
    }
    let foreign = |text: &str| -> BTreeSet<String> {
        scripts_of(text)
            .into_iter()
            .filter(|s| !expected.contains(s.as_str()))
            .collect()
    };
    if foreign(&record.src_norm) != foreign(&record.tgt_norm) {
        return Verdict::remove(ReasonCode::ScriptMismatch, SCRIPT_FILTER_NAME);
    }
    Verdict::keep()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BitextRecord;
    use tempfile::TempDir;

    fn lang(code: &str) -> LanguageCode {
        LanguageCode::new(code).unwrap()
    }

    fn norm_record(src_lang: &str, tgt_lang: &str, src: &str, tgt: &str) -> NormalizedRecord {
        let record =
            BitextRecord::new("t", 1, lang(src_lang), lang(tgt_lang), src, tgt).unwrap();
        NormalizedRecord::new(record)
    }

    #[test]
    fn short_seed_rejected() {
        let err = build_profile("too small", lang("en")).unwrap_err();
        assert!(matches!(err, LangError::InsufficientSeed { have: 9 }));
    }

    #[test]
    fn profile_frequencies_sum_to_one() {
        let profile = builtin_profiles()
            .iter()
            .find(|p| p.lang == lang("en"))
            .unwrap();
        let sum: f64 = profile
            .sorted_counts()
            .iter()
            .map(|(tri, _)| profile.freq(tri))
            .sum();
        assert!((sum - 1.0).abs() < 1e-9, "sum = {sum}");
    }

    #[test]
    fn english_profile_ranks_space_t_h_high() {
        let profile = builtin_profiles()
            .iter()
            .find(|p| p.lang == lang("en"))
            .unwrap();
        let top: Vec<&str> = profile
            .sorted_counts()
            .iter()
            .take(10)
            .map(|(tri, _)| *tri)
            .collect();
        assert!(top.contains(&" th"), "top 10 was {top:?}");
    }

    #[test]
    fn identical_seed_builds_identical_profile() {
        let seed = include_str!("../data/seeds/id.txt");
        let a = build_profile(seed, lang("id")).unwrap();
        let b = build_profile(seed, lang("id")).unwrap();
        assert_eq!(render_profile(&a), render_profile(&b));
    }

    #[test]
    fn profile_file_round_trip() {
        let dir = TempDir::new().unwrap();
        let original = builtin_profiles()
            .iter()
            .find(|p| p.lang == lang("jv"))
            .unwrap();
        let path = dir.path().join("jv.profile");
        write_profile(original, &path).unwrap();
        let reread = read_profile(&path).unwrap();
        assert_eq!(reread.lang, original.lang);
        assert_eq!(reread.total_trigrams(), original.total_trigrams());
        assert_eq!(render_profile(&reread), render_profile(original));
    }

    #[test]
    fn profile_with_wrong_total_rejected() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("x.profile");
        std::fs::write(&path, "en\t5\nabc\t2\nbcd\t2\n").unwrap();
        let err = read_profile(&path).unwrap_err();
        assert!(matches!(err, LangError::MalformedProfile { line_no: 1, .. }));
    }

    #[test]
    fn load_profiles_dir_requires_profiles() {
        let dir = TempDir::new().unwrap();
        assert!(matches!(
            load_profiles_dir(dir.path()),
            Err(LangError::NoProfiles)
        ));
    }

    #[test]
    fn scripts_of_plain_latin() {
        assert_eq!(scripts_of("hello"), BTreeSet::from(["Latin".to_string()]));
    }

    #[test]
    fn scripts_of_tamil() {
        assert_eq!(scripts_of("சென்னை"), BTreeSet::from(["Tamil".to_string()]));
    }

    #[test]
    fn scripts_of_mixed_text_ignores_digits_and_punctuation() {
        assert_eq!(
            scripts_of("Chennai (சென்னை) 2020"),
            BTreeSet::from(["Latin".to_string(), "Tamil".to_string()])
        );
    }

    #[test]
    fn detect_requires_profiles() {
        let cfg = LangScriptConfig::default();
        assert!(matches!(
            detect_language("whatever text this is", &[], &cfg),
            Err(LangError::NoProfiles)
        ));
    }

    #[test]
    fn short_text_undetermined() {
        let cfg = LangScriptConfig::default();
        let out = detect_language("ab", builtin_profiles(), &cfg).unwrap();
        assert_eq!(out, Detection::Undetermined);
    }

    #[test]
    fn tamil_script_fast_path() {
        let cfg = LangScriptConfig::default();
        let text = "அவள் நேற்று பள்ளிக்கு சென்றாள் என்று சொன்னாள்";
        let out = detect_language(text, builtin_profiles(), &cfg).unwrap();
        assert_eq!(out, Detection::Detected(lang("ta"), 1.0));
    }

    #[test]
    fn latin_text_never_takes_fast_path() {
        // Latin maps to several allowed languages, so even pure-Latin text
        // must go through trigram scoring and cannot come back with the
        // fast path's exact 1.0.
        let cfg = LangScriptConfig::default();
        let text = "The committee will publish the schedule for the next meeting tomorrow.";
        match detect_language(text, builtin_profiles(), &cfg).unwrap() {
            Detection::Detected(l, confidence) => {
                assert_eq!(l, lang("en"));
                assert!(confidence < 1.0);
                assert!(confidence > 0.5, "confidence = {confidence}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detection_invariant_under_profile_order() {
        let cfg = LangScriptConfig::default();
        let text = "Pemerintah akan mengumumkan kebijakan baru itu pada hari senin depan.";
        let mut reversed: Vec<LangProfile> = builtin_profiles().to_vec();
        reversed.reverse();
        let a = detect_language(text, builtin_profiles(), &cfg).unwrap();
        let b = detect_language(text, &reversed, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn japanese_side_removed_as_foreign() {
        let cfg = LangScriptConfig::default();
        let record = norm_record(
            "en",
            "id",
            "彼は昨日の会議で新しい計画について詳しく説明しました。",
            "Dia menjelaskan rencana baru itu secara terperinci dalam rapat kemarin.",
        );
        let verdict = language_filter(&record, builtin_profiles(), &cfg);
        assert_eq!(verdict.reason(), ReasonCode::LangForeign);
    }

    #[test]
    fn wrong_task_language_never_removes() {
        let cfg = LangScriptConfig::default();
        // An Indonesian-looking line on the Malay side (or vice versa)
        // stays: both codes are allowed.
        let record = norm_record(
            "en",
            "ms",
            "The school will open again next week after the holiday ends.",
            "Pemerintah akan mengumumkan kebijakan baru itu pada hari senin depan.",
        );
        let verdict = language_filter(&record, builtin_profiles(), &cfg);
        assert!(verdict.is_keep());
    }

    #[test]
    fn short_sides_never_removed_by_language() {
        let cfg = LangScriptConfig::default();
        let record = norm_record("en", "id", "ok", "ya");
        let verdict = language_filter(&record, builtin_profiles(), &cfg);
        assert!(verdict.is_keep());
    }

    #[test]
    fn one_sided_foreign_script_removed() {
        let cfg = LangScriptConfig::default();
        let record = norm_record(
            "en",
            "id",
            "The 日本 office opens at nine.",
            "Kantor itu buka jam sembilan.",
        );
        let verdict = script_filter(&record, &cfg);
        assert_eq!(verdict.reason(), ReasonCode::ScriptMismatch);
    }

    #[test]
    fn mirrored_foreign_script_kept() {
        let cfg = LangScriptConfig::default();
        let record = norm_record(
            "en",
            "id",
            "The 日本 office opens at nine.",
            "Kantor 日本 buka jam sembilan.",
        );
        assert!(script_filter(&record, &cfg).is_keep());
    }

    #[test]
    fn counterpart_script_not_foreign_on_either_side() {
        let cfg = LangScriptConfig::default();
        let record = norm_record(
            "en",
            "ta",
            "Chennai (சென்னை) is a large city.",
            "சென்னை ஒரு பெரிய நகரம்.",
        );
        assert!(script_filter(&record, &cfg).is_keep());
    }

    #[test]
    fn script_filter_symmetric_under_side_swap() {
        let cfg = LangScriptConfig::default();
        let pairs = [
            ("The 日本 office opens at nine.", "Kantor itu buka jam sembilan."),
            ("Plain text here.", "Teks biasa di sini."),
            ("Both碁sides", "match碁here"),
        ];
        for (a, b) in pairs {
            let fwd = script_filter(&norm_record("en", "id", a, b), &cfg);
            let rev = script_filter(&norm_record("id", "en", b, a), &cfg);
            assert_eq!(fwd.reason(), rev.reason(), "{a:?} / {b:?}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn latin_suffix_adds_at_most_latin(text in "\\PC{0,40}", suffix in "[a-zA-Z ]{0,20}") {
                let base = scripts_of(&text);
                let extended = scripts_of(&format!("{text}{suffix}"));
                let mut allowed = base.clone();
                allowed.insert("Latin".to_string());
                prop_assert!(extended.is_subset(&allowed));
                prop_assert!(base.is_subset(&extended));
            }

            #[test]
            fn detection_deterministic(text in "\\PC{0,80}") {
                let cfg = LangScriptConfig::default();
                let a = detect_language(&text, builtin_profiles(), &cfg).unwrap();
                let b = detect_language(&text, builtin_profiles(), &cfg).unwrap();
                prop_assert_eq!(a, b);
            }

            #[test]
            fn confidence_is_a_probability(text in "\\PC{20,120}") {
                let cfg = LangScriptConfig::default();
                if let Detection::Detected(_, confidence) =
                    detect_language(&text, builtin_profiles(), &cfg).unwrap()
                {
                    prop_assert!((0.0..=1.0).contains(&confidence));
                }
            }
        }
    }
}
