//! Per-record content checks: glued localization keywords, markup
//! symbols, numeric agreement between the two sides, and a length cap.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{NormalizedRecord, ReasonCode, Verdict};

pub const LENGTH_FILTER_NAME: &str = "length";
pub const SYMBOL_FILTER_NAME: &str = "symbol";
pub const KEYWORD_FILTER_NAME: &str = "keyword";
pub const NUMBER_FILTER_NAME: &str = "number";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContentConfig {
    /// Localization keywords that betray a desktop-file export when glued
    /// onto the end of a line ("…tugasName").
    pub keywords: Vec<String>,
    /// Substrings whose mere presence removes a record.
    pub symbols: Vec<String>,
    /// Also remove lines that are nothing but one parenthesized or
    /// bracketed span — stage directions like "(loud music playing)".
    pub drop_parenthesized_lines: bool,
    /// Require the two sides to carry the same digit runs.
    pub check_numbers: bool,
    /// Maximum characters per side, inclusive.
    pub max_chars: usize,
}

impl Default for ContentConfig {
    fn default() -> Self {
        ContentConfig {
            keywords: ["Comment", "Name", "GenericName", "Description", "Query", "Keywords"]
                .map(String::from)
                .to_vec(),
            symbols: ["♪", "♫", "{", "}"].map(String::from).to_vec(),
            drop_parenthesized_lines: true,
            check_numbers: true,
            max_chars: 500,
        }
    }
}

impl ContentConfig {
    /// Configuration problems, as human-readable messages; empty = valid.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.max_chars == 0 {
            issues.push("max_chars must be at least 1".to_string());
        }
        for kw in &self.keywords {
            match kw.chars().next() {
                None => issues.push("keywords must not be empty".to_string()),
                Some(c) if !c.is_uppercase() => {
                    issues.push(format!("keyword {kw:?} must begin with an uppercase letter"));
                }
                Some(_) => {}
            }
        }
        if self.symbols.iter().any(String::is_empty) {
            issues.push("symbols must not be empty strings".to_string());
        }
        issues
    }
}

/// True when `text` ends with one of the keywords glued directly onto a
/// lowercase letter or digit — the CamelCase seam left when a structured
/// field name is concatenated onto a translation. A standalone occurrence
/// of the word ("Add a comment") does not match.
pub fn has_glued_keyword(text: &str, keywords: &[String]) -> bool {
    keywords.iter().any(|kw| {
        text.ends_with(kw.as_str())
            && text[..text.len() - kw.len()]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_lowercase() || c.is_ascii_digit())
    })
}

pub fn keyword_filter(record: &NormalizedRecord, cfg: &ContentConfig) -> Verdict {
    if has_glued_keyword(&record.src_norm, &cfg.keywords)
        || has_glued_keyword(&record.tgt_norm, &cfg.keywords)
    {
        return Verdict::remove(ReasonCode::Keyword, KEYWORD_FILTER_NAME);
    }
    Verdict::keep()
}

/// True when the whole text is a single `(...)` or `[...]` span: the
/// matching close bracket is the final character and the span never
/// closes early.
pub fn is_whole_line_parenthetical(text: &str) -> bool {
    for (open, close) in [('(', ')'), ('[', ']')] {
        if !(text.starts_with(open) && text.ends_with(close) && text.chars().count() >= 2) {
            continue;
        }
        let last = text.chars().count() - 1;
        let mut depth = 0i32;
        let mut early_close = false;
        for (i, ch) in text.chars().enumerate() {
            if ch == open {
                depth += 1;
            } else if ch == close {
                depth -= 1;
                if depth == 0 && i != last {
                    early_close = true;
                    break;
                }
            }
        }
        if !early_close && depth == 0 {
            return true;
        }
    }
    false
}

pub fn symbol_filter(record: &NormalizedRecord, cfg: &ContentConfig) -> Verdict {
    let offending = |text: &str| {
        cfg.symbols.iter().any(|s| text.contains(s.as_str()))
            || (cfg.drop_parenthesized_lines && is_whole_line_parenthetical(text))
    };
    if offending(&record.src_norm) || offending(&record.tgt_norm) {
        return Verdict::remove(ReasonCode::Symbol, SYMBOL_FILTER_NAME);
    }
    Verdict::keep()
}

/// All maximal runs of ASCII digits, in order of occurrence. The runs are
/// compared as a multiset, so "1,2835" and "1.2835" agree: punctuation
/// splits both into the same runs.
pub fn extract_numbers(text: &str) -> Vec<String> {
    let mut runs = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_ascii_digit() {
            current.push(ch);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// Multiset equality of the two sides' digit runs.
pub fn same_digit_runs(a: &str, b: &str) -> bool {
    let mut runs_a = extract_numbers(a);
    let mut runs_b = extract_numbers(b);
    runs_a.sort_unstable();
    runs_b.sort_unstable();
    runs_a == runs_b
}

pub fn number_filter(record: &NormalizedRecord, cfg: &ContentConfig) -> Verdict {
    if !cfg.check_numbers {
        return Verdict::keep();
    }
    if !same_digit_runs(&record.src_norm, &record.tgt_norm) {
        return Verdict::remove(ReasonCode::NumberMismatch, NUMBER_FILTER_NAME);
    }
    Verdict::keep()
}

pub fn length_filter(record: &NormalizedRecord, cfg: &ContentConfig) -> Verdict {
    if record.src_norm.chars().count() > cfg.max_chars
        || record.tgt_norm.chars().count() > cfg.max_chars
    {
        return Verdict::remove(ReasonCode::TooLong, LENGTH_FILTER_NAME);
    }
    Verdict::keep()
}

/// Reads a keyword or symbol list: one entry per line, `#` starts a
/// comment line, blank lines ignored, surrounding whitespace trimmed.
pub fn read_list_file(path: &Path) -> std::io::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(String::from)
        .collect())
}
