//! Core domain types shared by all filters, plus the text normalization
//! used for comparisons.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid language code {0:?}: expected exactly two lowercase ASCII letters")]
    InvalidLanguageCode(String),
    #[error("source and target language must differ (both {0})")]
    SameLanguage(LanguageCode),
}

/// Two-letter ISO-639-1 language identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageCode([u8; 2]);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self, ModelError> {
        let bytes = code.as_bytes();
        if bytes.len() == 2 && bytes.iter().all(|b| b.is_ascii_lowercase()) {
            Ok(Self([bytes[0], bytes[1]]))
        } else {
            Err(ModelError::InvalidLanguageCode(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("two ASCII letters")
    }

    /// The six languages of the translation task, in code order.
    pub fn task_defaults() -> [LanguageCode; 6] {
        ["en", "id", "jv", "ms", "ta", "tl"].map(|c| LanguageCode::new(c).unwrap())
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LanguageCode({})", self.as_str())
    }
}

impl FromStr for LanguageCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LanguageCode::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One aligned sentence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitextRecord {
    pub dataset_id: String,
    /// 1-based position within the dataset.
    pub line_no: u64,
    pub src_lang: LanguageCode,
    pub tgt_lang: LanguageCode,
    pub src_text: String,
    pub tgt_text: String,
}

impl BitextRecord {
    pub fn new(
        dataset_id: impl Into<String>,
        line_no: u64,
        src_lang: LanguageCode,
        tgt_lang: LanguageCode,
        src_text: impl Into<String>,
        tgt_text: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if src_lang == tgt_lang {
            return Err(ModelError::SameLanguage(src_lang));
        }
        Ok(Self {
            dataset_id: dataset_id.into(),
            line_no,
            src_lang,
            tgt_lang,
            src_text: src_text.into(),
            tgt_text: tgt_text.into(),
        })
    }
}

/// A record together with its normalized comparison forms, computed once.
#[derive(Debug, Clone)]
pub struct NormalizedRecord {
    pub record: BitextRecord,
    pub src_norm: String,
    pub tgt_norm: String,
}

impl NormalizedRecord {
    pub fn new(record: BitextRecord) -> Self {
        let src_norm = normalize_text(&record.src_text);
        let tgt_norm = normalize_text(&record.tgt_text);
        Self {
            record,
            src_norm,
            tgt_norm,
        }
    }

    pub fn line_no(&self) -> u64 {
        self.record.line_no
    }
}

/// Why a record was removed. Audit files use these exact spellings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReasonCode {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "EMPTY")]
    Empty,
    #[serde(rename = "TOO_LONG")]
    TooLong,
    #[serde(rename = "KEYWORD")]
    Keyword,
    #[serde(rename = "SYMBOL")]
    Symbol,
    #[serde(rename = "NUMBER_MISMATCH")]
    NumberMismatch,
    #[serde(rename = "LANG_FOREIGN")]
    LangForeign,
    #[serde(rename = "SCRIPT_MISMATCH")]
    ScriptMismatch,
    #[serde(rename = "DUP_PAIR")]
    DupPair,
    #[serde(rename = "DUP_SIDE")]
    DupSide,
    #[serde(rename = "DUP_PARTIAL")]
    DupPartial,
    #[serde(rename = "DUP_IDENTICAL")]
    DupIdentical,
}

impl ReasonCode {
    /// Every removal reason, in report column order: the stateless chain
    /// order first, then the dedup reasons by rule priority.
    pub const REMOVAL_REASONS: [ReasonCode; 11] = [
        ReasonCode::Empty,
        ReasonCode::TooLong,
        ReasonCode::Symbol,
        ReasonCode::Keyword,
        ReasonCode::LangForeign,
        ReasonCode::ScriptMismatch,
        ReasonCode::NumberMismatch,
        ReasonCode::DupIdentical,
        ReasonCode::DupPartial,
        ReasonCode::DupPair,
        ReasonCode::DupSide,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReasonCode::None => "NONE",
            ReasonCode::Empty => "EMPTY",
            ReasonCode::TooLong => "TOO_LONG",
            ReasonCode::Keyword => "KEYWORD",
            ReasonCode::Symbol => "SYMBOL",
            ReasonCode::NumberMismatch => "NUMBER_MISMATCH",
            ReasonCode::LangForeign => "LANG_FOREIGN",
            ReasonCode::ScriptMismatch => "SCRIPT_MISMATCH",
            ReasonCode::DupPair => "DUP_PAIR",
            ReasonCode::DupSide => "DUP_SIDE",
            ReasonCode::DupPartial => "DUP_PARTIAL",
            ReasonCode::DupIdentical => "DUP_IDENTICAL",
        }
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReasonCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NONE" => Ok(ReasonCode::None),
            "EMPTY" => Ok(ReasonCode::Empty),
            "TOO_LONG" => Ok(ReasonCode::TooLong),
            "KEYWORD" => Ok(ReasonCode::Keyword),
            "SYMBOL" => Ok(ReasonCode::Symbol),
            "NUMBER_MISMATCH" => Ok(ReasonCode::NumberMismatch),
            "LANG_FOREIGN" => Ok(ReasonCode::LangForeign),
            "SCRIPT_MISMATCH" => Ok(ReasonCode::ScriptMismatch),
            "DUP_PAIR" => Ok(ReasonCode::DupPair),
            "DUP_SIDE" => Ok(ReasonCode::DupSide),
            "DUP_PARTIAL" => Ok(ReasonCode::DupPartial),
            "DUP_IDENTICAL" => Ok(ReasonCode::DupIdentical),
            other => Err(format!("unknown reason code {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Keep,
    Remove,
}

/// Keep/remove decision with the reason and the deciding filter.
///
/// The constructors maintain the coupling: keep verdicts always carry
/// `ReasonCode::None`, remove verdicts never do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    decision: Decision,
    reason: ReasonCode,
    filter_name: &'static str,
}

impl Verdict {
    pub fn keep() -> Self {
        Self {
            decision: Decision::Keep,
            reason: ReasonCode::None,
            filter_name: "",
        }
    }

    /// Panics if `reason` is `ReasonCode::None`; removals must name a cause.
    pub fn remove(reason: ReasonCode, filter_name: &'static str) -> Self {
        assert!(reason != ReasonCode::None, "remove verdict requires a reason");
        Self {
            decision: Decision::Remove,
            reason,
            filter_name,
        }
    }

    pub fn decision(&self) -> Decision {
        self.decision
    }

    pub fn reason(&self) -> ReasonCode {
        self.reason
    }

    pub fn filter_name(&self) -> &'static str {
        self.filter_name
    }

    pub fn is_keep(&self) -> bool {
        self.decision == Decision::Keep
    }

    pub fn is_remove(&self) -> bool {
        self.decision == Decision::Remove
    }
}

/// Comparison form used by every filter: Unicode NFC, trimmed, with each
/// internal whitespace run collapsed to a single space. Case is preserved.
pub fn normalize_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for token in nfc.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_collapses_whitespace() {
        assert_eq!(normalize_text("  a \t b "), "a b");
    }

    #[test]
    fn normalize_is_identity_on_plain_text() {
        assert_eq!(normalize_text("CJ E&M Corporation."), "CJ E&M Corporation.");
    }

    #[test]
    fn normalize_composes_to_nfc() {
        // e + combining acute must become the single codepoint U+00E9.
        let decomposed = "e\u{0301}";
        let normalized = normalize_text(decomposed);
        assert_eq!(normalized, "\u{00e9}");
        assert_eq!(normalized.chars().count(), 1);
    }

    #[test]
    fn normalize_preserves_case() {
        assert_eq!(normalize_text("Hello WORLD"), "Hello WORLD");
    }

    #[test]
    fn language_code_validation() {
        assert!(LanguageCode::new("en").is_ok());
        assert!(LanguageCode::new("EN").is_err());
        assert!(LanguageCode::new("eng").is_err());
        assert!(LanguageCode::new("e").is_err());
        assert!(LanguageCode::new("e1").is_err());
    }

    #[test]
    fn record_rejects_same_language_pair() {
        let en = LanguageCode::new("en").unwrap();
        let err = BitextRecord::new("d", 1, en, en, "a", "b").unwrap_err();
        assert_eq!(err, ModelError::SameLanguage(en));
    }

    #[test]
    fn reason_code_round_trips_exact_spellings() {
        for reason in ReasonCode::REMOVAL_REASONS {
            assert_eq!(reason.as_str().parse::<ReasonCode>().unwrap(), reason);
        }
        assert_eq!("NONE".parse::<ReasonCode>().unwrap(), ReasonCode::None);
    }

    #[test]
    #[should_panic(expected = "requires a reason")]
    fn remove_verdict_requires_reason() {
        let _ = Verdict::remove(ReasonCode::None, "x");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalize_is_idempotent(s in "\\PC{0,80}") {
                let once = normalize_text(&s);
                prop_assert_eq!(normalize_text(&once), once);
            }

            #[test]
            fn normalize_never_adds_tokens(s in "\\PC{0,80}") {
                let before = s.split_whitespace().count();
                let after = normalize_text(&s).split_whitespace().count();
                prop_assert!(after <= before);
            }

            #[test]
            fn verdict_reason_coupling(remove in any::<bool>()) {
                let v = if remove {
                    Verdict::remove(ReasonCode::Empty, "empty")
                } else {
                    Verdict::keep()
                };
                prop_assert_eq!(v.is_keep(), v.reason() == ReasonCode::None);
            }
        }
    }
}
