//! Duplicate detection over normalized text: identical source/target,
//! partial embeddings, repeated pairs, and repeated single sides.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::{normalize_text, BitextRecord, NormalizedRecord, ReasonCode, Verdict};

pub const FILTER_NAME: &str = "dedup";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupConfig {
    /// Drop records reusing a side already paired with different text.
    pub enable_one_side: bool,
    /// Drop pairs where one side is embedded inside the other.
    pub enable_partial: bool,
    /// Drop pairs whose source and target normalize to the same string.
    pub enable_identical: bool,
    /// Drop repeats of a (source, target) pair after its first occurrence.
    pub enable_exact_pair: bool,
    /// Minimum character length of the shorter side before a substring
    /// match counts as a partial duplicate.
    pub partial_min_chars: usize,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            enable_one_side: true,
            enable_partial: true,
            enable_identical: true,
            enable_exact_pair: true,
            partial_min_chars: 10,
        }
    }
}

/// True when both sides normalize to the same nonempty string.
pub fn is_identical_pair(record: &BitextRecord) -> bool {
    let src = normalize_text(&record.src_text);
    if src.is_empty() {
        return false;
    }
    src == normalize_text(&record.tgt_text)
}

/// True when the shorter side (at least `partial_min_chars` characters
/// long) is a proper substring of the longer. Identical pairs are not
/// partial duplicates.
pub fn is_partial_duplicate(record: &BitextRecord, config: &DedupConfig) -> bool {
    let src = normalize_text(&record.src_text);
    let tgt = normalize_text(&record.tgt_text);
    partial_of_norms(&src, &tgt, config.partial_min_chars)
}

fn partial_of_norms(src: &str, tgt: &str, min_chars: usize) -> bool {
    if src == tgt {
        return false;
    }
    let (shorter, longer) = if src.chars().count() <= tgt.chars().count() {
        (src, tgt)
    } else {
        (tgt, src)
    };
    shorter.chars().count() >= min_chars && longer.contains(shorter)
}

/// Per-side occurrence bookkeeping. `second_distinct_line` is the earliest
/// line pairing this side with text other than the first occurrence's
/// counterpart; until such a line exists, echoes of the first pairing are
/// the exact-pair rule's business, not this one's.
struct SideEntry {
    first_line: u64,
    first_counterpart: String,
    second_distinct_line: Option<u64>,
}

/// Cross-record duplicate state for one dataset. Built over every record
/// that reaches the dedup stage, then queried per record.
pub struct DedupIndex {
    pairs: HashMap<(String, String), u64>,
    src_sides: HashMap<String, SideEntry>,
    tgt_sides: HashMap<String, SideEntry>,
}

fn note_side(map: &mut HashMap<String, SideEntry>, side: &str, counterpart: &str, line_no: u64) {
    match map.get_mut(side) {
        None => {
            map.insert(
                side.to_string(),
                SideEntry {
                    first_line: line_no,
                    first_counterpart: counterpart.to_string(),
                    second_distinct_line: None,
                },
            );
        }
        Some(entry) => {
            if entry.second_distinct_line.is_none() && entry.first_counterpart != counterpart {
                entry.second_distinct_line = Some(line_no);
            }
        }
    }
}

impl DedupIndex {
    pub fn build<'a>(records: impl IntoIterator<Item = &'a NormalizedRecord>) -> Self {
        let mut index = DedupIndex {
            pairs: HashMap::new(),
            src_sides: HashMap::new(),
            tgt_sides: HashMap::new(),
        };
        for record in records {
            let line_no = record.line_no();
            let key = (record.src_norm.clone(), record.tgt_norm.clone());
            index.pairs.entry(key).or_insert(line_no);
            note_side(&mut index.src_sides, &record.src_norm, &record.tgt_norm, line_no);
            note_side(&mut index.tgt_sides, &record.tgt_norm, &record.src_norm, line_no);
        }
        index
    }

    fn pair_seen_before(&self, record: &NormalizedRecord) -> bool {
        let key = (record.src_norm.clone(), record.tgt_norm.clone());
        self.pairs
            .get(&key)
            .is_some_and(|&first| first < record.line_no())
    }

    /// True when an earlier record paired `side` with something other than
    /// `counterpart` — the query record's pairing is then ambiguous.
    fn side_conflicts(
        map: &HashMap<String, SideEntry>,
        side: &str,
        counterpart: &str,
        line_no: u64,
    ) -> bool {
        let Some(entry) = map.get(side) else {
            return false;
        };
        if entry.first_line < line_no && entry.first_counterpart != counterpart {
            return true;
        }
        // All earlier occurrences agree with the first pairing; a conflict
        // exists only once a differing pairing appeared before this line.
        entry.second_distinct_line.is_some_and(|l| l < line_no)
    }
}

/// Judges one record against the dataset-wide index. Check order fixes
/// which reason a multiply-duplicated record reports: identical, then
/// partial, then repeated pair, then repeated side.
pub fn check(record: &NormalizedRecord, index: &DedupIndex, config: &DedupConfig) -> Verdict {
    let src = &record.src_norm;
    let tgt = &record.tgt_norm;

    if config.enable_identical && !src.is_empty() && src == tgt {
        return Verdict::remove(ReasonCode::DupIdentical, FILTER_NAME);
    }

    if config.enable_partial && partial_of_norms(src, tgt, config.partial_min_chars) {
        return Verdict::remove(ReasonCode::DupPartial, FILTER_NAME);
    }

    if config.enable_exact_pair && index.pair_seen_before(record) {
        return Verdict::remove(ReasonCode::DupPair, FILTER_NAME);
    }

    if config.enable_one_side {
        let line_no = record.line_no();
        if DedupIndex::side_conflicts(&index.src_sides, src, tgt, line_no)
            || DedupIndex::side_conflicts(&index.tgt_sides, tgt, src, line_no)
        {
            return Verdict::remove(ReasonCode::DupSide, FILTER_NAME);
        }
    }

    Verdict::keep()
}

/// Judges every record of one dataset, in input order.
pub fn dedup_pass(records: &[NormalizedRecord], config: &DedupConfig) -> Vec<Verdict> {
    let index = DedupIndex::build(records);
    records.iter().map(|r| check(r, &index, config)).collect()
}
