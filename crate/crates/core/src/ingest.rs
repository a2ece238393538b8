//! Reading aligned file pairs into records; writing filtered outputs,
//! audit logs, and reduction reports.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{BitextRecord, LanguageCode, Verdict};
use crate::pipeline::FilterStats;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("dataset {dataset_id}: line count mismatch ({src_lines} source lines vs {tgt_lines} target lines)")]
    LineCountMismatch {
        dataset_id: String,
        src_lines: u64,
        tgt_lines: u64,
    },
    #[error("dataset {dataset_id}: invalid UTF-8 in {path} at line {line_no}")]
    InvalidUtf8 {
        dataset_id: String,
        path: PathBuf,
        line_no: u64,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One aligned pair of input files and the languages they carry.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FilePairSource {
    pub dataset_id: String,
    pub src_path: PathBuf,
    pub tgt_path: PathBuf,
    pub src_lang: LanguageCode,
    pub tgt_lang: LanguageCode,
}

/// Reads newline-delimited lines, accepting `\n` or `\r\n` terminators.
/// Reports the 1-based line number of the first invalid UTF-8 line.
fn read_lines(path: &Path, dataset_id: &str) -> Result<Vec<String>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| IngestError::io(path, e))?;
        if n == 0 {
            break;
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        let line = std::str::from_utf8(&buf).map_err(|_| IngestError::InvalidUtf8 {
            dataset_id: dataset_id.to_string(),
            path: path.to_path_buf(),
            line_no: lines.len() as u64 + 1,
        })?;
        lines.push(line.to_string());
    }
    Ok(lines)
}

/// Reads a file pair into records, pairing line i of the source file with
/// line i of the target file. `line_no` is the 1-based file position.
pub fn read_bitext(source: &FilePairSource) -> Result<Vec<BitextRecord>, IngestError> {
    let src_lines = read_lines(&source.src_path, &source.dataset_id)?;
    let tgt_lines = read_lines(&source.tgt_path, &source.dataset_id)?;
    if src_lines.len() != tgt_lines.len() {
        return Err(IngestError::LineCountMismatch {
            dataset_id: source.dataset_id.clone(),
            src_lines: src_lines.len() as u64,
            tgt_lines: tgt_lines.len() as u64,
        });
    }
    let records = src_lines
        .into_iter()
        .zip(tgt_lines)
        .enumerate()
        .map(|(i, (src, tgt))| {
            BitextRecord::new(
                source.dataset_id.clone(),
                i as u64 + 1,
                source.src_lang,
                source.tgt_lang,
                src,
                tgt,
            )
            .expect("file pair languages validated distinct")
        })
        .collect();
    Ok(records)
}

/// Writes records back out as an aligned file pair, original text preserved
/// byte-for-byte, one line per record. Nonempty outputs end with exactly one
/// trailing newline; an empty stream produces two empty files.
pub fn write_bitext<'a>(
    records: impl IntoIterator<Item = &'a BitextRecord>,
    out_src_path: &Path,
    out_tgt_path: &Path,
) -> Result<(u64, u64), IngestError> {
    let src_file = File::create(out_src_path).map_err(|e| IngestError::io(out_src_path, e))?;
    let tgt_file = File::create(out_tgt_path).map_err(|e| IngestError::io(out_tgt_path, e))?;
    let mut src_out = BufWriter::new(src_file);
    let mut tgt_out = BufWriter::new(tgt_file);
    let mut count = 0u64;
    for record in records {
        src_out
            .write_all(record.src_text.as_bytes())
            .and_then(|_| src_out.write_all(b"\n"))
            .map_err(|e| IngestError::io(out_src_path, e))?;
        tgt_out
            .write_all(record.tgt_text.as_bytes())
            .and_then(|_| tgt_out.write_all(b"\n"))
            .map_err(|e| IngestError::io(out_tgt_path, e))?;
        count += 1;
    }
    src_out.flush().map_err(|e| IngestError::io(out_src_path, e))?;
    tgt_out.flush().map_err(|e| IngestError::io(out_tgt_path, e))?;
    Ok((count, count))
}

fn escape_field(text: &str) -> String {
    text.replace('\\', "\\\\")
        .replace('\t', "\\t")
        .replace('\n', "\\n")
}

/// One audit line per removal: dataset_id, line_no, reason, filter name, and
/// both original texts, tab-separated with tabs/newlines escaped.
pub fn write_audit<'a>(
    removals: impl IntoIterator<Item = &'a (BitextRecord, Verdict)>,
    path: &Path,
) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (record, verdict) in removals {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            record.dataset_id,
            record.line_no,
            verdict.reason(),
            verdict.filter_name(),
            escape_field(&record.src_text),
            escape_field(&record.tgt_text),
        )
        .map_err(|e| IngestError::io(path, e))?;
    }
    out.flush().map_err(|e| IngestError::io(path, e))
}

/// Reduction percentage as reported: `(before - after) / before * 100`
/// rendered with two decimal places. A before of zero reports "0.00".
pub fn reduction_pct(before: u64, after: u64) -> String {
    if before == 0 {
        return "0.00".to_string();
    }
    format!("{:.2}", (before - after) as f64 / before as f64 * 100.0)
}

/// Renders the reduction report: a header line, one row per stats entry,
/// with one trailing column per removal reason.
pub fn render_report(stats: &[FilterStats]) -> String {
    use crate::model::ReasonCode;

    let mut out = String::new();
    out.push_str("dataset_id\tlang_pair\tbefore\tafter\treduction_pct");
    for reason in ReasonCode::REMOVAL_REASONS {
        out.push('\t');
        out.push_str(reason.as_str());
    }
    out.push('\n');
    for entry in stats {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}",
            entry.dataset_id,
            entry.lang_pair,
            entry.before,
            entry.after,
            reduction_pct(entry.before, entry.after),
        ));
        for reason in ReasonCode::REMOVAL_REASONS {
            out.push('\t');
            out.push_str(&entry.removed(reason).to_string());
        }
        out.push('\n');
    }
    out
}

/// Writes the rendered report to `path`. Callers pass per-dataset stats
/// followed by the TOTAL row.
pub fn write_report(stats: &[FilterStats], path: &Path) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(render_report(stats).as_bytes())
        .map_err(|e| IngestError::io(path, e))?;
    out.flush().map_err(|e| IngestError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ReasonCode;
    use std::fs;
    use tempfile::TempDir;

    fn write_file(dir: &TempDir, name: &str, content: &str) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn source(dir: &TempDir, id: &str, src: &str, tgt: &str) -> FilePairSource {
        FilePairSource {
            dataset_id: id.to_string(),
            src_path: dir.path().join(src),
            tgt_path: dir.path().join(tgt),
            src_lang: LanguageCode::new("en").unwrap(),
            tgt_lang: LanguageCode::new("tl").unwrap(),
        }
    }

    #[test]
    fn reads_three_line_pair_in_order() {
        let dir = TempDir::new().unwrap();
        write_file(&dir, "a.en", "one\ntwo\nthree\n");
        write_file(&dir, "a.tl", "isa\ndalawa\ntatlo\n");
        let records = read_bitext(&source(&dir, "a", "a.en", "a.tl")).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].line_no, 1);
        assert_eq!(records[2].line_no, 3);
        assert_eq!(records[1].src_text, "two");
        assert_eq!(records[1].tgt_text, "dalawa");
    }

    #[test]
    fn reads_gnome_pair_from_error_strings() {
        let dir = TempDir::new().unwrap();
        write_file(
            &dir,
            "g.en",
            "Error reading from file: %s\nError seeking in file: %s\nError closing file: %s\n",
        );
        write_file(
            &dir,
            "g.tl",
            "Error sa pagbasa ng talaksang '%s': %s\nError sa pagbasa ng talaksang '%s': %s\nError sa pagbasa ng talaksang '%s': %s\n",
        );
        let records = read_bitext(&source(&dir, "GNOME.en-tl", "g.en", "g.tl")).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].src_text, "Error reading from file: %s");
        assert_eq!(records[0].tgt_text, "Error sa pagbasa ng talaksang '%s': %s");
    }

    #[test]
    fn mismatched_line_counts_error_with_both_counts() {
        let dir = TempDir::new().unwrap();
        write_file(&dir, "m.en", "a\nb\nc\n");
        write_file(&dir, "m.tl", "x\ny\n");
        let err = read_bitext(&source(&dir, "m", "m.en", "m.tl")).unwrap_err();
        match err {
            IngestError::LineCountMismatch {
                src_lines,
                tgt_lines,
                ..
            } => {
                assert_eq!((src_lines, tgt_lines), (3, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_trailing_newline_and_crlf_accepted() {
        let dir = TempDir::new().unwrap();
        write_file(&dir, "c.en", "a\r\nb");
        write_file(&dir, "c.tl", "x\ny\n");
        let records = read_bitext(&source(&dir, "c", "c.en", "c.tl")).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].src_text, "a");
        assert_eq!(records[1].src_text, "b");
    }

    #[test]
    fn invalid_utf8_reports_file_and_line() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("bad.en");
        fs::write(&path, b"ok\n\xff\xfe\nmore\n").unwrap();
        write_file(&dir, "bad.tl", "1\n2\n3\n");
        let err = read_bitext(&source(&dir, "bad", "bad.en", "bad.tl")).unwrap_err();
        match err {
            IngestError::InvalidUtf8 { line_no, path: p, .. } => {
                assert_eq!(line_no, 2);
                assert_eq!(p, path);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_byte_identical_modulo_trailing_newline() {
        let dir = TempDir::new().unwrap();
        let src_in = write_file(&dir, "r.en", "one\ntwo  spaced\nthree");
        write_file(&dir, "r.tl", "isa\ndalawa\ntatlo\n");
        let records = read_bitext(&source(&dir, "r", "r.en", "r.tl")).unwrap();
        let out_src = dir.path().join("out.en");
        let out_tgt = dir.path().join("out.tl");
        write_bitext(&records, &out_src, &out_tgt).unwrap();
        let input = fs::read_to_string(&src_in).unwrap();
        let output = fs::read_to_string(&out_src).unwrap();
        assert_eq!(output, format!("{input}\n"));
        assert_eq!(fs::read_to_string(&out_tgt).unwrap(), "isa\ndalawa\ntatlo\n");
    }

    #[test]
    fn empty_stream_writes_two_empty_files() {
        let dir = TempDir::new().unwrap();
        let out_src = dir.path().join("e.en");
        let out_tgt = dir.path().join("e.tl");
        let (n, m) = write_bitext(std::iter::empty(), &out_src, &out_tgt).unwrap();
        assert_eq!((n, m), (0, 0));
        assert_eq!(fs::read(&out_src).unwrap().len(), 0);
        assert_eq!(fs::read(&out_tgt).unwrap().len(), 0);
    }

    #[test]
    fn kept_subset_preserves_relative_order() {
        let dir = TempDir::new().unwrap();
        write_file(&dir, "k.en", "r1\nr2\nr3\nr4\nr5\n");
        write_file(&dir, "k.tl", "t1\nt2\nt3\nt4\nt5\n");
        let records = read_bitext(&source(&dir, "k", "k.en", "k.tl")).unwrap();
        // Records 2, 4, 5 removed by hand; 1 and 3 stay, in order.
        let kept: Vec<&BitextRecord> = vec![&records[0], &records[2]];
        let out_src = dir.path().join("ks.en");
        let out_tgt = dir.path().join("ks.tl");
        write_bitext(kept, &out_src, &out_tgt).unwrap();
        assert_eq!(fs::read_to_string(&out_src).unwrap(), "r1\nr3\n");
        assert_eq!(fs::read_to_string(&out_tgt).unwrap(), "t1\nt3\n");
    }

    #[test]
    fn audit_line_carries_reason_and_texts() {
        let dir = TempDir::new().unwrap();
        let en = LanguageCode::new("en").unwrap();
        let ta = LanguageCode::new("ta").unwrap();
        let text = "Those who are invited will find the way.";
        let record = BitextRecord::new("OpenSubtitles.en-ta", 7, en, ta, text, text).unwrap();
        let removal = (record, Verdict::remove(ReasonCode::DupIdentical, "dedup"));
        let path = dir.path().join("audit.tsv");
        write_audit(std::iter::once(&removal), &path).unwrap();
        let content = fs::read_to_string(&path).unwrap();
        assert_eq!(
            content,
            format!("OpenSubtitles.en-ta\t7\tDUP_IDENTICAL\tdedup\t{text}\t{text}\n")
        );
    }

    #[test]
    fn audit_escapes_tabs_and_newlines() {
        let dir = TempDir::new().unwrap();
        let en = LanguageCode::new("en").unwrap();
        let id = LanguageCode::new("id").unwrap();
        let record = BitextRecord::new("d", 1, en, id, "a\tb", "c\\d").unwrap();
        let removal = (record, Verdict::remove(ReasonCode::Symbol, "symbol"));
        let path = dir.path().join("audit.tsv");
        write_audit(std::iter::once(&removal), &path).unwrap();
        let content = fs::read_to_string(&path).unwrap();
        assert_eq!(content, "d\t1\tSYMBOL\tsymbol\ta\\tb\tc\\\\d\n");
    }

    #[test]
    fn reduction_pct_matches_reported_rows() {
        assert_eq!(reduction_pct(54_075_891, 27_186_074), "49.73");
        assert_eq!(reduction_pct(65_997, 48_806), "26.05");
        assert_eq!(reduction_pct(100, 100), "0.00");
        assert_eq!(reduction_pct(0, 0), "0.00");
    }

    #[test]
    fn report_row_layout() {
        let dir = TempDir::new().unwrap();
        let mut stats = FilterStats::new("KDE4.en-id", "en-id", 10);
        stats.record_removal(ReasonCode::Keyword);
        stats.record_removal(ReasonCode::Keyword);
        stats.set_after(8);
        let path = dir.path().join("report.tsv");
        write_report(std::slice::from_ref(&stats), &path).unwrap();
        let content = fs::read_to_string(&path).unwrap();
        let mut lines = content.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("dataset_id\tlang_pair\tbefore\tafter\treduction_pct\tEMPTY\t"));
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split('\t').collect();
        assert_eq!(&fields[..5], &["KDE4.en-id", "en-id", "10", "8", "20.00"]);
        // KEYWORD column sits at index 5 + position in REMOVAL_REASONS.
        let kw_col = 5 + ReasonCode::REMOVAL_REASONS
            .iter()
            .position(|r| *r == ReasonCode::Keyword)
            .unwrap();
        assert_eq!(fields[kw_col], "2");
    }
}
