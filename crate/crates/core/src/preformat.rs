//! Direction tagging for multilingual training: prefix each source line
//! with "[xx] [yy] " naming the translation direction, leave targets
//! untouched, and record the tag tokens so a subword trainer can protect
//! them from segmentation.

use std::collections::BTreeSet;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{BitextRecord, LanguageCode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreformatError {
    #[error("source and target language are both {0}")]
    SameLanguage(LanguageCode),
    #[error("malformed direction tag: {0}")]
    MalformedTag(String),
}

/// One training example with its direction tags applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedExample {
    pub tagged_src: String,
    pub tgt: String,
    pub direction: (LanguageCode, LanguageCode),
}

/// Prefixes `text` with the direction tags: "[en] [tl] Today is a sunny
/// day." The text itself is not modified.
pub fn tag_source(
    text: &str,
    src_lang: LanguageCode,
    tgt_lang: LanguageCode,
) -> Result<String, PreformatError> {
    if src_lang == tgt_lang {
        return Err(PreformatError::SameLanguage(src_lang));
    }
    Ok(format!("[{src_lang}] [{tgt_lang}] {text}"))
}

/// Exact inverse of [`tag_source`]: splits off the two leading tags and
/// returns them with the untouched remainder.
pub fn strip_tags(tagged_src: &str) -> Result<(LanguageCode, LanguageCode, String), PreformatError> {
    let malformed = || PreformatError::MalformedTag(tagged_src.to_string());
    let bytes = tagged_src.as_bytes();
    // Layout: "[xx] [yy] rest" — tags are always two ASCII letters, so
    // the prefix is exactly 10 bytes.
    if bytes.len() < 10 {
        return Err(malformed());
    }
    if !(bytes[0] == b'[' && bytes[3] == b']' && bytes[4] == b' ')
        || !(bytes[5] == b'[' && bytes[8] == b']' && bytes[9] == b' ')
    {
        return Err(malformed());
    }
    let src_lang =
        LanguageCode::new(std::str::from_utf8(&bytes[1..3]).map_err(|_| malformed())?)
            .map_err(|_| malformed())?;
    let tgt_lang =
        LanguageCode::new(std::str::from_utf8(&bytes[6..8]).map_err(|_| malformed())?)
            .map_err(|_| malformed())?;
    if src_lang == tgt_lang {
        return Err(malformed());
    }
    Ok((src_lang, tgt_lang, tagged_src[10..].to_string()))
}

/// Expands records into directed training examples: source-to-target for
/// each record, and with `bidirectional` also target-to-source, forward
/// then backward per record.
pub fn emit_directions(records: &[BitextRecord], bidirectional: bool) -> Vec<DirectedExample> {
    let mut examples = Vec::with_capacity(records.len() * if bidirectional { 2 } else { 1 });
    for record in records {
        examples.push(DirectedExample {
            tagged_src: tag_source(&record.src_text, record.src_lang, record.tgt_lang)
                .expect("records never carry equal language codes"),
            tgt: record.tgt_text.clone(),
            direction: (record.src_lang, record.tgt_lang),
        });
        if bidirectional {
            examples.push(DirectedExample {
                tagged_src: tag_source(&record.tgt_text, record.tgt_lang, record.src_lang)
                    .expect("records never carry equal language codes"),
                tgt: record.src_text.clone(),
                direction: (record.tgt_lang, record.src_lang),
            });
        }
    }
    examples
}

/// The tag tokens a subword trainer must treat as unsplittable: the six
/// task languages, plus whatever directions actually occur in `examples`.
pub fn special_tokens(examples: &[DirectedExample]) -> Vec<String> {
    let mut langs: BTreeSet<LanguageCode> = LanguageCode::task_defaults().into_iter().collect();
    for example in examples {
        langs.insert(example.direction.0);
        langs.insert(example.direction.1);
    }
    langs.into_iter().map(|lang| format!("[{lang}]")).collect()
}

#[derive(Debug, Error)]
#[error("{path}: {source}")]
pub struct PreformatIoError {
    path: PathBuf,
    #[source]
    source: std::io::Error,
}

fn write_lines<'a>(
    lines: impl Iterator<Item = &'a str>,
    path: &Path,
) -> Result<(), PreformatIoError> {
    let file = std::fs::File::create(path).map_err(|source| PreformatIoError {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<std::fs::File>, line: &str| {
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
    };
    for line in lines {
        write(&mut out, line).map_err(|source| PreformatIoError {
            path: path.to_path_buf(),
            source,
        })?;
    }
    out.flush().map_err(|source| PreformatIoError {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the aligned training files plus the special-tokens list.
pub fn write_preformat(
    examples: &[DirectedExample],
    out_src: &Path,
    out_tgt: &Path,
    out_tokens: &Path,
) -> Result<(), PreformatIoError> {
    write_lines(examples.iter().map(|e| e.tagged_src.as_str()), out_src)?;
    write_lines(examples.iter().map(|e| e.tgt.as_str()), out_tgt)?;
    let tokens = special_tokens(examples);
    write_lines(tokens.iter().map(String::as_str), out_tokens)
}
