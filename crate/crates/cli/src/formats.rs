//! Dataset adapters and the normalized corpus format.
//!
//! Raw datasets (Quora TSV, Twitter URL corpus TSV, MSCOCO caption JSON,
//! generic sentence-pair TSV) are turned into records for the core grouping
//! functions. Experiments only read the normalized JSON-lines corpus:
//!
//! ```text
//! {"id":"0","input":"how do i learn rust ?","references":["how can i learn rust fast ?"]}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use parroteval_core::corpus::{self, CaptionRecord, PairRecord};
use parroteval_core::{Corpus, Ingested, ParaphraseEntry, Source, TokenSeq};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Twitter label threshold: `(n,6)` votes or bare scores at or above this
/// count as paraphrases.
pub const DEFAULT_TWITTER_THRESHOLD: u32 = 4;

/// Records dropped while reading, before or during grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub corpus: Corpus,
    pub skipped: usize,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| CliError::Read { path: path.into(), source })
}

fn tsv_reader(path: &Path, quoting: bool) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .quoting(quoting)
        .from_reader(open(path)?))
}

fn into_loaded(ingested: Ingested, skipped_before: usize) -> Loaded {
    Loaded { corpus: ingested.corpus, skipped: skipped_before + ingested.skipped }
}

/// Quora question pairs: tab-separated with a header naming `question1`,
/// `question2` and `is_duplicate`.
pub fn read_quora(path: &Path) -> Result<Loaded> {
    let mut reader = tsv_reader(path, true)?;
    let mut rows = reader.records();
    let header = match rows.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(CliError::Parse { path: path.into(), message: e.to_string() }),
        None => return Err(parroteval_core::Error::ZeroEntries.into()),
    };
    let column = |name: &str, fallback: usize| header.iter().position(|h| h.trim() == name).unwrap_or(fallback);
    let (q1, q2, label) = (column("question1", 3), column("question2", 4), column("is_duplicate", 5));

    let mut skipped = 0;
    let mut records = Vec::new();
    for row in rows {
        let parsed = row.ok().and_then(|r| {
            let is_paraphrase = match r.get(label)?.trim() {
                "1" => true,
                "0" => false,
                _ => return None,
            };
            Some(PairRecord::new(r.get(q1)?, r.get(q2)?, is_paraphrase))
        });
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    Ok(into_loaded(corpus::ingest_pairs(records, Source::Quora)?, skipped))
}

/// Positive-label test for the Twitter URL corpus: `(n,6)` annotator
/// votes, a bare numeric score, or a literal `1` / `paraphrase`.
pub fn twitter_label(label: &str, threshold: u32) -> Option<bool> {
    let label = label.trim();
    match label.to_ascii_lowercase().as_str() {
        "1" | "paraphrase" | "true" => return Some(true),
        "0" | "non-paraphrase" | "false" => return Some(false),
        _ => {}
    }
    let votes = label.strip_prefix('(').and_then(|rest| rest.split(',').next()).unwrap_or(label);
    votes.trim().parse::<u32>().ok().map(|n| n >= threshold)
}

/// Twitter URL corpus: `sentence1 \t sentence2 \t label [\t ...]`.
pub fn read_twitter(path: &Path, threshold: u32) -> Result<Loaded> {
    let mut skipped = 0;
    let mut records = Vec::new();
    for row in tsv_reader(path, false)?.records() {
        let parsed = row.ok().and_then(|r| {
            let positive = twitter_label(r.get(2)?, threshold)?;
            Some(PairRecord::new(r.get(0)?, r.get(1)?, positive))
        });
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    Ok(into_loaded(corpus::ingest_pairs(records, Source::Twitter)?, skipped))
}

/// Generic pairs: `sentence_a \t sentence_b [\t label]`; a missing label
/// means positive, otherwise `1`/`0`.
pub fn read_generic_pairs(path: &Path) -> Result<Loaded> {
    let mut skipped = 0;
    let mut records = Vec::new();
    for row in tsv_reader(path, false)?.records() {
        let parsed = row.ok().and_then(|r| {
            let positive = match r.get(2).map(str::trim) {
                None | Some("1") => true,
                Some("0") => false,
                Some(_) => return None,
            };
            Some(PairRecord::new(r.get(0)?, r.get(1)?, positive))
        });
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    Ok(into_loaded(corpus::ingest_pairs(records, Source::Generic)?, skipped))
}

/// MSCOCO caption annotations: `{"annotations": [{"image_id": .., "caption": ..}, ..]}`.
pub fn read_mscoco(path: &Path) -> Result<Loaded> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|source| CliError::Read { path: path.into(), source })?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.into(), message: e.to_string() })?;
    let annotations = doc
        .get("annotations")
        .and_then(|a| a.as_array())
        .ok_or_else(|| CliError::Parse { path: path.into(), message: "missing \"annotations\" array".into() })?;

    let mut skipped = 0;
    let mut records = Vec::new();
    for annotation in annotations {
        let image_id = match annotation.get("image_id") {
            Some(serde_json::Value::Number(n)) => Some(n.to_string()),
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            _ => None,
        };
        match (image_id, annotation.get("caption").and_then(|c| c.as_str())) {
            (Some(image_id), Some(caption)) => records.push(CaptionRecord::new(image_id, caption)),
            _ => skipped += 1,
        }
    }
    Ok(into_loaded(corpus::ingest_captions(records)?, skipped))
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonlEntry {
    id: String,
    input: String,
    references: Vec<String>,
}

/// Read a normalized corpus. Unparseable lines and entries left without
/// references are skipped and counted.
pub fn read_corpus(path: &Path) -> Result<Loaded> {
    let reader = BufReader::new(open(path)?);
    let mut skipped = 0;
    let mut entries = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|source| CliError::Read { path: path.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<JsonlEntry>(&line).ok().and_then(|e| {
            let references = e.references.iter().map(|r| TokenSeq::parse(r)).collect();
            ParaphraseEntry::new(e.id, e.input.clone(), TokenSeq::parse(&e.input), references).ok()
        });
        match parsed {
            Some(entry) => entries.push(entry),
            None => skipped += 1,
        }
    }
    Ok(Loaded { corpus: Corpus::new(Source::Generic, entries)?, skipped })
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let write_err = |source| CliError::Write { path: path.into(), source };
    let mut out = BufWriter::new(File::create(path).map_err(write_err)?);
    for entry in corpus.entries() {
        let line = JsonlEntry {
            id: entry.id.clone(),
            input: entry.input.join(),
            references: entry.references.iter().map(TokenSeq::join).collect(),
        };
        serde_json::to_writer(&mut out, &line).map_err(|e| write_err(e.into()))?;
        out.write_all(b"\n").map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}
