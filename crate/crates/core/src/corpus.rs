//! Paraphrase corpora: grouping sentences with their reference paraphrases,
//! reference-count histograms and seeded test-set sampling.
//!
//! Grouping is direct-pair only. A sentence's references are exactly the
//! sentences it was positively paired with, never the transitive closure.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rng;
use crate::text::TokenSeq;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Source {
    Quora,
    Twitter,
    Mscoco,
    Generic,
}

/// One input sentence and its reference paraphrases.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParaphraseEntry {
    pub id: String,
    pub input: TokenSeq,
    /// Non-empty, duplicate-free, never containing `input`.
    pub references: Vec<TokenSeq>,
    pub raw_input: String,
}

impl ParaphraseEntry {
    /// Builds an entry, dropping empty references, references equal to the
    /// input and repeated references (first occurrence kept).
    pub fn new(
        id: impl Into<String>,
        raw_input: impl Into<String>,
        input: TokenSeq,
        references: Vec<TokenSeq>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let references: Vec<TokenSeq> =
            references.into_iter().filter(|r| !r.is_empty() && *r != input && seen.insert(r.clone())).collect();
        if references.is_empty() {
            return Err(Error::EntryWithoutReferences);
        }
        Ok(ParaphraseEntry { id: id.into(), input, references, raw_input: raw_input.into() })
    }
}

/// Entry counts keyed by number of references.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReferenceHistogram {
    pub buckets: BTreeMap<usize, usize>,
    pub total_entries: usize,
}

impl ReferenceHistogram {
    pub fn of(entries: &[ParaphraseEntry]) -> Self {
        let mut buckets = BTreeMap::new();
        for entry in entries {
            *buckets.entry(entry.references.len()).or_insert(0) += 1;
        }
        ReferenceHistogram { buckets, total_entries: entries.len() }
    }

    /// `(reference count, entries, percent of all entries)` per bucket.
    pub fn percentages(&self) -> Vec<(usize, usize, f64)> {
        let total = self.total_entries.max(1) as f64;
        self.buckets.iter().map(|(&refs, &n)| (refs, n, 100.0 * n as f64 / total)).collect()
    }

    /// Fraction of entries with exactly one reference.
    pub fn single_reference_share(&self) -> f64 {
        let single = self.buckets.get(&1).copied().unwrap_or(0);
        single as f64 / self.total_entries.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Corpus {
    entries: Vec<ParaphraseEntry>,
    source: Source,
    stats: ReferenceHistogram,
}

impl Corpus {
    /// Fails on an empty entry list or a repeated id.
    pub fn new(source: Source, entries: Vec<ParaphraseEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroEntries);
        }
        let mut ids = BTreeSet::new();
        for entry in &entries {
            if !ids.insert(entry.id.as_str()) {
                return Err(Error::DuplicateId(entry.id.clone()));
            }
        }
        let stats = ReferenceHistogram::of(&entries);
        Ok(Corpus { entries, source, stats })
    }

    pub fn entries(&self) -> &[ParaphraseEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ParaphraseEntry> {
        self.entries
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn stats(&self) -> &ReferenceHistogram {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ParaphraseEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Keep entries with at least `min_refs` references.
    pub fn filter_min_refs(self, min_refs: usize) -> Result<Corpus> {
        let source = self.source;
        let kept = self.entries.into_iter().filter(|e| e.references.len() >= min_refs).collect();
        Corpus::new(source, kept)
    }
}

/// Corpus plus the number of records skipped as unusable.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub corpus: Corpus,
    pub skipped: usize,
}

/// One sentence pair from a paraphrase-identification dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub sentence_a: String,
    pub sentence_b: String,
    pub is_paraphrase: bool,
}

impl PairRecord {
    pub fn new(a: impl Into<String>, b: impl Into<String>, is_paraphrase: bool) -> Self {
        PairRecord { sentence_a: a.into(), sentence_b: b.into(), is_paraphrase }
    }
}

/// Group positive pairs into one entry per distinct sentence.
///
/// Sentences are identified by their token sequence. Pairs are symmetric;
/// self-pairs and repeated pairs collapse. Records with a side that
/// tokenizes to nothing are skipped and counted. Entry ids are the
/// sentence's order of first appearance.
pub fn ingest_pairs<I>(records: I, source: Source) -> Result<Ingested>
where
    I: IntoIterator<Item = PairRecord>,
{
    struct Node {
        raw: String,
        tokens: TokenSeq,
        refs: Vec<usize>,
        ref_set: BTreeSet<usize>,
    }
    let mut index: BTreeMap<TokenSeq, usize> = BTreeMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut skipped = 0;

    let mut intern = |raw: String, tokens: TokenSeq, nodes: &mut Vec<Node>| -> usize {
        *index.entry(tokens.clone()).or_insert_with(|| {
            nodes.push(Node { raw, tokens, refs: Vec::new(), ref_set: BTreeSet::new() });
            nodes.len() - 1
        })
    };

    for record in records {
        if !record.is_paraphrase {
            continue;
        }
        let a = TokenSeq::parse(&record.sentence_a);
        let b = TokenSeq::parse(&record.sentence_b);
        if a.is_empty() || b.is_empty() {
            skipped += 1;
            continue;
        }
        if a == b {
            continue;
        }
        let ia = intern(record.sentence_a, a, &mut nodes);
        let ib = intern(record.sentence_b, b, &mut nodes);
        if nodes[ia].ref_set.insert(ib) {
            nodes[ia].refs.push(ib);
        }
        if nodes[ib].ref_set.insert(ia) {
            nodes[ib].refs.push(ia);
        }
    }

    let entries = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| ParaphraseEntry {
            id: i.to_string(),
            input: node.tokens.clone(),
            references: node.refs.iter().map(|&r| nodes[r].tokens.clone()).collect(),
            raw_input: node.raw.clone(),
        })
        .collect();
    Ok(Ingested { corpus: Corpus::new(source, entries)?, skipped })
}

/// One caption of one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptionRecord {
    pub image_id: String,
    pub caption: String,
}

impl CaptionRecord {
    pub fn new(image_id: impl Into<String>, caption: impl Into<String>) -> Self {
        CaptionRecord { image_id: image_id.into(), caption: caption.into() }
    }
}

/// One entry per caption, with the other captions of the same image as
/// references. Captions identical to the input are not used as its
/// references; captions left with no references are dropped. Entry ids are
/// `<image_id>#<caption ordinal>`.
pub fn ingest_captions<I>(records: I) -> Result<Ingested>
where
    I: IntoIterator<Item = CaptionRecord>,
{
    let mut images: BTreeMap<String, usize> = BTreeMap::new();
    let mut groups: Vec<(String, Vec<(String, TokenSeq)>)> = Vec::new();
    let mut skipped = 0;
    for record in records {
        let tokens = TokenSeq::parse(&record.caption);
        if tokens.is_empty() {
            skipped += 1;
            continue;
        }
        let slot = *images.entry(record.image_id.clone()).or_insert_with(|| {
            groups.push((record.image_id.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push((record.caption, tokens));
    }

    let mut entries = Vec::new();
    for (image_id, captions) in &groups {
        for (k, (raw, tokens)) in captions.iter().enumerate() {
            let others = captions.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, (_, t))| t.clone()).collect();
            if let Ok(entry) = ParaphraseEntry::new(format!("{image_id}#{k}"), raw.clone(), tokens.clone(), others) {
                entries.push(entry);
            }
        }
    }
    Ok(Ingested { corpus: Corpus::new(Source::Mscoco, entries)?, skipped })
}

/// `histogram` as a free function.
pub fn histogram(corpus: &Corpus) -> ReferenceHistogram {
    corpus.stats().clone()
}

/// Sorted indices of a uniform sample of `size` out of `len` without
/// replacement, determined by `seed`.
pub fn sample_indices(len: usize, size: usize, seed: u64) -> Result<Vec<usize>> {
    if size == 0 || size > len {
        return Err(Error::InvalidSampleSize { requested: size, available: len });
    }
    let mut rng = rng::keyed(seed, rng::stream::SAMPLE);
    let mut picked = rand::seq::index::sample(&mut rng, len, size).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Uniform sample of `size` entries, in corpus order, with full reference
/// sets.
pub fn sample_test_set(corpus: &Corpus, size: usize, seed: u64) -> Result<Corpus> {
    let picked = sample_indices(corpus.len(), size, seed)?;
    let entries = picked.into_iter().map(|i| corpus.entries[i].clone()).collect();
    Corpus::new(corpus.source, entries)
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Quora => "quora",
            Source::Twitter => "twitter",
            Source::Mscoco => "mscoco",
            Source::Generic => "generic",
        })
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "quora" => Ok(Source::Quora),
            "twitter" => Ok(Source::Twitter),
            "mscoco" => Ok(Source::Mscoco),
            "generic" => Ok(Source::Generic),
            other => Err(format!("unknown source {other:?}")),
        }
    }
}
