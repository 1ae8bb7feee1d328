//! Multi-reference BLEU-4.
//!
//! Sufficient statistics ([`BleuStats`]) are integer counts, so corpus
//! scores are exact sums regardless of how the corpus is partitioned.

use alloc::collections::BTreeMap;
use core::ops::{Add, AddAssign};

use crate::text::{Token, TokenSeq};
use crate::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Clipped n-gram matches, candidate n-gram totals and the two lengths that
/// feed the brevity penalty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BleuScore {
    /// 0..=100 for corpus BLEU, 0..=1 for sentence BLEU.
    pub value: f64,
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub eff_ref_len: u64,
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
}

impl BleuStats {
    /// Statistics for one hypothesis against its references.
    pub fn from_pair(hypothesis: &TokenSeq, references: &[TokenSeq]) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::EntryWithoutReferences);
        }
        let mut stats = BleuStats {
            hyp_len: hypothesis.len() as u64,
            ref_len: closest_ref_len(hypothesis.len(), references) as u64,
            ..BleuStats::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp_counts = ngram_counts(hypothesis, n);
            if hyp_counts.is_empty() {
                continue;
            }
            let mut max_ref: BTreeMap<&[Token], u64> = BTreeMap::new();
            for reference in references {
                for (gram, count) in ngram_counts(reference, n) {
                    if hyp_counts.contains_key(gram) {
                        let slot = max_ref.entry(gram).or_insert(0);
                        *slot = (*slot).max(count);
                    }
                }
            }
            let mut clipped = 0;
            let mut total = 0;
            for (gram, count) in &hyp_counts {
                total += count;
                clipped += (*count).min(max_ref.get(gram).copied().unwrap_or(0));
            }
            stats.matches[n - 1] = clipped;
            stats.totals[n - 1] = total;
        }
        Ok(stats)
    }

    /// Unsmoothed BLEU on the 0..=100 scale.
    pub fn corpus_score(&self) -> BleuScore {
        let mut precisions = [0.0; MAX_ORDER];
        for n in 0..MAX_ORDER {
            if self.totals[n] > 0 {
                precisions[n] = self.matches[n] as f64 / self.totals[n] as f64;
            }
        }
        self.finish(precisions, 100.0)
    }

    /// Add-one smoothing on orders 2..=4, 0..=1 scale.
    pub fn sentence_score(&self) -> BleuScore {
        let mut precisions = [0.0; MAX_ORDER];
        if self.totals[0] > 0 {
            precisions[0] = self.matches[0] as f64 / self.totals[0] as f64;
        }
        for n in 1..MAX_ORDER {
            precisions[n] = (self.matches[n] + 1) as f64 / (self.totals[n] + 1) as f64;
        }
        self.finish(precisions, 1.0)
    }

    fn finish(&self, precisions: [f64; MAX_ORDER], scale: f64) -> BleuScore {
        let brevity_penalty = brevity_penalty(self.hyp_len, self.ref_len);
        let value = if precisions.iter().any(|&p| p <= 0.0) {
            0.0
        } else {
            let log_mean = precisions.iter().map(|&p| libm::log(p)).sum::<f64>() / MAX_ORDER as f64;
            (scale * brevity_penalty * libm::exp(log_mean)).min(scale)
        };
        BleuScore {
            value,
            precisions,
            brevity_penalty,
            hyp_len: self.hyp_len,
            eff_ref_len: self.ref_len,
            matches: self.matches,
            totals: self.totals,
        }
    }
}

impl Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        self += rhs;
        self
    }
}

impl AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.totals[n] += rhs.totals[n];
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
    }
}

/// `exp(1 - r/c)` when the hypothesis is shorter than the reference length.
/// An empty hypothesis against a non-empty reference gets the limit, 0.
fn brevity_penalty(hyp_len: u64, ref_len: u64) -> f64 {
    if hyp_len >= ref_len {
        1.0
    } else if hyp_len == 0 {
        0.0
    } else {
        libm::exp(1.0 - ref_len as f64 / hyp_len as f64)
    }
}

/// Reference length closest to the hypothesis length, shorter on ties.
fn closest_ref_len(hyp_len: usize, references: &[TokenSeq]) -> usize {
    references.iter().map(|r| r.len()).min_by_key(|&len| (len.abs_diff(hyp_len), len)).unwrap_or(0)
}

fn ngram_counts(seq: &TokenSeq, n: usize) -> BTreeMap<&[Token], u64> {
    let mut counts = BTreeMap::new();
    if seq.len() >= n {
        for gram in seq.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level BLEU-4 over `(hypothesis, references)` pairs. Counts are
/// summed over all pairs before precisions are formed.
pub fn bleu_corpus<'a, I>(pairs: I) -> Result<BleuScore>
where
    I: IntoIterator<Item = (&'a TokenSeq, &'a [TokenSeq])>,
{
    let mut stats = BleuStats::default();
    let mut seen = false;
    for (hypothesis, references) in pairs {
        stats += BleuStats::from_pair(hypothesis, references)?;
        seen = true;
    }
    if !seen {
        return Err(Error::EmptyCorpus);
    }
    Ok(stats.corpus_score())
}

/// Smoothed single-pair BLEU on the 0..=1 scale.
pub fn bleu_sentence(hypothesis: &TokenSeq, references: &[TokenSeq]) -> Result<BleuScore> {
    Ok(BleuStats::from_pair(hypothesis, references)?.sentence_score())
}
