//! BLEU, METEOR and TER against multiple references, plus the per-entry
//! scores and order-independent aggregation used by the experiments.
//!
//! Aggregation levels: BLEU is corpus-level (summed counts), METEOR is the
//! mean of per-entry scores, TER is total edits over total mean reference
//! length.

pub mod bleu;
pub mod meteor;
pub mod ter;

pub use bleu::{bleu_corpus, bleu_sentence, BleuScore, BleuStats};
pub use meteor::{meteor, MeteorParams, MeteorScore};
pub use ter::{shift_edits, ter, ter_oracle, ShiftEdits, TerScore};

use crate::exact::ExactSum;
use crate::text::TokenSeq;
use crate::{Error, Result};

/// All three metrics for one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EntryScore {
    pub bleu: BleuStats,
    pub meteor: MeteorScore,
    pub ter: TerScore,
}

pub fn score_entry(hypothesis: &TokenSeq, references: &[TokenSeq]) -> Result<EntryScore> {
    Ok(EntryScore {
        bleu: BleuStats::from_pair(hypothesis, references)?,
        meteor: meteor(hypothesis, references)?,
        ter: ter(hypothesis, references)?,
    })
}

/// Mean per-entry METEOR.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeteorAggregate {
    pub value: f64,
    pub sum: ExactSum,
    pub entries: u64,
}

/// Length-weighted corpus TER.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TerAggregate {
    pub value: f64,
    pub edits: u64,
    pub ref_len_sum: ExactSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricReport {
    pub bleu: BleuScore,
    pub meteor: MeteorAggregate,
    pub ter: TerAggregate,
    pub entry_count: u64,
}

/// Sums entry scores. Every field is an integer or an [`ExactSum`], so
/// merging partial accumulators in any grouping gives identical reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MetricAccumulator {
    pub bleu: BleuStats,
    pub meteor_sum: ExactSum,
    pub ter_edits: u64,
    pub ter_ref_len: ExactSum,
    pub entries: u64,
}

impl MetricAccumulator {
    pub fn push(&mut self, score: &EntryScore) {
        self.bleu += score.bleu;
        self.meteor_sum += score.meteor.value;
        self.ter_edits += score.ter.edits;
        self.ter_ref_len += score.ter.avg_ref_len;
        self.entries += 1;
    }

    pub fn merge(&mut self, other: &MetricAccumulator) {
        self.bleu += other.bleu;
        self.meteor_sum += other.meteor_sum;
        self.ter_edits += other.ter_edits;
        self.ter_ref_len += other.ter_ref_len;
        self.entries += other.entries;
    }

    pub fn report(&self) -> Result<MetricReport> {
        if self.entries == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(MetricReport {
            bleu: self.bleu.corpus_score(),
            meteor: MeteorAggregate {
                value: self.meteor_sum.to_f64() / self.entries as f64,
                sum: self.meteor_sum,
                entries: self.entries,
            },
            ter: TerAggregate {
                value: 100.0 * self.ter_edits as f64 / self.ter_ref_len.to_f64(),
                edits: self.ter_edits,
                ref_len_sum: self.ter_ref_len,
            },
            entry_count: self.entries,
        })
    }
}

impl<'a> FromIterator<&'a EntryScore> for MetricAccumulator {
    fn from_iter<I: IntoIterator<Item = &'a EntryScore>>(iter: I) -> Self {
        let mut acc = MetricAccumulator::default();
        for score in iter {
            acc.push(score);
        }
        acc
    }
}
