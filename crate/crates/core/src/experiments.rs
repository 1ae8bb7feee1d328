//! Experiment orchestration over a [`Corpus`].
//!
//! Per-entry work goes through an [`Executor`], so callers can evaluate
//! entries in parallel. Results are collected by entry index and reduced
//! with [`MetricAccumulator`], whose sums are exact, so reports do not
//! depend on the executor or worker count.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{self, Corpus};
use crate::exact::ExactSum;
use crate::metrics::{bleu_sentence, score_entry, EntryScore, MetricAccumulator, MetricReport};
use crate::parrot::{self, ParrotConfig, ParrotMode, Position};
use crate::text::TokenSeq;
use crate::{rng, Error, Result};

/// Runs `f(0..len)` and returns the results in index order.
pub trait Executor {
    fn map<R, F>(&self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Evaluates on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<R, F>(&self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}

/// Scores of one transformed entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEntry {
    pub score: EntryScore,
    pub modified_ratio: f64,
}

/// Apply `config` to every entry and score the outputs.
pub fn score_entries<E: Executor>(exec: &E, corpus: &Corpus, config: &ParrotConfig) -> Result<Vec<ScoredEntry>> {
    let entries = corpus.entries();
    exec.map(entries.len(), |i| {
        let entry = &entries[i];
        let out = parrot::apply(&entry.input, &entry.references, config, i as u64)?;
        Ok(ScoredEntry { score: score_entry(&out.output, &entry.references)?, modified_ratio: out.modified_ratio })
    })
    .into_iter()
    .collect()
}

fn accumulate<'a>(scored: impl IntoIterator<Item = &'a ScoredEntry>) -> MetricAccumulator {
    scored.into_iter().map(|s| &s.score).collect()
}

/// Aggregate BLEU / METEOR / TER for the parroted corpus.
pub fn full_eval<E: Executor>(exec: &E, corpus: &Corpus, config: &ParrotConfig) -> Result<MetricReport> {
    accumulate(&score_entries(exec, corpus, config)?).report()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Metric {
    Bleu,
    Meteor,
    Ter,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Bleu, Metric::Meteor, Metric::Ter];

    pub fn of(self, report: &MetricReport) -> f64 {
        match self {
            Metric::Bleu => report.bleu.value,
            Metric::Meteor => report.meteor.value,
            Metric::Ter => report.ter.value,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Bleu => "bleu",
            Metric::Meteor => "meteor",
            Metric::Ter => "ter",
        })
    }
}

/// Summary of one metric across sampled runs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleStats {
    pub metric: Metric,
    pub average: f64,
    /// Sample standard deviation (n - 1); absent for a single run.
    pub stddev: Option<f64>,
    pub max: f64,
    pub min: f64,
    pub runs: usize,
}

impl SampleStats {
    pub fn from_values(metric: Metric, values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let average = values.iter().sum::<f64>() / n;
        let stddev = (values.len() >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - average) * (v - average)).sum();
            libm::sqrt(ss / (n - 1.0))
        });
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        // keep min <= average <= max despite rounding in the mean
        let average = average.clamp(min, max);
        Some(SampleStats { metric, average, stddev, max, min, runs: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampledReport {
    pub size: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub stats: Vec<SampleStats>,
    pub per_run: Vec<MetricReport>,
}

/// Full-parrot evaluation on `runs` random test sets of `size` entries;
/// run `r` samples with seed `base_seed + r`.
pub fn sampled_eval<E: Executor>(
    exec: &E,
    corpus: &Corpus,
    size: usize,
    runs: usize,
    base_seed: u64,
) -> Result<SampledReport> {
    if runs == 0 {
        return Err(Error::NoRuns);
    }
    corpus::sample_indices(corpus.len(), size, base_seed)?;
    // full-parrot scores do not depend on the sample, so score each entry once
    let scored = score_entries(exec, corpus, &ParrotConfig::full())?;
    let per_run = exec
        .map(runs, |run| {
            let picked = corpus::sample_indices(corpus.len(), size, base_seed.wrapping_add(run as u64))?;
            accumulate(picked.iter().map(|&i| &scored[i])).report()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let stats = Metric::ALL
        .iter()
        .filter_map(|&m| SampleStats::from_values(m, &per_run.iter().map(|r| m.of(r)).collect::<Vec<_>>()))
        .collect();
    Ok(SampledReport { size, runs, base_seed, stats, per_run })
}

/// Default cap for [`refcount_curve`] buckets.
pub const DEFAULT_MAX_REFS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RefCountPoint {
    /// Reference count; with `pooled_tail` the lower bound of the pool.
    pub ref_count: usize,
    pub pooled_tail: bool,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub accumulator: MetricAccumulator,
    pub report: MetricReport,
}

/// Full-parrot scores per reference-count bucket. Entries with
/// `max_refs` or more references share one pooled bucket.
pub fn refcount_curve<E: Executor>(exec: &E, corpus: &Corpus, max_refs: usize) -> Result<Vec<RefCountPoint>> {
    let max_refs = max_refs.max(1);
    let scored = score_entries(exec, corpus, &ParrotConfig::full())?;
    let mut buckets: alloc::collections::BTreeMap<usize, MetricAccumulator> = alloc::collections::BTreeMap::new();
    for (entry, s) in corpus.entries().iter().zip(&scored) {
        buckets.entry(entry.references.len().min(max_refs)).or_default().push(&s.score);
    }
    let pooled = corpus.entries().iter().filter(|e| e.references.len() > max_refs).count() > 0;
    buckets
        .into_iter()
        .map(|(ref_count, accumulator)| {
            Ok(RefCountPoint {
                ref_count,
                pooled_tail: pooled && ref_count == max_refs,
                report: accumulator.report()?,
                accumulator,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepPoint {
    pub nominal_ratio: f64,
    /// Corpus mean of the per-entry modified ratio.
    pub realized_ratio: f64,
    pub report: MetricReport,
}

/// `steps + 1` evenly spaced ratios from 0 to 1 with the given step
/// (rounded to the nearest whole number of steps).
pub fn ratio_grid(step: f64) -> Vec<f64> {
    if !(step > 0.0 && step <= 1.0) {
        return alloc::vec![0.0, 1.0];
    }
    let steps = libm::round(1.0 / step).max(1.0) as usize;
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Partial-parrot evaluation at each ratio.
pub fn modification_sweep<E: Executor>(
    exec: &E,
    corpus: &Corpus,
    mode: ParrotMode,
    position: Position,
    ratios: &[f64],
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if mode == ParrotMode::Full {
        return Err(Error::NotPartialMode);
    }
    if let Some(&bad) = ratios.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::InvalidRatio(bad));
    }
    if ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::RatiosNotIncreasing);
    }
    ratios
        .iter()
        .map(|&ratio| {
            let config = ParrotConfig::new(mode, position, ratio, seed)?;
            let scored = score_entries(exec, corpus, &config)?;
            let realized: ExactSum = scored.iter().map(|s| ExactSum::from_f64(s.modified_ratio)).sum();
            Ok(SweepPoint {
                nominal_ratio: ratio,
                realized_ratio: realized.to_f64() / scored.len() as f64,
                report: accumulate(&scored).report()?,
            })
        })
        .collect()
}

/// Which side of the sentence-BLEU comparison the input sentence takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RetrievalDirection {
    /// Pool sentence is the hypothesis, the input the single reference.
    #[default]
    InputAsReference,
    /// Input is the hypothesis, the pool sentence the single reference.
    InputAsHypothesis,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RetrievalSentence {
    pub text: String,
    pub score: f64,
    pub is_reference: bool,
}

/// Sentences whose score lies in `[lower, upper)`, or `[lower, 1]` when
/// `upper` is 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RetrievalBucket {
    pub lower: f64,
    pub upper: f64,
    pub sentences: Vec<RetrievalSentence>,
}

impl RetrievalBucket {
    pub fn contains(&self, score: f64) -> bool {
        score >= self.lower && (score < self.upper || (self.upper >= 1.0 && score <= self.upper))
    }
}

/// `[0, 0.15)` followed by 0.05-wide buckets up to `[0.95, 1]`.
pub fn default_buckets() -> Vec<(f64, f64)> {
    let mut out = alloc::vec![(0.0, 0.15)];
    for i in 3..20 {
        out.push((i as f64 / 20.0, (i + 1) as f64 / 20.0));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RetrievalRequest<'a> {
    pub entry_id: &'a str,
    pub num_references: usize,
    pub num_distractors: usize,
    pub seed: u64,
    pub buckets: &'a [(f64, f64)],
    pub direction: RetrievalDirection,
}

/// Score an entry's first `num_references` references and
/// `num_distractors` random non-reference corpus sentences with sentence
/// BLEU against the input, and bucket them by score.
pub fn bleu_retrieval(corpus: &Corpus, request: &RetrievalRequest<'_>) -> Result<Vec<RetrievalBucket>> {
    for &(lower, upper) in request.buckets {
        if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower >= upper {
            return Err(Error::InvalidBucket(lower, upper));
        }
    }
    let position = corpus
        .entries()
        .iter()
        .position(|e| e.id == request.entry_id)
        .ok_or_else(|| Error::UnknownEntry(request.entry_id.into()))?;
    let entry = &corpus.entries()[position];
    if entry.references.len() < request.num_references {
        return Err(Error::InsufficientReferences {
            requested: request.num_references,
            available: entry.references.len(),
        });
    }

    let excluded: BTreeSet<&TokenSeq> = core::iter::once(&entry.input).chain(&entry.references).collect();
    let mut seen = BTreeSet::new();
    let eligible: Vec<&TokenSeq> =
        corpus.entries().iter().map(|e| &e.input).filter(|s| !excluded.contains(s) && seen.insert(*s)).collect();
    if eligible.len() < request.num_distractors {
        return Err(Error::InsufficientDistractors { requested: request.num_distractors, available: eligible.len() });
    }
    let mut rng = rng::keyed(request.seed, rng::stream::RETRIEVAL.wrapping_add(position as u64));
    let mut picked = rand::seq::index::sample(&mut rng, eligible.len(), request.num_distractors).into_vec();
    picked.sort_unstable();

    let pool = entry.references[..request.num_references]
        .iter()
        .map(|r| (r, true))
        .chain(picked.into_iter().map(|i| (eligible[i], false)));

    let mut buckets: Vec<RetrievalBucket> =
        request.buckets.iter().map(|&(lower, upper)| RetrievalBucket { lower, upper, sentences: Vec::new() }).collect();
    let single_input = core::slice::from_ref(&entry.input);
    for (sentence, is_reference) in pool {
        let score = match request.direction {
            RetrievalDirection::InputAsReference => bleu_sentence(sentence, single_input)?.value,
            RetrievalDirection::InputAsHypothesis => {
                bleu_sentence(&entry.input, core::slice::from_ref(sentence))?.value
            }
        };
        if let Some(bucket) = buckets.iter_mut().find(|b| b.contains(score)) {
            bucket.sentences.push(RetrievalSentence { text: sentence.join(), score, is_reference });
        }
    }
    Ok(buckets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_pairs, PairRecord, Source};
    use alloc::format;
    use alloc::vec;

    fn identity_corpus() -> Corpus {
        // every input's sole reference equals the input up to case
        let entries = (0..6)
            .map(|i| {
                let text = format!("sentence number {i} is here");
                crate::corpus::ParaphraseEntry {
                    id: format!("{i}"),
                    input: TokenSeq::parse(&text),
                    references: vec![TokenSeq::parse(&text)],
                    raw_input: text,
                }
            })
            .collect();
        Corpus::new(Source::Generic, entries).unwrap()
    }

    fn small_corpus() -> Corpus {
        let recs = vec![
            PairRecord::new("how do i learn rust quickly ?", "what is the fastest way to learn rust ?", true),
            PairRecord::new("how do i learn rust quickly ?", "how can i learn rust fast ?", true),
            PairRecord::new("what is the capital of france ?", "which city is the capital of france ?", true),
            PairRecord::new("why is the sky blue ?", "what makes the sky blue ?", true),
            PairRecord::new("why is the sky blue ?", "why does the sky look blue ?", true),
            PairRecord::new("why is the sky blue ?", "what is the reason the sky is blue ?", true),
        ];
        ingest_pairs(recs, Source::Generic).unwrap().corpus
    }

    #[test]
    fn identity_corpus_is_perfect() {
        let report = full_eval(&Sequential, &identity_corpus(), &ParrotConfig::full()).unwrap();
        assert_eq!(report.bleu.value, 100.0);
        assert_eq!(report.ter.value, 0.0);
        assert_eq!(report.entry_count, 6);
    }

    #[test]
    fn sampled_single_run_has_no_stddev() {
        let c = small_corpus();
        let r = sampled_eval(&Sequential, &c, 3, 1, 5).unwrap();
        for s in &r.stats {
            assert_eq!(s.stddev, None);
            assert_eq!(s.average, s.max);
            assert_eq!(s.min, s.max);
        }
    }

    #[test]
    fn sampling_whole_corpus_has_zero_spread() {
        let c = small_corpus();
        let r = sampled_eval(&Sequential, &c, c.len(), 4, 0).unwrap();
        for s in &r.stats {
            assert_eq!(s.stddev, Some(0.0));
            assert_eq!(s.max, s.min);
        }
        assert_eq!(sampled_eval(&Sequential, &c, 2, 0, 0).unwrap_err(), Error::NoRuns);
    }

    #[test]
    fn sweep_validates_ratios() {
        let c = small_corpus();
        let err = modification_sweep(&Sequential, &c, ParrotMode::Cut, Position::Head, &[0.5, 0.5], 0);
        assert_eq!(err.unwrap_err(), Error::RatiosNotIncreasing);
        let err = modification_sweep(&Sequential, &c, ParrotMode::Cut, Position::Head, &[1.5], 0);
        assert_eq!(err.unwrap_err(), Error::InvalidRatio(1.5));
        let err = modification_sweep(&Sequential, &c, ParrotMode::Full, Position::Head, &[0.0], 0);
        assert_eq!(err.unwrap_err(), Error::NotPartialMode);
    }

    #[test]
    fn sweep_at_zero_is_full_parrot() {
        let c = small_corpus();
        let full = full_eval(&Sequential, &c, &ParrotConfig::full()).unwrap();
        for mode in [ParrotMode::Cut, ParrotMode::Replace] {
            let points = modification_sweep(&Sequential, &c, mode, Position::Random, &[0.0, 0.5], 3).unwrap();
            assert_eq!(points[0].report, full);
            assert_eq!(points[0].realized_ratio, 0.0);
        }
    }

    #[test]
    fn grid() {
        let g = ratio_grid(0.02);
        assert_eq!(g.len(), 51);
        assert_eq!((g[0], g[50]), (0.0, 1.0));
        assert_eq!(ratio_grid(0.25), [0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn refcount_pools_tail() {
        let c = small_corpus();
        let points = refcount_curve(&Sequential, &c, 2).unwrap();
        assert_eq!(points.iter().map(|p| p.ref_count).collect::<Vec<_>>(), [1, 2]);
        assert!(points[1].pooled_tail);
        assert_eq!(points.iter().map(|p| p.report.entry_count).sum::<u64>(), c.len() as u64);
    }

    #[test]
    fn retrieval_buckets() {
        let c = small_corpus();
        let id = c.entries()[0].id.clone();
        let buckets = default_buckets();
        let request = RetrievalRequest {
            entry_id: &id,
            num_references: 2,
            num_distractors: 3,
            seed: 0,
            buckets: &buckets,
            direction: RetrievalDirection::InputAsReference,
        };
        let out = bleu_retrieval(&c, &request).unwrap();
        let all: Vec<&RetrievalSentence> = out.iter().flat_map(|b| &b.sentences).collect();
        assert_eq!(all.len(), 5);
        assert_eq!(all.iter().filter(|s| s.is_reference).count(), 2);
        for b in &out {
            assert!(b.sentences.iter().all(|s| b.contains(s.score)));
        }
        let too_many = RetrievalRequest { num_distractors: 100, ..request.clone() };
        assert!(matches!(bleu_retrieval(&c, &too_many), Err(Error::InsufficientDistractors { .. })));
        let too_many = RetrievalRequest { num_references: 3, ..request.clone() };
        assert!(matches!(bleu_retrieval(&c, &too_many), Err(Error::InsufficientReferences { .. })));
        let unknown = RetrievalRequest { entry_id: "nope", ..request };
        assert!(matches!(bleu_retrieval(&c, &unknown), Err(Error::UnknownEntry(_))));
    }
}
