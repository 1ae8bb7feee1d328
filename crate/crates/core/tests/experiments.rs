use parroteval_core::corpus::{ingest_pairs, PairRecord};
use parroteval_core::experiments::{
    bleu_retrieval, default_buckets, full_eval, modification_sweep, ratio_grid, refcount_curve, sampled_eval,
    RetrievalDirection, RetrievalRequest,
};
use parroteval_core::metrics::MetricAccumulator;
use parroteval_core::{
    Corpus, Executor, ParaphraseEntry, ParrotConfig, ParrotMode, Position, Sequential, Source, TokenSeq,
};
use proptest::prelude::*;

/// Scoped threads over interleaved indices, so work finishes out of order.
struct Striped(usize);

impl Executor for Striped {
    fn map<R, F>(&self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let workers = self.0.max(1);
        let mut parts: Vec<Vec<(usize, R)>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let f = &f;
                    s.spawn(move || (w..len).step_by(workers).rev().map(|i| (i, f(i))).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all: Vec<(usize, R)> = parts.drain(..).flatten().collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    }
}

const WORDS: &[&str] = &["the", "cat", "sat", "on", "mat", "a", "dog", "ran", "far", "away", "?", "how", "do", "i"];

fn sentence(seed: &[u8]) -> String {
    seed.iter().map(|&b| WORDS[b as usize % WORDS.len()]).collect::<Vec<_>>().join(" ")
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    let sent = prop::collection::vec(any::<u8>(), 1..10).prop_map(|b| sentence(&b));
    prop::collection::vec((sent.clone(), sent), 2..24).prop_filter_map("no entries", |pairs| {
        ingest_pairs(pairs.into_iter().map(|(a, b)| PairRecord::new(a, b, true)), Source::Generic)
            .ok()
            .map(|i| i.corpus)
    })
}

fn reversed(corpus: &Corpus) -> Corpus {
    let mut entries = corpus.entries().to_vec();
    entries.reverse();
    Corpus::new(corpus.source(), entries).unwrap()
}

fn identity_corpus(n: usize) -> Corpus {
    let entries = (0..n)
        .map(|i| {
            let text = sentence(&[i as u8, (i * 7) as u8, (i * 3 + 1) as u8, 5]);
            ParaphraseEntry {
                id: i.to_string(),
                raw_input: text.clone(),
                input: TokenSeq::parse(&text),
                references: vec![TokenSeq::parse(&text)],
            }
        })
        .collect();
    Corpus::new(Source::Generic, entries).unwrap()
}

#[test]
fn identity_corpus_scores_perfectly() {
    let report = full_eval(&Sequential, &identity_corpus(12), &ParrotConfig::full()).unwrap();
    assert_eq!(report.bleu.value, 100.0);
    assert_eq!(report.ter.value, 0.0);
    assert!(report.meteor.value >= 100.0 * (1.0 - 0.5 / 64.0));
}

#[test]
fn refcurve_single_bucket() {
    let corpus =
        ingest_pairs([PairRecord::new("a b", "c d", true), PairRecord::new("e f", "g h", true)], Source::Generic)
            .unwrap()
            .corpus;
    let points = refcount_curve(&Sequential, &corpus, 30).unwrap();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0].ref_count, 1);
    assert!(!points[0].pooled_tail);
}

#[test]
fn refcurve_pools_tail() {
    let corpus = ingest_pairs(
        [
            PairRecord::new("a", "b", true),
            PairRecord::new("a", "c", true),
            PairRecord::new("a", "d", true),
            PairRecord::new("x y", "z", true),
        ],
        Source::Generic,
    )
    .unwrap()
    .corpus;
    let points = refcount_curve(&Sequential, &corpus, 2).unwrap();
    assert_eq!(points.iter().map(|p| (p.ref_count, p.pooled_tail)).collect::<Vec<_>>(), [(1, false), (2, true)]);
}

#[test]
fn noisy_duplicate_references_raise_meteor() {
    let input = "how do i train a dog to sit";
    let noisy = ["how do i teach my dog to sit", "how can i train a dog to sit", "how do i train a dog to sit down"];
    let mut last = f64::NEG_INFINITY;
    for n in 1..=noisy.len() {
        let refs = noisy[..n].iter().map(|r| TokenSeq::parse(r)).collect();
        let entry = ParaphraseEntry::new("0", input, TokenSeq::parse(input), refs).unwrap();
        let corpus = Corpus::new(Source::Generic, vec![entry]).unwrap();
        let m = full_eval(&Sequential, &corpus, &ParrotConfig::full()).unwrap().meteor.value;
        assert!(m >= last);
        last = m;
    }
}

#[test]
fn sampling_whole_corpus_has_no_variance() {
    let corpus = identity_corpus(10);
    let r = sampled_eval(&Sequential, &corpus, 10, 5, 0).unwrap();
    assert!(r.stats.iter().all(|s| s.stddev == Some(0.0)));
    let single = sampled_eval(&Sequential, &corpus, 4, 1, 0).unwrap();
    assert!(single.stats.iter().all(|s| s.stddev.is_none() && s.average == s.max && s.max == s.min));
}

#[test]
fn grid_shape() {
    let grid = ratio_grid(0.02);
    assert_eq!(grid.len(), 51);
    assert_eq!((grid[0], grid[50]), (0.0, 1.0));
}

#[test]
fn retrieval_extremes() {
    let corpus = ingest_pairs(
        [
            PairRecord::new("the cat sat on the mat", "the cat sat on the mat .", true),
            PairRecord::new("zebra quokka", "yak", true),
            PairRecord::new("the cat sat on the mat", "a cat was on a mat", true),
        ],
        Source::Generic,
    )
    .unwrap()
    .corpus;
    let id = corpus.entries().iter().find(|e| e.input.join() == "the cat sat on the mat").unwrap().id.clone();
    let buckets = default_buckets();
    let request = RetrievalRequest {
        entry_id: &id,
        num_references: 2,
        num_distractors: 2,
        seed: 0,
        buckets: &buckets,
        direction: RetrievalDirection::InputAsReference,
    };
    let result = bleu_retrieval(&corpus, &request).unwrap();
    for b in &result {
        for s in &b.sentences {
            assert!(b.contains(s.score));
        }
    }
    let zero = result.iter().find(|b| b.contains(0.0)).unwrap();
    assert!(zero.sentences.iter().any(|s| s.text == "zebra quokka" && !s.is_reference));
    assert_eq!(result.iter().map(|b| b.sentences.len()).sum::<usize>(), 4);

    let too_many = RetrievalRequest { num_distractors: 3, ..request.clone() };
    assert!(bleu_retrieval(&corpus, &too_many).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn full_eval_ignores_order_and_workers(corpus in corpus_strategy(), workers in 2usize..5) {
        let config = ParrotConfig::new(ParrotMode::Replace, Position::Tail, 0.3, 1).unwrap();
        let a = full_eval(&Sequential, &corpus, &config).unwrap();
        prop_assert_eq!(&a, &full_eval(&Striped(workers), &corpus, &config).unwrap());
        let full = ParrotConfig::full();
        prop_assert_eq!(full_eval(&Sequential, &corpus, &full).unwrap(), full_eval(&Striped(workers), &reversed(&corpus), &full).unwrap());
    }

    #[test]
    fn refcurve_recombines_exactly(corpus in corpus_strategy(), max_refs in 1usize..4) {
        let points = refcount_curve(&Sequential, &corpus, max_refs).unwrap();
        let mut acc = MetricAccumulator::default();
        for p in &points {
            acc.merge(&p.accumulator);
        }
        let recombined = acc.report().unwrap();
        let direct = full_eval(&Sequential, &corpus, &ParrotConfig::full()).unwrap();
        prop_assert_eq!(&recombined, &direct);

        let weighted: f64 = points.iter().map(|p| p.report.meteor.sum.to_f64()).sum::<f64>() / direct.entry_count as f64;
        prop_assert!((weighted - direct.meteor.value).abs() < 1e-9);
    }

    #[test]
    fn sweep_properties(corpus in corpus_strategy(), seed in any::<u64>()) {
        let grid = ratio_grid(0.1);
        for mode in [ParrotMode::Cut, ParrotMode::Replace] {
            for position in [Position::Head, Position::Tail, Position::Random] {
                let points = modification_sweep(&Sequential, &corpus, mode, position, &grid, seed).unwrap();
                prop_assert_eq!(&points[0].report, &full_eval(&Sequential, &corpus, &ParrotConfig::full()).unwrap());
                prop_assert!(points.windows(2).all(|w| w[0].realized_ratio <= w[1].realized_ratio));
                let min_len = corpus.entries().iter().map(|e| e.input.len()).min().unwrap() as f64;
                for p in &points {
                    prop_assert!((p.realized_ratio - p.nominal_ratio).abs() <= 0.5 / min_len + 1e-9);
                }
                if mode == ParrotMode::Replace && position != Position::Random {
                    prop_assert!(points.windows(2).all(|w| w[1].report.bleu.value <= w[0].report.bleu.value));
                    prop_assert!(points.windows(2).all(|w| w[1].report.ter.edits >= w[0].report.ter.edits));
                }
            }
        }
    }

    #[test]
    fn sampled_eval_is_reproducible(corpus in corpus_strategy(), seed in any::<u64>()) {
        let size = corpus.len().div_ceil(2);
        let a = sampled_eval(&Sequential, &corpus, size, 6, seed).unwrap();
        let b = sampled_eval(&Striped(3), &corpus, size, 6, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for s in &a.stats {
            prop_assert!(s.min <= s.average && s.average <= s.max);
            prop_assert!(s.stddev.unwrap() >= 0.0);
        }
    }
}
