//! Multi-reference paraphrase-evaluation metrics and parroting baselines.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over in-memory values: file formats, the command line and
//! thread pools live in the `parroteval` companion crate.
//!
//! - [`text`]: normalization, tokenization and Porter stemming.
//! - [`metrics`]: corpus/sentence BLEU, METEOR (exact + stem stages) and TER
//!   with greedy block shifts.
//! - [`parrot`]: full and partial (cut / replace) parroting transforms.
//! - [`corpus`]: reference grouping, histograms and seeded test-set sampling.
//! - [`experiments`]: full evaluation, sampled evaluation, reference-count
//!   curves, modification sweeps and BLEU retrieval buckets.

#![no_std]
#![deny(unsafe_code)]
// n-gram and DP loops index several buffers at once
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod corpus;
mod error;
pub mod exact;
pub mod experiments;
pub mod metrics;
pub mod parrot;
mod rng;
pub mod text;

pub use corpus::{Corpus, Ingested, ParaphraseEntry, ReferenceHistogram, Source};
pub use error::{Error, Result};
pub use exact::ExactSum;
pub use experiments::{Executor, Sequential};
pub use metrics::{BleuScore, MeteorScore, MetricReport, TerScore};
pub use parrot::{ParrotConfig, ParrotMode, ParrotOutput, Position};
pub use text::{Token, TokenSeq};
