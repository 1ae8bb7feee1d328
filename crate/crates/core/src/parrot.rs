//! Parroting baselines: the input itself as the "generated" paraphrase,
//! optionally with a fraction of its words cut or replaced.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rng;
use crate::text::{Token, TokenSeq};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ParrotMode {
    Full,
    Cut,
    Replace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Position {
    Head,
    Tail,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParrotConfig {
    pub mode: ParrotMode,
    pub position: Position,
    /// Fraction of input words to modify; ignored in full mode.
    pub ratio: f64,
    pub seed: u64,
}

impl ParrotConfig {
    pub fn full() -> Self {
        ParrotConfig { mode: ParrotMode::Full, position: Position::Head, ratio: 0.0, seed: 0 }
    }

    pub fn new(mode: ParrotMode, position: Position, ratio: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidRatio(ratio));
        }
        let ratio = if mode == ParrotMode::Full { 0.0 } else { ratio };
        Ok(ParrotConfig { mode, position, ratio, seed })
    }
}

impl Default for ParrotConfig {
    fn default() -> Self {
        ParrotConfig::full()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParrotOutput {
    pub output: TokenSeq,
    /// `modified_positions.len() / input.len()`, 0 for empty input.
    pub modified_ratio: f64,
    /// Sorted indices into the input.
    pub modified_positions: Vec<usize>,
}

pub fn full_parrot(input: &TokenSeq) -> ParrotOutput {
    ParrotOutput { output: input.clone(), modified_ratio: 0.0, modified_positions: Vec::new() }
}

/// Dispatch on `config.mode`. `entry_index` keys the random position draw.
pub fn apply(
    input: &TokenSeq,
    references: &[TokenSeq],
    config: &ParrotConfig,
    entry_index: u64,
) -> Result<ParrotOutput> {
    match config.mode {
        ParrotMode::Full => Ok(full_parrot(input)),
        _ => partial_parrot(input, references, config, entry_index),
    }
}

/// Cut or replace `round_half_up(ratio * len)` input words chosen from the
/// head, the tail, or at random.
///
/// Replacement tokens are `oov0`, `oov1`, ...: each is the next counter
/// value whose token appears neither in the input nor in any reference.
pub fn partial_parrot(
    input: &TokenSeq,
    references: &[TokenSeq],
    config: &ParrotConfig,
    entry_index: u64,
) -> Result<ParrotOutput> {
    if config.mode == ParrotMode::Full {
        return Err(Error::NotPartialMode);
    }
    if !(0.0..=1.0).contains(&config.ratio) {
        return Err(Error::InvalidRatio(config.ratio));
    }
    if config.mode == ParrotMode::Replace && references.is_empty() {
        return Err(Error::EntryWithoutReferences);
    }

    let len = input.len();
    let k = modified_count(config.ratio, len);
    let positions = select_positions(len, k, config.position, config.seed, entry_index);

    let output = match config.mode {
        ParrotMode::Cut => {
            let mut keep = alloc::vec![true; len];
            for &p in &positions {
                keep[p] = false;
            }
            input.iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t.clone()).collect()
        }
        _ => {
            let taken: BTreeSet<&str> =
                input.iter().chain(references.iter().flat_map(|r| r.iter())).map(Token::as_str).collect();
            let mut tokens = input.tokens().to_vec();
            let mut counter = 0u64;
            for &p in &positions {
                let fresh = loop {
                    let candidate = format!("oov{counter}");
                    counter += 1;
                    if !taken.contains(candidate.as_str()) {
                        break candidate;
                    }
                };
                tokens[p] = Token::new(fresh).expect("oov tokens contain no whitespace");
            }
            TokenSeq::new(tokens)
        }
    };

    Ok(ParrotOutput {
        output,
        modified_ratio: if len == 0 { 0.0 } else { positions.len() as f64 / len as f64 },
        modified_positions: positions,
    })
}

/// `round_half_up(ratio * len)`. The small slack absorbs binary rounding
/// of products such as `0.3 * 5`.
pub fn modified_count(ratio: f64, len: usize) -> usize {
    let k = libm::floor(ratio * len as f64 + 0.5 + 1e-9) as usize;
    k.min(len)
}

fn select_positions(len: usize, k: usize, position: Position, seed: u64, entry_index: u64) -> Vec<usize> {
    match position {
        Position::Head => (0..k).collect(),
        Position::Tail => (len - k..len).collect(),
        Position::Random => {
            let mut rng = rng::keyed(seed, entry_index);
            let mut picked = rand::seq::index::sample(&mut rng, len, k).into_vec();
            picked.sort_unstable();
            picked
        }
    }
}

impl fmt::Display for ParrotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParrotMode::Full => "full",
            ParrotMode::Cut => "cut",
            ParrotMode::Replace => "replace",
        })
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Position::Head => "head",
            Position::Tail => "tail",
            Position::Random => "random",
        })
    }
}

impl FromStr for ParrotMode {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "full" => Ok(ParrotMode::Full),
            "cut" => Ok(ParrotMode::Cut),
            "replace" => Ok(ParrotMode::Replace),
            other => Err(format!("unknown mode {other:?} (expected full, cut or replace)")),
        }
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "head" => Ok(Position::Head),
            "tail" => Ok(Position::Tail),
            "random" => Ok(Position::Random),
            other => Err(format!("unknown position {other:?} (expected head, tail or random)")),
        }
    }
}
