//! METEOR with exact and Porter-stem matching stages.
//!
//! Each stage picks, among maximum-cardinality one-to-one matchings of the
//! still-unaligned words, one with the fewest crossing links (links from
//! earlier stages included). Ties go to the first candidate in enumeration
//! order, which pairs repeated words left to right.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::text::{Token, TokenSeq};
use crate::{Error, Result};

/// Upper bound on candidate matchings enumerated exhaustively per stage.
/// Larger stages fall back to per-word-type coordinate descent.
const EXHAUSTIVE_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeteorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams { alpha: 0.9, beta: 3.0, gamma: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeteorScore {
    /// 0..=100.
    pub value: f64,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub matches: usize,
    pub chunks: usize,
    /// Index of the best-scoring reference.
    pub reference_index: usize,
}

/// `(hypothesis index, reference index)` links sorted by hypothesis index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub links: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn chunks(&self) -> usize {
        let mut chunks = 0;
        let mut prev: Option<(usize, usize)> = None;
        for &(h, r) in &self.links {
            match prev {
                Some((ph, pr)) if h == ph + 1 && r == pr + 1 => {}
                _ => chunks += 1,
            }
            prev = Some((h, r));
        }
        chunks
    }

    pub fn crossings(&self) -> usize {
        crossings(&self.links)
    }
}

fn crossings(links: &[(usize, usize)]) -> usize {
    let mut count = 0;
    for (i, &(h1, r1)) in links.iter().enumerate() {
        for &(h2, r2) in &links[i + 1..] {
            if (h1 < h2) != (r1 < r2) {
                count += 1;
            }
        }
    }
    count
}

/// Best METEOR score of `hypothesis` over `references`, default parameters.
pub fn meteor(hypothesis: &TokenSeq, references: &[TokenSeq]) -> Result<MeteorScore> {
    meteor_with(hypothesis, references, &MeteorParams::default())
}

pub fn meteor_with(hypothesis: &TokenSeq, references: &[TokenSeq], params: &MeteorParams) -> Result<MeteorScore> {
    if references.is_empty() {
        return Err(Error::EntryWithoutReferences);
    }
    let hyp_stems: Vec<Token> = hypothesis.iter().map(Token::stem).collect();
    let mut best: Option<MeteorScore> = None;
    for (index, reference) in references.iter().enumerate() {
        let ref_stems: Vec<Token> = reference.iter().map(Token::stem).collect();
        let alignment = align_with_stems(hypothesis, reference, &hyp_stems, &ref_stems);
        let mut score = score_alignment(&alignment, hypothesis.len(), reference.len(), params);
        score.reference_index = index;
        if best.is_none_or(|b| score.value > b.value) {
            best = Some(score);
        }
    }
    Ok(best.unwrap_or_else(|| zero_score(0)))
}

/// METEOR against a single reference.
pub fn meteor_single(hypothesis: &TokenSeq, reference: &TokenSeq, params: &MeteorParams) -> MeteorScore {
    let alignment = align(hypothesis, reference);
    score_alignment(&alignment, hypothesis.len(), reference.len(), params)
}

fn zero_score(reference_index: usize) -> MeteorScore {
    MeteorScore {
        value: 0.0,
        precision: 0.0,
        recall: 0.0,
        fmean: 0.0,
        penalty: 0.0,
        matches: 0,
        chunks: 0,
        reference_index,
    }
}

pub fn score_alignment(alignment: &Alignment, hyp_len: usize, ref_len: usize, params: &MeteorParams) -> MeteorScore {
    let matches = alignment.links.len();
    if matches == 0 {
        return zero_score(0);
    }
    let chunks = alignment.chunks();
    let precision = matches as f64 / hyp_len as f64;
    let recall = matches as f64 / ref_len as f64;
    let fmean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
    let penalty = params.gamma * libm::pow(chunks as f64 / matches as f64, params.beta);
    MeteorScore {
        value: 100.0 * fmean * (1.0 - penalty),
        precision,
        recall,
        fmean,
        penalty,
        matches,
        chunks,
        reference_index: 0,
    }
}

/// Exact-match stage followed by a stem-match stage on the leftovers.
pub fn align(hypothesis: &TokenSeq, reference: &TokenSeq) -> Alignment {
    let hyp_stems: Vec<Token> = hypothesis.iter().map(Token::stem).collect();
    let ref_stems: Vec<Token> = reference.iter().map(Token::stem).collect();
    align_with_stems(hypothesis, reference, &hyp_stems, &ref_stems)
}

fn align_with_stems(hypothesis: &[Token], reference: &[Token], hyp_stems: &[Token], ref_stems: &[Token]) -> Alignment {
    let mut hyp_used = alloc::vec![false; hypothesis.len()];
    let mut ref_used = alloc::vec![false; reference.len()];
    let mut links = Vec::new();
    align_stage(hypothesis, reference, &mut hyp_used, &mut ref_used, &mut links);
    align_stage(hyp_stems, ref_stems, &mut hyp_used, &mut ref_used, &mut links);
    links.sort_unstable();
    Alignment { links }
}

/// Candidate pairings for one word type: every way to choose which
/// occurrences on the longer side participate, each paired in order with
/// the shorter side.
struct Group {
    hyp: Vec<usize>,
    refs: Vec<usize>,
    options: u64,
}

impl Group {
    fn links(&self, option: u64, out: &mut Vec<(usize, usize)>) {
        let (short, long, hyp_is_short) = if self.hyp.len() <= self.refs.len() {
            (&self.hyp, &self.refs, true)
        } else {
            (&self.refs, &self.hyp, false)
        };
        let chosen = nth_combination(long.len(), short.len(), option);
        for (&s, &l) in short.iter().zip(chosen.iter().map(|&i| &long[i])) {
            out.push(if hyp_is_short { (s, l) } else { (l, s) });
        }
    }
}

fn align_stage(
    hyp_keys: &[Token],
    ref_keys: &[Token],
    hyp_used: &mut [bool],
    ref_used: &mut [bool],
    links: &mut Vec<(usize, usize)>,
) {
    let mut by_key: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, key) in hyp_keys.iter().enumerate().filter(|(i, _)| !hyp_used[*i]) {
        by_key.entry(key.as_str()).or_default().0.push(i);
    }
    for (j, key) in ref_keys.iter().enumerate().filter(|(j, _)| !ref_used[*j]) {
        if let Some(slot) = by_key.get_mut(key.as_str()) {
            slot.1.push(j);
        }
    }
    let groups: Vec<Group> = by_key
        .into_values()
        .filter(|(h, r)| !h.is_empty() && !r.is_empty())
        .map(|(hyp, refs)| {
            let options = binomial(hyp.len().max(refs.len()), hyp.len().min(refs.len()));
            Group { hyp, refs, options }
        })
        .collect();
    if groups.is_empty() {
        return;
    }

    let choice = choose_options(&groups, links);
    let fixed = links.len();
    for (group, &option) in groups.iter().zip(&choice) {
        group.links(option, links);
    }
    for &(h, r) in &links[fixed..] {
        hyp_used[h] = true;
        ref_used[r] = true;
    }
}

fn choose_options(groups: &[Group], fixed: &[(usize, usize)]) -> Vec<u64> {
    let mut choice = alloc::vec![0u64; groups.len()];
    let mut scratch = Vec::new();
    let mut cost = |choice: &[u64]| {
        scratch.clear();
        scratch.extend_from_slice(fixed);
        for (group, &option) in groups.iter().zip(choice) {
            group.links(option, &mut scratch);
        }
        crossings(&scratch)
    };

    let total = groups.iter().try_fold(1u64, |acc, g| acc.checked_mul(g.options)).unwrap_or(u64::MAX);
    if total == 1 {
        return choice;
    }

    if total <= EXHAUSTIVE_LIMIT {
        let mut best = (cost(&choice), choice.clone());
        // odometer over all option combinations, first group fastest
        loop {
            let mut carry = true;
            for (slot, group) in choice.iter_mut().zip(groups) {
                *slot += 1;
                if *slot < group.options {
                    carry = false;
                    break;
                }
                *slot = 0;
            }
            if carry {
                return best.1;
            }
            let c = cost(&choice);
            if c < best.0 {
                best = (c, choice.clone());
            }
        }
    }

    let mut current = cost(&choice);
    loop {
        let mut improved = false;
        for g in 0..groups.len() {
            if groups[g].options == 1 || groups[g].options > EXHAUSTIVE_LIMIT {
                continue;
            }
            let keep = choice[g];
            let mut best = (current, keep);
            for option in 0..groups[g].options {
                if option == keep {
                    continue;
                }
                choice[g] = option;
                let c = cost(&choice);
                if c < best.0 {
                    best = (c, option);
                }
            }
            choice[g] = best.1;
            if best.0 < current {
                current = best.0;
                improved = true;
            }
        }
        if !improved || current == 0 {
            return choice;
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u64) {
            Some(v) => v / (i as u64 + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// The `index`-th k-subset of `0..n` in lexicographic order.
fn nth_combination(n: usize, k: usize, mut index: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        loop {
            let with_next = binomial(n - next - 1, remaining - 1);
            if index < with_next {
                break;
            }
            index -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}
