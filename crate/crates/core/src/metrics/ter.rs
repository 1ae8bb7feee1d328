//! Translation Edit Rate with greedy block shifts.
//!
//! The shift search follows the usual tercom rules: a candidate shift moves
//! a hypothesis span that exactly matches a reference span, at least one
//! word of each side must currently be mis-aligned, and the destination is
//! read off the current Levenshtein alignment. At every step the candidate
//! that lowers the edit distance most is applied (ties: longer span, then
//! earlier span, then earlier destination); the loop stops when no shift
//! lowers it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::text::{Token, TokenSeq};
use crate::{Error, Result};

/// Largest input the exhaustive oracle accepts.
pub const ORACLE_MAX_LEN: usize = 8;
/// Shift depth explored by the exhaustive oracle.
pub const ORACLE_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TerScore {
    /// Percent; can exceed 100.
    pub value: f64,
    pub edits: u64,
    pub avg_ref_len: f64,
    /// Shifts among `edits` for the chosen reference.
    pub shifts: u64,
    /// Reference with the fewest edits (first on ties).
    pub reference_index: usize,
}

/// Edit count against one reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftEdits {
    pub shifts: usize,
    pub residual: usize,
}

impl ShiftEdits {
    pub fn total(&self) -> usize {
        self.shifts + self.residual
    }
}

/// TER of `hypothesis` against all `references`: the fewest edits over the
/// references divided by their mean length.
pub fn ter(hypothesis: &TokenSeq, references: &[TokenSeq]) -> Result<TerScore> {
    if references.is_empty() {
        return Err(Error::EntryWithoutReferences);
    }
    if references.iter().all(|r| r.is_empty()) {
        return Err(Error::DegenerateReferenceSet);
    }
    let mut vocab = Interner::default();
    let hyp = vocab.ids(hypothesis);
    let mut best: Option<(ShiftEdits, usize)> = None;
    for (index, reference) in references.iter().enumerate() {
        let edits = greedy_shift_edits(&hyp, &vocab.ids(reference));
        if best.is_none_or(|(b, _)| edits.total() < b.total()) {
            best = Some((edits, index));
        }
    }
    let (edits, reference_index) = best.expect("references is non-empty");
    let avg_ref_len = references.iter().map(|r| r.len()).sum::<usize>() as f64 / references.len() as f64;
    let total = edits.total() as u64;
    Ok(TerScore {
        value: 100.0 * total as f64 / avg_ref_len,
        edits: total,
        avg_ref_len,
        shifts: edits.shifts as u64,
        reference_index,
    })
}

/// Greedy shift-augmented edit count of `hypothesis` against one reference.
pub fn shift_edits(hypothesis: &TokenSeq, reference: &TokenSeq) -> ShiftEdits {
    let mut vocab = Interner::default();
    let hyp = vocab.ids(hypothesis);
    greedy_shift_edits(&hyp, &vocab.ids(reference))
}

#[derive(Default)]
struct Interner<'a> {
    ids: BTreeMap<&'a str, u32>,
}

impl<'a> Interner<'a> {
    fn ids(&mut self, seq: &'a [Token]) -> Vec<u32> {
        seq.iter()
            .map(|t| {
                let next = self.ids.len() as u32;
                *self.ids.entry(t.as_str()).or_insert(next)
            })
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Match,
    Sub,
    /// hypothesis word with no reference counterpart
    Extra,
    /// reference word missing from the hypothesis
    Missing,
}

/// Levenshtein distance with one optimal edit script, in order.
fn levenshtein_trace(hyp: &[u32], reference: &[u32]) -> (usize, Vec<Op>) {
    let (n, m) = (hyp.len(), reference.len());
    let width = m + 1;
    let mut dp = alloc::vec![0usize; (n + 1) * width];
    for i in 0..=n {
        dp[i * width] = i;
    }
    for j in 0..=m {
        dp[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = dp[(i - 1) * width + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            let up = dp[(i - 1) * width + j] + 1;
            let left = dp[i * width + j - 1] + 1;
            dp[i * width + j] = diag.min(up).min(left);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let same = hyp[i - 1] == reference[j - 1];
            if dp[(i - 1) * width + j - 1] + usize::from(!same) == here {
                ops.push(if same { Op::Match } else { Op::Sub });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[(i - 1) * width + j] + 1 == here {
            ops.push(Op::Extra);
            i -= 1;
        } else {
            ops.push(Op::Missing);
            j -= 1;
        }
    }
    ops.reverse();
    (dp[n * width + m], ops)
}

/// Per-position error flags and, for each reference position, the
/// hypothesis position it is aligned to (`-1` before the first word).
struct AlignmentView {
    hyp_err: Vec<bool>,
    ref_err: Vec<bool>,
    ref_to_hyp: Vec<isize>,
}

impl AlignmentView {
    fn from_ops(ops: &[Op]) -> Self {
        let mut view = AlignmentView { hyp_err: Vec::new(), ref_err: Vec::new(), ref_to_hyp: Vec::new() };
        let mut h: isize = -1;
        for op in ops {
            match op {
                Op::Match | Op::Sub => {
                    h += 1;
                    let err = *op == Op::Sub;
                    view.hyp_err.push(err);
                    view.ref_err.push(err);
                    view.ref_to_hyp.push(h);
                }
                Op::Extra => {
                    h += 1;
                    view.hyp_err.push(true);
                }
                Op::Missing => {
                    view.ref_err.push(true);
                    view.ref_to_hyp.push(h);
                }
            }
        }
        view
    }
}

/// Move `words[start..start + len]` so that it begins before the original
/// index `target`.
fn perform_shift(words: &[u32], start: usize, len: usize, target: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(words.len());
    if target < start {
        out.extend_from_slice(&words[..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..start]);
        out.extend_from_slice(&words[start + len..]);
    } else if target > start + len {
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..]);
    } else {
        let end = (len + target).min(words.len());
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..end]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[end..]);
    }
    out
}

fn greedy_shift_edits(hyp: &[u32], reference: &[u32]) -> ShiftEdits {
    let mut current = hyp.to_vec();
    let mut shifts = 0;
    loop {
        let (distance, ops) = levenshtein_trace(&current, reference);
        if distance == 0 {
            return ShiftEdits { shifts, residual: 0 };
        }
        match best_shift(&current, reference, distance, &AlignmentView::from_ops(&ops)) {
            Some(next) => {
                current = next;
                shifts += 1;
            }
            None => return ShiftEdits { shifts, residual: distance },
        }
    }
}

/// (gain, span length, -start, -target); the highest wins.
type ShiftRank = (usize, usize, isize, isize);

fn best_shift(current: &[u32], reference: &[u32], distance: usize, view: &AlignmentView) -> Option<Vec<u32>> {
    let mut best: Option<(ShiftRank, Vec<u32>)> = None;
    for start_h in 0..current.len() {
        for start_r in 0..reference.len() {
            let mut len = 0;
            while start_h + len < current.len()
                && start_r + len < reference.len()
                && current[start_h + len] == reference[start_r + len]
            {
                len += 1;
                if !view.hyp_err[start_h..start_h + len].iter().any(|&e| e) {
                    continue;
                }
                if !view.ref_err[start_r..start_r + len].iter().any(|&e| e) {
                    continue;
                }
                let aligned = view.ref_to_hyp[start_r];
                if start_h as isize <= aligned && aligned < (start_h + len) as isize {
                    continue;
                }
                let mut prev_target = None;
                for offset in -1..len as isize {
                    let anchor = start_r as isize + offset;
                    let target = if anchor < 0 { 0 } else { (view.ref_to_hyp[anchor as usize] + 1) as usize };
                    if prev_target == Some(target) {
                        continue;
                    }
                    prev_target = Some(target);
                    let shifted = perform_shift(current, start_h, len, target);
                    let new_distance = levenshtein_trace(&shifted, reference).0;
                    if new_distance >= distance {
                        continue;
                    }
                    let rank = (distance - new_distance, len, -(start_h as isize), -(target as isize));
                    if best.as_ref().is_none_or(|(b, _)| rank > *b) {
                        best = Some((rank, shifted));
                    }
                }
            }
        }
    }
    best.map(|(_, shifted)| shifted)
}

/// Exact minimum of `shifts + levenshtein` over every sequence of at most
/// [`ORACLE_DEPTH`] unrestricted block moves. Exponential; meant for
/// checking the greedy search on inputs of at most `max_len` tokens.
pub fn ter_oracle(hypothesis: &TokenSeq, reference: &TokenSeq, max_len: usize) -> Result<usize> {
    let max = max_len.min(ORACLE_MAX_LEN);
    for len in [hypothesis.len(), reference.len()] {
        if len > max {
            return Err(Error::OracleInputTooLong { len, max });
        }
    }
    let mut vocab = Interner::default();
    let hyp = vocab.ids(hypothesis);
    let reference = vocab.ids(reference);
    Ok(oracle_min_edits(&hyp, &reference, ORACLE_DEPTH))
}

fn oracle_min_edits(hyp: &[u32], reference: &[u32], depth: usize) -> usize {
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    seen.insert(hyp.to_vec());
    let mut frontier = alloc::vec![hyp.to_vec()];
    let mut best = plain_levenshtein(hyp, reference);
    for shifts in 1..=depth {
        if shifts >= best {
            break;
        }
        let mut next = Vec::new();
        for words in &frontier {
            for_each_block_move(words, |moved| {
                if seen.insert(moved.clone()) {
                    next.push(moved);
                }
            });
        }
        for words in &next {
            best = best.min(shifts + plain_levenshtein(words, reference));
        }
        frontier = next;
    }
    best
}

/// Calls `f` with every sequence reachable by moving one contiguous block
/// to a different position.
fn for_each_block_move(words: &[u32], mut f: impl FnMut(Vec<u32>)) {
    let n = words.len();
    for start in 0..n {
        for end in start + 1..=n {
            let block = &words[start..end];
            let mut rest: Vec<u32> = Vec::with_capacity(n);
            rest.extend_from_slice(&words[..start]);
            rest.extend_from_slice(&words[end..]);
            for insert_at in 0..=rest.len() {
                if insert_at == start {
                    continue;
                }
                let mut moved = Vec::with_capacity(n);
                moved.extend_from_slice(&rest[..insert_at]);
                moved.extend_from_slice(block);
                moved.extend_from_slice(&rest[insert_at..]);
                f(moved);
            }
        }
    }
}

/// Two-row Levenshtein distance, kept separate from the traced version used
/// by the greedy search.
fn plain_levenshtein(a: &[u32], b: &[u32]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut row = alloc::vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(row[j] + 1);
        }
        core::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> TokenSeq {
        TokenSeq::parse(s)
    }

    #[test]
    fn identity() {
        let s = seq("a b c");
        let score = ter(&s, &[seq("x"), s.clone()]).unwrap();
        assert_eq!((score.edits, score.value), (0, 0.0));
        assert_eq!(score.reference_index, 1);
    }

    #[test]
    fn one_deletion() {
        let score = ter(&seq("a b c"), &[seq("a c")]).unwrap();
        assert_eq!((score.edits, score.avg_ref_len, score.value), (1, 2.0, 50.0));
    }

    #[test]
    fn one_shift() {
        let score = ter(&seq("a c d b"), &[seq("a b c d")]).unwrap();
        assert_eq!((score.edits, score.shifts, score.value), (1, 1, 25.0));
    }

    #[test]
    fn average_reference_length_normalizes() {
        let score = ter(&seq("a b"), &[seq("a b x y"), seq("a b")]).unwrap();
        assert_eq!((score.edits, score.avg_ref_len, score.value), (0, 3.0, 0.0));
        let score = ter(&seq("a b c d"), &[seq("a b"), seq("a b c")]).unwrap();
        assert_eq!(score.edits, 1);
        assert_eq!(score.value, 100.0 / 2.5);
    }

    #[test]
    fn empty_hypothesis_costs_insertions() {
        let score = ter(&TokenSeq::default(), &[seq("a b c"), seq("a")]).unwrap();
        assert_eq!((score.edits, score.value), (1, 50.0));
    }

    #[test]
    fn degenerate_references() {
        assert_eq!(ter(&seq("a"), &[]).unwrap_err(), Error::EntryWithoutReferences);
        assert_eq!(ter(&seq("a"), &[TokenSeq::default()]).unwrap_err(), Error::DegenerateReferenceSet);
        let score = ter(&seq("a b"), &[TokenSeq::default(), seq("a b c d")]).unwrap();
        assert_eq!((score.edits, score.avg_ref_len), (2, 2.0));
    }

    #[test]
    fn oracle_small_cases() {
        assert_eq!(ter_oracle(&seq("a b"), &seq("a b"), 8).unwrap(), 0);
        assert_eq!(ter_oracle(&seq("b a"), &seq("a b"), 8).unwrap(), 1);
        assert_eq!(ter_oracle(&seq("a c d b"), &seq("a b c d"), 8).unwrap(), 1);
        assert_eq!(
            ter_oracle(&seq("a b c d e f g h i"), &seq("a"), 8).unwrap_err(),
            Error::OracleInputTooLong { len: 9, max: 8 }
        );
    }

    #[test]
    fn shift_helper_moves_blocks() {
        let w = [0, 1, 2, 3, 4];
        assert_eq!(perform_shift(&w, 3, 1, 1), [0, 3, 1, 2, 4]);
        assert_eq!(perform_shift(&w, 0, 2, 5), [2, 3, 4, 0, 1]);
        assert_eq!(plain_levenshtein(&[0, 1, 2], &[0, 2]), 1);
        assert_eq!(levenshtein_trace(&[0, 1, 2], &[0, 2]).0, 1);
    }

    #[test]
    fn multi_word_block_shift() {
        let e = shift_edits(&seq("d e f a b c"), &seq("a b c d e f"));
        assert_eq!(e, ShiftEdits { shifts: 1, residual: 0 });
    }
}
