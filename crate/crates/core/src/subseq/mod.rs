//! Constructive heapable-subsequence strategies.

mod banding;
mod bootstrap;
mod online;
mod relrank;

use thiserror::Error;

use crate::greedy::GreedyState;
use crate::tree::HeapTree;

pub use banding::{banding_lchs_online, make_band_schedule, relrank_banding_lchs, BandLevel, BandSchedule};
pub use bootstrap::{thm4_bootstrap, thm4_two_phase, BOOTSTRAP_MIN_N};
pub use online::{online_lhs_uniform, online_lis_uniform, OnlineLis};
pub use relrank::{
    calibration_len, decode_relative_ranks, relrank_online_lhs, relrank_online_lis, to_relative_ranks, uniform_relative_ranks,
    Calibration,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubseqError {
    #[error("cannot build a heap from an empty chain")]
    EmptyChain,
    #[error("sequence of length {n} is too short, need at least {min}")]
    TooShort { n: usize, min: usize },
    #[error("epsilon {0} outside (0, 1]")]
    BadEpsilon(f64),
    #[error("stream of length {len} exceeds the horizon {n}")]
    PastHorizon { len: usize, n: usize },
    #[error("relative rank at index {index} is {value}, outside 1..={bound}")]
    BadRelativeRank { index: usize, value: u32, bound: usize },
}

/// What to do when a greedy phase meets an element with no slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyMode {
    /// Stop the phase.
    #[default]
    Halt,
    /// Drop the element and continue.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseStat {
    pub label: String,
    pub examined: usize,
    pub placed: usize,
}

impl PhaseStat {
    pub fn new(label: impl Into<String>, examined: usize, placed: usize) -> Self {
        PhaseStat {
            label: label.into(),
            examined,
            placed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyResult<K> {
    pub tree: HeapTree<K>,
    /// Source indices of the tree's nodes, ascending.
    pub kept: Vec<usize>,
    /// Source elements not kept.
    pub skipped: usize,
    pub phase_stats: Vec<PhaseStat>,
    /// Source indices accepted at the moment they were seen, in order. For
    /// online strategies this is the decision trace; `kept` is a subset.
    pub accepted: Vec<usize>,
}

impl<K> StrategyResult<K> {
    pub(crate) fn new(tree: HeapTree<K>, n: usize, accepted: Vec<usize>, phase_stats: Vec<PhaseStat>) -> Self {
        let mut kept: Vec<usize> = tree.nodes().iter().map(|node| node.seq_index).collect();
        kept.sort_unstable();
        StrategyResult {
            skipped: n.saturating_sub(kept.len()),
            tree,
            kept,
            phase_stats,
            accepted,
        }
    }

    pub fn placed(&self) -> usize {
        self.kept.len()
    }

    pub fn phase(&self, label: &str) -> Option<&PhaseStat> {
        self.phase_stats.iter().find(|p| p.label == label)
    }
}

/// Indices of a longest strictly increasing subsequence.
pub fn lis_patience<K: Ord>(seq: &[K]) -> Vec<usize> {
    // tops[p] is the index on top of pile p; back[i] the top of pile p-1
    // when i was dealt.
    let mut tops: Vec<usize> = Vec::new();
    let mut back: Vec<Option<usize>> = Vec::with_capacity(seq.len());
    for (i, x) in seq.iter().enumerate() {
        let pile = tops.partition_point(|&t| seq[t] < *x);
        back.push(pile.checked_sub(1).map(|p| tops[p]));
        if pile == tops.len() {
            tops.push(i);
        } else {
            tops[pile] = i;
        }
    }
    let mut chain = Vec::with_capacity(tops.len());
    let mut cur = tops.last().copied();
    while let Some(i) = cur {
        chain.push(i);
        cur = back[i];
    }
    chain.reverse();
    chain
}

/// Largest `2^d - 1` not above `len`.
pub(crate) fn perfect_prefix(len: usize) -> usize {
    if len == 0 {
        0
    } else {
        (1usize << (usize::BITS - 1 - (len + 1).leading_zeros())) - 1
    }
}

/// Arranges an increasing chain, in level order, as a perfect heap. The
/// chain is cut to the largest `2^d - 1` prefix.
pub fn seed_heap_from_chain<K: Ord + Clone>(chain: &[(K, usize)]) -> Result<HeapTree<K>, SubseqError> {
    if chain.is_empty() {
        return Err(SubseqError::EmptyChain);
    }
    let len = perfect_prefix(chain.len());
    Ok(HeapTree::from_positions(
        chain[..len]
            .iter()
            .enumerate()
            .map(|(pos, (k, idx))| (pos, k.clone(), *idx)),
    )
    .expect("level order fills parents first"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FillStats {
    pub examined: usize,
    pub placed: usize,
    /// Source index of the element that stopped a `Halt` fill.
    pub halted_at: Option<usize>,
}

pub(crate) fn fill<K: Ord + Clone>(
    state: &mut GreedyState<K>,
    stream: impl IntoIterator<Item = (K, usize)>,
    mode: GreedyMode,
    accepted: &mut Vec<usize>,
) -> FillStats {
    let mut stats = FillStats::default();
    for (x, idx) in stream {
        stats.examined += 1;
        if state.insert(x, idx).is_ok() {
            stats.placed += 1;
            accepted.push(idx);
        } else if mode == GreedyMode::Halt {
            stats.halted_at = Some(idx);
            break;
        }
    }
    stats
}

/// Greedily extends `seed` with `stream`. `n` is the source length used for
/// the skipped count.
pub fn greedy_fill<K: Ord + Clone>(
    seed: HeapTree<K>,
    stream: impl IntoIterator<Item = (K, usize)>,
    mode: GreedyMode,
    n: usize,
) -> StrategyResult<K> {
    let mut state = GreedyState::from_tree(seed);
    let mut accepted = Vec::new();
    let stats = fill(&mut state, stream, mode, &mut accepted);
    StrategyResult::new(
        state.into_tree(),
        n,
        accepted,
        vec![PhaseStat::new("fill", stats.examined, stats.placed)],
    )
}

/// Ascending blocks of descending values: the number of blocks `B` is the
/// smallest with `B(2^B - 1) >= n`, and `n` is rounded down to a multiple of
/// `B`. Returns the sequence and `B`.
pub fn thm6_blocks(n: usize) -> (Vec<i64>, usize) {
    let mut b = 1usize;
    while 1usize.checked_shl(b as u32).is_some_and(|p| b * (p - 1) < n) {
        b += 1;
    }
    let k = n / b;
    let mut seq = Vec::with_capacity(k * b);
    for j in 1..=b {
        seq.extend(((j - 1) * k + 1..=j * k).rev().map(|v| v as i64));
    }
    (seq, b)
}
