//! Exponential-time reference searches.
//!
//! Everything here is slow on purpose and kept independent of the fast
//! deciders where practical. Searches count node expansions against a
//! [`SearchBudget`] and report [`Exhausted`] instead of guessing.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::greedy::GreedyState;
use crate::tree::HeapTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 20_000_000;

    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes }
    }

    pub fn unlimited() -> Self {
        SearchBudget { max_nodes: u64::MAX }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: Self::DEFAULT_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget exhausted after {expanded} node expansions")]
pub struct Exhausted {
    pub expanded: u64,
}

struct Counter {
    expanded: u64,
    cap: u64,
}

impl Counter {
    fn new(budget: SearchBudget) -> Self {
        Counter {
            expanded: 0,
            cap: budget.max_nodes,
        }
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.expanded += 1;
        if self.expanded > self.cap {
            Err(Exhausted {
                expanded: self.expanded - 1,
            })
        } else {
            Ok(())
        }
    }
}

/// Visits every heap that witnesses `seq`, built by trying every free slot
/// for every element. Children are unordered, so each witness is visited
/// once. `visit` returns `false` to stop early. Returns the number of
/// witnesses visited.
pub fn for_each_witness<K: Ord + Clone>(
    seq: &[K],
    budget: SearchBudget,
    mut visit: impl FnMut(&HeapTree<K>) -> bool,
) -> Result<u64, Exhausted> {
    if seq.is_empty() {
        return Ok(0);
    }
    let mut counter = Counter::new(budget);
    let mut tree = HeapTree::with_root(seq[0].clone(), 0);
    let mut found = 0;
    witness_dfs(seq, 1, &mut tree, &mut counter, &mut found, &mut visit)?;
    Ok(found)
}

fn witness_dfs<K: Ord + Clone>(
    seq: &[K],
    i: usize,
    tree: &mut HeapTree<K>,
    counter: &mut Counter,
    found: &mut u64,
    visit: &mut impl FnMut(&HeapTree<K>) -> bool,
) -> Result<bool, Exhausted> {
    counter.tick()?;
    if i == seq.len() {
        *found += 1;
        return Ok(visit(tree));
    }
    let x = &seq[i];
    let parents: Vec<_> = tree
        .ids()
        .filter(|&id| {
            let node = tree.node(id);
            node.child_count() < 2 && node.value <= *x
        })
        .collect();
    for p in parents {
        tree.attach_next(p, x.clone(), i).expect("parent has a free slot");
        let go_on = witness_dfs(seq, i + 1, tree, counter, found, visit)?;
        tree.pop_leaf();
        if !go_on {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Heapability by plain backtracking over slot choices.
pub fn bt_heapable<K: Ord + Clone>(seq: &[K], budget: SearchBudget) -> Result<bool, Exhausted> {
    if seq.is_empty() {
        return Ok(true);
    }
    // (value, open slots) per placed element.
    let mut placed: Vec<(K, u8)> = vec![(seq[0].clone(), 2)];
    let mut counter = Counter::new(budget);
    bt_dfs(seq, 1, &mut placed, &mut counter)
}

fn bt_dfs<K: Ord + Clone>(
    seq: &[K],
    i: usize,
    placed: &mut Vec<(K, u8)>,
    counter: &mut Counter,
) -> Result<bool, Exhausted> {
    counter.tick()?;
    if i == seq.len() {
        return Ok(true);
    }
    let x = &seq[i];
    for j in 0..placed.len() {
        if placed[j].1 == 0 || placed[j].0 > *x {
            continue;
        }
        placed[j].1 -= 1;
        placed.push((x.clone(), 2));
        let ok = bt_dfs(seq, i + 1, placed, counter)?;
        placed.pop();
        placed[j].1 += 1;
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Search for a heap of the complete shape with `size` positions.
///
/// Elements are considered in order; each may go to any empty position whose
/// parent position is filled with a value not above it (the root needs no
/// parent). Placement order need not follow level order: `0,1,0,0` only
/// fits a complete 4-node heap with the 1 in position 2.
struct CompleteSearch<'a, K> {
    seq: &'a [K],
    size: usize,
    allow_skip: bool,
    /// Sequence index held by each position.
    slot: Vec<Option<usize>>,
    counter: Counter,
    failed: HashSet<(usize, Vec<u64>, Vec<K>)>,
}

impl<'a, K: Ord + Clone + Hash> CompleteSearch<'a, K> {
    fn new(seq: &'a [K], size: usize, allow_skip: bool, budget: SearchBudget) -> Self {
        CompleteSearch {
            seq,
            size,
            allow_skip,
            slot: vec![None; size],
            counter: Counter::new(budget),
            failed: HashSet::new(),
        }
    }

    /// Filled positions plus the values of filled positions that still have
    /// an empty child inside the shape: together they fix the future.
    fn state_key(&self, i: usize) -> (usize, Vec<u64>, Vec<K>) {
        let mut mask = vec![0u64; self.size.div_ceil(64)];
        let mut frontier = Vec::new();
        for (p, s) in self.slot.iter().enumerate() {
            if let Some(idx) = s {
                mask[p / 64] |= 1 << (p % 64);
                let open = [2 * p + 1, 2 * p + 2]
                    .iter()
                    .any(|&c| c < self.size && self.slot[c].is_none());
                if open {
                    frontier.push(self.seq[*idx].clone());
                }
            }
        }
        (i, mask, frontier)
    }

    fn run(&mut self, i: usize, filled: usize) -> Result<bool, Exhausted> {
        if filled == self.size {
            return Ok(true);
        }
        if self.seq.len() - i < self.size - filled {
            return Ok(false);
        }
        let key = self.state_key(i);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        self.counter.tick()?;
        let x = &self.seq[i];
        for p in 0..self.size {
            if self.slot[p].is_some() {
                continue;
            }
            let fits = if p == 0 {
                filled == 0
            } else {
                matches!(self.slot[(p - 1) / 2], Some(q) if self.seq[q] <= *x)
            };
            if !fits {
                continue;
            }
            self.slot[p] = Some(i);
            if self.run(i + 1, filled + 1)? {
                return Ok(true);
            }
            self.slot[p] = None;
        }
        if self.allow_skip && self.run(i + 1, filled)? {
            return Ok(true);
        }
        self.failed.insert(key);
        Ok(false)
    }

    fn witness(&self) -> HeapTree<K> {
        let mut placements: Vec<(usize, K, usize)> = self
            .slot
            .iter()
            .enumerate()
            .filter_map(|(p, s)| s.map(|i| (p, self.seq[i].clone(), i)))
            .collect();
        placements.sort_by_key(|&(_, _, i)| i);
        HeapTree::from_positions(placements).expect("search fills parents first")
    }
}

/// A complete heap over all of `seq`, if one exists.
pub fn complete_witness<K: Ord + Clone + Hash>(
    seq: &[K],
    budget: SearchBudget,
) -> Result<Option<HeapTree<K>>, Exhausted> {
    if seq.is_empty() {
        return Ok(Some(HeapTree::new()));
    }
    let mut search = CompleteSearch::new(seq, seq.len(), false, budget);
    Ok(search.run(0, 0)?.then(|| search.witness()))
}

pub fn bt_completely_heapable<K: Ord + Clone + Hash>(seq: &[K], budget: SearchBudget) -> Result<bool, Exhausted> {
    complete_witness(seq, budget).map(|w| w.is_some())
}

/// Longest heapable subsequence: its length and source indices.
///
/// The state after a set of taken elements is the greedy signature of that
/// subsequence. Any tree for the same subsequence has a signature the greedy
/// one dominates, so every later element that fits some tree also fits the
/// greedy one and nothing is lost by the compression.
pub fn exact_lhs<K: Ord + Clone + Hash>(seq: &[K], budget: SearchBudget) -> Result<(usize, Vec<usize>), Exhausted> {
    let mut search = LhsSearch {
        seq,
        counter: Counter::new(budget),
        seen: HashMap::new(),
        taken: Vec::new(),
        best: Vec::new(),
    };
    search.run(0, &[])?;
    Ok((search.best.len(), search.best))
}

struct LhsSearch<'a, K> {
    seq: &'a [K],
    counter: Counter,
    seen: HashMap<(usize, Vec<K>), usize>,
    taken: Vec<usize>,
    best: Vec<usize>,
}

impl<K: Ord + Clone + Hash> LhsSearch<'_, K> {
    fn run(&mut self, i: usize, sig: &[K]) -> Result<(), Exhausted> {
        if self.taken.len() > self.best.len() {
            self.best = self.taken.clone();
        }
        if i == self.seq.len() || self.taken.len() + (self.seq.len() - i) <= self.best.len() {
            return Ok(());
        }
        let key = (i, sig.to_vec());
        match self.seen.get(&key) {
            Some(&t) if t >= self.taken.len() => return Ok(()),
            _ => {
                self.seen.insert(key, self.taken.len());
            }
        }
        self.counter.tick()?;

        let x = &self.seq[i];
        let next = if sig.is_empty() {
            Some(vec![x.clone(), x.clone()])
        } else {
            // Largest slot value not above x.
            let pos = sig.partition_point(|v| v <= x);
            (pos > 0).then(|| {
                let mut s = sig.to_vec();
                s.remove(pos - 1);
                let at = s.partition_point(|v| v <= x);
                s.insert(at, x.clone());
                s.insert(at, x.clone());
                s
            })
        };
        if let Some(s) = next {
            self.taken.push(i);
            self.run(i + 1, &s)?;
            self.taken.pop();
        }
        self.run(i + 1, sig)
    }
}

/// Longest completely heapable subsequence: its length and source indices.
pub fn exact_lchs<K: Ord + Clone + Hash>(seq: &[K], budget: SearchBudget) -> Result<(usize, Vec<usize>), Exhausted> {
    let mut spent = 0u64;
    for size in (1..=seq.len()).rev() {
        let left = SearchBudget::new(budget.max_nodes.saturating_sub(spent));
        let mut search = CompleteSearch::new(seq, size, true, left);
        let found = search.run(0, 0).map_err(|e| Exhausted {
            expanded: spent + e.expanded,
        })?;
        spent += search.counter.expanded;
        if found {
            let mut kept: Vec<usize> = search.slot.iter().flatten().copied().collect();
            kept.sort_unstable();
            return Ok((size, kept));
        }
    }
    Ok((0, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("exact enumeration supports n in 1..={max}, got {n}")]
pub struct TooLarge {
    pub n: usize,
    pub max: usize,
}

pub const MAX_EXACT_PROB_N: usize = 10;

/// Fraction of the `n!` permutations of `1..=n` that are heapable.
pub fn exact_heapable_prob(n: usize) -> Result<Ratio<u64>, TooLarge> {
    if n == 0 || n > MAX_EXACT_PROB_N {
        return Err(TooLarge {
            n,
            max: MAX_EXACT_PROB_N,
        });
    }
    Ok(Ratio::new(count_heapable_permutations(n), factorial(n)))
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of heapable permutations of `1..=n`. A failing prefix fails every
/// extension, so the enumeration prunes there.
pub fn count_heapable_permutations(n: usize) -> u64 {
    fn extend(state: &GreedyState<u8>, used: u32, depth: usize, n: usize) -> u64 {
        if depth == n {
            return 1;
        }
        let mut total = 0;
        for v in 0..n {
            if used & (1 << v) != 0 {
                continue;
            }
            let mut next = state.clone();
            if next.insert(v as u8 + 1, depth).is_ok() {
                total += extend(&next, used | (1 << v), depth + 1, n);
            }
        }
        total
    }
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut s = GreedyState::new();
            s.insert(first as u8 + 1, 0).expect("root always fits");
            extend(&s, 1 << first, 1, n)
        })
        .sum()
}

/// Length of a longest strictly increasing subsequence.
pub fn exact_lis<K: Ord>(seq: &[K]) -> usize {
    let mut tops: Vec<&K> = Vec::new();
    for x in seq {
        let pile = tops.partition_point(|t| *t < x);
        if pile == tops.len() {
            tops.push(x);
        } else {
            tops[pile] = x;
        }
    }
    tops.len()
}

/// Length of a longest strictly decreasing subsequence.
pub fn exact_lds<K: Ord>(seq: &[K]) -> usize {
    let rev: Vec<std::cmp::Reverse<&K>> = seq.iter().map(std::cmp::Reverse).collect();
    exact_lis(&rev)
}
