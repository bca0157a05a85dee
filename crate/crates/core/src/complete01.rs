//! Linear-time complete heapability for 0-1 sequences.
//!
//! A completely heapable 0-1 sequence can always be heaped into one canonical
//! shape: a perfect tree whose first `m` post-order positions hold the ones.
//! The ones then form a forest of perfect trees; each becomes available as
//! soon as the zero above its root is placed. Zeros are handed out in
//! pre-order of the remaining positions, ones from a FIFO of available
//! forest positions. The sequence fails exactly when a one arrives and that
//! FIFO is empty.

use std::collections::VecDeque;

use thiserror::Error;

use crate::tree::HeapTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Complete01Error {
    #[error("size {0} is not of the form 2^k - 1")]
    NotPerfectSize(usize),
    #[error("more ones ({m}) than positions ({n})")]
    TooManyOnes { n: usize, m: usize },
    #[error("entry at index {index} is {value}, expected 0 or 1")]
    NotBinary { index: usize, value: u8 },
    #[error("not completely heapable: no position for the 1 at index {index}")]
    NotHeapable { index: usize },
}

/// One perfect tree of the ones-forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneTree {
    pub root: usize,
    /// Number of levels.
    pub height: u32,
    /// Position of the zero above the root; `None` when the root is the
    /// root of the whole shape.
    pub parent: Option<usize>,
    pub preorder: Vec<usize>,
}

/// Positions use 0-based heap numbering: children of `p` are `2p+1`, `2p+2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalShape {
    pub n: usize,
    pub m: usize,
    pub is_one: Vec<bool>,
    pub zero_order: Vec<usize>,
    /// Ordered by height, tallest first.
    pub forest: Vec<OneTree>,
}

fn parent_pos(p: usize) -> Option<usize> {
    (p > 0).then(|| (p - 1) / 2)
}

fn preorder(n: usize, root: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(p) = stack.pop() {
        if p >= n || !keep(p) {
            continue;
        }
        out.push(p);
        stack.push(2 * p + 2);
        stack.push(2 * p + 1);
    }
    out
}

/// Appends ones to the smallest length `2^k - 1` that is at least `seq.len()`.
pub fn pad_to_perfect(seq: &[u8]) -> Vec<u8> {
    let mut target = 0usize;
    while target < seq.len() {
        target = 2 * target + 1;
    }
    let mut out = seq.to_vec();
    out.resize(target, 1);
    out
}

pub fn build_canonical(n: usize, m: usize) -> Result<CanonicalShape, Complete01Error> {
    if !(n + 1).is_power_of_two() {
        return Err(Complete01Error::NotPerfectSize(n));
    }
    if m > n {
        return Err(Complete01Error::TooManyOnes { n, m });
    }
    let mut is_one = vec![false; n];
    // Iterative post-order; the first m positions visited are ones.
    let mut marked = 0;
    let mut stack: Vec<(usize, bool)> = if n > 0 { vec![(0, false)] } else { vec![] };
    while let Some((p, expanded)) = stack.pop() {
        if marked == m {
            break;
        }
        if expanded || 2 * p + 1 >= n {
            is_one[p] = true;
            marked += 1;
        } else {
            stack.push((p, true));
            stack.push((2 * p + 2, false));
            stack.push((2 * p + 1, false));
        }
    }

    let mut forest: Vec<OneTree> = (0..n)
        .filter(|&p| is_one[p] && parent_pos(p).is_none_or(|q| !is_one[q]))
        .map(|root| {
            let preorder = preorder(n, root, |q| is_one[q]);
            OneTree {
                root,
                height: (preorder.len() + 1).trailing_zeros(),
                parent: parent_pos(root),
                preorder,
            }
        })
        .collect();
    forest.sort_by(|a, b| b.height.cmp(&a.height).then(a.root.cmp(&b.root)));

    let zero_order = if n > 0 { preorder(n, 0, |q| !is_one[q]) } else { Vec::new() };
    Ok(CanonicalShape {
        n,
        m,
        is_one,
        zero_order,
        forest,
    })
}

/// A complete heap for a padded 0-1 sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complete01 {
    /// The input after padding with trailing ones.
    pub padded: Vec<u8>,
    /// A perfect heap over `padded`; sequence indices refer to `padded`.
    pub tree: HeapTree<u8>,
}

pub fn complete_heap_01(seq: &[u8]) -> Result<Complete01, Complete01Error> {
    if let Some(index) = seq.iter().position(|&v| v > 1) {
        return Err(Complete01Error::NotBinary { index, value: seq[index] });
    }
    let padded = pad_to_perfect(seq);
    let n = padded.len();
    let m = padded.iter().filter(|&&v| v == 1).count();
    let shape = build_canonical(n, m)?;

    let mut trees_under: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut available: VecDeque<usize> = VecDeque::with_capacity(m);
    for (j, t) in shape.forest.iter().enumerate() {
        match t.parent {
            Some(p) => trees_under[p].push(j),
            None => available.extend(&t.preorder),
        }
    }

    let mut zeros = shape.zero_order.iter();
    let mut placement = Vec::with_capacity(n);
    for (index, &x) in padded.iter().enumerate() {
        let pos = if x == 0 {
            let p = *zeros.next().expect("zero count matches zero positions");
            for &j in &trees_under[p] {
                available.extend(&shape.forest[j].preorder);
            }
            p
        } else {
            available.pop_front().ok_or(Complete01Error::NotHeapable { index })?
        };
        placement.push(pos);
    }

    let tree = HeapTree::from_positions(
        placement
            .iter()
            .enumerate()
            .map(|(index, &pos)| (pos, padded[index], index)),
    )
    .expect("parent positions are filled before their children");
    Ok(Complete01 { padded, tree })
}
