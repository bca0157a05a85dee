//! Strategies for streams of relative ranks.
//!
//! A stream item is the rank (1 = smallest) of the element among those seen
//! so far. The stream is decoded into one permutation up front; every
//! decision below compares an element only with earlier ones, and the order
//! among a prefix is fixed by that prefix, so the decoding does not leak the
//! future.

use super::online::{online_bootstrap, ChainRule};
use super::{StrategyResult, SubseqError};
use crate::key::Draw;

/// Fenwick tree over `1..=n` counting present values.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn full(n: usize) -> Self {
        let mut tree = vec![0u32; n + 1];
        for i in 1..=n {
            tree[i] += 1;
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                tree[j] += tree[i];
            }
        }
        Fenwick { tree }
    }

    fn add(&mut self, mut i: usize, delta: i32) {
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i32 + delta) as u32;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of present values in `1..=i`.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest `i` with `prefix(i) >= k`.
    fn select(&self, mut k: u32) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            if pos + step <= n && self.tree[pos + step] < k {
                pos += step;
                k -= self.tree[pos];
            }
            step >>= 1;
        }
        pos + 1
    }
}

/// Relative ranks of a sequence of distinct keys.
pub fn to_relative_ranks<K: Ord>(seq: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by(|&a, &b| seq[a].cmp(&seq[b]));
    let mut rank = vec![0usize; seq.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let mut seen = Fenwick::new(seq.len());
    rank.iter()
        .map(|&r| {
            seen.add(r, 1);
            seen.prefix(r)
        })
        .collect()
}

/// Relative ranks of uniform draws (ties broken by arrival).
pub fn uniform_relative_ranks(values: &[f64]) -> Vec<u32> {
    let draws: Vec<Draw> = values.iter().enumerate().map(|(i, &v)| Draw::new(v, i)).collect();
    to_relative_ranks(&draws)
}

/// The permutation of `1..=len` whose relative ranks are `ranks`.
pub fn decode_relative_ranks(ranks: &[u32]) -> Result<Vec<u32>, SubseqError> {
    let n = ranks.len();
    for (index, &r) in ranks.iter().enumerate() {
        if r == 0 || r as usize > index + 1 {
            return Err(SubseqError::BadRelativeRank {
                index,
                value: r,
                bound: index + 1,
            });
        }
    }
    let mut left = Fenwick::full(n);
    let mut out = vec![0u32; n];
    for t in (0..n).rev() {
        let v = left.select(ranks[t]);
        out[t] = v as u32;
        left.add(v, -1);
    }
    Ok(out)
}

/// Number of calibration elements for horizon `n`: `floor(eps * n)`, at
/// least one when `n > 0`.
pub fn calibration_len(n: usize, eps: f64) -> Result<usize, SubseqError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SubseqError::BadEpsilon(eps));
    }
    Ok(((eps * n as f64).floor() as usize).max(1).min(n))
}

/// The sorted calibration prefix; scores an element by the fraction of
/// calibration elements below it.
#[derive(Debug, Clone)]
pub struct Calibration {
    sorted: Vec<u32>,
}

impl Calibration {
    pub fn new(prefix: &[u32]) -> Self {
        let mut sorted = prefix.to_vec();
        sorted.sort_unstable();
        Calibration { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Calibration elements below `x`.
    pub fn below(&self, x: u32) -> usize {
        self.sorted.partition_point(|&c| c < x)
    }

    pub fn score(&self, x: u32) -> f64 {
        self.below(x) as f64 / self.sorted.len() as f64
    }
}

/// Sequential subgroups of a window, one score subinterval of `[0, 1/2)`
/// each: the first element of subgroup `i` whose score falls in subinterval
/// `i` joins the chain.
pub(crate) struct SubintervalRule {
    parts: usize,
    window: usize,
    taken: Option<usize>,
}

impl SubintervalRule {
    pub fn new(parts: usize, window: usize) -> Self {
        SubintervalRule {
            parts: parts.max(1),
            window: window.max(1),
            taken: None,
        }
    }
}

impl ChainRule for SubintervalRule {
    fn offer(&mut self, pos: usize, sigma: f64) -> bool {
        let group = pos * self.parts / self.window;
        if group >= self.parts || self.taken == Some(group) {
            return false;
        }
        let interval = (sigma * 2.0 * self.parts as f64).floor() as usize;
        if interval == group {
            self.taken = Some(group);
            true
        } else {
            false
        }
    }
}

fn isqrt(x: f64) -> usize {
    x.max(0.0).sqrt().floor() as usize
}

/// Online increasing chain: calibrate on the first `eps * n` items, then
/// split the next `(n - c) / 2` into `floor(sqrt n)` subgroups.
pub fn relrank_online_lis(ranks: &[u32], n: usize, eps: f64) -> Result<Vec<usize>, SubseqError> {
    if ranks.len() > n {
        return Err(SubseqError::PastHorizon { len: ranks.len(), n });
    }
    let c = calibration_len(n, eps)?;
    let values = decode_relative_ranks(ranks)?;
    if values.len() <= c {
        return Ok(Vec::new());
    }
    let cal = Calibration::new(&values[..c]);
    let window = (n - c) / 2;
    let mut rule = SubintervalRule::new(isqrt(n as f64), window);
    Ok((c..values.len().min(c + window))
        .filter(|&i| {
            let sigma = cal.score(values[i]);
            sigma < 0.5 && rule.offer(i - c, sigma)
        })
        .collect())
}

/// Online heapable subsequence of a relative-rank stream: the bootstrap over
/// the items after the calibration prefix, scoring each by its calibration
/// rank and building chains with the subgroup rule.
pub fn relrank_online_lhs(ranks: &[u32], n: usize, eps: f64) -> Result<StrategyResult<u32>, SubseqError> {
    if ranks.len() > n {
        return Err(SubseqError::PastHorizon { len: ranks.len(), n });
    }
    let c = calibration_len(n, eps)?;
    let values = decode_relative_ranks(ranks)?;
    let cal = Calibration::new(&values[..c.min(values.len())]);
    let items = (c..values.len()).map(|i| (values[i], cal.score(values[i]), i));
    let (tree, accepted, stats) = online_bootstrap(items, n - c, |split, thr| {
        // Expected B1 length is about 2 * split * thr.
        Box::new(SubintervalRule::new(isqrt(2.0 * split as f64 * thr), split))
    });
    Ok(StrategyResult::new(tree, ranks.len(), accepted, stats))
}
