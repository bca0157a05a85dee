//! Online increasing chains and the online bootstrap.

use super::bootstrap::bootstrap_cut;
use super::{PhaseStat, StrategyResult, SubseqError, BOOTSTRAP_MIN_N};
use crate::greedy::GreedyState;
use crate::key::Draw;
use crate::tree::HeapTree;

/// Threshold policy for an increasing chain over uniform draws with a known
/// number of draws: take `y` above the current head `h` when
/// `y - h <= (1 - h) * sqrt(2 / r)`, `r` being the draws left including `y`.
#[derive(Debug, Clone)]
pub struct OnlineLis {
    head: f64,
    horizon: usize,
    seen: usize,
}

impl OnlineLis {
    pub fn new(horizon: usize) -> Self {
        OnlineLis {
            head: 0.0,
            horizon: horizon.max(1),
            seen: 0,
        }
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn offer(&mut self, y: f64) -> bool {
        self.seen += 1;
        let left = self.horizon.saturating_sub(self.seen - 1).max(1) as f64;
        if y > self.head && y - self.head <= (1.0 - self.head) * (2.0 / left).sqrt() {
            self.head = y;
            true
        } else {
            false
        }
    }
}

/// Online increasing chain over a uniform stream with horizon `n`; `stream`
/// may be a prefix of the full stream.
pub fn online_lis_uniform(stream: &[f64], n: usize) -> Result<Vec<usize>, SubseqError> {
    if stream.len() > n {
        return Err(SubseqError::PastHorizon { len: stream.len(), n });
    }
    let mut lis = OnlineLis::new(n);
    Ok(stream
        .iter()
        .enumerate()
        .filter_map(|(i, &y)| lis.offer(y).then_some(i))
        .collect())
}

/// Decides chain membership for elements of the chain window. `pos` is the
/// position inside the window and `sigma` the element's score, already known
/// to be below 1/2.
pub(crate) trait ChainRule {
    fn offer(&mut self, pos: usize, sigma: f64) -> bool;
}

/// The threshold policy on `2 * sigma`.
pub(crate) struct ThresholdRule(pub OnlineLis);

impl ChainRule for ThresholdRule {
    fn offer(&mut self, _pos: usize, sigma: f64) -> bool {
        self.0.offer(2.0 * sigma)
    }
}

/// A chain laid out in level order as it grows: the `j`-th accepted element
/// becomes a child of the `(j-1)/2`-th.
#[derive(Debug, Clone)]
pub(crate) struct LevelOrderSeed<K> {
    pub tree: HeapTree<K>,
    ids: Vec<crate::tree::NodeId>,
}

impl<K: Ord + Clone> LevelOrderSeed<K> {
    pub fn new() -> Self {
        LevelOrderSeed {
            tree: HeapTree::new(),
            ids: Vec::new(),
        }
    }

    pub fn push(&mut self, key: K, idx: usize) {
        let j = self.ids.len();
        let id = if j == 0 {
            self.tree.set_root(key, idx)
        } else {
            self.tree.attach_next(self.ids[(j - 1) / 2], key, idx)
        }
        .expect("level order fills parents first");
        self.ids.push(id);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[crate::tree::NodeId] {
        &self.ids
    }

    /// Removes the last chain element.
    pub fn pop(&mut self) {
        if self.ids.pop().is_some() {
            self.tree.pop_leaf();
        }
    }
}

/// The bootstrap run online over a scored region of known length `m`.
/// Items are `(key, score, source index)` in arrival order with scores in
/// `[0, 1]`; the region may be cut short. `chain_rule(split, thr)` builds
/// the chain policy for a chain window of `split` positions and B1
/// threshold `thr`.
///
/// If the heap is still empty at the last position of the region, that
/// element becomes the root.
pub(crate) fn online_bootstrap<K: Ord + Clone>(
    items: impl IntoIterator<Item = (K, f64, usize)>,
    m: usize,
    chain_rule: impl FnOnce(usize, f64) -> Box<dyn ChainRule>,
) -> (HeapTree<K>, Vec<usize>, Vec<PhaseStat>) {
    let (cut, thr) = if m < BOOTSTRAP_MIN_N { (m, 1.0) } else { bootstrap_cut(m) };
    let split = cut / 2;
    let mut rule = chain_rule(split, thr);
    let mut seed = LevelOrderSeed::new();
    let mut greedy: Option<GreedyState<K>> = None;
    let mut accepted = Vec::new();
    let (mut chain_seen, mut chain_kept) = (0, 0);
    let (mut b1_seen, mut b1_placed, mut b2_seen, mut b2_placed) = (0, 0, 0, 0);

    for (pos, (key, score, idx)) in items.into_iter().enumerate() {
        let last = pos + 1 == m;
        let in_b1 = score < thr;
        if pos < cut && in_b1 {
            b1_seen += 1;
        } else if pos >= cut && score > thr {
            b2_seen += 1;
        }
        if pos < split {
            let sigma = score / thr;
            let candidate = in_b1 && sigma < 0.5;
            chain_seen += candidate as usize;
            let take = candidate && rule.offer(pos, sigma);
            if take || (last && seed.len() == 0) {
                seed.push(key, idx);
                accepted.push(idx);
                chain_kept += 1;
                b1_placed += 1;
            }
            continue;
        }
        let state = greedy.get_or_insert_with(|| GreedyState::from_tree(std::mem::take(&mut seed.tree)));
        let candidate = if pos < cut { in_b1 && score / thr > 0.5 } else { score > thr };
        if (candidate || (last && state.is_empty())) && state.insert(key, idx).is_ok() {
            accepted.push(idx);
            if pos < cut {
                b1_placed += 1;
            } else {
                b2_placed += 1;
            }
        }
    }
    let tree = match greedy {
        Some(state) => state.into_tree(),
        None => seed.tree,
    };
    let stats = vec![
        PhaseStat::new("B1.chain", chain_seen, chain_kept),
        PhaseStat::new("B1", b1_seen, b1_placed),
        PhaseStat::new("B2", b2_seen, b2_placed),
    ];
    (tree, accepted, stats)
}

/// Online heapable subsequence of a uniform stream with horizon `n`. The
/// chain of the bootstrap comes from the threshold policy and every greedy
/// phase skips elements it cannot place.
pub fn online_lhs_uniform(stream: &[f64], n: usize) -> Result<StrategyResult<Draw>, SubseqError> {
    if stream.len() > n {
        return Err(SubseqError::PastHorizon { len: stream.len(), n });
    }
    let items = stream.iter().enumerate().map(|(i, &v)| (Draw::new(v, i), v, i));
    let (tree, accepted, stats) = online_bootstrap(items, n, |split, thr| {
        // Expected number of chain candidates in the window.
        let horizon = (split as f64 * thr / 2.0).round() as usize;
        Box::new(ThresholdRule(OnlineLis::new(horizon)))
    });
    Ok(StrategyResult::new(tree, stream.len(), accepted, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::verify_heap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn lis_single_and_errors() {
        assert_eq!(online_lis_uniform(&[0.7], 1).unwrap(), vec![0]);
        assert!(online_lis_uniform(&[0.1, 0.2], 1).is_err());
    }

    #[test]
    fn lis_on_ascending_streams() {
        let n = 10_000;
        // Evenly spaced: every step is far below the allowed jump.
        let asc: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let chain = online_lis_uniform(&asc, n).unwrap();
        assert!(chain.len() as f64 >= (n as f64).sqrt(), "{}", chain.len());
        // Sorted uniform draws: still an increasing subset of size at least root n.
        let mut sorted = uniform(12, n);
        sorted.sort_by(f64::total_cmp);
        let chain = online_lis_uniform(&sorted, n).unwrap();
        assert!(chain.len() as f64 >= (n as f64).sqrt(), "{}", chain.len());
        assert!(chain.windows(2).all(|w| sorted[w[0]] < sorted[w[1]]));
    }

    #[test]
    fn lis_mean_tracks_root_two_n() {
        let n = 10_000;
        let trials = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut total = 0usize;
        for _ in 0..trials {
            let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let chain = online_lis_uniform(&s, n).unwrap();
            assert!(chain.windows(2).all(|w| s[w[0]] < s[w[1]]));
            total += chain.len();
        }
        let ratio = total as f64 / trials as f64 / (2.0 * n as f64).sqrt();
        assert!((0.7..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn lhs_small_cases() {
        let r = online_lhs_uniform(&[0.4], 1).unwrap();
        assert_eq!(r.placed(), 1);
        let desc: Vec<f64> = (0..50).map(|i| 1.0 - i as f64 / 50.0).collect();
        let r = online_lhs_uniform(&desc, 50).unwrap();
        assert!(r.placed() >= 1);
    }

    #[test]
    fn lhs_is_valid_and_large() {
        let v = uniform(8, 200_000);
        let r = online_lhs_uniform(&v, v.len()).unwrap();
        let seq: Vec<Draw> = v.iter().enumerate().map(|(i, &x)| Draw::new(x, i)).collect();
        assert_eq!(verify_heap(&seq, &r.tree), Ok(true));
        assert_eq!(r.accepted.len(), r.placed());
        assert!(r.placed() as f64 > 0.5 * v.len() as f64, "{}", r.placed());
    }

    #[test]
    fn lhs_decisions_only_look_back() {
        let v = uniform(9, 5000);
        let full = online_lhs_uniform(&v, v.len()).unwrap();
        for cut in [0, 1, 100, 1234, 2500, 4999] {
            let part = online_lhs_uniform(&v[..cut], v.len()).unwrap();
            let prefix: Vec<usize> = full.accepted.iter().copied().filter(|&i| i < cut).collect();
            assert_eq!(part.accepted, prefix, "cut {cut}");
        }
    }
}
