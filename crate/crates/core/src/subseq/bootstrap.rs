//! Offline two-phase construction and its bootstrap.

use super::{fill, lis_patience, seed_heap_from_chain, GreedyMode, PhaseStat, StrategyResult, SubseqError};
use crate::greedy::GreedyState;
use crate::key::Draw;

pub const BOOTSTRAP_MIN_N: usize = 16;

/// Runs the two phases over `items`, given as `(key, score, source index)`
/// with scores in `(0, 1)`. The first half (by position in `items`) feeds
/// the increasing chain from scores below 1/2; the second half is placed
/// greedily from scores above 1/2.
pub(crate) fn two_phase<K: Ord + Clone>(
    items: &[(K, f64, usize)],
    mode: GreedyMode,
    accepted: &mut Vec<usize>,
    stats: &mut Vec<PhaseStat>,
    prefix: &str,
) -> GreedyState<K> {
    let half = items.len() / 2;
    let a1: Vec<&(K, f64, usize)> = items[..half].iter().filter(|it| it.1 < 0.5).collect();
    let keys: Vec<&K> = a1.iter().map(|it| &it.0).collect();
    let chain: Vec<(K, usize)> = lis_patience(&keys)
        .into_iter()
        .map(|j| (a1[j].0.clone(), a1[j].2))
        .collect();
    let mut state = match seed_heap_from_chain(&chain) {
        Ok(seed) => {
            let mut ids: Vec<usize> = seed.nodes().iter().map(|n| n.seq_index).collect();
            ids.sort_unstable();
            accepted.extend(ids);
            GreedyState::from_tree(seed)
        }
        Err(_) => GreedyState::new(),
    };
    stats.push(PhaseStat::new(format!("{prefix}A1"), a1.len(), state.len()));

    let a2 = items[half..]
        .iter()
        .filter(|it| it.1 > 0.5)
        .map(|it| (it.0.clone(), it.2));
    let f = fill(&mut state, a2, mode, accepted);
    stats.push(PhaseStat::new(format!("{prefix}A2"), f.examined, f.placed));
    state
}

fn draws(values: &[f64]) -> impl Iterator<Item = (Draw, f64, usize)> + '_ {
    values.iter().enumerate().map(|(i, &v)| (Draw::new(v, i), v, i))
}

/// The linear-size construction: chain from the small values of the first
/// half, greedy for the large values of the second half.
pub fn thm4_two_phase(values: &[f64], mode: GreedyMode) -> StrategyResult<Draw> {
    let items: Vec<_> = draws(values).collect();
    let mut accepted = Vec::new();
    let mut stats = Vec::new();
    let state = two_phase(&items, mode, &mut accepted, &mut stats, "");
    StrategyResult::new(state.into_tree(), values.len(), accepted, stats)
}

/// Length of the B1 prefix and the B1 value threshold for a stream of `n`.
pub(crate) fn bootstrap_cut(n: usize) -> (usize, f64) {
    let nf = n as f64;
    ((nf.powf(7.0 / 8.0)).floor() as usize, nf.powf(-1.0 / 8.0))
}

/// The two-phase construction on B1 (values below `n^(-1/8)` among the
/// first `n^(7/8)`, rescaled to `(0, 1)`), then greedy on B2 (values above
/// the threshold in the rest).
pub fn thm4_bootstrap(values: &[f64], mode: GreedyMode) -> Result<StrategyResult<Draw>, SubseqError> {
    let n = values.len();
    if n < BOOTSTRAP_MIN_N {
        return Err(SubseqError::TooShort {
            n,
            min: BOOTSTRAP_MIN_N,
        });
    }
    let (cut, thr) = bootstrap_cut(n);
    let b1: Vec<(Draw, f64, usize)> = draws(&values[..cut])
        .filter(|it| it.1 < thr)
        .map(|(k, v, i)| (k, v / thr, i))
        .collect();
    let mut accepted = Vec::new();
    let mut stats = Vec::new();
    let mut state = two_phase(&b1, mode, &mut accepted, &mut stats, "B1.");
    let b1_placed = state.len();
    stats.push(PhaseStat::new("B1", b1.len(), b1_placed));

    // Phase stats for B1 and B2 report the full subsequence lengths, even
    // when a halting fill stops early.
    let b2: Vec<(Draw, usize)> = draws(values)
        .skip(cut)
        .filter(|it| it.1 > thr)
        .map(|(k, _, i)| (k, i))
        .collect();
    let b2_len = b2.len();
    let f = fill(&mut state, b2, mode, &mut accepted);
    stats.push(PhaseStat::new("B2", b2_len, f.placed));
    Ok(StrategyResult::new(state.into_tree(), n, accepted, stats))
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

    fn check(values: &[f64], r: &StrategyResult<Draw>) {
        let seq: Vec<Draw> = values.iter().enumerate().map(|(i, &v)| Draw::new(v, i)).collect();
        assert_eq!(verify_heap(&seq, &r.tree), Ok(true));
        assert_eq!(r.kept.len(), r.tree.len());
        assert_eq!(r.kept.len() + r.skipped, values.len());
    }

    #[test]
    fn two_phase_tiny() {
        let r = thm4_two_phase(&[0.1, 0.9], GreedyMode::Halt);
        assert_eq!(r.placed(), 2);
        check(&[0.1, 0.9], &r);
    }

    #[test]
    fn two_phase_without_small_values() {
        let v = [0.6, 0.7, 0.8, 0.9, 0.95, 0.97];
        let r = thm4_two_phase(&v, GreedyMode::Halt);
        assert_eq!(r.phase("A1").unwrap().placed, 0);
        // Greedy over the second half starts from its first element.
        assert_eq!(r.kept, vec![3, 4, 5]);
        check(&v, &r);
    }

    #[test]
    fn two_phase_is_linear() {
        let v = uniform(7, 20_000);
        let r = thm4_two_phase(&v, GreedyMode::Halt);
        check(&v, &r);
        assert!(r.placed() as f64 > 0.1 * v.len() as f64, "{}", r.placed());
    }

    #[test]
    fn bootstrap_small_and_large() {
        let v = uniform(3, 16);
        let r = thm4_bootstrap(&v, GreedyMode::Halt).unwrap();
        assert!(r.placed() >= 1);
        check(&v, &r);
        assert!(thm4_bootstrap(&v[..15], GreedyMode::Halt).is_err());

        let v = uniform(4, 100_000);
        let r = thm4_bootstrap(&v, GreedyMode::Halt).unwrap();
        check(&v, &r);
        let b1 = r.phase("B1").unwrap();
        let b2 = r.phase("B2").unwrap();
        assert!(r.placed() <= b1.examined + b2.examined);
        assert!(r.placed() as f64 > 0.5 * v.len() as f64, "{}", r.placed());
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let v = uniform(5, 5000);
        assert_eq!(
            thm4_bootstrap(&v, GreedyMode::Skip).unwrap(),
            thm4_bootstrap(&v, GreedyMode::Skip).unwrap()
        );
    }
}
