//! Online complete heaps by banding: each new level only takes values from
//! its own band, and the bands ascend.

use super::online::{ChainRule, LevelOrderSeed, OnlineLis, ThresholdRule};
use super::relrank::{calibration_len, decode_relative_ranks, Calibration, SubintervalRule};
use super::{perfect_prefix, PhaseStat, StrategyResult, SubseqError};
use crate::key::Draw;
use crate::tree::{HeapTree, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct BandLevel {
    /// Window length in elements.
    pub u: usize,
    /// Band width, `u / n`.
    pub v: f64,
    /// Half-open value interval `[lo, hi)`.
    pub band: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSchedule {
    pub n: usize,
    pub t0: usize,
    pub levels: Vec<BandLevel>,
}

impl BandSchedule {
    pub fn total_u(&self) -> usize {
        self.levels.iter().map(|l| l.u).sum()
    }

    pub fn total_v(&self) -> f64 {
        self.levels.iter().map(|l| l.v).sum()
    }
}

/// Levels `i = 1, 2, ...` with `u_i = ceil(sqrt2^(i+1) * sqrt(t0 * n))` for
/// as long as the windows fit in `n / 2`. Since `v_i = u_i / n` the band
/// widths then fit in `1/2`.
pub fn make_band_schedule(n: usize, t0: usize) -> BandSchedule {
    let mut levels = Vec::new();
    let mut used = 0usize;
    if n > 0 && t0 > 0 {
        let base = ((t0 as f64) * (n as f64)).sqrt();
        for i in 1.. {
            let u = (std::f64::consts::SQRT_2.powi(i + 1) * base).ceil() as usize;
            if 2 * (used + u) > n {
                break;
            }
            let lo = (n + 2 * used) as f64 / (2 * n) as f64;
            used += u;
            let hi = (n + 2 * used) as f64 / (2 * n) as f64;
            levels.push(BandLevel {
                u,
                v: u as f64 / n as f64,
                band: (lo, hi),
            });
        }
    }
    BandSchedule { n, t0, levels }
}

enum Stage {
    Seed,
    Bands {
        schedule: BandSchedule,
        level: usize,
        window_end: usize,
        parents: Vec<NodeId>,
        current: Vec<NodeId>,
        examined: usize,
    },
    Done,
}

/// Runs banding over a region of `m` scored items `(key, score, index)`.
/// The first `m / 2` positions build a chain from scores below 1/2, cut to a
/// perfect heap; the rest fill one band level per window. A level whose
/// window closes before it fills ends the run and is dropped, so the result
/// is always a perfect heap.
fn banding<K: Ord + Clone>(
    items: impl IntoIterator<Item = (K, f64, usize)>,
    m: usize,
    mut rule: Box<dyn ChainRule>,
    in_band: impl Fn(&BandLevel, &K, f64) -> bool,
) -> (HeapTree<K>, Vec<usize>, Vec<PhaseStat>) {
    let half = m / 2;
    let mut seed = LevelOrderSeed::new();
    let mut accepted = Vec::new();
    let mut stats = Vec::new();
    let mut chain_seen = 0;
    let mut stage = Stage::Seed;

    for (pos, (key, score, idx)) in items.into_iter().enumerate() {
        if let Stage::Seed = stage {
            if pos < half {
                if score < 0.5 {
                    chain_seen += 1;
                    if rule.offer(pos, score) {
                        seed.push(key, idx);
                        accepted.push(idx);
                    }
                }
                continue;
            }
            let keep = seed.truncate_perfect();
            stats.push(PhaseStat::new("seed", chain_seen, keep));
            if keep == 0 {
                // No chain: a lone root is the whole heap.
                seed.push(key, idx);
                accepted.push(idx);
                stage = Stage::Done;
                continue;
            }
            let t0 = keep.div_ceil(2);
            let schedule = make_band_schedule(m, t0);
            if schedule.levels.is_empty() {
                stage = Stage::Done;
                continue;
            }
            let window_end = half + schedule.levels[0].u;
            stage = Stage::Bands {
                parents: seed.ids()[keep - t0..].to_vec(),
                schedule,
                level: 0,
                window_end,
                current: Vec::new(),
                examined: 0,
            };
        }
        let Stage::Bands {
            schedule,
            level,
            window_end,
            parents,
            current,
            examined,
        } = &mut stage
        else {
            break;
        };
        // Close finished windows.
        let mut stop = false;
        while pos >= *window_end {
            let need = 2 * parents.len();
            stats.push(PhaseStat::new(format!("level{}", *level + 1), *examined, current.len()));
            if current.len() < need {
                for _ in 0..current.len() {
                    seed.tree.pop_leaf();
                }
                stop = true;
                break;
            }
            *level += 1;
            if *level == schedule.levels.len() {
                stop = true;
                break;
            }
            *parents = std::mem::take(current);
            *examined = 0;
            *window_end += schedule.levels[*level].u;
        }
        if stop {
            stage = Stage::Done;
            break;
        }
        let band = &schedule.levels[*level];
        if current.len() < 2 * parents.len() && in_band(band, &key, score) {
            *examined += 1;
            let parent = parents[current.len() / 2];
            let id = seed.tree.attach_next(parent, key, idx).expect("parent has a free slot");
            current.push(id);
            accepted.push(idx);
        } else if in_band(band, &key, score) {
            *examined += 1;
        }
    }

    match stage {
        Stage::Seed => {
            let keep = seed.truncate_perfect();
            stats.push(PhaseStat::new("seed", chain_seen, keep));
        }
        Stage::Bands {
            level,
            parents,
            current,
            examined,
            ..
        } => {
            // The stream ended inside a window.
            stats.push(PhaseStat::new(format!("level{}", level + 1), examined, current.len()));
            if current.len() < 2 * parents.len() {
                for _ in 0..current.len() {
                    seed.tree.pop_leaf();
                }
            }
        }
        Stage::Done => {}
    }
    (seed.tree, accepted, stats)
}

impl<K: Ord + Clone> LevelOrderSeed<K> {
    /// Drops a partial last level; returns the node count kept.
    fn truncate_perfect(&mut self) -> usize {
        let keep = perfect_prefix(self.len());
        while self.len() > keep {
            self.pop();
        }
        keep
    }
}

/// Online complete heap from a uniform stream with horizon `n`.
pub fn banding_lchs_online(stream: &[f64], n: usize) -> Result<StrategyResult<Draw>, SubseqError> {
    if stream.len() > n {
        return Err(SubseqError::PastHorizon { len: stream.len(), n });
    }
    let items = stream.iter().enumerate().map(|(i, &v)| (Draw::new(v, i), v, i));
    // About a quarter of the stream is a chain candidate.
    let rule = Box::new(ThresholdRule(OnlineLis::new(n / 4)));
    let (tree, accepted, stats) = banding(items, n, rule, |level, _, v| level.band.0 <= v && v < level.band.1);
    Ok(StrategyResult::new(tree, stream.len(), accepted, stats))
}

/// Online complete heap from a relative-rank stream. Bands are read off the
/// calibration prefix: the band `[a, b)` takes elements above the
/// `ceil(a c)`-th and below the `floor(b c)`-th calibration element.
pub fn relrank_banding_lchs(ranks: &[u32], n: usize, eps: f64) -> Result<StrategyResult<u32>, SubseqError> {
    if ranks.len() > n {
        return Err(SubseqError::PastHorizon { len: ranks.len(), n });
    }
    let c = calibration_len(n, eps)?;
    let values = decode_relative_ranks(ranks)?;
    let cal = Calibration::new(&values[..c.min(values.len())]);
    let m = n - c;
    let items = (c..values.len()).map(|i| (values[i], cal.score(values[i]), i));
    let parts = (m as f64).sqrt().floor() as usize;
    let rule = Box::new(SubintervalRule::new(parts, m / 2));
    let cf = c as f64;
    let (tree, accepted, stats) = banding(items, m, rule, |level, &x, _| {
        let q = cal.below(x) as f64;
        (level.band.0 * cf).ceil() <= q && q < (level.band.1 * cf).floor()
    });
    Ok(StrategyResult::new(tree, ranks.len(), accepted, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subseq::uniform_relative_ranks;
    use crate::tree::{verify_complete, verify_heap};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    fn perfect(r: &StrategyResult<impl Ord>) -> bool {
        let n = r.tree.len();
        (n + 1).is_power_of_two() && verify_complete(&r.tree) == Ok(true)
    }

    #[test]
    fn schedule_examples() {
        let s = make_band_schedule(1 << 20, 1);
        assert!(s.levels.len() >= 6, "{}", s.levels.len());
        assert!(2 * s.total_u() <= s.n);
        assert!(s.total_v() <= 0.5 + 1e-12);
        assert!(make_band_schedule(100, 101).levels.is_empty());
        assert!(make_band_schedule(0, 1).levels.is_empty());
    }

    #[test]
    fn bands_are_disjoint_and_ascending() {
        for (n, t0) in [(1 << 12, 4), (1 << 16, 32), (1 << 20, 1), (12345, 7)] {
            let s = make_band_schedule(n, t0);
            let mut prev = 0.5;
            for l in &s.levels {
                assert_eq!(l.band.0, prev);
                assert!(l.band.0 < l.band.1);
                assert!((l.band.1 - l.band.0 - l.v).abs() < 1e-12);
                prev = l.band.1;
            }
            assert!(prev <= 1.0);
        }
    }

    #[test]
    fn tiny_streams() {
        for seed in 0..20 {
            let v = uniform(seed, 4);
            let r = banding_lchs_online(&v, 4).unwrap();
            assert!(r.placed() >= 1);
            assert!(perfect(&r));
        }
        assert_eq!(banding_lchs_online(&[], 0).unwrap().placed(), 0);
    }

    #[test]
    fn complete_and_linear() {
        for (seed, n) in [(1u64, 1usize << 12), (2, 1 << 16), (3, 1 << 18)] {
            let v = uniform(seed, n);
            let r = banding_lchs_online(&v, n).unwrap();
            let seq: Vec<Draw> = v.iter().enumerate().map(|(i, &x)| Draw::new(x, i)).collect();
            assert_eq!(verify_heap(&seq, &r.tree), Ok(true));
            assert!(perfect(&r));
            assert!(r.placed() as f64 >= 0.005 * n as f64, "n={n} placed={}", r.placed());
        }
    }

    #[test]
    fn decisions_only_look_back() {
        let n = 1 << 14;
        let v = uniform(4, n);
        let full = banding_lchs_online(&v, n).unwrap();
        let r = uniform_relative_ranks(&v);
        let full_rr = relrank_banding_lchs(&r, n, 0.1).unwrap();
        for cut in [0, 10, n / 2 - 1, n / 2, n / 2 + 1, 3 * n / 4, n - 1] {
            let part = banding_lchs_online(&v[..cut], n).unwrap();
            let prefix: Vec<usize> = full.accepted.iter().copied().filter(|&i| i < cut).collect();
            assert_eq!(part.accepted, prefix, "cut {cut}");
            let part = relrank_banding_lchs(&r[..cut], n, 0.1).unwrap();
            let prefix: Vec<usize> = full_rr.accepted.iter().copied().filter(|&i| i < cut).collect();
            assert_eq!(part.accepted, prefix, "relrank cut {cut}");
        }
    }

    #[test]
    fn relrank_tracks_uniform_levels() {
        let n = 100_000;
        let v = uniform(5, n);
        let r = uniform_relative_ranks(&v);
        let uni = banding_lchs_online(&v, n).unwrap();
        let rr = relrank_banding_lchs(&r, n, 0.1).unwrap();
        let values = decode_relative_ranks(&r).unwrap();
        assert_eq!(verify_heap(&values, &rr.tree), Ok(true));
        assert!(perfect(&rr));
        let (a, b) = (uni.tree.height() as i64, rr.tree.height() as i64);
        assert!((a - b).abs() <= 2, "{a} vs {b}");
    }

    #[test]
    fn relrank_degenerate() {
        let r = uniform_relative_ranks(&uniform(6, 10));
        assert!(relrank_banding_lchs(&r, 10, 1.0).unwrap().placed() <= 1);
        let r = uniform_relative_ranks(&uniform(7, 2));
        assert_eq!(relrank_banding_lchs(&r, 2, 0.1).unwrap().placed(), 1);
    }
}
