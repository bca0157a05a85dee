//! Seeded Monte Carlo runs behind the figures, written as CSV.
//!
//! Trials run in parallel but their values are collected in trial order and
//! summed sequentially, so the output is identical for any worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::greedy::GreedyState;
use crate::oracle::{exact_heapable_prob, MAX_EXACT_PROB_N};
use crate::rng::{random_permutation, trial_rng, uniform_stream, RNG_ID};
use crate::subseq::{banding_lchs_online, thm4_bootstrap, GreedyMode, SubseqError, BOOTSTRAP_MIN_N};

pub const CSV_HEADER: &str = "n,trials,stat,mean,stderr,exact,seed";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("n must be at least {min}, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("could not start {0} worker threads")]
    Pool(usize),
    #[error(transparent)]
    Strategy(#[from] SubseqError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub trials: usize,
    pub stat: String,
    pub mean: f64,
    pub stderr: f64,
    /// Set only for values obtained by exhaustive enumeration.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub master_seed: u64,
    pub rows: Vec<Row>,
}

impl SimReport {
    pub fn row(&self, n: usize, stat: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.n == n && r.stat == stat)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# rng={RNG_ID}\n{CSV_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n, r.trials, r.stat, r.mean, r.stderr, r.exact, self.master_seed
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Sweep settings shared by all experiments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|_| SimError::Pool(j)),
    }
}

/// Runs `trial(n, index)` for every trial of every `n`; each returns one
/// value per statistic in `stats`.
fn sweep(
    cfg: &SimConfig,
    stats: &[&str],
    trial: impl Fn(usize, usize) -> Result<Vec<f64>, SimError> + Sync,
) -> Result<SimReport, SimError> {
    if cfg.trials == 0 {
        return Err(SimError::NoTrials);
    }
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let per_trial: Vec<Vec<f64>> = in_pool(cfg.jobs, || {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| trial(n, t))
                .collect::<Result<Vec<_>, _>>()
        })??;
        for (s, stat) in stats.iter().enumerate() {
            let column: Vec<f64> = per_trial.iter().map(|v| v[s]).collect();
            let (mean, stderr) = mean_stderr(&column);
            rows.push(Row {
                n,
                trials: cfg.trials,
                stat: stat.to_string(),
                mean,
                stderr,
                exact: false,
            });
        }
    }
    Ok(SimReport {
        master_seed: cfg.seed,
        rows,
    })
}

fn is_heapable(perm: &[i64]) -> bool {
    let mut state = GreedyState::new();
    perm.iter().enumerate().all(|(i, &v)| state.insert(v, i).is_ok())
}

/// Probability that a random permutation is heapable, by Monte Carlo for
/// every `n`.
pub fn sim_heapable_prob_mc(cfg: &SimConfig) -> Result<SimReport, SimError> {
    sweep(cfg, &["p_heapable"], |n, t| {
        let perm = random_permutation(&mut trial_rng(cfg.seed, n, t), n);
        Ok(vec![f64::from(u8::from(is_heapable(&perm)))])
    })
}

/// Probability that a random permutation is heapable: exact enumeration up
/// to size 10, Monte Carlo above.
pub fn sim_heapable_prob(cfg: &SimConfig) -> Result<SimReport, SimError> {
    if cfg.trials == 0 {
        return Err(SimError::NoTrials);
    }
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        if n == 0 {
            return Err(SimError::TooSmall { n, min: 1 });
        }
        if n <= MAX_EXACT_PROB_N {
            let p = exact_heapable_prob(n).expect("size checked");
            rows.push(Row {
                n,
                trials: (1..=n).product(),
                stat: "p_heapable".into(),
                mean: *p.numer() as f64 / *p.denom() as f64,
                stderr: 0.0,
                exact: true,
            });
        } else {
            let one = SimConfig {
                ns: vec![n],
                ..cfg.clone()
            };
            rows.extend(sim_heapable_prob_mc(&one)?.rows);
        }
    }
    Ok(SimReport {
        master_seed: cfg.seed,
        rows,
    })
}

/// The offline bootstrap on uniform draws: heap size and the joint length of
/// its two filtered subsequences, both over `n`, plus `|B1| / n^(3/4)`.
pub fn sim_thm4(cfg: &SimConfig) -> Result<SimReport, SimError> {
    if let Some(&n) = cfg.ns.iter().find(|&&n| n < BOOTSTRAP_MIN_N) {
        return Err(SimError::TooSmall {
            n,
            min: BOOTSTRAP_MIN_N,
        });
    }
    sweep(cfg, &["placed_frac", "b1b2_frac", "b1_over_n34"], |n, t| {
        let values = uniform_stream(&mut trial_rng(cfg.seed, n, t), n);
        let r = thm4_bootstrap(&values, GreedyMode::Halt)?;
        let b1 = r.phase("B1").map_or(0, |p| p.examined) as f64;
        let b2 = r.phase("B2").map_or(0, |p| p.examined) as f64;
        let nf = n as f64;
        Ok(vec![r.placed() as f64 / nf, (b1 + b2) / nf, b1 / nf.powf(0.75)])
    })
}

/// Online banding on uniform draws: levels of the perfect heap and its
/// size over `n`.
pub fn sim_banding(cfg: &SimConfig) -> Result<SimReport, SimError> {
    if let Some(&n) = cfg.ns.iter().find(|&&n| n == 0) {
        return Err(SimError::TooSmall { n, min: 1 });
    }
    sweep(cfg, &["levels", "nodes_frac"], |n, t| {
        let values = uniform_stream(&mut trial_rng(cfg.seed, n, t), n);
        let r = banding_lchs_online(&values, n)?;
        Ok(vec![r.tree.height() as f64, r.placed() as f64 / n as f64])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ns: &[usize], trials: usize, seed: u64) -> SimConfig {
        SimConfig {
            ns: ns.to_vec(),
            trials,
            seed,
            jobs: None,
        }
    }

    #[test]
    fn mean_and_stderr() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_rows_for_small_n() {
        let r = sim_heapable_prob(&cfg(&[2, 3, 12], 2000, 5)).unwrap();
        let two = r.row(2, "p_heapable").unwrap();
        assert!(two.exact && two.mean == 0.5 && two.trials == 2);
        assert!((r.row(3, "p_heapable").unwrap().mean - 1.0 / 3.0).abs() < 1e-15);
        let twelve = r.row(12, "p_heapable").unwrap();
        assert!(!twelve.exact && twelve.trials == 2000);
        assert!(sim_heapable_prob(&cfg(&[3], 0, 5)).is_err());
    }

    #[test]
    fn csv_shape() {
        let r = sim_heapable_prob(&cfg(&[3], 10, 9)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# rng="));
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2], format!("3,6,p_heapable,{},0,true,9", 1.0 / 3.0));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut a = cfg(&[20, 40], 200, 3);
        a.jobs = Some(1);
        let mut b = a.clone();
        b.jobs = Some(4);
        assert_eq!(sim_thm4(&a).unwrap().to_csv(), sim_thm4(&b).unwrap().to_csv());
        assert_eq!(sim_banding(&a).unwrap().to_csv(), sim_banding(&b).unwrap().to_csv());
        assert_eq!(
            sim_heapable_prob_mc(&a).unwrap().to_csv(),
            sim_heapable_prob_mc(&b).unwrap().to_csv()
        );
    }

    #[test]
    fn thm4_fractions_are_ordered() {
        let r = sim_thm4(&cfg(&[1000], 20, 1)).unwrap();
        let placed = r.row(1000, "placed_frac").unwrap().mean;
        let joint = r.row(1000, "b1b2_frac").unwrap().mean;
        assert!(0.0 < placed && placed <= joint && joint <= 1.0);
        assert!(sim_thm4(&cfg(&[8], 1, 1)).is_err());
    }

    #[test]
    fn banding_levels_are_whole() {
        let r = sim_banding(&cfg(&[4096], 10, 2)).unwrap();
        let levels = r.row(4096, "levels").unwrap().mean;
        assert!(levels >= 1.0);
        assert!(r.row(4096, "nodes_frac").unwrap().mean > 0.0);
    }
}
