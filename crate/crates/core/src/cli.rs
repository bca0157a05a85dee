//! Command-line front end.
//!
//! The first line of standard output is the verdict. Exit codes: 0 for
//! success or a true verdict, 1 for a false verdict, 2 for usage and I/O
//! errors, 3 when a search budget runs out.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complete01::{complete_heap_01, Complete01Error};
use crate::experiments::{sim_banding, sim_heapable_prob, sim_heapable_prob_mc, sim_thm4, SimConfig};
use crate::greedy::{decide_heapable, Decision};
use crate::io::{binary_values, format_sequence, format_tree, parse_sequence, parse_tree, parse_x3c};
use crate::key::{Draw, Key, Sequence};
use crate::oracle::{
    bt_completely_heapable, bt_heapable, exact_heapable_prob, exact_lchs, exact_lds, exact_lhs, exact_lis, Exhausted,
    SearchBudget,
};
use crate::reduction::{build_with_params, build_witness, compute_params, params_with_overrides, WitnessError};
use crate::rng::{trial_rng, uniform_stream, RNG_ID};
use crate::subseq::{
    banding_lchs_online, greedy_fill, online_lhs_uniform, relrank_banding_lchs, relrank_online_lhs, thm4_bootstrap,
    thm4_two_phase, to_relative_ranks, uniform_relative_ranks, GreedyMode, StrategyResult,
};
use crate::tree::{verify_complete, verify_heap, HeapTree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "heapable", about = "Heapable sequences: deciders, strategies, oracles and the hardness reduction")]
#[command(disable_version_flag = true)]
struct Cli {
    /// Print library and RNG identifiers.
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide heapability greedily.
    Decide {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide complete heapability of a 0/1 sequence.
    Complete01 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Heapable subsequence strategies.
    Lhs {
        #[arg(long, value_enum)]
        strategy: LhsStrategy,
        #[command(flatten)]
        source: Source,
    },
    /// Completely heapable subsequence strategies.
    Lchs {
        #[arg(long, value_enum)]
        strategy: LchsStrategy,
        #[command(flatten)]
        source: Source,
    },
    /// Exhaustive reference searches.
    Oracle {
        #[arg(value_enum)]
        query: OracleQuery,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Size for `prob`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
    },
    /// Build the complete-heapability instance of an exact-cover instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// `key = value` overrides of the reduction constants.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Build a complete heap for an instance from an exact cover.
    Witness {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated 0-based set indices.
        #[arg(long)]
        cover: String,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = SearchBudget::DEFAULT_NODES)]
        budget: u64,
    },
    /// Check a tree file against a sequence file.
    Verify {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// Also require the complete shape.
        #[arg(long)]
        complete: bool,
    },
    /// Seeded experiments written as CSV.
    Simulate {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Sample even where exact enumeration is available.
        #[arg(long)]
        mc: bool,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// Sequence file; otherwise `--n` uniform draws from `--seed`.
    #[arg(long = "in", conflicts_with = "n")]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Mode::Halt)]
    mode: Mode,
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LhsStrategy {
    Greedy,
    Thm4,
    Thm4boot,
    Online,
    Relrank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LchsStrategy {
    Banding,
    RelrankBanding,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Halt,
    Skip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleQuery {
    Heapable,
    Complete,
    Lhs,
    Lchs,
    Prob,
    Lis,
    Lds,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Figure {
    Fig3,
    Fig4,
    Fig5,
}

enum Failure {
    Usage(String),
    Exhausted(Exhausted),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        _ if cli.version => {
            let _ = writeln!(out, "heapable {}\nrng {RNG_ID}", env!("CARGO_PKG_VERSION"));
            return EXIT_OK;
        }
        None => Err(Failure::Usage("no command given; see --help".into())),
        Some(cmd) => dispatch(cmd, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Exhausted(e)) => {
            let _ = writeln!(out, "EXHAUSTED after {} expansions", e.expanded);
            EXIT_EXHAUSTED
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Decide { input, witness } => decide(&input, witness.as_deref(), out),
        Command::Complete01 { input, witness } => complete01(&input, witness.as_deref(), out),
        Command::Lhs { strategy, source } => lhs(strategy, &source, out),
        Command::Lchs { strategy, source } => lchs(strategy, &source, out),
        Command::Oracle {
            query,
            input,
            n,
            budget,
        } => oracle(query, input.as_deref(), n, SearchBudget::new(budget), out),
        Command::Reduce {
            input,
            out: seq_out,
            report,
            params,
        } => reduce(&input, &seq_out, report.as_deref(), params.as_deref(), out),
        Command::Witness {
            input,
            cover,
            seq,
            out: tree_out,
            params,
            budget,
        } => witness(&input, &cover, &seq, &tree_out, params.as_deref(), SearchBudget::new(budget), out),
        Command::Verify { seq, tree, complete } => verify(&seq, &tree, complete, out),
        Command::Simulate {
            figure,
            ns,
            trials,
            seed,
            out: csv_out,
            jobs,
            mc,
        } => simulate(figure, ns, trials, seed, &csv_out, jobs, mc, out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to standard output for `-`.
fn emit(path: &Path, content: &str, out: &mut dyn Write) -> Result<(), Failure> {
    if path.as_os_str() == "-" {
        out.write_all(content.as_bytes())?;
        Ok(())
    } else {
        fs::write(path, content).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn read_sequence(path: &Path) -> Result<Sequence, Failure> {
    let seq = parse_sequence(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    seq.validate()?;
    Ok(seq)
}

fn decide(input: &Path, witness: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let seq = read_sequence(input)?;
    let tree = match decide_heapable(&seq.items) {
        Err(_) => HeapTree::new(),
        Ok(Decision::Heapable(tree)) => tree,
        Ok(Decision::NotHeapable { index }) => {
            writeln!(out, "NOT HEAPABLE at index {index}")?;
            return Ok(EXIT_FALSE);
        }
    };
    writeln!(out, "HEAPABLE")?;
    writeln!(out, "nodes {} height {}", tree.len(), tree.height())?;
    if let Some(path) = witness {
        emit(path, &format_tree(&tree), out)?;
    }
    Ok(EXIT_OK)
}

fn complete01(input: &Path, witness: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let bits = binary_values(&read_sequence(input)?)?;
    match complete_heap_01(&bits) {
        Ok(c) => {
            writeln!(out, "COMPLETELY HEAPABLE")?;
            writeln!(out, "padded {} -> {}", bits.len(), c.padded.len())?;
            if let Some(path) = witness {
                emit(path, &format_tree(&c.tree), out)?;
            }
            Ok(EXIT_OK)
        }
        Err(Complete01Error::NotHeapable { index }) => {
            writeln!(out, "NOT COMPLETELY HEAPABLE at index {index}")?;
            Ok(EXIT_FALSE)
        }
        Err(e) => Err(e.into()),
    }
}

enum Input {
    Keys(Vec<Key>),
    Draws(Vec<f64>),
}

impl Input {
    fn load(source: &Source) -> Result<Self, Failure> {
        match (&source.input, source.n, source.seed) {
            (Some(path), _, _) => Ok(Input::Keys(read_sequence(path)?.items)),
            (None, Some(n), Some(seed)) => Ok(Input::Draws(uniform_stream(&mut trial_rng(seed, n, 0), n))),
            (None, Some(_), None) => Err(Failure::Usage("--n draws random input and requires --seed".into())),
            (None, None, _) => Err(Failure::Usage("give --in FILE or --n N --seed S".into())),
        }
    }

    fn len(&self) -> usize {
        match self {
            Input::Keys(k) => k.len(),
            Input::Draws(d) => d.len(),
        }
    }

    /// Values in `(0, 1)` with the same relative order as the input.
    fn uniform(&self) -> Vec<f64> {
        match self {
            Input::Draws(d) => d.clone(),
            Input::Keys(keys) => {
                let mut order: Vec<usize> = (0..keys.len()).collect();
                order.sort_by_key(|&i| (keys[i], i));
                let denom = (keys.len() + 1) as f64;
                let mut v = vec![0.0; keys.len()];
                for (r, &i) in order.iter().enumerate() {
                    v[i] = (r + 1) as f64 / denom;
                }
                v
            }
        }
    }

    fn relative_ranks(&self) -> Vec<u32> {
        match self {
            Input::Draws(d) => uniform_relative_ranks(d),
            Input::Keys(keys) => {
                let tagged: Vec<(Key, usize)> = keys.iter().copied().zip(0..).collect();
                to_relative_ranks(&tagged)
            }
        }
    }
}

fn report<K>(r: &StrategyResult<K>, n: usize, label: &str, witness: Option<&Path>, out: &mut dyn Write) -> Outcome {
    writeln!(out, "{label} {} of {n}", r.placed())?;
    writeln!(out, "height {}", r.tree.height())?;
    for p in &r.phase_stats {
        writeln!(out, "phase {} examined {} placed {}", p.label, p.examined, p.placed)?;
    }
    if let Some(path) = witness {
        emit(path, &format_tree(&r.tree), out)?;
    }
    Ok(EXIT_OK)
}

fn greedy_mode(mode: Mode) -> GreedyMode {
    match mode {
        Mode::Halt => GreedyMode::Halt,
        Mode::Skip => GreedyMode::Skip,
    }
}

fn lhs(strategy: LhsStrategy, source: &Source, out: &mut dyn Write) -> Outcome {
    let input = Input::load(source)?;
    let n = input.len();
    let mode = greedy_mode(source.mode);
    let w = source.witness.as_deref();
    match strategy {
        LhsStrategy::Greedy => match &input {
            Input::Keys(keys) => {
                let r = greedy_fill(HeapTree::new(), keys.iter().copied().zip(0..), mode, n);
                report(&r, n, "PLACED", w, out)
            }
            Input::Draws(d) => {
                let r = greedy_fill(HeapTree::new(), d.iter().enumerate().map(|(i, &v)| (Draw::new(v, i), i)), mode, n);
                report(&r, n, "PLACED", w, out)
            }
        },
        LhsStrategy::Thm4 => report(&thm4_two_phase(&input.uniform(), mode), n, "PLACED", w, out),
        LhsStrategy::Thm4boot => report(&thm4_bootstrap(&input.uniform(), mode)?, n, "PLACED", w, out),
        LhsStrategy::Online => report(&online_lhs_uniform(&input.uniform(), n)?, n, "PLACED", w, out),
        LhsStrategy::Relrank => report(&relrank_online_lhs(&input.relative_ranks(), n, source.eps)?, n, "PLACED", w, out),
    }
}

fn lchs(strategy: LchsStrategy, source: &Source, out: &mut dyn Write) -> Outcome {
    let input = Input::load(source)?;
    let n = input.len();
    let w = source.witness.as_deref();
    match strategy {
        LchsStrategy::Banding => report(&banding_lchs_online(&input.uniform(), n)?, n, "PLACED", w, out),
        LchsStrategy::RelrankBanding => {
            report(&relrank_banding_lchs(&input.relative_ranks(), n, source.eps)?, n, "PLACED", w, out)
        }
    }
}

fn oracle(
    query: OracleQuery,
    input: Option<&Path>,
    n: Option<usize>,
    budget: SearchBudget,
    out: &mut dyn Write,
) -> Outcome {
    if let OracleQuery::Prob = query {
        let n = n.ok_or_else(|| Failure::Usage("oracle prob needs --n".into()))?;
        let p = exact_heapable_prob(n)?;
        writeln!(out, "P {} = {}/{}", n, p.numer(), p.denom())?;
        return Ok(EXIT_OK);
    }
    let path = input.ok_or_else(|| Failure::Usage("this query needs --in FILE".into()))?;
    let seq = read_sequence(path)?.items;
    let verdict = |yes: bool, word: &str, out: &mut dyn Write| -> Outcome {
        if yes {
            writeln!(out, "{word}")?;
            Ok(EXIT_OK)
        } else {
            writeln!(out, "NOT {word}")?;
            Ok(EXIT_FALSE)
        }
    };
    match query {
        OracleQuery::Heapable => verdict(bt_heapable(&seq, budget).map_err(Failure::Exhausted)?, "HEAPABLE", out),
        OracleQuery::Complete => verdict(
            bt_completely_heapable(&seq, budget).map_err(Failure::Exhausted)?,
            "COMPLETELY HEAPABLE",
            out,
        ),
        OracleQuery::Lhs | OracleQuery::Lchs => {
            let (len, idx) = if let OracleQuery::Lhs = query {
                exact_lhs(&seq, budget)
            } else {
                exact_lchs(&seq, budget)
            }
            .map_err(Failure::Exhausted)?;
            let word = if let OracleQuery::Lhs = query { "LHS" } else { "LCHS" };
            writeln!(out, "{word} {len}")?;
            let list: Vec<String> = idx.iter().map(usize::to_string).collect();
            writeln!(out, "indices {}", list.join(","))?;
            Ok(EXIT_OK)
        }
        OracleQuery::Lis => {
            writeln!(out, "LIS {}", exact_lis(&seq))?;
            Ok(EXIT_OK)
        }
        OracleQuery::Lds => {
            writeln!(out, "LDS {}", exact_lds(&seq))?;
            Ok(EXIT_OK)
        }
        OracleQuery::Prob => unreachable!("handled above"),
    }
}

fn load_params(
    inst: &crate::reduction::X3CInstance,
    params: Option<&Path>,
) -> Result<crate::reduction::ReductionParams, Failure> {
    match params {
        Some(path) => Ok(params_with_overrides(inst, &read(path)?)?),
        None => Ok(compute_params(inst)),
    }
}

fn reduce(input: &Path, seq_out: &Path, report: Option<&Path>, params: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let inst = parse_x3c(&read(input)?)?;
    let p = load_params(&inst, params)?;
    let (seq, rep) = build_with_params(&inst, &p);
    let status = if rep.fits() { "ok" } else { "MISMATCH" };
    writeln!(out, "INSTANCE length {} capacity {} {status}", rep.total, rep.capacity())?;
    emit(seq_out, &format_sequence(&seq.items), out)?;
    match report {
        Some(path) => emit(path, &format!("{rep}\n"), out)?,
        None => writeln!(out, "{rep}")?,
    }
    Ok(EXIT_OK)
}

fn witness(
    input: &Path,
    cover: &str,
    seq_path: &Path,
    tree_out: &Path,
    params: Option<&Path>,
    budget: SearchBudget,
    out: &mut dyn Write,
) -> Outcome {
    let inst = parse_x3c(&read(input)?)?;
    let cover: Vec<usize> = cover
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad cover list {cover:?}")))?;
    let p = load_params(&inst, params)?;
    let (_, rep) = build_with_params(&inst, &p);
    let seq = read_sequence(seq_path)?.items;
    match build_witness(&inst, &cover, &seq, &rep, budget) {
        Ok(tree) => {
            writeln!(out, "WITNESS nodes {}", tree.len())?;
            emit(tree_out, &format_tree(&tree), out)?;
            Ok(EXIT_OK)
        }
        Err(WitnessError::Exhausted(e)) => Err(Failure::Exhausted(e)),
        Err(e @ (WitnessError::Capacity { .. } | WitnessError::NotCompletelyHeapable)) => {
            writeln!(out, "NO WITNESS")?;
            writeln!(out, "{e}")?;
            Ok(EXIT_FALSE)
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(seq_path: &Path, tree_path: &Path, complete: bool, out: &mut dyn Write) -> Outcome {
    let seq = read_sequence(seq_path)?.items;
    let invalid = |why: String, out: &mut dyn Write| -> Outcome {
        writeln!(out, "INVALID")?;
        writeln!(out, "{why}")?;
        Ok(EXIT_FALSE)
    };
    let tree = match parse_tree(&read(tree_path)?, &seq) {
        Ok(t) => t,
        Err(e) => return invalid(e.to_string(), out),
    };
    match verify_heap(&seq, &tree) {
        Err(e) => return invalid(e.to_string(), out),
        Ok(false) => return invalid("not a heap witness for the sequence".into(), out),
        Ok(true) => {}
    }
    if complete && verify_complete(&tree) != Ok(true) {
        return invalid("not a complete binary tree".into(), out);
    }
    writeln!(out, "VALID")?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    figure: Figure,
    ns: Vec<usize>,
    trials: usize,
    seed: u64,
    csv_out: &Path,
    jobs: Option<usize>,
    mc: bool,
    out: &mut dyn Write,
) -> Outcome {
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let cfg = SimConfig { ns, trials, seed, jobs };
    let report = match figure {
        Figure::Fig3 if mc => sim_heapable_prob_mc(&cfg)?,
        Figure::Fig3 => sim_heapable_prob(&cfg)?,
        Figure::Fig4 => sim_thm4(&cfg)?,
        Figure::Fig5 => sim_banding(&cfg)?,
    };
    emit(csv_out, &report.to_csv(), out)?;
    Ok(EXIT_OK)
}
