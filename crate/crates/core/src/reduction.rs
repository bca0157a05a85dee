//! Reduction from exact cover by 3-sets to complete heapability.
//!
//! Values are triples compared lexicographically. First coordinates use the
//! scaled encoding of [`crate::key`], so `i - ε` and `0.1` stay integers.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::key::{scaled, scaled_minus_eps, Key, Sequence, SCALED_TENTH};
use crate::oracle::{complete_witness, for_each_witness, Exhausted, SearchBudget};
use crate::tree::{verify_complete, verify_heap, HeapTree, NodeId};

/// Largest collection the brute-force cover search accepts.
pub const MAX_BRUTE_FORCE_SETS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("universe size {0} is not a positive multiple of 3")]
    BadUniverse(usize),
    #[error("the collection is empty")]
    NoSets,
    #[error("set {index} is not three distinct elements of 1..={n}")]
    BadSet { index: usize, n: usize },
    #[error("gamma needs height at least 2, got {0}")]
    GammaHeight(u32),
    #[error("parameter line {line}: {msg}")]
    BadParams { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("set index {0} is out of range")]
    NoSuchSet(usize),
    #[error("cover has {got} sets, need {need}")]
    WrongSize { got: usize, need: usize },
    #[error("element {0} is covered more than once")]
    Overlap(usize),
    #[error("element {0} is not covered")]
    Missing(usize),
}

/// An exact-cover instance over `{1..n}`; every set holds three distinct
/// elements, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3CInstance {
    pub n: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(n: usize, sets: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        if n == 0 || n % 3 != 0 {
            return Err(ReductionError::BadUniverse(n));
        }
        if sets.is_empty() {
            return Err(ReductionError::NoSets);
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for (index, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            if s[0] == 0 || s[2] > n || s[0] == s[1] || s[1] == s[2] {
                return Err(ReductionError::BadSet { index, n });
            }
            sorted.push(s);
        }
        Ok(X3CInstance { n, sets: sorted })
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    /// Pads the collection to a multiple of 4 sets by repeating the last
    /// one. Repeats cannot change whether a cover exists. Returns the
    /// number of sets added.
    pub fn normalized(&self) -> (X3CInstance, usize) {
        let mut sets = self.sets.clone();
        let last = *sets.last().expect("instances are non-empty");
        let pad = (4 - sets.len() % 4) % 4;
        sets.extend(std::iter::repeat_n(last, pad));
        (X3CInstance { n: self.n, sets }, pad)
    }

    pub fn check_cover(&self, cover: &[usize]) -> Result<(), CoverError> {
        if let Some(&bad) = cover.iter().find(|&&i| i >= self.sets.len()) {
            return Err(CoverError::NoSuchSet(bad));
        }
        if cover.len() != self.n / 3 {
            return Err(CoverError::WrongSize {
                got: cover.len(),
                need: self.n / 3,
            });
        }
        let mut hit = vec![false; self.n + 1];
        for &i in cover {
            for &e in &self.sets[i] {
                if hit[e] {
                    return Err(CoverError::Overlap(e));
                }
                hit[e] = true;
            }
        }
        match (1..=self.n).find(|&e| !hit[e]) {
            Some(e) => Err(CoverError::Missing(e)),
            None => Ok(()),
        }
    }

    /// Exact cover by brute force, for collections of at most
    /// [`MAX_BRUTE_FORCE_SETS`] sets.
    pub fn find_cover(&self) -> Option<Vec<usize>> {
        assert!(self.m() <= MAX_BRUTE_FORCE_SETS, "brute force is limited to {MAX_BRUTE_FORCE_SETS} sets");
        let mut used = vec![false; self.n + 1];
        let mut chosen = Vec::new();
        self.cover_dfs(0, &mut used, &mut chosen).then_some(chosen)
    }

    fn cover_dfs(&self, from: usize, used: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(first_free) = (1..=self.n).find(|&e| !used[e]) else {
            return true;
        };
        for i in from..self.m() {
            let s = self.sets[i];
            if !s.contains(&first_free) || s.iter().any(|&e| used[e]) {
                continue;
            }
            s.iter().for_each(|&e| used[e] = true);
            chosen.push(i);
            if self.cover_dfs(0, used, chosen) {
                return true;
            }
            chosen.pop();
            s.iter().for_each(|&e| used[e] = false);
        }
        false
    }
}

/// `Δ(x, k, h)`: for each level `i < h`, the triples `(x, i, j)` for `j`
/// from `k·2^i` down to 1. Length `k(2^h - 1)`; `x` is already scaled.
pub fn delta(x: i64, k: usize, h: u32) -> Vec<Key> {
    let mut out = Vec::with_capacity(k * ((1usize << h) - 1));
    for i in 0..h {
        for j in (1..=(k << i) as i64).rev() {
            out.push(Key::Triple(x, i as i64, j));
        }
    }
    out
}

/// `Γ(x, k, h)`: `Δ(x, k, h)` without its last `k` triples.
pub fn gamma(x: i64, k: usize, h: u32) -> Result<Vec<Key>, ReductionError> {
    if h < 2 {
        return Err(ReductionError::GammaHeight(h));
    }
    let mut out = delta(x, k, h);
    out.truncate(out.len() - k);
    Ok(out)
}

/// Reduction constants. Signed so that overrides may produce any value;
/// the builder treats negative counts as empty blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionParams {
    pub n: i64,
    pub m: i64,
    pub h1: i64,
    pub n1: i64,
    pub m1: i64,
    pub h2: i64,
    pub n2: i64,
    pub m2: i64,
    pub h: i64,
    pub k: i64,
    pub l: i64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

fn ceil_log2(v: i64) -> i64 {
    let mut h = 0;
    while (1i64 << h) < v {
        h += 1;
    }
    h
}

impl ReductionParams {
    pub fn capacity(&self) -> i64 {
        (1i64 << self.h) - 1
    }

    fn derive(n: i64, m: i64, fixed: &HashMap<&'static str, i64>) -> Self {
        let get = |key: &str, default: i64| fixed.get(key).copied().unwrap_or(default);
        let h1 = get("h1", ceil_log2(m / 4 + 1));
        let n1 = get("n1", 1 << h1);
        let m1 = get("m1", n1 - m / 4);
        let h2 = get("h2", ceil_log2(3 * m / 2));
        let n2 = get("n2", 1 << h2);
        let m2 = get("m2", n2 - 3 * m / 2);
        let h = get("h", h1 + h2 + 3);
        let k = get("k", 1 << h);
        let l = get("l", k + 1);
        let x = get("x", k + 2);
        let y = get("y", k + 2);
        let z = get("z", k + 3);
        ReductionParams {
            n,
            m,
            h1,
            n1,
            m1,
            h2,
            n2,
            m2,
            h,
            k,
            l,
            x,
            y,
            z,
        }
    }
}

/// Constants for the instance after padding to a multiple of 4 sets.
pub fn compute_params(inst: &X3CInstance) -> ReductionParams {
    let (norm, _) = inst.normalized();
    ReductionParams::derive(norm.n as i64, norm.m() as i64, &HashMap::new())
}

const PARAM_KEYS: [&str; 12] = ["h1", "n1", "m1", "h2", "n2", "m2", "h", "k", "l", "x", "y", "z"];

/// Constants with overrides from `key = value` lines (`#` starts a comment,
/// keys are case-insensitive). Constants not given keep their defining
/// formulas in terms of the ones that are.
pub fn params_with_overrides(inst: &X3CInstance, text: &str) -> Result<ReductionParams, ReductionError> {
    let mut fixed = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| ReductionError::BadParams { line: i + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
        let key = key.trim().to_ascii_lowercase();
        let key = *PARAM_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| bad(format!("unknown key {key:?}")))?;
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("value for {key} is not an integer")))?;
        if matches!(key, "h1" | "h2" | "h") && !(0..=40).contains(&value) {
            return Err(bad(format!("{key} = {value} is outside 0..=40")));
        }
        fixed.insert(key, value);
    }
    let (norm, _) = inst.normalized();
    Ok(ReductionParams::derive(norm.n as i64, norm.m() as i64, &fixed))
}

/// One block of the instance with its generated length and the length its
/// closed form predicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLen {
    pub name: String,
    pub gadget: String,
    pub start: usize,
    pub len: usize,
    pub formula: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityReport {
    pub params: ReductionParams,
    /// Sets added to reach a multiple of 4.
    pub padded: usize,
    pub blocks: Vec<BlockLen>,
    pub total: usize,
    /// Triples occurring more than once, with their multiplicity.
    pub duplicates: Vec<(Key, usize)>,
}

impl CapacityReport {
    pub fn capacity(&self) -> i64 {
        self.params.capacity()
    }

    pub fn prologue_len(&self) -> usize {
        self.section_len('a')
    }

    pub fn subset_len(&self) -> usize {
        self.section_len('b')
    }

    pub fn epilogue_len(&self) -> usize {
        self.section_len('c')
    }

    fn section_len(&self, c: char) -> usize {
        self.blocks.iter().filter(|b| b.name.starts_with(c)).map(|b| b.len).sum()
    }

    /// Total length equals `2^h - 1`.
    pub fn fits(&self) -> bool {
        self.total as i64 == self.capacity()
    }

    /// Blocks whose generated length differs from their closed form.
    pub fn formula_mismatches(&self) -> Vec<&BlockLen> {
        self.blocks.iter().filter(|b| b.len as i64 != b.formula).collect()
    }

    pub fn block(&self, name: &str) -> Option<&BlockLen> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

impl fmt::Display for CapacityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(f, "n={} m={} padded={}", p.n, p.m, self.padded)?;
        writeln!(
            f,
            "h1={} N1={} M1={} h2={} N2={} M2={} h={} K={} L={} X={} Y={} Z={}",
            p.h1, p.n1, p.m1, p.h2, p.n2, p.m2, p.h, p.k, p.l, p.x, p.y, p.z
        )?;
        writeln!(f, "block\tgadget\tstart\tlen\tformula")?;
        for b in &self.blocks {
            writeln!(f, "{}\t{}\t{}\t{}\t{}", b.name, b.gadget, b.start, b.len, b.formula)?;
        }
        writeln!(
            f,
            "prologue={} subset={} epilogue={}",
            self.prologue_len(),
            self.subset_len(),
            self.epilogue_len()
        )?;
        let verdict = if self.fits() { "ok" } else { "MISMATCH" };
        writeln!(f, "total={} capacity={} {verdict}", self.total, self.capacity())?;
        let copies: usize = self.duplicates.iter().map(|(_, c)| c - 1).sum();
        write!(f, "duplicate triples={} extra copies={copies}", self.duplicates.len())
    }
}

struct Builder {
    items: Vec<Key>,
    blocks: Vec<BlockLen>,
}

impl Builder {
    fn push(&mut self, name: impl Into<String>, gadget: impl Into<String>, keys: Vec<Key>, formula: i64) {
        self.blocks.push(BlockLen {
            name: name.into(),
            gadget: gadget.into(),
            start: self.items.len(),
            len: keys.len(),
            formula,
        });
        self.items.extend(keys);
    }
}

fn count(v: i64) -> usize {
    v.max(0) as usize
}

fn height(v: i64) -> u32 {
    v.clamp(0, 40) as u32
}

fn pow2m1(h: i64) -> i64 {
    (1i64 << h.clamp(0, 40)) - 1
}

/// The subset block for set number `i` (1-based) `{u, v, w}`.
pub fn subset_block(i: usize, set: [usize; 3], p: &ReductionParams) -> Vec<Key> {
    let i = i as i64;
    let mut out = vec![
        Key::Triple(scaled(-1), i, 0),
        Key::Triple(scaled(-1), i, 1),
        Key::Triple(scaled(p.k), i, 1),
        Key::Triple(scaled(p.k), i, 0),
    ];
    out.extend(set.iter().map(|&e| Key::Triple(scaled(e as i64), 0, 0)));
    out.extend(delta(0, 1, 2));
    out.extend((1..=8).rev().map(|j| Key::Triple(scaled(p.l), i, j)));
    out
}

/// The full sequence `a, b, c` with its block table. Lengths are whatever
/// the gadgets produce; nothing is padded or trimmed to fit `2^h - 1`.
pub fn build_instance(inst: &X3CInstance) -> (Sequence, CapacityReport) {
    build_with_params(inst, &compute_params(inst))
}

/// [`build_instance`] with explicit constants (see [`params_with_overrides`]).
pub fn build_with_params(inst: &X3CInstance, params: &ReductionParams) -> (Sequence, CapacityReport) {
    let (norm, padded) = inst.normalized();
    let p = *params;
    let n = norm.n as i64;
    let m = norm.m() as i64;
    let mut b = Builder {
        items: Vec::new(),
        blocks: Vec::new(),
    };

    b.push("a1", "D(-3,1,h1)", delta(scaled(-3), 1, height(p.h1)), pow2m1(p.h1));
    b.push(
        "a2",
        "D(Z,2M1-1,h2+3)",
        delta(scaled(p.z), count(2 * p.m1 - 1), height(p.h2 + 3)),
        (2 * p.m1 - 1) * pow2m1(p.h2 + 3),
    );
    b.push("a3", "D(-1,1,h2)", delta(scaled(-1), 1, height(p.h2)), pow2m1(p.h2));
    b.push("a4", "D(Y,M2,3)", delta(scaled(p.y), count(p.m2), 3), 7 * p.m2);
    let a5: Vec<Key> = (1..=n)
        .rev()
        .flat_map(|i| gamma(scaled_minus_eps(i), 1, 2).expect("height 2"))
        .collect();
    b.push("a5", "G(i-e,1,2) for i=n..1", a5, 2 * n);
    b.push(
        "a6",
        "G(0-e,3m-n,2)",
        gamma(scaled_minus_eps(0), count(3 * m - n), 2).expect("height 2"),
        2 * (3 * m - n),
    );
    b.push("a7", "D(-2,m/2,1)", delta(scaled(-2), count(m / 2), 1), m / 2);

    for i in (1..=norm.m()).rev() {
        b.push(format!("b{i}"), "subset", subset_block(i, norm.sets[i - 1], &p), 18);
    }

    b.push(
        "c1",
        "D(X,8m,h2-2)",
        delta(scaled(p.x), count(8 * m), height(p.h2 - 2)),
        8 * m * pow2m1(p.h2 - 2),
    );
    let c2: Vec<Key> = (1..=n).rev().flat_map(|i| delta(scaled(i), 4, 1)).collect();
    b.push("c2", "D(i,4,1) for i=n..1", c2, 4 * n);
    b.push("c3", "D(0.1,6m-2n,1)", delta(SCALED_TENTH, count(6 * m - 2 * n), 1), 6 * m - 2 * n);

    let mut seen: HashMap<Key, usize> = HashMap::new();
    for k in &b.items {
        *seen.entry(*k).or_default() += 1;
    }
    let mut duplicates: Vec<(Key, usize)> = seen.into_iter().filter(|&(_, c)| c > 1).collect();
    duplicates.sort_unstable();

    let report = CapacityReport {
        params: p,
        padded,
        total: b.items.len(),
        blocks: b.blocks,
        duplicates,
    };
    (Sequence::new(b.items), report)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("not an exact cover: {0}")]
    NotACover(#[from] CoverError),
    #[error("sequence has {got} elements but the report lists {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("instance length {total} differs from the heap capacity 2^h - 1 = {capacity}; no complete heap of the forced shape exists")]
    Capacity { total: usize, capacity: i64 },
    #[error(transparent)]
    Exhausted(#[from] Exhausted),
    #[error("the search proved the sequence is not completely heapable")]
    NotCompletelyHeapable,
}

/// A complete heap for the instance sequence given a verified exact cover.
///
/// The cover and the capacity identity are checked first; a failure of
/// either is reported instead of attempting a placement. The heap itself
/// comes from the complete-shape search under `budget`, so any tree
/// returned passes [`verify_heap`] and [`verify_complete`].
pub fn build_witness(
    inst: &X3CInstance,
    cover: &[usize],
    seq: &[Key],
    report: &CapacityReport,
    budget: SearchBudget,
) -> Result<HeapTree<Key>, WitnessError> {
    inst.check_cover(cover)?;
    if seq.len() != report.total {
        return Err(WitnessError::LengthMismatch {
            got: seq.len(),
            expected: report.total,
        });
    }
    if !report.fits() {
        return Err(WitnessError::Capacity {
            total: report.total,
            capacity: report.capacity(),
        });
    }
    let tree = complete_witness(seq, budget)?.ok_or(WitnessError::NotCompletelyHeapable)?;
    debug_assert_eq!(verify_heap(seq, &tree), Ok(true));
    debug_assert_eq!(verify_complete(&tree), Ok(true));
    Ok(tree)
}

/// Checks that the `m` values `(-1, i, 0)` sit at the roots of disjoint
/// perfect 15-node subtrees. Returns the first violation.
pub fn check_tree_slot_roots(tree: &HeapTree<Key>, m: usize) -> Result<(), String> {
    let mut roots = Vec::with_capacity(m);
    for i in 1..=m {
        let want = Key::Triple(scaled(-1), i as i64, 0);
        let found: Vec<NodeId> = tree.ids().filter(|&id| tree.node(id).value == want).collect();
        match found[..] {
            [id] => roots.push(id),
            _ => return Err(format!("value {want} occurs {} times", found.len())),
        }
    }
    for (a, &ra) in roots.iter().enumerate() {
        if !is_perfect(tree, ra, 4) {
            return Err(format!("(-1,{},0) does not root a perfect 4-level subtree", a + 1));
        }
        for (b, &rb) in roots.iter().enumerate() {
            if a != b && tree.is_ancestor(ra, rb) {
                return Err(format!("(-1,{},0) is an ancestor of (-1,{},0)", a + 1, b + 1));
            }
        }
    }
    Ok(())
}

fn is_perfect<K>(tree: &HeapTree<K>, id: NodeId, levels: usize) -> bool {
    let kids: Vec<NodeId> = tree.children(id).collect();
    if levels == 1 {
        return kids.is_empty();
    }
    kids.len() == 2 && kids.iter().all(|&c| is_perfect(tree, c, levels - 1))
}

/// Outcome of checking a structural predicate over every witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimCheck {
    pub witnesses: u64,
    pub violations: u64,
}

impl ClaimCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

fn check_all<K: Ord + Clone>(
    seq: &[K],
    budget: SearchBudget,
    mut ok: impl FnMut(&HeapTree<K>) -> bool,
) -> Result<ClaimCheck, Exhausted> {
    let mut violations = 0;
    let witnesses = for_each_witness(seq, budget, |t| {
        violations += u64::from(!ok(t));
        true
    })?;
    Ok(ClaimCheck { witnesses, violations })
}

/// Every element larger than all later elements is a leaf in every witness.
pub fn check_suffix_maxima_are_leaves<K: Ord + Clone>(seq: &[K], budget: SearchBudget) -> Result<ClaimCheck, Exhausted> {
    let maxima: Vec<usize> = (0..seq.len())
        .filter(|&i| seq[i + 1..].iter().all(|later| seq[i] > *later))
        .collect();
    check_all(seq, budget, |t| {
        maxima
            .iter()
            .all(|&i| t.node_of_seq_index(i).is_some_and(|id| t.node(id).child_count() == 0))
    })
}

/// No two elements of the decreasing subsequence at `indices` are related
/// by ancestry in any witness. Panics if the subsequence is not decreasing.
pub fn check_decreasing_unrelated<K: Ord + Clone>(
    seq: &[K],
    indices: &[usize],
    budget: SearchBudget,
) -> Result<ClaimCheck, Exhausted> {
    assert!(
        indices.windows(2).all(|w| w[0] < w[1] && seq[w[0]] > seq[w[1]]),
        "indices must select a decreasing subsequence"
    );
    check_all(seq, budget, |t| {
        let ids: Vec<NodeId> = indices.iter().filter_map(|&i| t.node_of_seq_index(i)).collect();
        ids.iter()
            .all(|&a| ids.iter().all(|&b| a == b || !t.is_ancestor(a, b)))
    })
}

/// Shape facts for `Δ(x, k, h)` heaped beneath a smaller root, over every
/// witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaShape {
    pub witnesses: u64,
    /// Witnesses in which the first `k` triples are pairwise unrelated.
    pub initial_row_unrelated: u64,
    /// Least number of gadget levels below the root over all witnesses.
    pub min_depth: usize,
    /// Most root children used by the gadget in a witness of least depth.
    pub width_at_min_depth: usize,
}

pub fn delta_shape(x: i64, k: usize, h: u32, budget: SearchBudget) -> Result<DeltaShape, Exhausted> {
    let mut seq = vec![Key::Triple(x, -1, 0)];
    seq.extend(delta(x, k, h));
    let mut shape = DeltaShape {
        witnesses: 0,
        initial_row_unrelated: 0,
        min_depth: usize::MAX,
        width_at_min_depth: 0,
    };
    shape.witnesses = for_each_witness(&seq, budget, |t| {
        let row: Vec<NodeId> = (1..=k).filter_map(|i| t.node_of_seq_index(i)).collect();
        if row.iter().all(|&a| row.iter().all(|&b| a == b || !t.is_ancestor(a, b))) {
            shape.initial_row_unrelated += 1;
        }
        let depth = t.height() - 1;
        let width = row.iter().filter(|&&id| t.depth(id) == 1).count();
        if depth < shape.min_depth {
            shape.min_depth = depth;
            shape.width_at_min_depth = width;
        } else if depth == shape.min_depth {
            shape.width_at_min_depth = shape.width_at_min_depth.max(width);
        }
        true
    })?;
    Ok(shape)
}
