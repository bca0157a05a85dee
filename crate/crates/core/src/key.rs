//! Element keys and input sequences.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

/// Integer scale applied to the first coordinate of reduction triples, so that
/// the fractional constants (`v - ε`, `0.1`) stay exact integers.
pub const SCALE: i64 = 10;

/// `ε` under [`SCALE`]: `v - ε` is encoded as `10v - 5`.
pub const EPS_SCALED: i64 = 5;

/// Scaled encoding of an integer constant `v`.
pub const fn scaled(v: i64) -> i64 {
    v * SCALE
}

/// Scaled encoding of `v - ε`.
pub const fn scaled_minus_eps(v: i64) -> i64 {
    v * SCALE - EPS_SCALED
}

/// Scaled encoding of the constant `0.1`.
pub const SCALED_TENTH: i64 = 1;

/// A totally ordered element value.
///
/// A sequence holds only one variant; ranks compare numerically and triples
/// lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Rank(i64),
    /// `(a, b, c)` with `a` already scaled by [`SCALE`].
    Triple(i64, i64, i64),
}

impl Key {
    pub fn is_triple(&self) -> bool {
        matches!(self, Key::Triple(..))
    }
}

impl From<i64> for Key {
    fn from(v: i64) -> Self {
        Key::Rank(v)
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Rank(v) => write!(f, "{v}"),
            Key::Triple(a, b, c) => write!(f, "{a},{b},{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid key {0:?}: expected an integer or `a,b,c`")]
pub struct ParseKeyError(pub String);

impl FromStr for Key {
    type Err = ParseKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseKeyError(s.to_string());
        if s.contains(',') {
            let parts: Vec<i64> = s
                .split(',')
                .map(|p| p.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            match parts[..] {
                [a, b, c] => Ok(Key::Triple(a, b, c)),
                _ => Err(bad()),
            }
        } else {
            s.parse::<i64>().map(Key::Rank).map_err(|_| bad())
        }
    }
}

/// A uniform-model draw: a real value plus its arrival index.
///
/// Equal values (probability zero) are ordered by arrival, earlier first,
/// which keeps every run deterministic.
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub value: f64,
    pub arrival: u32,
}

impl Draw {
    pub fn new(value: f64, arrival: usize) -> Self {
        Draw {
            value,
            arrival: arrival as u32,
        }
    }
}

impl PartialEq for Draw {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Draw {}

impl PartialOrd for Draw {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Draw {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.arrival.cmp(&other.arrival))
    }
}

impl Hash for Draw {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.to_bits().hash(state);
        self.arrival.hash(state);
    }
}

/// Which random-input model a sequence was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Model {
    /// No distributional claim; any keys.
    #[default]
    Arbitrary,
    /// Exactly the ranks `1..=n`, each once.
    Permutation,
    /// Uniform reals materialized as their ranks.
    Uniform,
    /// The `t`-th item (1-based) is the rank of that item among the first `t`.
    RelativeRank,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("sequence mixes integer ranks and triples (first triple at index {0})")]
    MixedKeys(usize),
    #[error("not a permutation of 1..={n}: offending item at index {index}")]
    NotPermutation { n: usize, index: usize },
    #[error("relative rank at index {index} is {value}, outside 1..={bound}")]
    BadRelativeRank { index: usize, value: i64, bound: usize },
    #[error("model {0:?} requires integer ranks")]
    NeedsRanks(Model),
}

/// An ordered list of keys tagged with its input model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sequence {
    pub items: Vec<Key>,
    pub model: Model,
}

impl Sequence {
    pub fn new(items: Vec<Key>) -> Self {
        Sequence {
            items,
            model: Model::Arbitrary,
        }
    }

    pub fn from_ranks<I: IntoIterator<Item = i64>>(ranks: I) -> Self {
        Sequence::new(ranks.into_iter().map(Key::Rank).collect())
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[Key] {
        &self.items
    }

    /// Checks the invariants of the sequence's model.
    pub fn validate(&self) -> Result<(), SequenceError> {
        if let Some(first) = self.items.first() {
            let triple = first.is_triple();
            if let Some(i) = self.items.iter().position(|k| k.is_triple() != triple) {
                return Err(SequenceError::MixedKeys(i));
            }
            if triple && self.model != Model::Arbitrary {
                return Err(SequenceError::NeedsRanks(self.model));
            }
        }
        match self.model {
            Model::Arbitrary | Model::Uniform => Ok(()),
            Model::Permutation => {
                let n = self.items.len();
                let mut seen = vec![false; n];
                for (index, k) in self.items.iter().enumerate() {
                    match *k {
                        Key::Rank(v) if v >= 1 && (v as usize) <= n && !seen[v as usize - 1] => {
                            seen[v as usize - 1] = true;
                        }
                        _ => return Err(SequenceError::NotPermutation { n, index }),
                    }
                }
                Ok(())
            }
            Model::RelativeRank => {
                for (index, k) in self.items.iter().enumerate() {
                    let bound = index + 1;
                    if let Key::Rank(v) = *k {
                        if v < 1 || v as usize > bound {
                            return Err(SequenceError::BadRelativeRank {
                                index,
                                value: v,
                                bound,
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }
}
