//! Exact heapability by greedy signature maintenance.
//!
//! Each element goes into the free slot with the largest value that does not
//! exceed it. The free slots are kept in an ordered map keyed by
//! `(slot value, parent node)`, so the placement is one predecessor query,
//! one decrement and one insert.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::tree::{HeapTree, NodeId};

/// Which slot to use when several free slots share the predecessor value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// The slot whose parent was inserted last.
    #[default]
    MostRecentParent,
    /// The slot whose parent was inserted first.
    OldestParent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no free slot has a value at or below the element")]
pub struct NotPlaceable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot decide heapability of an empty sequence")]
pub struct EmptyInput;

/// A heap under construction plus its signature.
#[derive(Debug, Clone)]
pub struct GreedyState<K> {
    tree: HeapTree<K>,
    /// Free-slot multiplicity per `(value, parent)`; always 1 or 2.
    slots: BTreeMap<(K, NodeId), u8>,
    free: usize,
    tie: TieBreak,
}

impl<K: Ord + Clone> Default for GreedyState<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> GreedyState<K> {
    pub fn new() -> Self {
        GreedyState {
            tree: HeapTree::new(),
            slots: BTreeMap::new(),
            free: 0,
            tie: TieBreak::default(),
        }
    }

    pub fn with_tie_break(tie: TieBreak) -> Self {
        GreedyState { tie, ..Self::new() }
    }

    /// Continues from an existing heap (for instance a seed built from an
    /// increasing chain).
    pub fn from_tree(tree: HeapTree<K>) -> Self {
        let mut slots = BTreeMap::new();
        let mut free = 0;
        for id in tree.ids() {
            let node = tree.node(id);
            let open = 2 - node.child_count();
            if open > 0 {
                slots.insert((node.value.clone(), id), open as u8);
                free += open;
            }
        }
        GreedyState {
            tree,
            slots,
            free,
            tie: TieBreak::default(),
        }
    }

    pub fn tree(&self) -> &HeapTree<K> {
        &self.tree
    }

    pub fn into_tree(self) -> HeapTree<K> {
        self.tree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn free_slots(&self) -> usize {
        self.free
    }

    /// The signature as a sorted list, one entry per free slot.
    pub fn signature(&self) -> Vec<K> {
        let mut sig = Vec::with_capacity(self.free);
        for ((value, _), &count) in &self.slots {
            for _ in 0..count {
                sig.push(value.clone());
            }
        }
        sig
    }

    /// Smallest free-slot value, if any.
    pub fn min_slot(&self) -> Option<&K> {
        self.slots.keys().next().map(|(v, _)| v)
    }

    /// Parent of the slot the greedy rule would use for `x`.
    pub fn predecessor(&self, x: &K) -> Option<NodeId> {
        let ((value, last), _) = self.slots.range(..=(x.clone(), NodeId(u32::MAX))).next_back()?;
        match self.tie {
            TieBreak::MostRecentParent => Some(*last),
            TieBreak::OldestParent => self
                .slots
                .range((value.clone(), NodeId(0))..)
                .next()
                .map(|((_, id), _)| *id),
        }
    }

    /// Places `x` (the element at `seq_index` of the source) by the greedy
    /// rule. On failure the state is unchanged.
    pub fn insert(&mut self, x: K, seq_index: usize) -> Result<NodeId, NotPlaceable> {
        if self.tree.is_empty() {
            return Ok(self.place_root(x, seq_index));
        }
        let parent = self.predecessor(&x).ok_or(NotPlaceable)?;
        Ok(self.place_under(parent, x, seq_index))
    }

    /// Like [`insert`](Self::insert), but `pick(k)` chooses among the `k`
    /// free slots that share the predecessor value (ordered oldest parent
    /// first).
    pub fn insert_by(
        &mut self,
        x: K,
        seq_index: usize,
        mut pick: impl FnMut(usize) -> usize,
    ) -> Result<NodeId, NotPlaceable> {
        if self.tree.is_empty() {
            return Ok(self.place_root(x, seq_index));
        }
        let ((value, _), _) = self
            .slots
            .range(..=(x.clone(), NodeId(u32::MAX)))
            .next_back()
            .ok_or(NotPlaceable)?;
        let candidates: Vec<NodeId> = self
            .slots
            .range((value.clone(), NodeId(0))..=(value.clone(), NodeId(u32::MAX)))
            .map(|((_, id), _)| *id)
            .collect();
        let parent = candidates[pick(candidates.len()) % candidates.len()];
        Ok(self.place_under(parent, x, seq_index))
    }

    fn place_root(&mut self, x: K, seq_index: usize) -> NodeId {
        self.tree = HeapTree::with_root(x.clone(), seq_index);
        self.slots.insert((x, NodeId(0)), 2);
        self.free = 2;
        NodeId(0)
    }

    fn place_under(&mut self, parent: NodeId, x: K, seq_index: usize) -> NodeId {
        let key = (self.tree.node(parent).value.clone(), parent);
        match self.slots.get_mut(&key) {
            Some(c) if *c > 1 => *c -= 1,
            Some(_) => {
                self.slots.remove(&key);
            }
            None => unreachable!("greedy parent without a free slot"),
        }
        let id = self
            .tree
            .attach_next(parent, x.clone(), seq_index)
            .expect("slot map and tree agree");
        self.slots.insert((x, id), 2);
        self.free += 1;
        id
    }
}

/// Outcome of [`decide_heapable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision<K> {
    Heapable(HeapTree<K>),
    /// The element at `index` found no slot.
    NotHeapable { index: usize },
}

impl<K> Decision<K> {
    pub fn is_heapable(&self) -> bool {
        matches!(self, Decision::Heapable(_))
    }

    pub fn witness(&self) -> Option<&HeapTree<K>> {
        match self {
            Decision::Heapable(t) => Some(t),
            Decision::NotHeapable { .. } => None,
        }
    }
}

/// Decides heapability of `seq`, returning a witness heap when one exists.
pub fn decide_heapable<K: Ord + Clone>(seq: &[K]) -> Result<Decision<K>, EmptyInput> {
    decide_heapable_with(seq, TieBreak::default())
}

pub fn decide_heapable_with<K: Ord + Clone>(seq: &[K], tie: TieBreak) -> Result<Decision<K>, EmptyInput> {
    if seq.is_empty() {
        return Err(EmptyInput);
    }
    let mut state = GreedyState::with_tie_break(tie);
    for (i, x) in seq.iter().enumerate() {
        if state.insert(x.clone(), i).is_err() {
            return Ok(Decision::NotHeapable { index: i });
        }
    }
    Ok(Decision::Heapable(state.into_tree()))
}
