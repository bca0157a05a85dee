//! Heap trees, signatures and the verification predicates.
//!
//! Trees live in an index arena. Every node carries its value, the position
//! of its element in the source sequence, a parent link and up to two
//! children. Builders in this crate only append nodes, so arena order is
//! insertion order.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn slot(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node<K> {
    pub value: K,
    pub seq_index: usize,
    pub parent: Option<NodeId>,
    pub children: [Option<NodeId>; 2],
}

impl<K> Node<K> {
    pub fn child_count(&self) -> usize {
        self.children.iter().flatten().count()
    }
}

/// Malformed trees. Distinct from a well-formed tree that fails a predicate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("tree has nodes but no root")]
    NoRoot,
    #[error("root reference {0} is out of range")]
    BadRoot(usize),
    #[error("root node {0} has a parent")]
    RootHasParent(usize),
    #[error("node {node} references missing node {target}")]
    Dangling { node: usize, target: usize },
    #[error("node {0} has no parent but is not the root")]
    ExtraRoot(usize),
    #[error("parent/child links of node {0} disagree")]
    LinkMismatch(usize),
    #[error("node {0} lists more than two children")]
    TooManyChildren(usize),
    #[error("{0} node(s) unreachable from the root (cycle)")]
    Unreachable(usize),
    #[error("node {node} has sequence index {seq_index}, past the sequence end {len}")]
    SeqIndexOutOfRange { node: usize, seq_index: usize, len: usize },
    #[error("sequence index {0} is used by two nodes")]
    DuplicateSeqIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttachError {
    #[error("parent node {0} does not exist")]
    NoSuchParent(usize),
    #[error("child slot {side:?} of node {parent} is occupied")]
    Occupied { parent: usize, side: Side },
    #[error("tree already has a root")]
    HasRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("signature of an empty tree")]
pub struct EmptyTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("signatures have different lengths ({0} vs {1})")]
pub struct ArityError(pub usize, pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapTree<K> {
    nodes: Vec<Node<K>>,
    root: Option<NodeId>,
}

impl<K> Default for HeapTree<K> {
    fn default() -> Self {
        HeapTree {
            nodes: Vec::new(),
            root: None,
        }
    }
}

impl<K> HeapTree<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_root(value: K, seq_index: usize) -> Self {
        let mut t = Self::new();
        t.nodes.push(Node {
            value,
            seq_index,
            parent: None,
            children: [None, None],
        });
        t.root = Some(NodeId(0));
        t
    }

    /// Builds a tree from raw parts without checking anything. Use
    /// [`HeapTree::validate`] before trusting the result.
    pub fn from_raw(nodes: Vec<Node<K>>, root: Option<NodeId>) -> Self {
        HeapTree { nodes, root }
    }

    pub fn into_raw(self) -> (Vec<Node<K>>, Option<NodeId>) {
        (self.nodes, self.root)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node<K> {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node<K>] {
        &self.nodes
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn set_root(&mut self, value: K, seq_index: usize) -> Result<NodeId, AttachError> {
        if self.root.is_some() {
            return Err(AttachError::HasRoot);
        }
        *self = Self::with_root(value, seq_index);
        Ok(NodeId(0))
    }

    pub fn attach(
        &mut self,
        parent: NodeId,
        side: Side,
        value: K,
        seq_index: usize,
    ) -> Result<NodeId, AttachError> {
        let p = self
            .nodes
            .get(parent.index())
            .ok_or(AttachError::NoSuchParent(parent.index()))?;
        if p.children[side.slot()].is_some() {
            return Err(AttachError::Occupied {
                parent: parent.index(),
                side,
            });
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            value,
            seq_index,
            parent: Some(parent),
            children: [None, None],
        });
        self.nodes[parent.index()].children[side.slot()] = Some(id);
        Ok(id)
    }

    /// Attaches under `parent` in its first free child slot, left first.
    pub fn attach_next(&mut self, parent: NodeId, value: K, seq_index: usize) -> Result<NodeId, AttachError> {
        let p = self
            .nodes
            .get(parent.index())
            .ok_or(AttachError::NoSuchParent(parent.index()))?;
        let side = match p.children {
            [None, _] => Side::Left,
            [Some(_), None] => Side::Right,
            _ => {
                return Err(AttachError::Occupied {
                    parent: parent.index(),
                    side: Side::Right,
                })
            }
        };
        self.attach(parent, side, value, seq_index)
    }

    /// Removes the most recently added node if it is a leaf.
    pub fn pop_leaf(&mut self) -> Option<Node<K>> {
        let last = self.nodes.last()?;
        if last.child_count() > 0 {
            return None;
        }
        let id = NodeId(self.nodes.len() as u32 - 1);
        match last.parent {
            Some(p) => {
                for c in self.nodes[p.index()].children.iter_mut() {
                    if *c == Some(id) {
                        *c = None;
                    }
                }
            }
            None => self.root = None,
        }
        self.nodes.pop()
    }

    /// Builds a tree from heap-numbered positions (root 0, children `2p+1`
    /// and `2p+2`). Entries must be in insertion order, parents first.
    pub fn from_positions(placements: impl IntoIterator<Item = (usize, K, usize)>) -> Result<Self, AttachError> {
        let mut tree = HeapTree::new();
        let mut node_at = std::collections::HashMap::new();
        for (pos, value, seq_index) in placements {
            let id = if pos == 0 {
                tree.set_root(value, seq_index)?
            } else {
                let parent_pos = (pos - 1) / 2;
                let parent = *node_at
                    .get(&parent_pos)
                    .ok_or(AttachError::NoSuchParent(parent_pos))?;
                let side = if pos % 2 == 1 { Side::Left } else { Side::Right };
                tree.attach(parent, side, value, seq_index)?
            };
            node_at.insert(pos, id);
        }
        Ok(tree)
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[id.index()].children.iter().flatten().copied()
    }

    /// Number of edges from the root to `id`.
    pub fn depth(&self, id: NodeId) -> usize {
        let mut d = 0;
        let mut cur = self.nodes[id.index()].parent;
        while let Some(p) = cur {
            d += 1;
            cur = self.nodes[p.index()].parent;
        }
        d
    }

    /// True if `a` is a proper ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = self.nodes[b.index()].parent;
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.nodes[p.index()].parent;
        }
        false
    }

    /// Number of levels (0 for the empty tree).
    pub fn height(&self) -> usize {
        let Some(root) = self.root else { return 0 };
        let mut best = 0;
        let mut stack = vec![(root, 1usize)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            stack.extend(self.children(id).map(|c| (c, d + 1)));
        }
        best
    }

    /// Node lookup by sequence position.
    pub fn node_of_seq_index(&self, seq_index: usize) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| n.seq_index == seq_index)
            .map(|i| NodeId(i as u32))
    }

    /// Checks arena consistency: one root, symmetric parent/child links, no
    /// dangling references, no cycles.
    pub fn validate(&self) -> Result<(), StructureError> {
        let n = self.nodes.len();
        let root = match (self.root, n) {
            (None, 0) => return Ok(()),
            (None, _) => return Err(StructureError::NoRoot),
            (Some(r), _) if r.index() >= n => return Err(StructureError::BadRoot(r.index())),
            (Some(r), _) => r,
        };
        if self.nodes[root.index()].parent.is_some() {
            return Err(StructureError::RootHasParent(root.index()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node.parent {
                None if i != root.index() => return Err(StructureError::ExtraRoot(i)),
                None => {}
                Some(p) => {
                    let pn = self.nodes.get(p.index()).ok_or(StructureError::Dangling {
                        node: i,
                        target: p.index(),
                    })?;
                    let hits = pn.children.iter().filter(|c| **c == Some(NodeId(i as u32))).count();
                    if hits != 1 {
                        return Err(StructureError::LinkMismatch(i));
                    }
                }
            }
            for c in node.children.iter().flatten() {
                let cn = self.nodes.get(c.index()).ok_or(StructureError::Dangling {
                    node: i,
                    target: c.index(),
                })?;
                if cn.parent != Some(NodeId(i as u32)) {
                    return Err(StructureError::LinkMismatch(i));
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                return Err(StructureError::LinkMismatch(id.index()));
            }
            count += 1;
            stack.extend(self.children(id));
        }
        if count != n {
            return Err(StructureError::Unreachable(n - count));
        }
        Ok(())
    }

    fn validate_positions(&self, len: usize) -> Result<(), StructureError> {
        let mut used = vec![false; len];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.seq_index >= len {
                return Err(StructureError::SeqIndexOutOfRange {
                    node: i,
                    seq_index: node.seq_index,
                    len,
                });
            }
            if std::mem::replace(&mut used[node.seq_index], true) {
                return Err(StructureError::DuplicateSeqIndex(node.seq_index));
            }
        }
        Ok(())
    }

    /// Parent-array form: one `(seq_index, parent position)` entry per node
    /// in arena order. A child listed earlier than its sibling is the left one.
    pub fn to_parent_links(&self) -> Vec<(usize, Option<usize>)> {
        self.nodes
            .iter()
            .map(|n| (n.seq_index, n.parent.map(NodeId::index)))
            .collect()
    }

    /// Keeps the tree shape but swaps in new values, e.g. true keys for a
    /// tree built over surrogate keys.
    pub fn map_values<J>(self, mut f: impl FnMut(&Node<K>) -> J) -> HeapTree<J> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                value: f(n),
                seq_index: n.seq_index,
                parent: n.parent,
                children: n.children,
            })
            .collect();
        HeapTree { nodes, root: self.root }
    }
}

impl<K: Clone> HeapTree<K> {
    /// Rebuilds a tree from parent links, taking values from `seq`.
    pub fn from_parent_links(links: &[(usize, Option<usize>)], seq: &[K]) -> Result<Self, StructureError> {
        let n = links.len();
        let mut nodes = Vec::with_capacity(n);
        let mut root = None;
        for (i, &(seq_index, parent)) in links.iter().enumerate() {
            let value = seq
                .get(seq_index)
                .cloned()
                .ok_or(StructureError::SeqIndexOutOfRange {
                    node: i,
                    seq_index,
                    len: seq.len(),
                })?;
            match parent {
                None if root.is_some() => return Err(StructureError::ExtraRoot(i)),
                None => root = Some(NodeId(i as u32)),
                Some(p) if p >= n => return Err(StructureError::Dangling { node: i, target: p }),
                Some(_) => {}
            }
            nodes.push(Node {
                value,
                seq_index,
                parent: parent.map(|p| NodeId(p as u32)),
                children: [None, None],
            });
        }
        for i in 0..n {
            if let Some(p) = nodes[i].parent {
                let slot = nodes[p.index()]
                    .children
                    .iter()
                    .position(Option::is_none)
                    .ok_or(StructureError::TooManyChildren(p.index()))?;
                nodes[p.index()].children[slot] = Some(NodeId(i as u32));
            }
        }
        if n > 0 && root.is_none() {
            return Err(StructureError::NoRoot);
        }
        let tree = HeapTree { nodes, root };
        tree.validate()?;
        Ok(tree)
    }
}

/// True iff `tree` is a valid heap witness for `seq`: heap order, temporal
/// order, arity, and every node's value equals the sequence element it names.
pub fn verify_heap<K: Ord>(seq: &[K], tree: &HeapTree<K>) -> Result<bool, StructureError> {
    tree.validate()?;
    tree.validate_positions(seq.len())?;
    for node in tree.nodes() {
        if node.value != seq[node.seq_index] {
            return Ok(false);
        }
        if let Some(p) = node.parent {
            let parent = tree.node(p);
            if parent.value > node.value || parent.seq_index >= node.seq_index {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every level but the last is full and the last is left-justified.
pub fn verify_complete<K>(tree: &HeapTree<K>) -> Result<bool, StructureError> {
    tree.validate()?;
    let Some(root) = tree.root() else { return Ok(true) };
    // Heap numbering: root 1, children 2i and 2i+1. Complete iff the largest
    // number equals the node count.
    let n = tree.len() as u64;
    let mut max_label = 0u64;
    let mut queue = VecDeque::from([(root, 1u64)]);
    while let Some((id, label)) = queue.pop_front() {
        if label > n {
            return Ok(false);
        }
        max_label = max_label.max(label);
        let node = tree.node(id);
        if let Some(l) = node.children[0] {
            queue.push_back((l, 2 * label));
        }
        if let Some(r) = node.children[1] {
            queue.push_back((r, 2 * label + 1));
        }
    }
    Ok(max_label == n)
}

/// Sorted free-slot values: each node contributes its value once per free
/// child slot, so a tree of `k` nodes has `k + 1` entries.
pub fn signature_of<K: Ord + Clone>(tree: &HeapTree<K>) -> Result<Vec<K>, EmptyTree> {
    if tree.is_empty() {
        return Err(EmptyTree);
    }
    let mut sig = Vec::with_capacity(tree.len() + 1);
    for node in tree.nodes() {
        for _ in node.child_count()..2 {
            sig.push(node.value.clone());
        }
    }
    sig.sort();
    Ok(sig)
}

/// Pointwise `<=` between two sorted signatures of equal length.
pub fn dominates<K: Ord>(sig1: &[K], sig2: &[K]) -> Result<bool, ArityError> {
    if sig1.len() != sig2.len() {
        return Err(ArityError(sig1.len(), sig2.len()));
    }
    Ok(sig1.iter().zip(sig2).all(|(a, b)| a <= b))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1,3,5,2,4 heaped as root 1 with children 3 and 2, and 3 over 5 and 4.
    fn example_tree() -> (Vec<i64>, HeapTree<i64>) {
        let seq = vec![1, 3, 5, 2, 4];
        let mut t = HeapTree::with_root(1, 0);
        let three = t.attach(NodeId(0), Side::Left, 3, 1).unwrap();
        t.attach(three, Side::Left, 5, 2).unwrap();
        t.attach(NodeId(0), Side::Right, 2, 3).unwrap();
        t.attach(three, Side::Right, 4, 4).unwrap();
        (seq, t)
    }

    #[test]
    fn verifies_the_introductory_example() {
        let (seq, t) = example_tree();
        assert_eq!(verify_heap(&seq, &t), Ok(true));
    }

    #[test]
    fn single_node_is_a_heap() {
        assert_eq!(verify_heap(&[7], &HeapTree::with_root(7, 0)), Ok(true));
    }

    #[test]
    fn rejects_heap_violation() {
        let mut t = HeapTree::with_root(5, 0);
        t.attach(NodeId(0), Side::Left, 2, 1).unwrap();
        assert_eq!(verify_heap(&[5, 2], &t), Ok(false));
    }

    #[test]
    fn rejects_temporal_violation_and_wrong_values() {
        // 2 placed at index 1 cannot parent 1's element at index 0.
        let nodes = vec![
            Node { value: 2, seq_index: 1, parent: None, children: [Some(NodeId(1)), None] },
            Node { value: 3, seq_index: 0, parent: Some(NodeId(0)), children: [None, None] },
        ];
        let t = HeapTree::from_raw(nodes, Some(NodeId(0)));
        assert_eq!(verify_heap(&[3, 2], &t), Ok(false));
        let t = HeapTree::with_root(4, 0);
        assert_eq!(verify_heap(&[3], &t), Ok(false));
    }

    #[test]
    fn structural_errors_are_not_false() {
        // Two roots.
        let nodes = vec![
            Node { value: 1, seq_index: 0, parent: None, children: [None, None] },
            Node { value: 2, seq_index: 1, parent: None, children: [None, None] },
        ];
        let t = HeapTree::from_raw(nodes, Some(NodeId(0)));
        assert_eq!(verify_heap(&[1, 2], &t), Err(StructureError::ExtraRoot(1)));

        // Cycle between two non-root nodes.
        let nodes = vec![
            Node { value: 1, seq_index: 0, parent: None, children: [None, None] },
            Node { value: 2, seq_index: 1, parent: Some(NodeId(2)), children: [Some(NodeId(2)), None] },
            Node { value: 3, seq_index: 2, parent: Some(NodeId(1)), children: [Some(NodeId(1)), None] },
        ];
        let t = HeapTree::from_raw(nodes, Some(NodeId(0)));
        assert_eq!(verify_heap(&[1, 2, 3], &t), Err(StructureError::Unreachable(2)));

        // Dangling child.
        let nodes = vec![Node { value: 1, seq_index: 0, parent: None, children: [Some(NodeId(9)), None] }];
        let t = HeapTree::from_raw(nodes, Some(NodeId(0)));
        assert!(matches!(verify_heap(&[1], &t), Err(StructureError::Dangling { .. })));

        // Same sequence element used twice.
        let mut t = HeapTree::with_root(1, 0);
        t.attach(NodeId(0), Side::Left, 1, 0).unwrap();
        assert_eq!(verify_heap(&[1, 1], &t), Err(StructureError::DuplicateSeqIndex(0)));
    }

    #[test]
    fn completeness() {
        let mut t = HeapTree::with_root(0, 0);
        t.attach(NodeId(0), Side::Left, 1, 1).unwrap();
        t.attach(NodeId(0), Side::Right, 1, 2).unwrap();
        assert_eq!(verify_complete(&t), Ok(true));

        let mut t = HeapTree::with_root(0, 0);
        t.attach(NodeId(0), Side::Right, 1, 1).unwrap();
        assert_eq!(verify_complete(&t), Ok(false));

        // Perfect 7-node tree minus its last leaf.
        let mut t = HeapTree::with_root(0, 0);
        let l = t.attach(NodeId(0), Side::Left, 0, 1).unwrap();
        let r = t.attach(NodeId(0), Side::Right, 0, 2).unwrap();
        t.attach(l, Side::Left, 0, 3).unwrap();
        t.attach(l, Side::Right, 0, 4).unwrap();
        t.attach(r, Side::Left, 0, 5).unwrap();
        assert_eq!(verify_complete(&t), Ok(true));
        t.attach(r, Side::Right, 0, 6).unwrap();
        assert_eq!(verify_complete(&t), Ok(true));

        // Gap in the last level.
        let mut t = HeapTree::with_root(0, 0);
        let l = t.attach(NodeId(0), Side::Left, 0, 1).unwrap();
        let r = t.attach(NodeId(0), Side::Right, 0, 2).unwrap();
        t.attach(l, Side::Left, 0, 3).unwrap();
        t.attach(r, Side::Left, 0, 4).unwrap();
        assert_eq!(verify_complete(&t), Ok(false));

        // A long chain must not overflow the numbering.
        let mut t = HeapTree::with_root(0, 0);
        let mut cur = NodeId(0);
        for i in 1..200 {
            cur = t.attach(cur, Side::Left, 0, i).unwrap();
        }
        assert_eq!(verify_complete(&t), Ok(false));
    }

    #[test]
    fn signatures() {
        // Any heap of 1,4,2,2: root 1 over 4 and 2, then 2 under 2.
        let mut t = HeapTree::with_root(1, 0);
        t.attach(NodeId(0), Side::Left, 4, 1).unwrap();
        let two = t.attach(NodeId(0), Side::Right, 2, 2).unwrap();
        t.attach(two, Side::Left, 2, 3).unwrap();
        assert_eq!(signature_of(&t), Ok(vec![2, 2, 2, 4, 4]));

        assert_eq!(signature_of(&HeapTree::with_root(9, 0)), Ok(vec![9, 9]));
        assert_eq!(signature_of(&HeapTree::<i64>::new()), Err(EmptyTree));

        let (_, t) = example_tree();
        assert_eq!(signature_of(&t), Ok(vec![2, 2, 4, 4, 5, 5]));
    }

    #[test]
    fn domination() {
        assert_eq!(dominates(&[1, 2], &[1, 3]), Ok(true));
        assert_eq!(dominates(&[1, 3], &[1, 2]), Ok(false));
        assert_eq!(dominates(&[4, 4, 5], &[4, 4, 5]), Ok(true));
        assert_eq!(dominates(&[1], &[1, 2]), Err(ArityError(1, 2)));
    }

    #[test]
    fn parent_links_round_trip() {
        let (seq, t) = example_tree();
        let links = t.to_parent_links();
        let back = HeapTree::from_parent_links(&links, &seq).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn parent_links_reject_malformed() {
        let seq = [1, 2, 3, 4];
        assert_eq!(
            HeapTree::from_parent_links(&[(0, None), (1, None)], &seq).unwrap_err(),
            StructureError::ExtraRoot(1)
        );
        assert_eq!(
            HeapTree::from_parent_links(&[(0, None), (1, Some(0)), (2, Some(0)), (3, Some(0))], &seq).unwrap_err(),
            StructureError::TooManyChildren(0)
        );
        assert!(matches!(
            HeapTree::from_parent_links(&[(0, None), (1, Some(5))], &seq).unwrap_err(),
            StructureError::Dangling { .. }
        ));
        assert!(matches!(
            HeapTree::from_parent_links(&[(0, None), (1, Some(2)), (2, Some(1))], &seq).unwrap_err(),
            StructureError::Unreachable(2)
        ));
    }
}
