//! Graphs with a priori unions: an undirected simple graph on `n` nodes plus
//! a partition of the nodes into `r >= 2` unions.
//!
//! Node ids are 0-based internally. Every error that names a node or an edge
//! reports it with 1-based labels, matching the on-disk format.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;

/// Canonical undirected edge `(min, max)`.
pub type Edge = (NodeId, NodeId);

pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("graphs are limited to {MAX_NODES} nodes, got {0}")]
    TooManyNodes(usize),
    #[error("node {node} appears in more than one union")]
    OverlappingUnions { node: usize },
    #[error("union {union} is empty")]
    EmptyUnion { union: usize },
    #[error("node {node} is not covered by any union")]
    UncoveredNode { node: usize },
    #[error("edge {{{node},{node}}} is a self-loop")]
    SelfLoop { node: usize },
    #[error("node {node} is out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("at least two unions are required, got {0}")]
    TooFewUnions(usize),
    #[error("union index {union} is out of range 1..={r}")]
    UnionOutOfRange { union: usize, r: usize },
    #[error("the relabelling is not a bijection on 1..={0}")]
    NotABijection(usize),
    #[error("cannot merge union {0} with itself")]
    SameUnion(usize),
    #[error("merging would leave a single union")]
    WouldLeaveSingleUnion,
    #[error("node {node} has no external edges")]
    NoExternalEdges { node: usize },
}

/// Set of node ids stored as a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: NodeId) -> Self {
        NodeSet(1u64 << i)
    }

    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        nodes.into_iter().fold(Self::EMPTY, |s, i| s.with(i))
    }

    pub fn contains(self, i: NodeId) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: NodeId) -> Self {
        NodeSet(self.0 | 1u64 << i)
    }

    pub fn without(self, i: NodeId) -> Self {
        NodeSet(self.0 & !(1u64 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<NodeId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// Every subset of `self`, in increasing mask order (so `∅` first).
    pub fn subsets(self) -> impl Iterator<Item = NodeSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
            Some(NodeSet(cur))
        })
    }

    /// 1-based labels, ascending.
    pub fn labels(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels()).finish()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        Self::from_nodes(iter)
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = NodeSetIter;
    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

/// Degree bookkeeping for one node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeProfile {
    pub node: NodeId,
    pub total: usize,
    pub internal: usize,
    pub external: usize,
    /// `per_union[l]` is the number of neighbours inside union `l`.
    pub per_union: Vec<usize>,
}

/// An immutable graph with a priori unions `(E, Π)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnionGraph {
    n: usize,
    edges: Vec<Edge>,
    unions: Vec<NodeSet>,
    union_of: Vec<usize>,
    adjacency: Vec<NodeSet>,
}

impl fmt::Debug for UnionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
        f.debug_struct("UnionGraph").field("n", &self.n).field("unions", &self.unions).field("edges", &edges).finish()
    }
}

fn canonical(i: NodeId, j: NodeId) -> Edge {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl UnionGraph {
    /// Builds a graph from untrusted 0-based data, checking every invariant.
    /// Duplicate edges (in either orientation) are collapsed.
    pub fn validate(n: usize, unions: &[Vec<NodeId>], edges: &[Edge]) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::TooFewNodes(n));
        }
        if n > MAX_NODES {
            return Err(GraphError::TooManyNodes(n));
        }
        let mut union_of = vec![usize::MAX; n];
        let mut blocks = Vec::with_capacity(unions.len());
        for (l, block) in unions.iter().enumerate() {
            if block.is_empty() {
                return Err(GraphError::EmptyUnion { union: l + 1 });
            }
            let mut set = NodeSet::EMPTY;
            for &i in block {
                if i >= n {
                    return Err(GraphError::NodeOutOfRange { node: i + 1, n });
                }
                if union_of[i] != usize::MAX {
                    return Err(GraphError::OverlappingUnions { node: i + 1 });
                }
                union_of[i] = l;
                set = set.with(i);
            }
            blocks.push(set);
        }
        if let Some(i) = union_of.iter().position(|&l| l == usize::MAX) {
            return Err(GraphError::UncoveredNode { node: i + 1 });
        }
        if blocks.len() < 2 {
            return Err(GraphError::TooFewUnions(blocks.len()));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::NodeOutOfRange { node: v + 1, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop { node: i + 1 });
            }
            canon.push(canonical(i, j));
        }
        Ok(Self::assemble(n, blocks, union_of, canon))
    }

    fn assemble(n: usize, unions: Vec<NodeSet>, union_of: Vec<usize>, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![NodeSet::EMPTY; n];
        for &(i, j) in &edges {
            adjacency[i] = adjacency[i].with(j);
            adjacency[j] = adjacency[j].with(i);
        }
        Self { n, edges, unions, union_of, adjacency }
    }

    /// Same partition, different edge set. Edges must already be valid for `self`.
    pub fn with_edges(&self, edges: Vec<Edge>) -> Self {
        let edges = edges.into_iter().map(|(i, j)| canonical(i, j)).collect();
        Self::assemble(self.n, self.unions.clone(), self.union_of.clone(), edges)
    }

    pub fn with_edge(&self, i: NodeId, j: NodeId) -> Self {
        let mut edges = self.edges.clone();
        edges.push(canonical(i, j));
        self.with_edges(edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn union_count(&self) -> usize {
        self.unions.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn unions(&self) -> &[NodeSet] {
        &self.unions
    }

    pub fn union(&self, l: usize) -> NodeSet {
        self.unions[l]
    }

    /// Index of the union containing `i`.
    pub fn union_of(&self, i: NodeId) -> usize {
        self.union_of[i]
    }

    /// `S^i`.
    pub fn own_union(&self, i: NodeId) -> NodeSet {
        self.unions[self.union_of[i]]
    }

    /// `S^{-i} = N \ S^i`.
    pub fn outside_union(&self, i: NodeId) -> NodeSet {
        self.nodes().difference(self.own_union(i))
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adjacency[i].contains(j)
    }

    /// `N(i)`, or `N(i) ∩ restrict`.
    pub fn neighbors(&self, i: NodeId, restrict: Option<NodeSet>) -> NodeSet {
        match restrict {
            Some(s) => self.adjacency[i].intersection(s),
            None => self.adjacency[i],
        }
    }

    /// `N(i, S^{-i})`.
    pub fn external_neighbors(&self, i: NodeId) -> NodeSet {
        self.adjacency[i].difference(self.own_union(i))
    }

    /// `d_i(S) = |N(i) ∩ S|`.
    pub fn degree_in(&self, i: NodeId, s: NodeSet) -> usize {
        self.adjacency[i].intersection(s).len()
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.adjacency[i].len()
    }

    pub fn external_degree(&self, i: NodeId) -> usize {
        self.external_neighbors(i).len()
    }

    pub fn internal_degree(&self, i: NodeId) -> usize {
        self.degree_in(i, self.own_union(i))
    }

    pub fn degree_profile(&self, i: NodeId) -> DegreeProfile {
        let per_union = self.unions.iter().map(|&s| self.degree_in(i, s)).collect();
        DegreeProfile {
            node: i,
            total: self.degree(i),
            internal: self.internal_degree(i),
            external: self.external_degree(i),
            per_union,
        }
    }

    /// `N^ext`: nodes with at least one neighbour outside their union.
    pub fn bridge_nodes(&self) -> NodeSet {
        (0..self.n).filter(|&i| self.external_degree(i) > 0).collect()
    }

    /// `ε^ext`: number of edges joining different unions.
    pub fn external_edge_count(&self) -> usize {
        self.edges.iter().filter(|&&(i, j)| self.union_of[i] != self.union_of[j]).count()
    }

    /// Some foreign union is touched only partially by `i`, while `i` also has
    /// neighbours outside that union.
    pub fn is_incomplete_bridge(&self, i: NodeId) -> bool {
        self.incomplete_unions(i).next().is_some()
    }

    /// Foreign unions `S_l` with `∅ ⊊ N(i) ∩ S_l ⊊ S_l` and `N(i) \ S_l ≠ ∅`.
    pub fn incomplete_unions(&self, i: NodeId) -> impl Iterator<Item = usize> + '_ {
        let nbrs = self.adjacency[i];
        (0..self.unions.len()).filter(move |&l| {
            let s = self.unions[l];
            let touched = nbrs.intersection(s);
            l != self.union_of[i] && !touched.is_empty() && touched != s && !nbrs.difference(s).is_empty()
        })
    }

    /// The map `ψ` if every node with neighbours has all of them inside one
    /// foreign union. Nodes without neighbours are left out of the map.
    pub fn restricted_spillover(&self) -> Option<BTreeMap<NodeId, usize>> {
        let mut psi = BTreeMap::new();
        for i in 0..self.n {
            let nbrs = self.adjacency[i];
            let Some(first) = nbrs.first() else { continue };
            let l = self.union_of[first];
            if l == self.union_of[i] || !nbrs.is_subset(self.unions[l]) {
                return None;
            }
            psi.insert(i, l);
        }
        Some(psi)
    }

    /// Relabels node `i` as `sigma[i]` in both the edge set and the partition.
    /// Union order is preserved.
    pub fn apply_permutation(&self, sigma: &[NodeId]) -> Result<Self, GraphError> {
        if sigma.len() != self.n {
            return Err(GraphError::NotABijection(self.n));
        }
        let mut seen = NodeSet::EMPTY;
        for &t in sigma {
            if t >= self.n || seen.contains(t) {
                return Err(GraphError::NotABijection(self.n));
            }
            seen = seen.with(t);
        }
        Ok(self.permuted(sigma))
    }

    /// `apply_permutation` without the bijection check.
    pub(crate) fn permuted(&self, sigma: &[NodeId]) -> Self {
        let unions: Vec<NodeSet> = self.unions.iter().map(|s| s.iter().map(|i| sigma[i]).collect()).collect();
        let mut union_of = vec![0; self.n];
        for (i, &l) in self.union_of.iter().enumerate() {
            union_of[sigma[i]] = l;
        }
        let edges = self.edges.iter().map(|&(i, j)| canonical(sigma[i], sigma[j])).collect();
        Self::assemble(self.n, unions, union_of, edges)
    }

    /// Replaces unions `a` and `b` by their union, placed at position `min(a, b)`.
    pub fn merge_unions(&self, a: usize, b: usize) -> Result<Self, GraphError> {
        let r = self.unions.len();
        for l in [a, b] {
            if l >= r {
                return Err(GraphError::UnionOutOfRange { union: l + 1, r });
            }
        }
        if a == b {
            return Err(GraphError::SameUnion(a + 1));
        }
        if r - 1 < 2 {
            return Err(GraphError::WouldLeaveSingleUnion);
        }
        let (keep, drop) = (a.min(b), a.max(b));
        let mut unions = self.unions.clone();
        unions[keep] = unions[keep].union(unions[drop]);
        unions.remove(drop);
        let union_of = self
            .union_of
            .iter()
            .map(|&l| match l {
                l if l == drop => keep,
                l if l > drop => l - 1,
                l => l,
            })
            .collect();
        Ok(Self::assemble(self.n, unions, union_of, self.edges.clone()))
    }

    /// `E_i^*`: every edge with at least one endpoint in `N(i, S^{-i})`.
    pub fn inter_union_restriction(&self, i: NodeId) -> Vec<Edge> {
        let ext = self.external_neighbors(i);
        self.edges.iter().copied().filter(|&(j, k)| ext.contains(j) || ext.contains(k)).collect()
    }

    /// The family `{E_h^i}`: for each external neighbour `h` of `i` (ascending),
    /// the edge set with every other external edge of `i` removed.
    pub fn linearity_family(&self, i: NodeId) -> Result<Vec<Vec<Edge>>, GraphError> {
        let ext = self.external_neighbors(i);
        if ext.is_empty() {
            return Err(GraphError::NoExternalEdges { node: i + 1 });
        }
        Ok(ext
            .iter()
            .map(|keep| {
                self.edges
                    .iter()
                    .copied()
                    .filter(|&(j, k)| {
                        let other = if j == i {
                            k
                        } else if k == i {
                            j
                        } else {
                            return true;
                        };
                        !ext.contains(other) || other == keep
                    })
                    .collect()
            })
            .collect())
    }
}
