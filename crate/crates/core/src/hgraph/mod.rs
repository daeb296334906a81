//! Directed hypergraphs derived from the sparsity pattern of `(A, B)`.
//!
//! State nodes occupy ids `0..n`, control nodes `n..n+m`. A state hyperedge
//! carries a head *set* and a tail *multiset* of length `k - 1`; a control
//! hyperedge links one control node (tail) to one state node (head).

mod expand;
mod io;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expand::{Digraph, StarExpansion};
pub use io::{
    parse_hypergraph, read_hypergraph, read_hypergraph_with_metadata, render_hypergraph, write_hypergraph,
    write_hypergraph_with_metadata, HypergraphFile,
};

pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based label used in files and reports.
    #[inline]
    pub fn one_based(self) -> usize {
        self.index() + 1
    }

    pub fn from_one_based(label: usize) -> Result<Self> {
        if label == 0 {
            return Err(Error::validation("node ids are 1-based; got 0"));
        }
        Ok(NodeId::new(label - 1))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.one_based())
    }
}

pub fn nodes(ids: impl IntoIterator<Item = usize>) -> Vec<NodeId> {
    ids.into_iter().map(NodeId::new).collect()
}

pub fn one_based_labels(ids: &[NodeId]) -> Vec<usize> {
    ids.iter().map(|v| v.one_based()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    State,
    Control,
}

/// A directed hyperedge. `head` is kept sorted and duplicate-free, `tail`
/// is kept sorted with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    head: Vec<NodeId>,
    tail: Vec<NodeId>,
    kind: EdgeKind,
}

impl Hyperedge {
    pub fn state(mut head: Vec<NodeId>, mut tail: Vec<NodeId>) -> Self {
        head.sort_unstable();
        head.dedup();
        tail.sort_unstable();
        Hyperedge {
            head,
            tail,
            kind: EdgeKind::State,
        }
    }

    /// Control hyperedge from `control_node` (id in `n..n+m`) into `state`.
    pub fn control(state: NodeId, control_node: NodeId) -> Self {
        Hyperedge {
            head: vec![state],
            tail: vec![control_node],
            kind: EdgeKind::Control,
        }
    }

    pub fn head(&self) -> &[NodeId] {
        &self.head
    }

    /// Tail multiset in ascending order.
    pub fn tail(&self) -> &[NodeId] {
        &self.tail
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    pub fn is_state(&self) -> bool {
        self.kind == EdgeKind::State
    }

    /// Tail nodes with multiplicity collapsed, ascending.
    pub fn distinct_tail(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.tail
            .iter()
            .enumerate()
            .filter(|(i, v)| *i == 0 || self.tail[i - 1] != **v)
            .map(|(_, v)| *v)
    }

    pub fn distinct_tail_len(&self) -> usize {
        self.distinct_tail().count()
    }

    fn order_key(&self) -> (EdgeKind, &[NodeId], &[NodeId]) {
        (self.kind, &self.head, &self.tail)
    }
}

fn edge_order(a: &Hyperedge, b: &Hyperedge) -> Ordering {
    a.order_key().cmp(&b.order_key())
}

/// Zero/nonzero support of a tensor pair `(A, B)`.
///
/// Each entry of `nonzeros_a` is a `k`-tuple of 0-based indices whose first
/// element is the row (head) index. Entries of `nonzeros_b` are
/// `(row, input)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SparsityPattern {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub nonzeros_a: BTreeSet<Vec<usize>>,
    pub nonzeros_b: BTreeSet<(usize, usize)>,
}

impl SparsityPattern {
    pub fn new(n: usize, k: usize, m: usize) -> Self {
        SparsityPattern {
            n,
            k,
            m,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::validation(format!(
                "tensor order k must be >= 2, got {}",
                self.k
            )));
        }
        if self.n == 0 {
            return Err(Error::validation("state dimension n must be >= 1"));
        }
        for t in &self.nonzeros_a {
            if t.len() != self.k {
                return Err(Error::validation(format!(
                    "tensor nonzero {t:?} has {} indices, expected k = {}",
                    t.len(),
                    self.k
                )));
            }
            if let Some(bad) = t.iter().find(|&&i| i >= self.n) {
                return Err(Error::validation(format!(
                    "tensor nonzero {t:?} has index {bad} out of range for n = {}",
                    self.n
                )));
            }
        }
        for &(row, input) in &self.nonzeros_b {
            if row >= self.n || input >= self.m {
                return Err(Error::validation(format!(
                    "input nonzero ({row}, {input}) out of range for n = {}, m = {}",
                    self.n, self.m
                )));
            }
        }
        Ok(())
    }
}

/// Directed hypergraph `H(A, B)`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedHypergraph {
    n: usize,
    m: usize,
    k: usize,
    edges: Vec<Hyperedge>,
    num_state_edges: usize,
    head_index: Vec<Vec<EdgeId>>,
    tail_index: Vec<Vec<EdgeId>>,
}

impl DirectedHypergraph {
    /// Validates, canonicalizes and indexes a set of hyperedges.
    ///
    /// Heads are deduplicated, tails sorted, identical edges merged, and the
    /// edge list ordered state-first by `(head, tail)`.
    pub fn new(n: usize, m: usize, k: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        if k < 2 {
            return Err(Error::validation(format!("tensor order k must be >= 2, got {k}")));
        }
        if n == 0 {
            return Err(Error::validation("state dimension n must be >= 1"));
        }
        let total = n + m;
        if total > u32::MAX as usize {
            return Err(Error::validation("too many nodes"));
        }
        let mut edges: Vec<Hyperedge> = edges
            .into_iter()
            .map(|e| match e.kind {
                EdgeKind::State => Hyperedge::state(e.head, e.tail),
                EdgeKind::Control => e,
            })
            .collect();
        for e in &edges {
            check_edge(e, n, m, k)?;
        }
        edges.sort_by(edge_order);
        edges.dedup();

        let num_state_edges = edges.iter().take_while(|e| e.is_state()).count();
        let mut head_index = vec![Vec::new(); total];
        let mut tail_index = vec![Vec::new(); total];
        for (id, e) in edges.iter().enumerate() {
            for v in &e.head {
                head_index[v.index()].push(id);
            }
            for v in e.distinct_tail() {
                tail_index[v.index()].push(id);
            }
        }
        Ok(DirectedHypergraph {
            n,
            m,
            k,
            edges,
            num_state_edges,
            head_index,
            tail_index,
        })
    }

    /// Uncontrolled hypergraph from state hyperedges only.
    pub fn from_state_edges(n: usize, k: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        Self::new(n, 0, k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_control_nodes(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.n + self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Hyperedge {
        &self.edges[id]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_state_edges(&self) -> usize {
        self.num_state_edges
    }

    pub fn state_edges(&self) -> &[Hyperedge] {
        &self.edges[..self.num_state_edges]
    }

    pub fn control_edges(&self) -> &[Hyperedge] {
        &self.edges[self.num_state_edges..]
    }

    pub fn has_control_edges(&self) -> bool {
        self.num_state_edges < self.edges.len()
    }

    /// Edges whose head contains `v`.
    pub fn edges_with_head(&self, v: NodeId) -> &[EdgeId] {
        &self.head_index[v.index()]
    }

    /// Edges whose (distinct) tail contains `v`.
    pub fn edges_with_tail(&self, v: NodeId) -> &[EdgeId] {
        &self.tail_index[v.index()]
    }

    pub fn is_state_node(&self, v: NodeId) -> bool {
        v.index() < self.n
    }

    pub fn state_nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId::new)
    }

    /// Id of the control node for 0-based input `input`.
    pub fn control_node(&self, input: usize) -> NodeId {
        NodeId::new(self.n + input)
    }

    /// Checks that every node in `nodes` is a state node.
    pub fn check_state_nodes(&self, nodes: &[NodeId], what: &str) -> Result<()> {
        match nodes.iter().find(|v| v.index() >= self.n) {
            Some(v) => Err(Error::validation(format!(
                "{what} node {v} out of range for n = {}",
                self.n
            ))),
            None => Ok(()),
        }
    }

    /// Adds one fresh control input per driver node.
    pub fn with_drivers(&self, drivers: &[NodeId]) -> Result<Self> {
        self.check_state_nodes(drivers, "driver")?;
        let mut drivers = drivers.to_vec();
        drivers.sort_unstable();
        drivers.dedup();
        let m = self.m + drivers.len();
        let mut edges = self.edges.clone();
        for (j, &d) in drivers.iter().enumerate() {
            edges.push(Hyperedge::control(d, NodeId::new(self.n + self.m + j)));
        }
        Self::new(self.n, m, self.k, edges)
    }

    /// The uncontrolled hypergraph: control nodes and control edges removed.
    pub fn without_controls(&self) -> Self {
        Self::new(self.n, 0, self.k, self.state_edges().to_vec()).expect("state edges of a valid hypergraph stay valid")
    }

    /// Merges hyperedges that share a kind and tail multiset into one edge
    /// whose head is the union of their heads.
    ///
    /// Edges with the same tail multiset are driven by the same monomial (or
    /// the same input column), so they deliver one signal, not several. The
    /// second return value maps each merged edge to the smallest original
    /// edge id in its group.
    pub fn merge_shared_tails(&self) -> (Self, Vec<EdgeId>) {
        let mut groups: Vec<(Hyperedge, EdgeId)> = Vec::with_capacity(self.edges.len());
        let mut order: Vec<EdgeId> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (&self.edges[a], &self.edges[b]);
            (ea.kind, &ea.tail, a).cmp(&(eb.kind, &eb.tail, b))
        });
        for id in order {
            let e = &self.edges[id];
            match groups.last_mut() {
                Some((g, _)) if g.kind == e.kind && g.tail == e.tail => {
                    g.head.extend_from_slice(&e.head);
                    g.head.sort_unstable();
                    g.head.dedup();
                }
                _ => groups.push((e.clone(), id)),
            }
        }
        let merged = Self::new(self.n, self.m, self.k, groups.iter().map(|(e, _)| e.clone()).collect())
            .expect("merging preserves validity");
        let mut rep = vec![0; merged.num_edges()];
        for (e, original) in groups {
            let pos = merged
                .edges
                .binary_search_by(|x| edge_order(x, &e))
                .expect("merged edge present");
            rep[pos] = original;
        }
        (merged, rep)
    }

    /// Sparsity pattern with one tensor nonzero per (head node, edge) and one
    /// input nonzero per control edge.
    pub fn to_pattern(&self) -> SparsityPattern {
        let mut p = SparsityPattern::new(self.n, self.k, self.m);
        for e in self.state_edges() {
            for h in &e.head {
                let mut t = Vec::with_capacity(self.k);
                t.push(h.index());
                t.extend(e.tail.iter().map(|v| v.index()));
                p.nonzeros_a.insert(t);
            }
        }
        for e in self.control_edges() {
            p.nonzeros_b.insert((e.head[0].index(), e.tail[0].index() - self.n));
        }
        p
    }

    pub fn star_expand(&self) -> StarExpansion {
        StarExpansion::of(self)
    }

    pub fn projection_digraph(&self) -> Digraph {
        Digraph::projection_of(self)
    }

    /// Approximate heap footprint of the edge list and incidence indices.
    pub fn structure_bytes(&self) -> usize {
        use std::mem::size_of;
        let edge_bytes: usize = self
            .edges
            .iter()
            .map(|e| size_of::<Hyperedge>() + (e.head.len() + e.tail.len()) * size_of::<NodeId>())
            .sum();
        let index_bytes: usize = self
            .head_index
            .iter()
            .chain(&self.tail_index)
            .map(|v| size_of::<Vec<EdgeId>>() + v.len() * size_of::<EdgeId>())
            .sum();
        edge_bytes + index_bytes
    }
}

fn check_edge(e: &Hyperedge, n: usize, m: usize, k: usize) -> Result<()> {
    let render = |e: &Hyperedge| {
        format!(
            "({{{}}}, {{{}}})",
            e.head.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            e.tail.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        )
    };
    match e.kind {
        EdgeKind::State => {
            if e.head.is_empty() {
                return Err(Error::validation(format!("state edge {} has an empty head", render(e))));
            }
            if e.tail.len() != k - 1 {
                return Err(Error::validation(format!(
                    "state edge {} has tail size {}, expected k - 1 = {}",
                    render(e),
                    e.tail.len(),
                    k - 1
                )));
            }
            if e.head.iter().chain(&e.tail).any(|v| v.index() >= n) {
                return Err(Error::validation(format!(
                    "state edge {} references a node outside v1..v{n}",
                    render(e)
                )));
            }
        }
        EdgeKind::Control => {
            if e.head.len() != 1 || e.tail.len() != 1 {
                return Err(Error::validation("control edge must have one head and one tail node"));
            }
            if e.head[0].index() >= n {
                return Err(Error::validation(format!(
                    "control edge targets {} outside v1..v{n}",
                    e.head[0]
                )));
            }
            let t = e.tail[0].index();
            if t < n || t >= n + m {
                return Err(Error::validation(format!(
                    "control edge into {} does not originate at a control node",
                    e.head[0]
                )));
            }
        }
    }
    Ok(())
}

/// Builds `H(A, B)` from a sparsity pattern.
///
/// Tensor nonzeros that differ only by a permutation of modes `2..k`
/// collapse to one hyperedge.
pub fn build_hypergraph(pattern: &SparsityPattern) -> Result<DirectedHypergraph> {
    pattern.validate()?;
    let n = pattern.n;
    let mut edges = Vec::with_capacity(pattern.nonzeros_a.len() + pattern.nonzeros_b.len());
    for t in &pattern.nonzeros_a {
        edges.push(Hyperedge::state(
            vec![NodeId::new(t[0])],
            t[1..].iter().map(|&i| NodeId::new(i)).collect(),
        ));
    }
    for &(row, input) in &pattern.nonzeros_b {
        edges.push(Hyperedge::control(NodeId::new(row), NodeId::new(n + input)));
    }
    DirectedHypergraph::new(n, pattern.m, pattern.k, edges)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn edge(head: &[usize], tail: &[usize]) -> Hyperedge {
        Hyperedge::state(nodes(head.iter().copied()), nodes(tail.iter().copied()))
    }

    /// n = 3, e1 = ({v2},{v1,v1,v1}), e2 = ({v3},{v1,v2,v2}).
    pub fn h1() -> DirectedHypergraph {
        DirectedHypergraph::from_state_edges(3, 4, vec![edge(&[1], &[0, 0, 0]), edge(&[2], &[0, 1, 1])]).unwrap()
    }

    /// n = 3, e1 = ({v2,v3},{v1,v1,v1}).
    pub fn h2() -> DirectedHypergraph {
        DirectedHypergraph::from_state_edges(3, 4, vec![edge(&[1, 2], &[0, 0, 0])]).unwrap()
    }

    /// n = 3, e1 = ({v1},{v2,v2,v2}).
    pub fn h3() -> DirectedHypergraph {
        DirectedHypergraph::from_state_edges(3, 4, vec![edge(&[0], &[1, 1, 1])]).unwrap()
    }
}
