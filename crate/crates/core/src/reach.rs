//! Forward propagation on directed hypergraphs.
//!
//! A hyperedge fires once every node of its distinct tail has been visited,
//! and firing visits its whole head at once. Control nodes count as visited
//! from the start, so existing control edges fire in the first round.
//!
//! Each edge keeps a counter of unvisited tail nodes, which makes a full
//! propagation linear in the total tail size.

use crate::error::Result;
use crate::hgraph::{DirectedHypergraph, EdgeId, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachResult {
    accessible: Vec<bool>,
    /// Fired edges with the round in which they fired (seeds are round 0).
    pub activation_order: Vec<(EdgeId, u32)>,
    /// Nodes first visited in each round, when tracing was requested.
    pub frontier_trace: Option<Vec<Vec<NodeId>>>,
}

impl ReachResult {
    pub fn is_accessible(&self, v: NodeId) -> bool {
        self.accessible[v.index()]
    }

    pub fn accessible(&self) -> Vec<NodeId> {
        self.nodes_where(true)
    }

    pub fn inaccessible(&self) -> Vec<NodeId> {
        self.nodes_where(false)
    }

    pub fn num_accessible(&self) -> usize {
        self.accessible.iter().filter(|&&a| a).count()
    }

    pub fn all_accessible(&self) -> bool {
        self.accessible.iter().all(|&a| a)
    }

    fn nodes_where(&self, flag: bool) -> Vec<NodeId> {
        self.accessible
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == flag)
            .map(|(i, _)| NodeId::new(i))
            .collect()
    }
}

/// Least fixed point of edge activation from `seeds`.
///
/// Edges are processed round by round, ascending edge id within a round, so
/// `activation_order` is reproducible.
pub fn walk_reach(h: &DirectedHypergraph, seeds: &[NodeId]) -> Result<ReachResult> {
    propagate_layered(h, seeds, false)
}

pub fn walk_reach_traced(h: &DirectedHypergraph, seeds: &[NodeId]) -> Result<ReachResult> {
    propagate_layered(h, seeds, true)
}

/// State nodes not visited from `seeds`.
pub fn inaccessible_set(h: &DirectedHypergraph, seeds: &[NodeId]) -> Result<Vec<NodeId>> {
    Ok(walk_reach(h, seeds)?.inaccessible())
}

/// True iff every target is visited from `seeds`.
pub fn target_accessible(h: &DirectedHypergraph, seeds: &[NodeId], targets: &[NodeId]) -> Result<bool> {
    h.check_state_nodes(targets, "target")?;
    let r = walk_reach(h, seeds)?;
    Ok(targets.iter().all(|&t| r.is_accessible(t)))
}

fn propagate_layered(h: &DirectedHypergraph, seeds: &[NodeId], trace: bool) -> Result<ReachResult> {
    h.check_state_nodes(seeds, "seed")?;
    let mut visited = vec![false; h.num_nodes()];
    let mut missing: Vec<u32> = h.edges().iter().map(|e| e.distinct_tail_len() as u32).collect();
    let mut frontier_trace = trace.then(Vec::new);
    let mut activation_order = Vec::new();

    let mut ready: Vec<EdgeId> = Vec::new();
    let mut first_round: Vec<NodeId> = Vec::new();
    let start = seeds.iter().copied().chain((h.n()..h.num_nodes()).map(NodeId::new));
    for v in start {
        if visit(h, v, &mut visited, &mut missing, &mut ready) && v.index() < h.n() {
            first_round.push(v);
        }
    }
    if let Some(t) = frontier_trace.as_mut() {
        first_round.sort_unstable();
        t.push(first_round);
    }

    let mut round = 0u32;
    while !ready.is_empty() {
        round += 1;
        ready.sort_unstable();
        let layer = std::mem::take(&mut ready);
        let mut newly = Vec::new();
        for e in layer {
            activation_order.push((e, round));
            for &v in h.edge(e).head() {
                if visit(h, v, &mut visited, &mut missing, &mut ready) {
                    newly.push(v);
                }
            }
        }
        if let Some(t) = frontier_trace.as_mut() {
            newly.sort_unstable();
            t.push(newly);
        }
    }

    visited.truncate(h.n());
    Ok(ReachResult {
        accessible: visited,
        activation_order,
        frontier_trace,
    })
}

/// Marks `v` visited and queues edges whose tail just became complete.
/// Returns false if `v` was already visited.
fn visit(
    h: &DirectedHypergraph,
    v: NodeId,
    visited: &mut [bool],
    missing: &mut [u32],
    ready: &mut Vec<EdgeId>,
) -> bool {
    if visited[v.index()] {
        return false;
    }
    visited[v.index()] = true;
    for &e in h.edges_with_tail(v) {
        missing[e] -= 1;
        if missing[e] == 0 {
            ready.push(e);
        }
    }
    true
}

/// Incrementally maintained closure. Seeds can be added one at a time and
/// each call only pays for the newly visited part of the hypergraph.
#[derive(Clone, Debug)]
pub(crate) struct ReachState<'h> {
    h: &'h DirectedHypergraph,
    visited: Vec<bool>,
    missing: Vec<u32>,
    num_state_visited: usize,
}

impl<'h> ReachState<'h> {
    pub fn new(h: &'h DirectedHypergraph) -> Self {
        let mut s = ReachState {
            h,
            visited: vec![false; h.num_nodes()],
            missing: h.edges().iter().map(|e| e.distinct_tail_len() as u32).collect(),
            num_state_visited: 0,
        };
        for c in h.n()..h.num_nodes() {
            s.add_seed(NodeId::new(c));
        }
        s
    }

    pub fn is_visited(&self, v: NodeId) -> bool {
        self.visited[v.index()]
    }

    /// Unvisited distinct tail nodes of `e`.
    pub fn missing(&self, e: EdgeId) -> u32 {
        self.missing[e]
    }

    #[cfg(test)]
    pub fn num_accessible(&self) -> usize {
        self.num_state_visited
    }

    pub fn all_accessible(&self) -> bool {
        self.num_state_visited == self.h.n()
    }

    /// State nodes that adding `v` as a seed would visit, without changing
    /// the state. `scratch` must come from [`ReachState::scratch`].
    pub fn probe(&self, v: NodeId, scratch: &mut ProbeScratch) -> Vec<NodeId> {
        let mut newly = Vec::new();
        if self.visited[v.index()] {
            return newly;
        }
        let mut stack = vec![v];
        scratch.marked[v.index()] = true;
        scratch.marked_list.push(v);
        while let Some(u) = stack.pop() {
            if u.index() < self.h.n() {
                newly.push(u);
            }
            for &e in self.h.edges_with_tail(u) {
                if scratch.used[e] == 0 {
                    scratch.touched.push(e);
                }
                scratch.used[e] += 1;
                if scratch.used[e] == self.missing[e] {
                    for &w in self.h.edge(e).head() {
                        if !self.visited[w.index()] && !scratch.marked[w.index()] {
                            scratch.marked[w.index()] = true;
                            scratch.marked_list.push(w);
                            stack.push(w);
                        }
                    }
                }
            }
        }
        for e in scratch.touched.drain(..) {
            scratch.used[e] = 0;
        }
        for w in scratch.marked_list.drain(..) {
            scratch.marked[w.index()] = false;
        }
        newly.sort_unstable();
        newly
    }

    pub fn scratch(&self) -> ProbeScratch {
        ProbeScratch {
            used: vec![0; self.h.num_edges()],
            touched: Vec::new(),
            marked: vec![false; self.h.num_nodes()],
            marked_list: Vec::new(),
        }
    }

    /// Adds a seed and propagates. Returns the state nodes newly visited.
    pub fn add_seed(&mut self, v: NodeId) -> Vec<NodeId> {
        let mut newly = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if self.visited[u.index()] {
                continue;
            }
            self.visited[u.index()] = true;
            if u.index() < self.h.n() {
                newly.push(u);
                self.num_state_visited += 1;
            }
            for &e in self.h.edges_with_tail(u) {
                self.missing[e] -= 1;
                if self.missing[e] == 0 {
                    stack.extend(self.h.edge(e).head().iter().filter(|w| !self.visited[w.index()]));
                }
            }
        }
        newly
    }
}

/// Reusable buffers for [`ReachState::probe`].
#[derive(Clone, Debug)]
pub(crate) struct ProbeScratch {
    used: Vec<u32>,
    touched: Vec<EdgeId>,
    marked: Vec<bool>,
    marked_list: Vec<NodeId>,
}
