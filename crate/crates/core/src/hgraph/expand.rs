use super::{DirectedHypergraph, EdgeId, NodeId};

/// Bipartite digraph between state nodes (left) and hyperedges (right).
///
/// Tail arcs run `v -> e` for every state node in the distinct tail of `e`,
/// head arcs run `e -> v` for every state node in the head of `e`. Control
/// nodes are not part of the left side, so control edges contribute head
/// arcs only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarExpansion {
    num_state_nodes: usize,
    tail_adj: Vec<Vec<NodeId>>,
    head_adj: Vec<Vec<NodeId>>,
}

impl StarExpansion {
    pub(super) fn of(h: &DirectedHypergraph) -> Self {
        let n = h.n();
        let mut tail_adj = Vec::with_capacity(h.num_edges());
        let mut head_adj = Vec::with_capacity(h.num_edges());
        for e in h.edges() {
            tail_adj.push(e.distinct_tail().filter(|v| v.index() < n).collect());
            head_adj.push(e.head().iter().copied().filter(|v| v.index() < n).collect());
        }
        StarExpansion {
            num_state_nodes: n,
            tail_adj,
            head_adj,
        }
    }

    pub fn num_state_nodes(&self) -> usize {
        self.num_state_nodes
    }

    pub fn num_edge_nodes(&self) -> usize {
        self.head_adj.len()
    }

    /// State nodes reached by head arcs out of edge node `e`.
    pub fn heads_of(&self, e: EdgeId) -> &[NodeId] {
        &self.head_adj[e]
    }

    pub fn tails_of(&self, e: EdgeId) -> &[NodeId] {
        &self.tail_adj[e]
    }

    pub fn tail_arcs(&self) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        self.tail_adj
            .iter()
            .enumerate()
            .flat_map(|(e, vs)| vs.iter().map(move |&v| (v, e)))
    }

    pub fn head_arcs(&self) -> impl Iterator<Item = (EdgeId, NodeId)> + '_ {
        self.head_adj
            .iter()
            .enumerate()
            .flat_map(|(e, vs)| vs.iter().map(move |&v| (e, v)))
    }

    pub fn num_arcs(&self) -> usize {
        self.tail_adj.iter().chain(&self.head_adj).map(Vec::len).sum()
    }
}

/// Simple digraph on state nodes with sorted, duplicate-free successor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<NodeId>>,
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut succ = vec![Vec::new(); n];
        for (u, v) in arcs {
            succ[u.index()].push(v);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Digraph { succ }
    }

    /// Arc `u -> v` whenever some hyperedge has `u` in its tail and `v` in
    /// its head. Self-loops are kept; control nodes are dropped.
    pub(super) fn projection_of(h: &DirectedHypergraph) -> Self {
        let n = h.n();
        let arcs = h.edges().iter().flat_map(|e| {
            e.distinct_tail()
                .filter(move |u| u.index() < n)
                .flat_map(move |u| e.head().iter().map(move |&v| (u, v)))
        });
        Self::from_arcs(n, arcs)
    }

    pub fn num_nodes(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, u: NodeId) -> &[NodeId] {
        &self.succ[u.index()]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (NodeId::new(u), v)))
    }

    pub fn num_arcs(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.succ[u.index()].binary_search(&v).is_ok()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.succ.len()];
        for (_, v) in self.arcs() {
            deg[v.index()] += 1;
        }
        deg
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::nodes;
    use super::*;

    fn set<T: Ord + Clone>(it: impl IntoIterator<Item = T>) -> Vec<T> {
        let mut v: Vec<T> = it.into_iter().collect();
        v.sort();
        v
    }

    #[test]
    fn star_of_multi_head_edge() {
        let s = h2().star_expand();
        assert_eq!(set(s.tail_arcs()), vec![(NodeId(0), 0)]);
        assert_eq!(set(s.head_arcs()), vec![(0, NodeId(1)), (0, NodeId(2))]);
    }

    #[test]
    fn star_of_edgeless() {
        let h = DirectedHypergraph::from_state_edges(4, 3, vec![]).unwrap();
        let s = h.star_expand();
        assert_eq!(s.num_state_nodes(), 4);
        assert_eq!(s.num_arcs(), 0);
    }

    #[test]
    fn star_collapses_tail_multiplicity() {
        let s = h1().star_expand();
        assert_eq!(set(s.tail_arcs()), vec![(NodeId(0), 0), (NodeId(0), 1), (NodeId(1), 1)]);
        assert_eq!(set(s.head_arcs()), vec![(0, NodeId(1)), (1, NodeId(2))]);
    }

    #[test]
    fn projection_examples() {
        let p = h1().projection_digraph();
        let want: Vec<_> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(u, v)| (NodeId(u), NodeId(v)))
            .collect();
        assert_eq!(set(p.arcs()), want);

        let p = h2().projection_digraph();
        assert_eq!(set(p.arcs()), vec![(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2))]);

        let empty = DirectedHypergraph::from_state_edges(3, 3, vec![]).unwrap();
        assert_eq!(empty.projection_digraph().num_arcs(), 0);
    }

    #[test]
    fn projection_keeps_self_loops() {
        let h = DirectedHypergraph::from_state_edges(2, 3, vec![edge(&[0], &[0, 1])]).unwrap();
        let p = h.projection_digraph();
        assert!(p.has_arc(NodeId(0), NodeId(0)));
        assert!(p.has_arc(NodeId(1), NodeId(0)));
        assert_eq!(p.in_degrees(), vec![2, 0]);
    }

    #[test]
    fn control_edges_only_add_head_arcs() {
        let h = h1().with_drivers(&nodes([0])).unwrap();
        let s = h.star_expand();
        assert_eq!(s.num_edge_nodes(), 3);
        assert!(s.tails_of(2).is_empty());
        assert_eq!(s.heads_of(2), &[NodeId(0)]);
    }
}
