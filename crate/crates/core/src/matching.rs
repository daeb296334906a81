//! Dilation detection through maximum matching on the star expansion, the
//! resulting lower bound on the number of driver nodes, and an exhaustive
//! subset scan of the distinct-head-intersection condition used as an audit
//! oracle.
//!
//! Before either test runs, hyperedges that share a tail multiset are merged
//! (see [`DirectedHypergraph::merge_shared_tails`]): they are one tensor
//! column, i.e. one independent signal, whatever the number of rows it
//! touches. For `k = 2` this recovers the classical in-neighbour count.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hgraph::{DirectedHypergraph, EdgeId, NodeId, StarExpansion};

/// Edge-to-node assignment over head arcs of a star expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// `(edge, node)` pairs, ascending by edge id.
    pub pairs: Vec<(EdgeId, NodeId)>,
    num_state_nodes: usize,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn covered(&self) -> Vec<NodeId> {
        let mut c: Vec<NodeId> = self.pairs.iter().map(|&(_, v)| v).collect();
        c.sort_unstable();
        c
    }

    pub fn uncovered(&self) -> Vec<NodeId> {
        let mut is_covered = vec![false; self.num_state_nodes];
        for &(_, v) in &self.pairs {
            is_covered[v.index()] = true;
        }
        (0..self.num_state_nodes)
            .filter(|&i| !is_covered[i])
            .map(NodeId::new)
            .collect()
    }

    pub fn covers_all(&self) -> bool {
        self.pairs.len() == self.num_state_nodes
    }

    fn remap_edges(mut self, rep: &[EdgeId]) -> Self {
        for p in &mut self.pairs {
            p.0 = rep[p.0];
        }
        self.pairs.sort_unstable();
        self
    }
}

/// A node set receiving fewer distinct head intersections than its size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DilationWitness {
    pub node_set: Vec<NodeId>,
    pub distinct_head_intersections: usize,
    pub deficiency: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub count: usize,
    pub uncovered: Vec<NodeId>,
    pub matching: Matching,
}

/// Maximum matching from edge nodes to state nodes along head arcs.
///
/// Edges whose head set repeats an earlier edge's head set are skipped, so
/// each distinct head set can cover at most one node. Hopcroft-Karp with
/// adjacency explored in ascending id order makes the result deterministic.
pub fn maximum_matching(s: &StarExpansion) -> Matching {
    let n = s.num_state_nodes();
    let mut left: Vec<EdgeId> = (0..s.num_edge_nodes()).filter(|&e| !s.heads_of(e).is_empty()).collect();
    // keep the lowest id per distinct head set
    left.sort_by(|&a, &b| s.heads_of(a).cmp(s.heads_of(b)).then(a.cmp(&b)));
    left.dedup_by(|b, a| s.heads_of(*a) == s.heads_of(*b));
    left.sort_unstable();

    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&e| s.heads_of(e).iter().map(|v| v.index()).collect())
        .collect();
    let pair_left = hopcroft_karp(&adj, n);

    let pairs = pair_left
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|v| (left[i], NodeId::new(v))))
        .collect();
    Matching {
        pairs,
        num_state_nodes: n,
    }
}

const INF: u32 = u32::MAX;

fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut pair_left: Vec<Option<usize>> = vec![None; n_left];
    let mut pair_right: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![INF; n_left];
    let mut cursor = vec![0usize; n_left];
    let mut queue = Vec::with_capacity(n_left);

    loop {
        // layer free left vertices
        queue.clear();
        for u in 0..n_left {
            if pair_left[u].is_none() {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                match pair_right[v] {
                    None => found = true,
                    Some(u2) if dist[u2] == INF => {
                        dist[u2] = dist[u] + 1;
                        queue.push(u2);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        for u in 0..n_left {
            if pair_left[u].is_none() {
                augment_from(u, adj, &mut dist, &mut cursor, &mut pair_left, &mut pair_right);
            }
        }
    }
    pair_left
}

/// Iterative layered DFS; flips the path on success.
fn augment_from(
    root: usize,
    adj: &[Vec<usize>],
    dist: &mut [u32],
    cursor: &mut [usize],
    pair_left: &mut [Option<usize>],
    pair_right: &mut [Option<usize>],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if cursor[u] == adj[u].len() {
            dist[u] = INF;
            stack.pop();
            continue;
        }
        let v = adj[u][cursor[u]];
        match pair_right[v] {
            None => {
                for &w in &stack {
                    let x = adj[w][cursor[w]];
                    pair_left[w] = Some(x);
                    pair_right[x] = Some(w);
                }
                return true;
            }
            Some(u2) if dist[u2] != INF && dist[u2] == dist[u] + 1 => stack.push(u2),
            Some(_) => cursor[u] += 1,
        }
    }
    false
}

fn merged_matching(h: &DirectedHypergraph) -> Matching {
    let (merged, rep) = h.merge_shared_tails();
    maximum_matching(&merged.star_expand()).remap_edges(&rep)
}

/// Lower bound `n - |maximum matching|` on the number of driver nodes of an
/// uncontrolled hypergraph, with the uncovered nodes that realize it.
pub fn matching_lower_bound(h: &DirectedHypergraph) -> Result<LowerBound> {
    if h.has_control_edges() {
        return Err(Error::validation(
            "matching lower bound needs an uncontrolled hypergraph; strip control edges first",
        ));
    }
    let matching = merged_matching(h);
    Ok(LowerBound {
        count: h.n() - matching.size(),
        uncovered: matching.uncovered(),
        matching,
    })
}

/// Maximum matching of `h` augmented with one control edge per driver.
/// Edge ids refer to `h.with_drivers(drivers)`.
pub fn matching_with_drivers(h: &DirectedHypergraph, drivers: &[NodeId]) -> Result<Matching> {
    Ok(merged_matching(&h.with_drivers(drivers)?))
}

/// True iff no matching covers every state node once each driver gets its
/// own control edge.
pub fn has_dilation_matching(h: &DirectedHypergraph, drivers: &[NodeId]) -> Result<bool> {
    Ok(!matching_with_drivers(h, drivers)?.covers_all())
}

/// Exhaustive scan for a node set `S` whose distinct nonempty head
/// intersections number fewer than `|S|`, driver control edges included as
/// singleton heads. Returns the first witness in order of size, then
/// lexicographic order.
pub fn find_dilation_exact(
    h: &DirectedHypergraph,
    drivers: &[NodeId],
    max_n: usize,
) -> Result<Option<DilationWitness>> {
    let n = h.n();
    let max_n = max_n.min(63);
    if n > max_n {
        return Err(Error::Capacity {
            what: "exact dilation scan",
            n,
            max: max_n,
        });
    }
    let (aug, _) = h.with_drivers(drivers)?.merge_shared_tails();
    let mut heads: Vec<u64> = aug
        .edges()
        .iter()
        .map(|e| {
            e.head()
                .iter()
                .filter(|v| v.index() < n)
                .fold(0u64, |m, v| m | (1 << v.index()))
        })
        .filter(|&m| m != 0)
        .collect();
    heads.sort_unstable();
    heads.dedup();

    let mut seen: Vec<u64> = Vec::with_capacity(heads.len());
    for size in 1..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let s = combo.iter().fold(0u64, |m, &i| m | (1 << i));
            seen.clear();
            seen.extend(heads.iter().map(|&hm| hm & s).filter(|&x| x != 0));
            seen.sort_unstable();
            seen.dedup();
            if seen.len() < size {
                return Ok(Some(DilationWitness {
                    node_set: combo.iter().map(|&i| NodeId::new(i)).collect(),
                    distinct_head_intersections: seen.len(),
                    deficiency: size - seen.len(),
                }));
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `combo` to the next lexicographic `combo.len()`-subset of `0..n`.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if combo[i] < n - r + i {
            combo[i] += 1;
            for j in i + 1..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Outcome of running both dilation tests on one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DilationCheck {
    pub matching_dilation: bool,
    pub uncovered: Vec<NodeId>,
    pub exact_witness: Option<DilationWitness>,
}

impl DilationCheck {
    pub fn agree(&self) -> bool {
        self.matching_dilation == self.exact_witness.is_some()
    }
}

pub fn cross_check_dilation(h: &DirectedHypergraph, drivers: &[NodeId], max_n: usize) -> Result<DilationCheck> {
    let m = matching_with_drivers(h, drivers)?;
    Ok(DilationCheck {
        matching_dilation: !m.covers_all(),
        uncovered: m.uncovered(),
        exact_witness: find_dilation_exact(h, drivers, max_n)?,
    })
}

/// A disagreement between the two dilation tests, kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub instance: String,
    pub drivers: Vec<NodeId>,
    pub check: DilationCheck,
}

/// Collects disagreements across instances without reconciling them.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DiscrepancyLedger {
    pub checked: usize,
    pub entries: Vec<Discrepancy>,
}

impl DiscrepancyLedger {
    /// Runs both tests; returns whether they agreed.
    pub fn record(
        &mut self,
        instance: impl Into<String>,
        h: &DirectedHypergraph,
        drivers: &[NodeId],
        max_n: usize,
    ) -> Result<bool> {
        let check = cross_check_dilation(h, drivers, max_n)?;
        self.checked += 1;
        let agree = check.agree();
        if !agree {
            self.entries.push(Discrepancy {
                instance: instance.into(),
                drivers: drivers.to_vec(),
                check,
            });
        }
        Ok(agree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgraph::fixtures::*;
    use crate::hgraph::nodes;

    #[test]
    fn h2_matching_prefers_lowest_node() {
        let m = maximum_matching(&h2().star_expand());
        assert_eq!(m.pairs, vec![(0, NodeId(1))]);
        assert_eq!(m.uncovered(), nodes([0, 2]));
    }

    #[test]
    fn edgeless_matching_is_empty() {
        let h = DirectedHypergraph::from_state_edges(4, 3, vec![]).unwrap();
        let m = maximum_matching(&h.star_expand());
        assert_eq!(m.size(), 0);
        assert_eq!(m.uncovered(), nodes([0, 1, 2, 3]));
        let lb = matching_lower_bound(&h).unwrap();
        assert_eq!((lb.count, lb.uncovered), (4, nodes([0, 1, 2, 3])));
    }

    #[test]
    fn h1_matching_is_unique() {
        let m = maximum_matching(&h1().star_expand());
        assert_eq!(m.pairs, vec![(0, NodeId(1)), (1, NodeId(2))]);
        let lb = matching_lower_bound(&h1()).unwrap();
        assert_eq!((lb.count, lb.uncovered), (1, nodes([0])));
    }

    #[test]
    fn h2_lower_bound() {
        let lb = matching_lower_bound(&h2()).unwrap();
        assert_eq!((lb.count, lb.uncovered), (2, nodes([0, 2])));
    }

    #[test]
    fn lower_bound_rejects_controlled_input() {
        let h = h1().with_drivers(&nodes([0])).unwrap();
        assert!(matches!(matching_lower_bound(&h), Err(Error::Validation(_))));
        assert!(matching_lower_bound(&h.without_controls()).is_ok());
    }

    #[test]
    fn identical_heads_count_once() {
        let h =
            DirectedHypergraph::from_state_edges(3, 3, vec![edge(&[0, 1], &[2, 2]), edge(&[0, 1], &[1, 2])]).unwrap();
        assert_eq!(maximum_matching(&h.star_expand()).size(), 1);
    }

    #[test]
    fn shared_tail_is_one_signal() {
        // x1' = a x3^3, x2' = b x3^3: one column feeds both rows
        let h =
            DirectedHypergraph::from_state_edges(3, 4, vec![edge(&[0], &[2, 2, 2]), edge(&[1], &[2, 2, 2])]).unwrap();
        assert_eq!(matching_lower_bound(&h).unwrap().count, 2);
        assert!(has_dilation_matching(&h, &nodes([2])).unwrap());
        assert!(!has_dilation_matching(&h, &nodes([1, 2])).unwrap());
    }

    #[test]
    fn dilation_matching_examples() {
        assert!(!has_dilation_matching(&h2(), &nodes([0, 2])).unwrap());
        assert!(!has_dilation_matching(&h2(), &nodes([0, 1, 2])).unwrap());
        assert!(has_dilation_matching(&h2(), &nodes([0])).unwrap());
    }

    /// heads {v1,v2,v6}, {v1,v2,v7}, {v1,v2,v8} with tails {v3}, {v4}, {v5}
    fn head_triple() -> DirectedHypergraph {
        DirectedHypergraph::from_state_edges(
            8,
            2,
            vec![edge(&[0, 1, 5], &[2]), edge(&[0, 1, 6], &[3]), edge(&[0, 1, 7], &[4])],
        )
        .unwrap()
    }

    #[test]
    fn head_triple_witness_on_v1_v2() {
        let drivers = nodes([2, 3, 4, 5, 6, 7]);
        let w = find_dilation_exact(&head_triple(), &drivers, 20).unwrap().unwrap();
        assert_eq!(w.node_set, nodes([0, 1]));
        assert_eq!(w.distinct_head_intersections, 1);
        assert_eq!(w.deficiency, 1);
        // the matching covers v1 and v2 through two different edges
        assert!(!has_dilation_matching(&head_triple(), &drivers).unwrap());
    }

    #[test]
    fn exact_scan_examples() {
        let w = find_dilation_exact(&h2(), &[], 20).unwrap().unwrap();
        // v1 heads nothing, so the singleton {v1} is the first witness
        assert_eq!(w.node_set, nodes([0]));
        let w = find_dilation_exact(&h2(), &nodes([0]), 20).unwrap().unwrap();
        assert_eq!(w.node_set, nodes([1, 2]));
        assert_eq!(w.distinct_head_intersections, 1);
        assert!(find_dilation_exact(&h2(), &nodes([0, 1, 2]), 20).unwrap().is_none());
    }

    #[test]
    fn exact_scan_capacity() {
        let h = DirectedHypergraph::from_state_edges(21, 2, vec![]).unwrap();
        assert!(matches!(
            find_dilation_exact(&h, &[], 20),
            Err(Error::Capacity { n: 21, max: 20, .. })
        ));
    }

    #[test]
    fn ledger_keeps_disagreements() {
        let mut ledger = DiscrepancyLedger::default();
        assert!(ledger.record("h1", &h1(), &nodes([0]), 20).unwrap());
        assert!(!ledger
            .record("triple", &head_triple(), &nodes([2, 3, 4, 5, 6, 7]), 20)
            .unwrap());
        assert_eq!(ledger.checked, 2);
        assert_eq!(ledger.entries.len(), 1);
        assert_eq!(ledger.entries[0].instance, "triple");
        assert!(ledger.entries[0].check.exact_witness.is_some());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }
}
