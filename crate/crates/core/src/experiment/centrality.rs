use std::collections::VecDeque;

use serde::Serialize;

use crate::hgraph::{Digraph, DirectedHypergraph, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeStats {
    pub node: NodeId,
    pub in_degree: usize,
    pub betweenness: f64,
    pub is_driver: bool,
}

/// In-degree and betweenness on the tail-to-head projection digraph.
pub fn compute_node_stats(h: &DirectedHypergraph, drivers: &[NodeId]) -> Vec<NodeStats> {
    let g = h.projection_digraph();
    let indeg = g.in_degrees();
    let bc = betweenness(&g);
    let mut is_driver = vec![false; h.n()];
    for d in drivers {
        is_driver[d.index()] = true;
    }
    (0..h.n())
        .map(|i| NodeStats {
            node: NodeId::new(i),
            in_degree: indeg[i],
            betweenness: bc[i],
            is_driver: is_driver[i],
        })
        .collect()
}

/// Exact directed betweenness (Brandes), unnormalized, unit arc lengths.
pub fn betweenness(g: &Digraph) -> Vec<f64> {
    let n = g.num_nodes();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in g.successors(NodeId::new(v)) {
                let w = w.index();
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgraph::fixtures::*;
    use crate::hgraph::{nodes, Hyperedge};
    use proptest::prelude::*;

    /// Pair-counting definition via all-pairs distances and path counts.
    fn betweenness_by_pairs(g: &Digraph) -> Vec<f64> {
        let n = g.num_nodes();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        let mut c = vec![vec![0.0f64; n]; n];
        for s in 0..n {
            // BFS layer by layer, counting paths
            d[s][s] = 0;
            c[s][s] = 1.0;
            let mut layer = vec![s];
            let mut depth = 0;
            while !layer.is_empty() {
                let mut next = Vec::new();
                for &v in &layer {
                    for w in g.successors(NodeId::new(v)) {
                        let w = w.index();
                        if d[s][w] == inf {
                            d[s][w] = depth + 1;
                            next.push(w);
                        }
                        if d[s][w] == depth + 1 {
                            c[s][w] += c[s][v];
                        }
                    }
                }
                layer = next;
                depth += 1;
            }
        }
        (0..n)
            .map(|v| {
                let mut b = 0.0;
                for s in 0..n {
                    for t in 0..n {
                        if s == v || t == v || s == t || d[s][t] >= inf {
                            continue;
                        }
                        if d[s][v] + d[v][t] == d[s][t] {
                            b += c[s][v] * c[v][t] / c[s][t];
                        }
                    }
                }
                b
            })
            .collect()
    }

    #[test]
    fn edgeless_is_all_zero() {
        let h = DirectedHypergraph::from_state_edges(4, 3, vec![]).unwrap();
        for s in compute_node_stats(&h, &[]) {
            assert_eq!((s.in_degree, s.betweenness), (0, 0.0));
        }
    }

    #[test]
    fn h1_stats() {
        let stats = compute_node_stats(&h1(), &nodes([0]));
        let indeg: Vec<_> = stats.iter().map(|s| s.in_degree).collect();
        assert_eq!(indeg, vec![0, 1, 2]);
        // v1 -> v3 is a direct arc, so no shortest path runs through v2
        assert!(stats.iter().all(|s| s.betweenness == 0.0));
        assert!(stats[0].is_driver && !stats[1].is_driver);
    }

    #[test]
    fn path_middle_carries_one_pair() {
        let h = DirectedHypergraph::from_state_edges(3, 2, vec![edge(&[1], &[0]), edge(&[2], &[1])]).unwrap();
        let bc: Vec<f64> = compute_node_stats(&h, &[]).iter().map(|s| s.betweenness).collect();
        assert_eq!(bc, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star_center_is_maximal() {
        let mut edges = Vec::new();
        for leaf in 1..6 {
            edges.push(edge(&[0], &[leaf]));
            edges.push(edge(&[leaf], &[0]));
        }
        let h = DirectedHypergraph::from_state_edges(6, 2, edges).unwrap();
        let bc: Vec<f64> = compute_node_stats(&h, &[]).iter().map(|s| s.betweenness).collect();
        assert_eq!(bc[0], 20.0);
        assert!(bc[1..].iter().all(|&b| b == 0.0));
    }

    proptest! {
        #[test]
        fn brandes_matches_pair_counting(
            n in 1usize..9,
            raw in proptest::collection::vec((0usize..9, 0usize..9, 0usize..9), 0..25),
        ) {
            let edges = raw
                .into_iter()
                .map(|(a, b, c)| Hyperedge::state(nodes([a % n]), nodes([b % n, c % n])))
                .collect();
            let h = DirectedHypergraph::from_state_edges(n, 3, edges).unwrap();
            let g = h.projection_digraph();
            let fast = betweenness(&g);
            let slow = betweenness_by_pairs(&g);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", fast, slow);
            }
        }
    }
}
