//! Greedy accessibility completion.
//!
//! Each round adds the unvisited node whose seeding visits the most new
//! state nodes, lowest id on ties. Gains are cached together with the
//! closure that produced them. Once a round visits a set D, a cached closure
//! C can only gain nodes through an edge whose remaining unvisited tail lies
//! inside C, since such an edge must mix D and C in its tail. Those
//! candidates are probed again. For every other candidate the new closure is
//! exactly C minus D, so its gain drops by the size of the overlap.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::hgraph::{DirectedHypergraph, NodeId};
use crate::reach::ReachState;

/// One greedy round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub node: NodeId,
    pub gain: usize,
}

/// Completes accessibility starting from `initial` seeds. Returns the added
/// nodes in order.
pub(crate) fn complete_accessibility(h: &DirectedHypergraph, initial: &[NodeId]) -> Vec<Step> {
    let n = h.n();
    let mut state = ReachState::new(h);
    for &d in initial {
        state.add_seed(d);
    }
    if state.all_accessible() {
        return Vec::new();
    }

    let mut scratch = state.scratch();
    // `version` guards dependency entries, `stamp` guards heap entries
    let mut version = vec![0u32; n];
    let mut stamp = vec![0u32; n];
    let mut gain = vec![0usize; n];
    let mut deps: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::with_capacity(n);

    let mut lost = vec![0usize; n];
    let mut lost_list: Vec<usize> = Vec::new();
    let mut hits = vec![0usize; n];
    let mut hit_list: Vec<usize> = Vec::new();
    let mut grows = vec![false; n];
    let mut grow_list: Vec<usize> = Vec::new();
    let mut edge_seen = vec![0usize; h.num_edges()];

    let mut probe = |v: usize, state: &ReachState, version: &mut [u32], deps: &mut [Vec<(u32, u32)>]| {
        version[v] += 1;
        let closure = state.probe(NodeId::new(v), &mut scratch);
        for u in &closure {
            deps[u.index()].push((v as u32, version[v]));
        }
        closure.len()
    };

    for v in 0..n {
        if !state.is_visited(NodeId::new(v)) {
            gain[v] = probe(v, &state, &mut version, &mut deps);
            heap.push((gain[v], Reverse(v as u32), stamp[v]));
        }
    }

    let mut steps = Vec::new();
    while !state.all_accessible() {
        let (g, Reverse(v), st) = heap.pop().expect("an unvisited node remains");
        let v = v as usize;
        if state.is_visited(NodeId::new(v)) || st != stamp[v] {
            continue;
        }
        let delta = state.add_seed(NodeId::new(v));
        debug_assert_eq!(delta.len(), g);
        steps.push(Step {
            node: NodeId::new(v),
            gain: g,
        });
        let round = steps.len();

        // closures lose the newly visited nodes
        for &w in &delta {
            for (c, cv) in std::mem::take(&mut deps[w.index()]) {
                let c = c as usize;
                if cv == version[c] && !state.is_visited(NodeId::new(c)) {
                    if lost[c] == 0 {
                        lost_list.push(c);
                    }
                    lost[c] += 1;
                }
            }
        }
        // closures holding every unvisited tail node of a partly enabled
        // edge may grow
        for &w in &delta {
            for &e in h.edges_with_tail(w) {
                if state.missing(e) == 0 || edge_seen[e] == round {
                    continue;
                }
                edge_seen[e] = round;
                let need = state.missing(e) as usize;
                for u in h.edge(e).distinct_tail() {
                    if state.is_visited(u) {
                        continue;
                    }
                    deps[u.index()].retain(|&(c, cv)| {
                        let c = c as usize;
                        if cv != version[c] || state.is_visited(NodeId::new(c)) {
                            return false;
                        }
                        if hits[c] == 0 {
                            hit_list.push(c);
                        }
                        hits[c] += 1;
                        true
                    });
                }
                for c in hit_list.drain(..) {
                    if hits[c] == need && !grows[c] {
                        grows[c] = true;
                        grow_list.push(c);
                    }
                    hits[c] = 0;
                }
            }
        }

        for c in lost_list.drain(..) {
            if !grows[c] {
                gain[c] -= lost[c];
                stamp[c] += 1;
                heap.push((gain[c], Reverse(c as u32), stamp[c]));
            }
            lost[c] = 0;
        }
        for c in grow_list.drain(..) {
            grows[c] = false;
            gain[c] = probe(c, &state, &mut version, &mut deps);
            stamp[c] += 1;
            heap.push((gain[c], Reverse(c as u32), stamp[c]));
        }
    }
    steps
}

/// Reference greedy that rescans every candidate with a full propagation.
#[cfg(test)]
pub(crate) fn complete_accessibility_naive(h: &DirectedHypergraph, initial: &[NodeId]) -> Vec<Step> {
    use crate::reach::walk_reach;
    let mut drivers = initial.to_vec();
    let mut steps = Vec::new();
    loop {
        let base = walk_reach(h, &drivers).unwrap();
        if base.all_accessible() {
            return steps;
        }
        let mut best: Option<(usize, NodeId)> = None;
        for v in base.inaccessible() {
            drivers.push(v);
            let reached = walk_reach(h, &drivers).unwrap().num_accessible();
            drivers.pop();
            let gain = reached - base.num_accessible();
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, v));
            }
        }
        let (gain, node) = best.unwrap();
        drivers.push(node);
        steps.push(Step { node, gain });
    }
}
