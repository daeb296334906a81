//! Structural controllability check and driver-node selection.
//!
//! A driver set passes when every state node is accessible from it and the
//! matching test finds no dilation once each driver has its own input.

mod greedy;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hgraph::{DirectedHypergraph, NodeId};
use crate::matching::{
    find_dilation_exact, matching_lower_bound, matching_with_drivers, next_combination, DilationWitness,
};
use crate::reach::walk_reach;

pub use greedy::Step;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Matching,
    Greedy,
    Mag,
    Optimal,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Matching, Method::Greedy, Method::Mag, Method::Optimal];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Matching => "matching",
            Method::Greedy => "greedy",
            Method::Mag => "mag",
            Method::Optimal => "optimal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            Error::validation(format!(
                "unknown method '{s}'; expected matching, greedy, mag or optimal"
            ))
        })
    }
}

/// Which property a passing verdict certifies. For odd `k` the polynomial
/// has even degree and only strong accessibility is claimed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Controllability,
    StrongAccessibility,
}

impl Semantics {
    pub fn for_order(k: usize) -> Self {
        if k % 2 == 0 {
            Semantics::Controllability
        } else {
            Semantics::StrongAccessibility
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub controllable: bool,
    pub accessible: Vec<NodeId>,
    pub inaccessible: Vec<NodeId>,
    /// Nodes left unmatched once drivers get their inputs.
    pub dilation_uncovered: Vec<NodeId>,
    pub matching_size: usize,
    /// Filled only when the exhaustive scan was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_witness: Option<DilationWitness>,
    pub semantics: Semantics,
}

/// Accessibility plus matching-based dilation test.
pub fn verify_structural_controllability(h: &DirectedHypergraph, drivers: &[NodeId]) -> Result<VerifyReport> {
    let reach = walk_reach(h, drivers)?;
    let m = matching_with_drivers(h, drivers)?;
    let inaccessible = reach.inaccessible();
    let dilation_uncovered = m.uncovered();
    Ok(VerifyReport {
        controllable: inaccessible.is_empty() && dilation_uncovered.is_empty(),
        accessible: reach.accessible(),
        inaccessible,
        dilation_uncovered,
        matching_size: m.size(),
        exact_witness: None,
        semantics: Semantics::for_order(h.k()),
    })
}

/// As [`verify_structural_controllability`], also running the exhaustive
/// dilation scan (`n <= max_n`).
pub fn verify_with_exact_scan(h: &DirectedHypergraph, drivers: &[NodeId], max_n: usize) -> Result<VerifyReport> {
    let mut r = verify_structural_controllability(h, drivers)?;
    r.exact_witness = find_dilation_exact(h, drivers, max_n)?;
    Ok(r)
}

fn passes(h: &DirectedHypergraph, drivers: &[NodeId]) -> Result<bool> {
    // accessibility first: it is cheaper and fails more often
    if !walk_reach(h, drivers)?.all_accessible() {
        return Ok(false);
    }
    Ok(matching_with_drivers(h, drivers)?.covers_all())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionResult {
    pub drivers: Vec<NodeId>,
    pub method: Method,
    pub lower_bound: usize,
    pub controllable: bool,
    #[serde(rename = "runtime_ms", serialize_with = "as_millis")]
    pub runtime: Duration,
    pub steps: Vec<Step>,
}

impl SelectionResult {
    pub fn num_drivers(&self) -> usize {
        self.drivers.len()
    }
}

fn as_millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

fn require_uncontrolled(h: &DirectedHypergraph) -> Result<()> {
    if h.has_control_edges() {
        return Err(Error::validation(
            "driver selection needs an uncontrolled hypergraph; strip control edges first",
        ));
    }
    Ok(())
}

fn finish(
    h: &DirectedHypergraph,
    method: Method,
    mut drivers: Vec<NodeId>,
    lower_bound: usize,
    steps: Vec<Step>,
    start: Instant,
) -> Result<SelectionResult> {
    drivers.sort_unstable();
    let runtime = start.elapsed();
    let controllable = passes(h, &drivers)?;
    Ok(SelectionResult {
        drivers,
        method,
        lower_bound,
        controllable,
        runtime,
        steps,
    })
}

pub fn select(h: &DirectedHypergraph, method: Method) -> Result<SelectionResult> {
    match method {
        Method::Matching => select_matching_only(h),
        Method::Greedy => select_greedy(h),
        Method::Mag => select_mag(h),
        Method::Optimal => select_optimal_bfs(h, DEFAULT_OPTIMAL_MAX_N),
    }
}

/// Unmatched nodes of a maximum matching. Not always sufficient.
pub fn select_matching_only(h: &DirectedHypergraph) -> Result<SelectionResult> {
    require_uncontrolled(h)?;
    let start = Instant::now();
    let lb = matching_lower_bound(h)?;
    finish(h, Method::Matching, lb.uncovered, lb.count, Vec::new(), start)
}

/// Matching-uncovered nodes, then greedy accessibility completion.
pub fn select_mag(h: &DirectedHypergraph) -> Result<SelectionResult> {
    require_uncontrolled(h)?;
    let start = Instant::now();
    let lb = matching_lower_bound(h)?;
    let mut drivers = lb.uncovered;
    let steps = greedy::complete_accessibility(h, &drivers);
    drivers.extend(steps.iter().map(|s| s.node));
    finish(h, Method::Mag, drivers, lb.count, steps, start)
}

/// Greedy accessibility from the empty set. If dilations remain, the nodes
/// a maximum matching leaves uncovered are added once, which always
/// suffices: each gets its own input edge to match.
pub fn select_greedy(h: &DirectedHypergraph) -> Result<SelectionResult> {
    require_uncontrolled(h)?;
    let start = Instant::now();
    let lb = matching_lower_bound(h)?;
    let steps = greedy::complete_accessibility(h, &[]);
    let mut drivers: Vec<NodeId> = steps.iter().map(|s| s.node).collect();
    let uncovered = matching_with_drivers(h, &drivers)?.uncovered();
    drivers.extend(uncovered);
    finish(h, Method::Greedy, drivers, lb.count, steps, start)
}

pub const DEFAULT_OPTIMAL_MAX_N: usize = 12;

/// Smallest passing driver set, searched by size and then lexicographically.
pub fn select_optimal_bfs(h: &DirectedHypergraph, max_n: usize) -> Result<SelectionResult> {
    require_uncontrolled(h)?;
    let n = h.n();
    if n > max_n {
        return Err(Error::Capacity {
            what: "optimal driver search",
            n,
            max: max_n,
        });
    }
    let start = Instant::now();
    let lb = matching_lower_bound(h)?;
    for size in 0..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let drivers: Vec<NodeId> = combo.iter().map(|&i| NodeId::new(i)).collect();
            if passes(h, &drivers)? {
                return finish(h, Method::Optimal, drivers, lb.count, Vec::new(), start);
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("driving every node always passes")
}
