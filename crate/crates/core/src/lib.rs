//! Structural controllability of hypergraph-induced homogeneous polynomial
//! systems.
//!
//! A tensor system `dx/dt = A x^{k-1} + B u` is reduced to the zero/nonzero
//! pattern of `(A, B)`, encoded as a [`DirectedHypergraph`]. The crate then
//! decides structural controllability from topology alone (accessibility plus
//! absence of dilations), computes the maximum-matching lower bound on the
//! number of driver nodes, and selects driver sets with several strategies.
//! A small-dimension numeric rank oracle cross-checks the combinatorial
//! verdicts against random realizations of the pattern.
//!
//! Nodes are 0-based in memory and rendered 1-based (`v1`, `v2`, ...) in all
//! file and console output.

pub mod error;
pub mod experiment;
pub mod gen;
pub mod hgraph;
pub mod matching;
pub mod oracle;
pub mod reach;
pub mod rng;
pub mod select;

pub use error::{Error, Result};
pub use hgraph::{
    build_hypergraph, read_hypergraph, write_hypergraph, Digraph, DirectedHypergraph, EdgeId, EdgeKind, Hyperedge,
    NodeId, SparsityPattern, StarExpansion,
};
pub use matching::{
    find_dilation_exact, has_dilation_matching, matching_lower_bound, maximum_matching, DilationWitness, Matching,
};
pub use reach::{inaccessible_set, target_accessible, walk_reach, ReachResult};
pub use select::{
    select, select_greedy, select_mag, select_matching_only, select_optimal_bfs, verify_structural_controllability,
    Method, SelectionResult, VerifyReport,
};
