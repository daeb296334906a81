//! Numeric rank test on random realizations of a sparsity pattern.
//!
//! The tensor is kept symmetric in its input modes: one coefficient per
//! (head, sorted tail) class, spread over every distinct ordering of the
//! tail. Only this symmetric part enters the vector field, so nothing is
//! lost.
//!
//! The controllability span is grown directly. Start from the input
//! columns; in each sweep, apply the polynomial map to every multiset of
//! `k - 1` current basis vectors that uses at least one vector added in the
//! previous sweep, and keep products with a residual above `tol` relative to
//! their norm. By multilinearity this spans the same space as the
//! Kronecker-block construction without materializing it.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hgraph::{build_hypergraph, NodeId, SparsityPattern};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::select::{verify_structural_controllability, Semantics};

pub const DEFAULT_MAX_N: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Coefficients with magnitude uniform on `[min_abs, max_abs]` and a fair
/// random sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientDist {
    pub min_abs: f64,
    pub max_abs: f64,
}

impl Default for CoefficientDist {
    fn default() -> Self {
        CoefficientDist {
            min_abs: 0.1,
            max_abs: 1.0,
        }
    }
}

impl CoefficientDist {
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let mag = rng.gen_range(self.min_abs..=self.max_abs);
        if rng.gen::<bool>() {
            mag
        } else {
            -mag
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub n: usize,
    pub k: usize,
    /// Keyed by `[head, tail...]` with the tail sorted.
    pub values_a: BTreeMap<Vec<usize>, f64>,
    pub values_b: BTreeMap<(usize, usize), f64>,
    pub seed: u64,
    dist: CoefficientDist,
}

fn canonical(tuple: &[usize]) -> Vec<usize> {
    let mut t = tuple.to_vec();
    t[1..].sort_unstable();
    t
}

/// Draws one coefficient per canonical nonzero of `pattern`.
pub fn realize_random(pattern: &SparsityPattern, seed: u64, dist: CoefficientDist) -> Result<Realization> {
    pattern.validate()?;
    if !(dist.min_abs > 0.0 && dist.min_abs <= dist.max_abs) {
        return Err(Error::validation(format!(
            "coefficient magnitudes must satisfy 0 < min_abs <= max_abs; got [{}, {}]",
            dist.min_abs, dist.max_abs
        )));
    }
    let mut rng = rng_from_seed(seed);
    let classes: std::collections::BTreeSet<Vec<usize>> = pattern.nonzeros_a.iter().map(|t| canonical(t)).collect();
    let values_a = classes.into_iter().map(|t| (t, dist.sample(&mut rng))).collect();
    let values_b = pattern
        .nonzeros_b
        .iter()
        .map(|&rb| (rb, dist.sample(&mut rng)))
        .collect();
    Ok(Realization {
        n: pattern.n,
        k: pattern.k,
        values_a,
        values_b,
        seed,
        dist,
    })
}

/// Every distinct ordering of a sorted slice, in lexicographic order.
fn distinct_orderings(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// The symmetric multilinear map `A x_2 v_1 x_3 v_2 ... x_k v_{k-1}`.
pub fn apply_polynomial(r: &Realization, vs: &[&[f64]]) -> Result<Vec<f64>> {
    if vs.len() != r.k - 1 {
        return Err(Error::validation(format!(
            "expected {} argument vectors for k = {}, got {}",
            r.k - 1,
            r.k,
            vs.len()
        )));
    }
    if let Some(v) = vs.iter().find(|v| v.len() != r.n) {
        return Err(Error::validation(format!(
            "argument of length {} does not match n = {}",
            v.len(),
            r.n
        )));
    }
    let mut out = vec![0.0; r.n];
    for (t, &c) in &r.values_a {
        let mut acc = 0.0;
        for order in distinct_orderings(&t[1..]) {
            acc += order.iter().zip(vs).map(|(&i, v)| v[i]).product::<f64>();
        }
        out[t[0]] += c * acc;
    }
    Ok(out)
}

/// Orthonormal basis grown by modified Gram-Schmidt.
#[derive(Clone, Debug, Default)]
pub struct ControllabilityBasis {
    pub basis: Vec<Vec<f64>>,
    pub stage: usize,
}

impl ControllabilityBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Adds `v` if its residual exceeds `tol * |v|`.
    pub fn try_add(&mut self, v: &[f64], tol: f64) -> bool {
        let norm = dot(v, v).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return false;
        }
        let mut r = v.to_vec();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for q in &self.basis {
                let p = dot(&r, q);
                r.iter_mut().zip(q).for_each(|(x, qi)| *x -= p * qi);
            }
        }
        let rn = dot(&r, &r).sqrt();
        if rn <= tol * norm {
            return false;
        }
        r.iter_mut().for_each(|x| *x /= rn);
        self.basis.push(r);
        true
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of the controllability span with one extra input column per driver.
pub fn controllability_rank(
    r: &Realization,
    drivers: &[NodeId],
    tol: f64,
    max_n: usize,
) -> Result<(usize, ControllabilityBasis)> {
    let n = r.n;
    if n > max_n {
        return Err(Error::Capacity {
            what: "numeric rank oracle",
            n,
            max: max_n,
        });
    }
    if let Some(d) = drivers.iter().find(|d| d.index() >= n) {
        return Err(Error::validation(format!("driver {d} out of range for n = {n}")));
    }

    let mut cb = ControllabilityBasis::default();
    let m = r.values_b.keys().map(|&(_, j)| j + 1).max().unwrap_or(0);
    for j in 0..m {
        let mut col = vec![0.0; n];
        for (&(i, jj), &b) in &r.values_b {
            if jj == j {
                col[i] = b;
            }
        }
        cb.try_add(&col, tol);
    }
    for &d in drivers {
        let mut rng = rng_from_seed(derive_seed(r.seed, &[0xD1, d.index() as u64]));
        let mut col = vec![0.0; n];
        col[d.index()] = r.dist.sample(&mut rng);
        cb.try_add(&col, tol);
    }

    let arity = r.k - 1;
    let mut fresh_from = 0;
    while cb.rank() < n && cb.rank() > 0 {
        let size = cb.rank();
        let mut added = false;
        let mut combo = vec![0usize; arity];
        loop {
            if combo.iter().any(|&i| i >= fresh_from) {
                let args: Vec<&[f64]> = combo.iter().map(|&i| cb.basis[i].as_slice()).collect();
                let p = apply_polynomial(r, &args)?;
                added |= cb.try_add(&p, tol);
                if cb.rank() == n {
                    break;
                }
            }
            if !next_multiset(&mut combo, size) {
                break;
            }
        }
        cb.stage += 1;
        if !added {
            break;
        }
        fresh_from = size;
    }
    Ok((cb.rank(), cb))
}

/// Next non-decreasing sequence over `0..n`.
fn next_multiset(c: &mut [usize], n: usize) -> bool {
    let Some(i) = (0..c.len()).rev().find(|&i| c[i] + 1 < n) else {
        return false;
    };
    let v = c[i] + 1;
    c[i..].iter_mut().for_each(|x| *x = v);
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub k: usize,
    pub drivers: Vec<usize>,
    pub trials: usize,
    /// `None` when no trials ran.
    pub fraction_full_rank: Option<f64>,
    pub per_trial_ranks: Vec<usize>,
    pub per_trial_seeds: Vec<u64>,
    pub structural_verdict: bool,
    pub semantics: Semantics,
}

impl OracleReport {
    /// Trials that fell short of full rank.
    pub fn deficient_seeds(&self) -> Vec<u64> {
        self.per_trial_ranks
            .iter()
            .zip(&self.per_trial_seeds)
            .filter(|(&r, _)| r < self.n)
            .map(|(_, &s)| s)
            .collect()
    }
}

/// Runs the rank test on `trials` seeded realizations and sets the result
/// beside the combinatorial verdict.
pub fn cross_validate(pattern: &SparsityPattern, drivers: &[NodeId], trials: usize, seed: u64) -> Result<OracleReport> {
    let h = build_hypergraph(pattern)?;
    if pattern.n > DEFAULT_MAX_N {
        return Err(Error::Capacity {
            what: "numeric rank oracle",
            n: pattern.n,
            max: DEFAULT_MAX_N,
        });
    }
    let verdict = verify_structural_controllability(&h, drivers)?;
    let seeds: Vec<u64> = (0..trials as u64).map(|t| derive_seed(seed, &[t])).collect();
    let ranks = seeds
        .par_iter()
        .map(|&s| {
            let r = realize_random(pattern, s, CoefficientDist::default())?;
            Ok(controllability_rank(&r, drivers, DEFAULT_TOL, DEFAULT_MAX_N)?.0)
        })
        .collect::<Result<Vec<usize>>>()?;
    let full = ranks.iter().filter(|&&r| r == pattern.n).count();
    let mut labels: Vec<usize> = drivers.iter().map(|d| d.one_based()).collect();
    labels.sort_unstable();
    labels.dedup();
    Ok(OracleReport {
        n: pattern.n,
        k: pattern.k,
        drivers: labels,
        trials,
        fraction_full_rank: (trials > 0).then(|| full as f64 / trials as f64),
        per_trial_ranks: ranks,
        per_trial_seeds: seeds,
        structural_verdict: verdict.controllable,
        semantics: verdict.semantics,
    })
}
