//! Seeded random hypergraph generators.
//!
//! Every generator draws `round(alpha * n)` distinct state hyperedges with a
//! `k - 1` slot tail (repetition allowed) and records its parameters in a
//! metadata object that travels with the output file.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hgraph::{DirectedHypergraph, Hyperedge, NodeId};
use crate::rng::{rng_from_seed, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Uniform,
    ScaleFree,
    Clustered,
    SmallWorld,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Uniform,
        Topology::ScaleFree,
        Topology::Clustered,
        Topology::SmallWorld,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Uniform => "uniform",
            Topology::ScaleFree => "scale_free",
            Topology::Clustered => "clustered",
            Topology::SmallWorld => "small_world",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Topology::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            Error::validation(format!(
                "unknown topology '{s}'; expected uniform, scale_free, clustered or small_world"
            ))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub topology: Topology,
    pub seed: u64,
    /// Clustered: number of modules.
    pub modules: usize,
    /// Clustered: probability that an edge stays inside one module.
    pub p_intra: f64,
    /// Small world: per-tail-slot rewiring probability.
    pub rewire: f64,
    /// Small world: ring window width; `None` means `2k`.
    pub window: Option<usize>,
    /// Largest head size; sizes are uniform on `1..=max_head`.
    pub max_head: usize,
}

impl GenConfig {
    pub fn new(topology: Topology, n: usize, k: usize, alpha: f64, seed: u64) -> Self {
        GenConfig {
            n,
            k,
            alpha,
            topology,
            seed,
            modules: 5,
            p_intra: 0.9,
            rewire: 0.1,
            window: None,
            max_head: 1,
        }
    }

    pub fn num_edges(&self) -> usize {
        (self.alpha * self.n as f64).round() as usize
    }

    pub fn window_width(&self) -> usize {
        self.window.unwrap_or(2 * self.k).min(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::validation(msg));
        if self.k < 2 {
            return bad(format!("k must be at least 2; got {}", self.k));
        }
        if self.n == 0 || self.n < self.k - 1 {
            return bad(format!("n = {} is too small for k = {}", self.n, self.k));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive; got {}", self.alpha));
        }
        if self.num_edges() == 0 {
            return bad(format!(
                "alpha * n rounds to zero edges (alpha = {}, n = {})",
                self.alpha, self.n
            ));
        }
        if self.max_head == 0 || self.max_head > self.n {
            return bad(format!("max_head must be in 1..={}; got {}", self.n, self.max_head));
        }
        for (name, p) in [("p_intra", self.p_intra), ("rewire", self.rewire)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1]; got {p}"));
            }
        }
        if self.topology == Topology::Clustered {
            if self.modules < 2 {
                return bad(format!("clustered needs at least 2 modules; got {}", self.modules));
            }
            let smallest = self.n / self.modules;
            if smallest < (self.k - 1).max(self.max_head) {
                return bad(format!(
                    "module size {smallest} is below the {} nodes an edge may need",
                    (self.k - 1).max(self.max_head)
                ));
            }
        }
        if self.topology == Topology::SmallWorld && self.window_width() < self.max_head {
            return bad(format!(
                "window {} cannot hold {} head nodes",
                self.window_width(),
                self.max_head
            ));
        }
        Ok(())
    }

    pub fn metadata(&self) -> Value {
        let mut params = json!({ "max_head": self.max_head });
        match self.topology {
            Topology::Uniform => {}
            Topology::ScaleFree => params["weight"] = json!("degree+1"),
            Topology::Clustered => {
                params["modules"] = json!(self.modules);
                params["p_intra"] = json!(self.p_intra);
            }
            Topology::SmallWorld => {
                params["window"] = json!(self.window_width());
                params["rewire"] = json!(self.rewire);
            }
        }
        json!({
            "generator": self.topology.as_str(),
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "m": self.num_edges(),
            "seed": self.seed,
            "params": params,
            "alpha_counts": "state_edges",
        })
    }
}

/// First 16 hex digits of the SHA-256 of the compact metadata JSON.
pub fn metadata_hash(meta: &Value) -> String {
    let digest = Sha256::digest(meta.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Draws without changing shared state; `accept` commits a drawn edge.
trait EdgeSource {
    fn draw(&mut self, rng: &mut Rng) -> (Vec<usize>, Vec<usize>);
    fn accept(&mut self, _head: &[usize], _tail: &[usize]) {}
}

fn head_size(cfg: &GenConfig, rng: &mut Rng) -> usize {
    if cfg.max_head == 1 {
        1
    } else {
        rng.gen_range(1..=cfg.max_head)
    }
}

/// `size` distinct nodes via `pick`.
fn distinct(size: usize, rng: &mut Rng, mut pick: impl FnMut(&mut Rng) -> usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let v = pick(rng);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

struct UniformSource<'c> {
    cfg: &'c GenConfig,
}

impl EdgeSource for UniformSource<'_> {
    fn draw(&mut self, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
        let n = self.cfg.n;
        let hs = head_size(self.cfg, rng);
        let head = distinct(hs, rng, |r| r.gen_range(0..n));
        let tail = (0..self.cfg.k - 1).map(|_| rng.gen_range(0..n)).collect();
        (head, tail)
    }
}

/// Urn holding node `v` once plus once per incidence so far.
struct ScaleFreeSource<'c> {
    cfg: &'c GenConfig,
    urn: Vec<usize>,
}

impl EdgeSource for ScaleFreeSource<'_> {
    fn draw(&mut self, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
        let urn = &self.urn;
        let hs = head_size(self.cfg, rng);
        let head = distinct(hs, rng, |r| urn[r.gen_range(0..urn.len())]);
        let tail = (0..self.cfg.k - 1).map(|_| urn[rng.gen_range(0..urn.len())]).collect();
        (head, tail)
    }

    fn accept(&mut self, head: &[usize], tail: &[usize]) {
        self.urn.extend(head.iter().chain(tail));
    }
}

struct ClusteredSource<'c> {
    cfg: &'c GenConfig,
}

impl ClusteredSource<'_> {
    /// Contiguous, balanced node range of module `j`.
    fn module_range(&self, j: usize) -> std::ops::Range<usize> {
        let (n, q) = (self.cfg.n, self.cfg.modules);
        j * n / q..(j + 1) * n / q
    }
}

impl EdgeSource for ClusteredSource<'_> {
    fn draw(&mut self, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
        let range = if rng.gen_bool(self.cfg.p_intra) {
            self.module_range(rng.gen_range(0..self.cfg.modules))
        } else {
            0..self.cfg.n
        };
        let hs = head_size(self.cfg, rng);
        let head = distinct(hs, rng, |r| r.gen_range(range.clone()));
        let tail = (0..self.cfg.k - 1).map(|_| rng.gen_range(range.clone())).collect();
        (head, tail)
    }
}

struct SmallWorldSource<'c> {
    cfg: &'c GenConfig,
}

impl EdgeSource for SmallWorldSource<'_> {
    fn draw(&mut self, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
        let n = self.cfg.n;
        let w = self.cfg.window_width();
        let center = rng.gen_range(0..n);
        let start = center + n - w / 2;
        let local = move |r: &mut Rng| (start + r.gen_range(0..w)) % n;
        let hs = head_size(self.cfg, rng);
        let head = distinct(hs, rng, local);
        let tail = (0..self.cfg.k - 1)
            .map(|_| {
                let v = local(rng);
                if rng.gen_bool(self.cfg.rewire) {
                    rng.gen_range(0..n)
                } else {
                    v
                }
            })
            .collect();
        (head, tail)
    }
}

const ATTEMPTS_PER_EDGE: usize = 1000;

fn draw_edges(cfg: &GenConfig, source: &mut dyn EdgeSource) -> Result<Vec<Hyperedge>> {
    let m = cfg.num_edges();
    let mut rng = rng_from_seed(cfg.seed);
    let mut seen: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    let mut attempts = 0;
    while edges.len() < m {
        attempts += 1;
        if attempts > ATTEMPTS_PER_EDGE * m {
            return Err(Error::validation(format!(
                "could not draw {m} distinct edges for n = {}, k = {} after {} attempts",
                cfg.n,
                cfg.k,
                attempts - 1
            )));
        }
        let (mut head, mut tail) = source.draw(&mut rng);
        head.sort_unstable();
        tail.sort_unstable();
        if seen.contains(&(head.clone(), tail.clone())) {
            continue;
        }
        source.accept(&head, &tail);
        edges.push(Hyperedge::state(
            head.iter().map(|&v| NodeId::new(v)).collect(),
            tail.iter().map(|&v| NodeId::new(v)).collect(),
        ));
        seen.insert((head, tail));
    }
    Ok(edges)
}

/// Generates the hypergraph described by `cfg` with its metadata.
pub fn generate(cfg: &GenConfig) -> Result<(DirectedHypergraph, Value)> {
    cfg.validate()?;
    let edges = match cfg.topology {
        Topology::Uniform => draw_edges(cfg, &mut UniformSource { cfg })?,
        Topology::ScaleFree => draw_edges(
            cfg,
            &mut ScaleFreeSource {
                cfg,
                urn: (0..cfg.n).collect(),
            },
        )?,
        Topology::Clustered => draw_edges(cfg, &mut ClusteredSource { cfg })?,
        Topology::SmallWorld => draw_edges(cfg, &mut SmallWorldSource { cfg })?,
    };
    let h = DirectedHypergraph::from_state_edges(cfg.n, cfg.k, edges)?;
    Ok((h, cfg.metadata()))
}

fn with_topology(cfg: &GenConfig, t: Topology) -> Result<DirectedHypergraph> {
    let mut c = cfg.clone();
    c.topology = t;
    Ok(generate(&c)?.0)
}

pub fn gen_uniform(cfg: &GenConfig) -> Result<DirectedHypergraph> {
    with_topology(cfg, Topology::Uniform)
}

pub fn gen_scale_free(cfg: &GenConfig) -> Result<DirectedHypergraph> {
    with_topology(cfg, Topology::ScaleFree)
}

pub fn gen_clustered(cfg: &GenConfig) -> Result<DirectedHypergraph> {
    with_topology(cfg, Topology::Clustered)
}

pub fn gen_small_world(cfg: &GenConfig) -> Result<DirectedHypergraph> {
    with_topology(cfg, Topology::SmallWorld)
}
