//! Batch experiments over generated instances, written as CSV.
//!
//! Every instance is identified by `(k, alpha, n, topology, trial)`; its
//! seed is derived from the base seed and those labels, so rows never depend
//! on execution order. Runtimes are wall-clock times of the selection call
//! alone and are the only columns that vary between identical runs.

mod centrality;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{generate, metadata_hash, GenConfig, Topology};
use crate::hgraph::DirectedHypergraph;
use crate::rng::derive_seed;
use crate::select::{select, Method, DEFAULT_OPTIMAL_MAX_N};

pub use centrality::{betweenness, compute_node_stats, NodeStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SmallScale,
    LargeScale,
    Structured,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::SmallScale => "small_scale",
            ExperimentKind::LargeScale => "large_scale",
            ExperimentKind::Structured => "structured",
        }
    }

    fn code(self) -> u64 {
        match self {
            ExperimentKind::SmallScale => 1,
            ExperimentKind::LargeScale => 2,
            ExperimentKind::Structured => 3,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" | "small_scale" => Ok(ExperimentKind::SmallScale),
            "large" | "large_scale" => Ok(ExperimentKind::LargeScale),
            "structured" => Ok(ExperimentKind::Structured),
            _ => Err(Error::validation(format!(
                "unknown experiment '{s}'; expected small, large or structured"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub topologies: Vec<Topology>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl ExperimentSpec {
    /// Small instances with all four methods; `n` stays within reach of the
    /// exhaustive search.
    pub fn small_scale(seed: u64) -> Self {
        ExperimentSpec {
            experiment: ExperimentKind::SmallScale,
            ns: vec![6, 8, 10, 12],
            ks: vec![4, 6, 8],
            alphas: vec![0.5, 1.0],
            topologies: vec![Topology::Uniform],
            trials: 5,
            seed,
            methods: Method::ALL.to_vec(),
        }
    }

    /// Log-spaced sizes from 10 to 20000.
    pub fn large_scale(seed: u64) -> Self {
        ExperimentSpec {
            experiment: ExperimentKind::LargeScale,
            ns: vec![10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000],
            ks: vec![4],
            alphas: vec![0.5, 1.0],
            topologies: vec![Topology::Uniform],
            trials: 3,
            seed,
            methods: vec![Method::Matching, Method::Mag, Method::Greedy],
        }
    }

    pub fn structured(seed: u64) -> Self {
        ExperimentSpec {
            experiment: ExperimentKind::Structured,
            ns: vec![100],
            ks: vec![4],
            alphas: vec![0.5, 1.0, 2.0],
            topologies: vec![Topology::ScaleFree, Topology::Clustered, Topology::SmallWorld],
            trials: 10,
            seed,
            methods: vec![Method::Mag],
        }
    }

    pub fn default_for(kind: ExperimentKind, seed: u64) -> Self {
        match kind {
            ExperimentKind::SmallScale => Self::small_scale(seed),
            ExperimentKind::LargeScale => Self::large_scale(seed),
            ExperimentKind::Structured => Self::structured(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::validation("no methods selected"));
        }
        if self.methods.contains(&Method::Optimal) {
            if self.experiment == ExperimentKind::LargeScale {
                return Err(Error::validation("the large-scale experiment excludes optimal"));
            }
            if let Some(&n) = self.ns.iter().find(|&&n| n > DEFAULT_OPTIMAL_MAX_N) {
                return Err(Error::Capacity {
                    what: "optimal driver search",
                    n,
                    max: DEFAULT_OPTIMAL_MAX_N,
                });
            }
        }
        if self.experiment == ExperimentKind::Structured {
            if let Some(t) = self.topologies.iter().find(|&&t| t == Topology::Uniform) {
                return Err(Error::validation(format!(
                    "structured experiment takes scale_free, clustered or small_world; got {t}"
                )));
            }
        }
        Ok(())
    }

    fn instances(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for &alpha in &self.alphas {
                for &n in &self.ns {
                    for &topology in &self.topologies {
                        for trial in 0..self.trials {
                            let seed = derive_seed(
                                self.seed,
                                &[
                                    self.experiment.code(),
                                    k as u64,
                                    alpha.to_bits(),
                                    n as u64,
                                    topology as u64,
                                    trial as u64,
                                ],
                            );
                            out.push(Instance {
                                k,
                                alpha,
                                n,
                                topology,
                                trial,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Instance {
    k: usize,
    alpha: f64,
    n: usize,
    topology: Topology,
    trial: usize,
    seed: u64,
}

impl Instance {
    fn generate(&self) -> Result<(DirectedHypergraph, String)> {
        let cfg = GenConfig::new(self.topology, self.n, self.k, self.alpha, self.seed);
        let (h, meta) = generate(&cfg)?;
        Ok((h, metadata_hash(&meta)))
    }
}

/// Mean centralities of drivers, non-drivers and the whole network.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralitySummary {
    pub driver_in_degree: f64,
    pub nondriver_in_degree: f64,
    pub network_in_degree: f64,
    pub driver_betweenness: f64,
    pub nondriver_betweenness: f64,
    pub network_betweenness: f64,
}

impl CentralitySummary {
    pub fn of(stats: &[NodeStats]) -> Self {
        let mean = |f: &dyn Fn(&NodeStats) -> f64, keep: &dyn Fn(&NodeStats) -> bool| {
            let xs: Vec<f64> = stats.iter().filter(|s| keep(s)).map(f).collect();
            if xs.is_empty() {
                f64::NAN
            } else {
                xs.iter().sum::<f64>() / xs.len() as f64
            }
        };
        let indeg = |s: &NodeStats| s.in_degree as f64;
        let bc = |s: &NodeStats| s.betweenness;
        CentralitySummary {
            driver_in_degree: mean(&indeg, &|s| s.is_driver),
            nondriver_in_degree: mean(&indeg, &|s| !s.is_driver),
            network_in_degree: mean(&indeg, &|_| true),
            driver_betweenness: mean(&bc, &|s| s.is_driver),
            nondriver_betweenness: mean(&bc, &|s| !s.is_driver),
            network_betweenness: mean(&bc, &|_| true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: ExperimentKind,
    pub k: usize,
    pub alpha: f64,
    pub n: usize,
    pub topology: Topology,
    pub method: Method,
    pub trial: usize,
    pub seed: u64,
    pub num_drivers: usize,
    pub lower_bound: usize,
    pub controllable: bool,
    pub runtime_ms: f64,
    pub meta_hash: String,
    pub num_edges: usize,
    /// Heap bytes of the edge list and incidence indices.
    pub structure_bytes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centrality: Option<CentralitySummary>,
}

/// Per-node statistics from the structured experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeStatsRow {
    pub topology: Topology,
    pub alpha: f64,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    pub node: usize,
    pub in_degree: usize,
    pub betweenness: f64,
    pub is_driver: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    pub node_stats: Vec<NodeStatsRow>,
}

fn run_instance(spec: &ExperimentSpec, inst: &Instance, with_stats: bool) -> Result<(Vec<Row>, Vec<NodeStatsRow>)> {
    let (h, meta_hash) = inst.generate()?;
    let mut rows = Vec::with_capacity(spec.methods.len());
    let mut node_rows = Vec::new();
    for &method in &spec.methods {
        let r = select(&h, method)?;
        let centrality = if with_stats {
            let stats = compute_node_stats(&h, &r.drivers);
            node_rows.extend(stats.iter().map(|s| NodeStatsRow {
                topology: inst.topology,
                alpha: inst.alpha,
                n: inst.n,
                trial: inst.trial,
                seed: inst.seed,
                method,
                node: s.node.one_based(),
                in_degree: s.in_degree,
                betweenness: s.betweenness,
                is_driver: s.is_driver,
            }));
            Some(CentralitySummary::of(&stats))
        } else {
            None
        };
        rows.push(Row {
            experiment: spec.experiment,
            k: inst.k,
            alpha: inst.alpha,
            n: inst.n,
            topology: inst.topology,
            method,
            trial: inst.trial,
            seed: inst.seed,
            num_drivers: r.num_drivers(),
            lower_bound: r.lower_bound,
            controllable: r.controllable,
            runtime_ms: r.runtime.as_secs_f64() * 1e3,
            meta_hash: meta_hash.clone(),
            num_edges: h.num_edges(),
            structure_bytes: h.structure_bytes(),
            centrality,
        });
    }
    Ok((rows, node_rows))
}

fn run(spec: &ExperimentSpec, parallel: bool) -> Result<ExperimentOutput> {
    spec.validate()?;
    let with_stats = spec.experiment == ExperimentKind::Structured;
    let instances = spec.instances();
    let parts: Vec<(Vec<Row>, Vec<NodeStatsRow>)> = if parallel {
        instances
            .par_iter()
            .map(|i| run_instance(spec, i, with_stats))
            .collect::<Result<_>>()?
    } else {
        instances
            .iter()
            .map(|i| run_instance(spec, i, with_stats))
            .collect::<Result<_>>()?
    };
    let mut out = ExperimentOutput::default();
    for (rows, nodes) in parts {
        out.rows.extend(rows);
        out.node_stats.extend(nodes);
    }
    Ok(out)
}

/// Trials run concurrently; rows come back in instance order.
pub fn run_small_scale(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    expect_kind(spec, ExperimentKind::SmallScale)?;
    Ok(run(spec, true)?.rows)
}

/// Runs sequentially so that timings are not disturbed by other trials.
pub fn run_large_scale(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    expect_kind(spec, ExperimentKind::LargeScale)?;
    Ok(run(spec, false)?.rows)
}

pub fn run_structured(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::Structured)?;
    run(spec, true)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    match spec.experiment {
        ExperimentKind::SmallScale => Ok(ExperimentOutput {
            rows: run_small_scale(spec)?,
            node_stats: Vec::new(),
        }),
        ExperimentKind::LargeScale => Ok(ExperimentOutput {
            rows: run_large_scale(spec)?,
            node_stats: Vec::new(),
        }),
        ExperimentKind::Structured => run_structured(spec),
    }
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.experiment != kind {
        return Err(Error::validation(format!(
            "spec is for {}, not {kind}",
            spec.experiment
        )));
    }
    Ok(())
}

pub const BASE_COLUMNS: [&str; 12] = [
    "experiment",
    "k",
    "alpha",
    "n",
    "topology",
    "method",
    "trial",
    "seed",
    "num_drivers",
    "lower_bound",
    "controllable",
    "runtime_ms",
];

const LARGE_COLUMNS: [&str; 2] = ["num_edges", "structure_bytes"];

const CENTRALITY_COLUMNS: [&str; 7] = [
    "driver_in_degree",
    "nondriver_in_degree",
    "network_in_degree",
    "driver_betweenness",
    "nondriver_betweenness",
    "network_betweenness",
    "centrality_graph",
];

/// Centralities are taken on the tail-to-head projection digraph.
pub const CENTRALITY_GRAPH: &str = "tail_head_projection";

pub fn csv_header(kind: ExperimentKind) -> Vec<&'static str> {
    let mut h = BASE_COLUMNS.to_vec();
    match kind {
        ExperimentKind::SmallScale => {}
        ExperimentKind::LargeScale => h.extend(LARGE_COLUMNS),
        ExperimentKind::Structured => h.extend(CENTRALITY_COLUMNS),
    }
    h.push("meta_hash");
    h
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.6}")
    }
}

fn fmt_alpha(a: f64) -> String {
    format!("{a:?}")
}

fn row_record(kind: ExperimentKind, r: &Row) -> Vec<String> {
    let mut rec = vec![
        r.experiment.to_string(),
        r.k.to_string(),
        fmt_alpha(r.alpha),
        r.n.to_string(),
        r.topology.to_string(),
        r.method.to_string(),
        r.trial.to_string(),
        r.seed.to_string(),
        r.num_drivers.to_string(),
        r.lower_bound.to_string(),
        r.controllable.to_string(),
        format!("{:.3}", r.runtime_ms),
    ];
    match kind {
        ExperimentKind::SmallScale => {}
        ExperimentKind::LargeScale => {
            rec.push(r.num_edges.to_string());
            rec.push(r.structure_bytes.to_string());
        }
        ExperimentKind::Structured => {
            let c = r.centrality.clone().unwrap_or(CentralitySummary {
                driver_in_degree: f64::NAN,
                nondriver_in_degree: f64::NAN,
                network_in_degree: f64::NAN,
                driver_betweenness: f64::NAN,
                nondriver_betweenness: f64::NAN,
                network_betweenness: f64::NAN,
            });
            rec.extend(
                [
                    c.driver_in_degree,
                    c.nondriver_in_degree,
                    c.network_in_degree,
                    c.driver_betweenness,
                    c.nondriver_betweenness,
                    c.network_betweenness,
                ]
                .map(fmt_f64),
            );
            rec.push(CENTRALITY_GRAPH.to_string());
        }
    }
    rec.push(r.meta_hash.clone());
    rec
}

pub fn write_rows_csv(kind: ExperimentKind, rows: &[Row], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(kind))?;
    for r in rows {
        w.write_record(row_record(kind, r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_node_stats_csv(rows: &[NodeStatsRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "topology",
        "alpha",
        "n",
        "trial",
        "seed",
        "method",
        "node",
        "in_degree",
        "betweenness",
        "is_driver",
        "centrality_graph",
    ])?;
    for r in rows {
        w.write_record([
            r.topology.to_string(),
            fmt_alpha(r.alpha),
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.method.to_string(),
            r.node.to_string(),
            r.in_degree.to_string(),
            fmt_f64(r.betweenness),
            r.is_driver.to_string(),
            CENTRALITY_GRAPH.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and sample standard deviation; `None` for fewer than two values.
pub fn mean_std(xs: &[f64]) -> (f64, Option<f64>) {
    if xs.is_empty() {
        return (f64::NAN, None);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, Some(var.sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub k: usize,
    pub alpha: f64,
    pub n: usize,
    pub topology: Topology,
    pub method: Method,
    pub trials: usize,
    pub mean_drivers: f64,
    pub std_drivers: Option<f64>,
    pub mean_lower_bound: f64,
    pub controllable_fraction: f64,
    pub mean_runtime_ms: f64,
    pub std_runtime_ms: Option<f64>,
    pub mean_driver_in_degree: Option<f64>,
    pub mean_network_in_degree: Option<f64>,
}

/// Aggregates rows per configuration and method, in first-seen order.
pub fn summarize(rows: &[Row]) -> Vec<Summary> {
    let mut keys: Vec<(ExperimentKind, usize, u64, usize, Topology, Method)> = Vec::new();
    let mut groups: Vec<Vec<&Row>> = Vec::new();
    for r in rows {
        let key = (r.experiment, r.k, r.alpha.to_bits(), r.n, r.topology, r.method);
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r),
            None => {
                keys.push(key);
                groups.push(vec![r]);
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let f = |sel: &dyn Fn(&Row) -> f64| g.iter().map(|r| sel(r)).collect::<Vec<f64>>();
            let (mean_drivers, std_drivers) = mean_std(&f(&|r| r.num_drivers as f64));
            let (mean_runtime_ms, std_runtime_ms) = mean_std(&f(&|r| r.runtime_ms));
            let centrality_mean = |sel: &dyn Fn(&CentralitySummary) -> f64| {
                let xs: Vec<f64> = g
                    .iter()
                    .filter_map(|r| r.centrality.as_ref().map(sel))
                    .filter(|x| !x.is_nan())
                    .collect();
                (!xs.is_empty()).then(|| mean_std(&xs).0)
            };
            let first = g[0];
            Summary {
                experiment: first.experiment,
                k: first.k,
                alpha: first.alpha,
                n: first.n,
                topology: first.topology,
                method: first.method,
                trials: g.len(),
                mean_drivers,
                std_drivers,
                mean_lower_bound: mean_std(&f(&|r| r.lower_bound as f64)).0,
                controllable_fraction: f(&|r| r.controllable as u8 as f64).iter().sum::<f64>() / g.len() as f64,
                mean_runtime_ms,
                std_runtime_ms,
                mean_driver_in_degree: centrality_mean(&|c| c.driver_in_degree),
                mean_network_in_degree: centrality_mean(&|c| c.network_in_degree),
            }
        })
        .collect()
}

pub fn write_summary_csv(summaries: &[Summary], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "experiment",
        "k",
        "alpha",
        "n",
        "topology",
        "method",
        "trials",
        "mean_drivers",
        "std_drivers",
        "mean_lower_bound",
        "controllable_fraction",
        "mean_runtime_ms",
        "std_runtime_ms",
        "mean_driver_in_degree",
        "mean_network_in_degree",
    ])?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for s in summaries {
        w.write_record([
            s.experiment.to_string(),
            s.k.to_string(),
            fmt_alpha(s.alpha),
            s.n.to_string(),
            s.topology.to_string(),
            s.method.to_string(),
            s.trials.to_string(),
            fmt_f64(s.mean_drivers),
            opt(s.std_drivers),
            fmt_f64(s.mean_lower_bound),
            fmt_f64(s.controllable_fraction),
            format!("{:.3}", s.mean_runtime_ms),
            s.std_runtime_ms.map(|x| format!("{x:.3}")).unwrap_or_default(),
            opt(s.mean_driver_in_degree),
            opt(s.mean_network_in_degree),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean selection runtime per size, with the ratio to the previous size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub method: Method,
    pub trials: usize,
    pub mean_drivers: f64,
    pub mean_runtime_ms: f64,
    pub ratio_to_previous: Option<f64>,
}

/// Times `method` on uniform instances of each size, one trial at a time.
pub fn run_bench(
    ns: &[usize],
    k: usize,
    alpha: f64,
    method: Method,
    trials: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let spec = ExperimentSpec {
        experiment: ExperimentKind::LargeScale,
        ns: ns.to_vec(),
        ks: vec![k],
        alphas: vec![alpha],
        topologies: vec![Topology::Uniform],
        trials,
        seed,
        methods: vec![method],
    };
    if method == Method::Optimal {
        let mut s = spec.clone();
        s.experiment = ExperimentKind::SmallScale;
        s.validate()?;
    } else {
        spec.validate()?;
    }
    let mut out: Vec<BenchRow> = Vec::new();
    for inst in spec.instances().chunks(trials.max(1)) {
        if trials == 0 {
            break;
        }
        let mut runtimes = Vec::new();
        let mut drivers = Vec::new();
        for i in inst {
            let (h, _) = i.generate()?;
            let r = select(&h, method)?;
            runtimes.push(r.runtime.as_secs_f64() * 1e3);
            drivers.push(r.num_drivers() as f64);
        }
        let mean_runtime_ms = mean_std(&runtimes).0;
        let ratio_to_previous = out.last().map(|p| mean_runtime_ms / p.mean_runtime_ms);
        out.push(BenchRow {
            n: inst[0].n,
            method,
            trials,
            mean_drivers: mean_std(&drivers).0,
            mean_runtime_ms,
            ratio_to_previous,
        });
    }
    Ok(out)
}

pub fn write_bench_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "method",
        "trials",
        "mean_drivers",
        "mean_runtime_ms",
        "ratio_to_previous",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.method.to_string(),
            r.trials.to_string(),
            fmt_f64(r.mean_drivers),
            format!("{:.3}", r.mean_runtime_ms),
            r.ratio_to_previous.map(|x| format!("{x:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
