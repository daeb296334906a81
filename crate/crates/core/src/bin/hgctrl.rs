use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hgctrl::experiment::{
    run_bench, run_experiment, summarize, write_bench_csv, write_node_stats_csv, write_rows_csv, write_summary_csv,
    ExperimentKind, ExperimentSpec,
};
use hgctrl::gen::{generate, GenConfig, Topology};
use hgctrl::hgraph::{one_based_labels, read_hypergraph, render_hypergraph};
use hgctrl::matching::find_dilation_exact;
use hgctrl::oracle::cross_validate;
use hgctrl::{select, verify_structural_controllability, DirectedHypergraph, Error, Method, NodeId, Result};

#[derive(Parser)]
#[command(
    name = "hgctrl",
    version,
    about = "Structural controllability of hypergraph polynomial systems"
)]
struct Cli {
    /// Base seed for generators, realizations and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format. Defaults to json for single-instance commands and csv
    /// for experiment and bench.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random hypergraph.
    Gen(GenArgs),
    /// Check a driver set for structural controllability.
    Verify(VerifyArgs),
    /// Select driver nodes.
    Select(SelectArgs),
    /// Numeric rank test on random realizations.
    Oracle(OracleArgs),
    /// Run a batch experiment.
    Experiment(ExperimentArgs),
    /// Time a selection method across sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "uniform", value_parser = parse_topology)]
    topology: Topology,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    modules: usize,
    #[arg(long, default_value_t = 0.9)]
    p_intra: f64,
    #[arg(long, default_value_t = 0.1)]
    rewire: f64,
    /// Ring window width (default 2k).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    max_head: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DilationTest {
    Matching,
    Exact,
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated 1-based driver nodes.
    #[arg(long, value_delimiter = ',')]
    drivers: Vec<usize>,
    #[arg(long, value_enum, default_value = "matching")]
    dilation: DilationTest,
    /// Largest n for the exhaustive dilation scan.
    #[arg(long, default_value_t = 20)]
    max_exact_n: usize,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "mag", value_parser = parse_method)]
    method: Method,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    drivers: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// small, large or structured
    #[arg(value_parser = parse_kind)]
    kind: ExperimentKind,
    #[arg(long = "n", value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long = "k", value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long = "alpha", value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long = "topology", value_delimiter = ',', value_parser = parse_topology)]
    topologies: Vec<Topology>,
    #[arg(long = "methods", value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    #[arg(long)]
    trials: Option<usize>,
    /// Also write per-configuration means and standard deviations here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Structured only: per-node statistics CSV.
    #[arg(long)]
    node_stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [1000, 2000, 4000, 8000])]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value = "mag", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 3)]
    trials: usize,
}

fn parse_topology(s: &str) -> std::result::Result<Topology, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = Output { path: cli.out.clone() };
    match cli.command {
        Command::Gen(a) => cmd_gen(a, cli.seed, cli.format, &out),
        Command::Verify(a) => cmd_verify(a, cli.format, &out),
        Command::Select(a) => cmd_select(a, cli.format, &out),
        Command::Oracle(a) => cmd_oracle(a, cli.seed, cli.format, &out),
        Command::Experiment(a) => cmd_experiment(a, cli.seed, cli.format, &out),
        Command::Bench(a) => cmd_bench(a, cli.seed, cli.format, &out),
    }
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn write_with(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match &self.path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                f(&mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                f(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    fn json(&self, v: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        self.write_with(|w| Ok(w.write_all(text.as_bytes())?))
    }
}

fn to_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    Output {
        path: Some(path.to_path_buf()),
    }
    .write_with(f)
}

fn json_only(format: Option<Format>, what: &str) -> Result<()> {
    if format == Some(Format::Csv) {
        return Err(Error::Validation(format!("{what} writes JSON only")));
    }
    Ok(())
}

fn driver_ids(labels: &[usize]) -> Result<Vec<NodeId>> {
    let mut ids = labels
        .iter()
        .map(|&l| NodeId::from_one_based(l))
        .collect::<Result<Vec<_>>>()?;
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn labels(ids: &[NodeId]) -> Vec<usize> {
    one_based_labels(ids)
}

fn cmd_gen(a: GenArgs, seed: u64, format: Option<Format>, out: &Output) -> Result<()> {
    json_only(format, "gen")?;
    let mut cfg = GenConfig::new(a.topology, a.n, a.k, a.alpha, seed);
    cfg.modules = a.modules;
    cfg.p_intra = a.p_intra;
    cfg.rewire = a.rewire;
    cfg.window = a.window;
    cfg.max_head = a.max_head;
    let (h, meta) = generate(&cfg)?;
    let text = render_hypergraph(&h, Some(meta));
    out.write_with(|w| Ok(w.write_all(text.as_bytes())?))
}

fn cmd_verify(a: VerifyArgs, format: Option<Format>, out: &Output) -> Result<()> {
    json_only(format, "verify")?;
    let h = read_hypergraph(&a.input)?;
    let drivers = driver_ids(&a.drivers)?;
    let report = verify_structural_controllability(&h, &drivers)?;
    let accessible_ok = report.inaccessible.is_empty();
    let matching_ok = report.dilation_uncovered.is_empty();

    let mut dilation = serde_json::Map::new();
    let mut controllable = accessible_ok && matching_ok;
    if a.dilation != DilationTest::Exact {
        dilation.insert(
            "matching".into(),
            json!({
                "dilation": !matching_ok,
                "matching_size": report.matching_size,
                "uncovered": labels(&report.dilation_uncovered),
            }),
        );
    }
    if a.dilation != DilationTest::Matching {
        let witness = find_dilation_exact(&h, &drivers, a.max_exact_n)?;
        if a.dilation == DilationTest::Exact {
            controllable = accessible_ok && witness.is_none();
        } else {
            dilation.insert("tests_agree".into(), json!(matching_ok == witness.is_none()));
        }
        dilation.insert(
            "exact".into(),
            json!({
                "dilation": witness.is_some(),
                "witness": witness.map(|w| json!({
                    "node_set": labels(&w.node_set),
                    "distinct_head_intersections": w.distinct_head_intersections,
                    "deficiency": w.deficiency,
                })),
            }),
        );
    }
    out.json(&json!({
        "controllable": controllable,
        "drivers": labels(&drivers),
        "accessible": labels(&report.accessible),
        "inaccessible": labels(&report.inaccessible),
        "dilation": Value::Object(dilation),
        "semantics": report.semantics,
    }))
}

fn uncontrolled(h: DirectedHypergraph) -> DirectedHypergraph {
    if h.has_control_edges() {
        eprintln!("note: ignoring {} control edges in the input", h.control_edges().len());
        h.without_controls()
    } else {
        h
    }
}

fn cmd_select(a: SelectArgs, format: Option<Format>, out: &Output) -> Result<()> {
    let h = uncontrolled(read_hypergraph(&a.input)?);
    let r = select(&h, a.method)?;
    let drivers = labels(&r.drivers);
    match format.unwrap_or(Format::Json) {
        Format::Json => out.json(&json!({
            "method": r.method,
            "drivers": drivers,
            "num_drivers": r.num_drivers(),
            "lower_bound": r.lower_bound,
            "controllable": r.controllable,
            "runtime_ms": r.runtime.as_secs_f64() * 1e3,
            "steps": r.steps.iter().map(|s| json!({"node": s.node.one_based(), "gain": s.gain})).collect::<Vec<_>>(),
        })),
        Format::Csv => out.write_with(|w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record([
                "method",
                "num_drivers",
                "lower_bound",
                "controllable",
                "runtime_ms",
                "drivers",
            ])?;
            let list = drivers.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
            c.write_record([
                r.method.to_string(),
                r.num_drivers().to_string(),
                r.lower_bound.to_string(),
                r.controllable.to_string(),
                format!("{:.3}", r.runtime.as_secs_f64() * 1e3),
                list,
            ])?;
            c.flush()?;
            Ok(())
        }),
    }
}

fn cmd_oracle(a: OracleArgs, seed: u64, format: Option<Format>, out: &Output) -> Result<()> {
    json_only(format, "oracle")?;
    let h = read_hypergraph(&a.input)?;
    let drivers = driver_ids(&a.drivers)?;
    h.check_state_nodes(&drivers, "driver")?;
    let report = cross_validate(&h.to_pattern(), &drivers, a.trials, seed)?;
    out.json(&report)
}

fn cmd_experiment(a: ExperimentArgs, seed: u64, format: Option<Format>, out: &Output) -> Result<()> {
    let mut spec = ExperimentSpec::default_for(a.kind, seed);
    if !a.ns.is_empty() {
        spec.ns = a.ns;
    }
    if !a.ks.is_empty() {
        spec.ks = a.ks;
    }
    if !a.alphas.is_empty() {
        spec.alphas = a.alphas;
    }
    if !a.topologies.is_empty() {
        spec.topologies = a.topologies;
    }
    if !a.methods.is_empty() {
        spec.methods = a.methods;
    }
    if let Some(t) = a.trials {
        spec.trials = t;
    }
    let result = run_experiment(&spec)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => out.write_with(|w| write_rows_csv(spec.experiment, &result.rows, w))?,
        Format::Json => out.json(&result.rows)?,
    }
    if let Some(p) = &a.summary {
        let s = summarize(&result.rows);
        to_file(p, |w| write_summary_csv(&s, w))?;
    }
    if let Some(p) = &a.node_stats {
        to_file(p, |w| write_node_stats_csv(&result.node_stats, w))?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, seed: u64, format: Option<Format>, out: &Output) -> Result<()> {
    let rows = run_bench(&a.ns, a.k, a.alpha, a.method, a.trials, seed)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => out.write_with(|w| write_bench_csv(&rows, w)),
        Format::Json => out.json(&rows),
    }
}
