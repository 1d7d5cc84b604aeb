//! The `lapsolve` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lapsolve_core::config::{PathSparsifyConfig, SolverConfig, UltraConfig};
use lapsolve_core::decompose::{check_bounds, decompose};
use lapsolve_core::graph::{edge_subgraph, WeightedMultiGraph};
use lapsolve_core::oracle::{laplacian_dense, pencil_lambda_max, pencil_lambda_min, psd_le};
use lapsolve_core::path_sparsify::{
    path_sparsify, verify_claims, verify_path_sparsifier, VerifyOptions,
};
use lapsolve_core::rng::StreamSplitter;
use lapsolve_core::solvers::cg::default_max_iter;
use lapsolve_core::solvers::{conjugate_gradient, recursive_solver};
use lapsolve_core::spectral_subgraph::{bucket_edges, default_path_sparsifier, spectral_subgraph};
use lapsolve_core::ultrasparsify::ultrasparsify;

use crate::bench::{self, BenchOptions, Family, ORACLE_TOL};
use crate::error::{CliError, CliResult};
use crate::io::{self, GraphFormat};
use crate::report::{self, num, RunManifest};

#[derive(Parser, Debug)]
#[command(
    name = "lapsolve",
    version,
    about = "Laplacian solving, spectral subgraphs, path sparsifiers and ultrasparsifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve L_G x = b with the recursive preconditioned solver.
    Solve(SolveArgs),
    /// Build a low-distortion spectral subgraph H and its overestimates τ.
    Sparsify(SparsifyArgs),
    /// Build a vertex-disjoint path sparsifier.
    PathSparsify(PathSparsifyArgs),
    /// Build a dense ultrasparsifier (at most 200 vertices by default).
    Ultrasparsify(UltraArgs),
    /// Check a path sparsifier or a spectral approximation against its graph.
    Verify(VerifyArgs),
    /// Run the low-diameter decomposition and report its bounds.
    Decompose(DecomposeArgs),
    /// Compare the solver with plain conjugate gradient on generated graphs.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Edgelist,
    Mtx,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Edgelist => GraphFormat::EdgeList,
            FormatArg::Mtx => GraphFormat::MatrixMarket,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `KEY=VAL` override or a file of such lines. Repeatable.
    #[arg(long = "config", value_name = "KEY=VAL|FILE")]
    pub config: Vec<String>,
    /// Format of graph files read and written (detected from input by default).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Where to write the JSON report (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub graph: PathBuf,
    /// Right-hand side, one value per line. A seeded random one is used when absent.
    #[arg(long, value_name = "FILE")]
    pub rhs: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
    /// Where to write x, one value per line.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Skip the reference conjugate-gradient solve used to report the error.
    #[arg(long)]
    pub no_oracle: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SparsifyArgs {
    pub graph: PathBuf,
    /// Target stretch parameter (default: the solver's ln²n rule).
    #[arg(long)]
    pub k: Option<f64>,
    /// Distortion exponent in (1/2, 1).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
    /// Where to write H.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Where to write τ as CSV.
    #[arg(long, value_name = "FILE")]
    pub tau: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct PathSparsifyArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
    /// Where to write the retained subgraph.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Where to write the retained edge ids, one per line.
    #[arg(long, value_name = "FILE")]
    pub ids: Option<PathBuf>,
    /// Check at most this many covered edges in the report.
    #[arg(long, default_value_t = 200)]
    pub verify_edges: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct UltraArgs {
    pub graph: PathBuf,
    /// Construction parameter: at most n + 2n/k edges, condition number at most 108k².
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    /// Retained edge ids of a path sparsifier.
    #[arg(long, value_name = "FILE", conflicts_with = "subgraph")]
    pub ids: Option<PathBuf>,
    /// Required number of vertex-disjoint paths.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Hop bound on each path (default n).
    #[arg(long)]
    pub beta_len: Option<f64>,
    /// Also compute the exact max-flow path count.
    #[arg(long)]
    pub menger: bool,
    #[arg(long)]
    pub max_edges: Option<usize>,
    /// A reweighted graph to compare spectrally with the input.
    #[arg(long, value_name = "FILE")]
    pub subgraph: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    pub graph: PathBuf,
    /// Ball-growing rate in (0, 1/6].
    #[arg(long, default_value_t = 1.0 / 6.0)]
    pub beta: f64,
    /// Radius bound r.
    #[arg(long, default_value_t = 8)]
    pub radius: usize,
    /// Bucket edges by weight with this base (one bucket when absent).
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub family: String,
    /// Grid side lengths or vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
    /// Weight ratio for heavy-weights.
    #[arg(long, default_value_t = 1e6)]
    pub ratio: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
    /// Where to write the CSV table (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lapsolve: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sparsify(a) => cmd_sparsify(a),
        Command::PathSparsify(a) => cmd_path_sparsify(a),
        Command::Ultrasparsify(a) => cmd_ultrasparsify(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_graph(path: &Path, common: &Common) -> CliResult<WeightedMultiGraph> {
    Ok(io::read_graph(path, common.format.map(Into::into))?)
}

fn output_format(input: &Path, common: &Common) -> GraphFormat {
    common.format.map(Into::into).unwrap_or_else(|| {
        let by_ext = input
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
        if by_ext {
            GraphFormat::MatrixMarket
        } else {
            GraphFormat::EdgeList
        }
    })
}

fn solver_config(
    profile: Profile,
    overrides: &[(String, String)],
) -> CliResult<(SolverConfig, SolverConfig)> {
    let base = match profile {
        Profile::Desk => SolverConfig::desk(),
        Profile::Paper => SolverConfig::paper(),
    };
    let mut cfg = base;
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok((SolverConfig::paper(), cfg))
}

fn manifest(
    sub: &str,
    common: &Common,
    overrides: &[(String, String)],
    inputs: &[&Path],
    outputs: &[&Option<PathBuf>],
) -> RunManifest {
    let mut m = RunManifest::new(sub, common.seed);
    m.inputs = inputs.iter().map(|p| path_str(p)).collect();
    m.outputs = outputs
        .iter()
        .filter_map(|o| o.as_deref().map(path_str))
        .collect();
    if let Some(r) = &common.report {
        m.outputs.push(path_str(r));
    }
    m.config_overrides = overrides.to_vec();
    if let Some(f) = common.format {
        m.arg("format", GraphFormat::from(f));
    }
    m
}

fn emit(common: &Common, value: &Value) -> CliResult<()> {
    let text = report::to_pretty(value);
    match &common.report {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::Input(e.to_string()))
        }
    }
}

fn write_graph_out(
    path: &Option<PathBuf>,
    g: &WeightedMultiGraph,
    format: GraphFormat,
) -> CliResult<()> {
    if let Some(p) = path {
        io::write_graph(p, g, format)?;
    }
    Ok(())
}

pub fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    let start = Instant::now();
    let overrides = io::config_overrides(&a.common.config)?;
    let (paper, cfg) = solver_config(a.profile, &overrides)?;
    let g = load_graph(&a.graph, &a.common)?;
    let streams = StreamSplitter::new(a.common.seed);
    let b = match &a.rhs {
        Some(p) => io::read_vector(p)?,
        None => bench::random_rhs(&g, &mut streams.stream(&[1])),
    };
    if b.len() != g.n() {
        return Err(CliError::Input(format!(
            "right-hand side has {} entries but the graph has {} vertices",
            b.len(),
            g.n()
        )));
    }
    let mut inputs = vec![a.graph.as_path()];
    if let Some(p) = &a.rhs {
        inputs.push(p);
    }
    let mut m = manifest("solve", &a.common, &overrides, &inputs, &[&a.out]);
    m.arg("eps", a.eps)
        .arg("profile", format!("{:?}", a.profile).to_lowercase())
        .arg("oracle", !a.no_oracle);

    let t = Instant::now();
    let (x, rep) = recursive_solver(&g, &b, a.eps, &cfg, &mut streams.stream(&[2]))?;
    let solve_secs = t.elapsed().as_secs_f64();
    if let Some(p) = &a.out {
        io::write_vector(p, &x)?;
    }
    let final_error = if a.no_oracle {
        Value::Null
    } else {
        let (xstar, _) = conjugate_gradient(&g, &b, ORACLE_TOL, 10 * default_max_iter(g.n()));
        num(bench::relative_error(&g, &x, &xstar))
    };
    let mut result = report::solve_report(&rep);
    result["n"] = json!(g.n());
    result["m"] = json!(g.m());
    result["final_error"] = final_error;
    let mut timing = report::timing(start.elapsed().as_secs_f64());
    timing["solve_secs"] = num(solve_secs);
    emit(
        &a.common,
        &report::assemble(
            &m,
            report::constants(paper.entries(), cfg.entries()),
            result,
            timing,
        ),
    )
}

pub fn cmd_sparsify(a: SparsifyArgs) -> CliResult<()> {
    let start = Instant::now();
    let overrides = io::config_overrides(&a.common.config)?;
    let (paper, cfg) = solver_config(a.profile, &overrides)?;
    let g = load_graph(&a.graph, &a.common)?;
    let k = a.k.unwrap_or_else(|| cfg.lowstretch_k(g.n()));
    let p = a.p.unwrap_or(cfg.p);
    let mut m = manifest(
        "sparsify",
        &a.common,
        &overrides,
        &[&a.graph],
        &[&a.out, &a.tau],
    );
    m.arg("k", k)
        .arg("p", p)
        .arg("profile", format!("{:?}", a.profile).to_lowercase());

    let mut sparsifier = default_path_sparsifier(cfg.subgraph.path_k, cfg.path.clone());
    let sub = spectral_subgraph(
        &g,
        k,
        p,
        &cfg.subgraph,
        &mut sparsifier,
        &mut StreamSplitter::new(a.common.seed).stream(&[0]),
    )?;
    write_graph_out(&a.out, &sub.graph(&g), output_format(&a.graph, &a.common))?;
    if let Some(path) = &a.tau {
        let mut in_h = vec![false; g.m()];
        sub.h.iter().for_each(|&id| in_h[id] = true);
        let mut csv = String::from("edge,u,v,w,in_h,tau,tau_paper,tau_stretch\n");
        for (id, e) in g.edges().iter().enumerate() {
            csv.push_str(&format!(
                "{id},{},{},{:?},{},{:?},{:?},{:?}\n",
                e.u, e.v, e.w, in_h[id] as u8, sub.tau[id], sub.tau_paper[id], sub.tau_stretch[id]
            ));
        }
        fs::write(path, csv).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let result = report::subgraph_summary(&sub, g.m());
    let consts = report::constants(paper.entries(), cfg.entries());
    emit(
        &a.common,
        &report::assemble(
            &m,
            consts,
            result,
            report::timing(start.elapsed().as_secs_f64()),
        ),
    )
}

fn path_config(profile: Profile, overrides: &[(String, String)]) -> CliResult<PathSparsifyConfig> {
    let mut cfg = match profile {
        Profile::Desk => PathSparsifyConfig::desk(),
        Profile::Paper => PathSparsifyConfig::paper(),
    };
    for (k, v) in overrides {
        cfg.set(k.strip_prefix("path.").unwrap_or(k), v)?;
    }
    Ok(cfg)
}

pub fn cmd_path_sparsify(a: PathSparsifyArgs) -> CliResult<()> {
    let start = Instant::now();
    let overrides = io::config_overrides(&a.common.config)?;
    let cfg = path_config(a.profile, &overrides)?;
    let g = load_graph(&a.graph, &a.common)?;
    let mut m = manifest(
        "path-sparsify",
        &a.common,
        &overrides,
        &[&a.graph],
        &[&a.out, &a.ids],
    );
    m.arg("k", a.k)
        .arg("profile", format!("{:?}", a.profile).to_lowercase())
        .arg("verify_edges", a.verify_edges);

    let ps = path_sparsify(
        &g,
        a.k,
        &cfg,
        &mut StreamSplitter::new(a.common.seed).stream(&[0]),
    )?;
    if let Some(p) = &a.ids {
        io::write_ids(p, &ps.kept)?;
    }
    if a.out.is_some() {
        let (f, _) = edge_subgraph(&g, &ps.kept)?;
        write_graph_out(&a.out, &f, output_format(&a.graph, &a.common))?;
    }
    let opts = VerifyOptions {
        max_edges: Some(a.verify_edges),
        ..Default::default()
    };
    let check = verify_claims(&g, &ps.kept, &ps.claims(), opts);
    let iterations: Vec<Value> = ps
        .iterations
        .iter()
        .map(|it| {
            json!({
                "remain_before": it.remain_before,
                "d_avg": num(it.d_avg),
                "pieces": it.pieces,
                "edges_in_pieces": it.edges_in_pieces,
                "f_added": it.f_added,
                "covered_added": it.covered_added,
                "remain_after": it.remain_after,
                "cut_violations": it.cut_violations,
            })
        })
        .collect();
    let result = json!({
        "n": g.n(),
        "m": g.m(),
        "kept": ps.kept.len(),
        "covered": ps.covered.len(),
        "dropped_loops": ps.dropped_loops.len(),
        "k_partial": num(ps.k_partial),
        "density_floor": num(ps.density_floor),
        "min_alpha": ps.min_alpha().map_or(Value::Null, num),
        "max_beta_len": ps.max_beta_len().map_or(Value::Null, num),
        "stop_reason": ps.stop_reason,
        "iterations": iterations,
        "verification": {
            "checked": check.checks.len(),
            "unchecked": check.unchecked,
            "passed": check.passed(),
            "failed": check.failed(),
            "pass_rate": num(check.pass_rate()),
        },
    });
    let consts = report::constants(PathSparsifyConfig::paper().entries(), cfg.entries());
    emit(
        &a.common,
        &report::assemble(
            &m,
            consts,
            result,
            report::timing(start.elapsed().as_secs_f64()),
        ),
    )
}

pub fn cmd_ultrasparsify(a: UltraArgs) -> CliResult<()> {
    let start = Instant::now();
    let overrides = io::config_overrides(&a.common.config)?;
    let mut cfg = UltraConfig::default();
    for (k, v) in &overrides {
        cfg.set(k.strip_prefix("ultra.").unwrap_or(k), v)?;
    }
    let g = load_graph(&a.graph, &a.common)?;
    let mut m = manifest(
        "ultrasparsify",
        &a.common,
        &overrides,
        &[&a.graph],
        &[&a.out],
    );
    m.arg("k", a.k);
    let u = ultrasparsify(
        &g,
        a.k,
        &cfg,
        &mut StreamSplitter::new(a.common.seed).stream(&[0]),
    )?;
    write_graph_out(&a.out, &u.h, output_format(&a.graph, &a.common))?;
    let mut result = report::ultrasparsifier_summary(&u, g.n(), g.m());
    result["edge_ids"] = json!(u.edge_ids);
    let consts = report::constants(UltraConfig::default().entries(), cfg.entries());
    emit(
        &a.common,
        &report::assemble(
            &m,
            consts,
            result,
            report::timing(start.elapsed().as_secs_f64()),
        ),
    )
}

pub fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let start = Instant::now();
    let g = load_graph(&a.graph, &a.common)?;
    let mut inputs = vec![a.graph.as_path()];
    inputs.extend(a.ids.as_deref());
    inputs.extend(a.subgraph.as_deref());
    let mut m = manifest("verify", &a.common, &[], &inputs, &[]);

    let result = if let Some(sub) = &a.subgraph {
        let h = load_graph(sub, &a.common)?;
        if h.n() != g.n() {
            return Err(CliError::Input(format!(
                "subgraph has {} vertices, graph has {}",
                h.n(),
                g.n()
            )));
        }
        let dominated = psd_le(&laplacian_dense(&h), &laplacian_dense(&g));
        let hi = pencil_lambda_max(&g, &h)?;
        let lo = pencil_lambda_min(&g, &h)?;
        json!({
            "mode": "spectral",
            "n": g.n(),
            "m": g.m(),
            "subgraph_edges": h.m(),
            "dominated": dominated,
            "pencil_max": num(hi),
            "pencil_min": num(lo),
            "condition_number": num(hi / lo),
            "pass": dominated && hi.is_finite(),
        })
    } else {
        let ids_path = a
            .ids
            .as_ref()
            .ok_or_else(|| CliError::Input("verify needs --ids or --subgraph".into()))?;
        let ids = io::read_ids(ids_path)?;
        if let Some(&bad) = ids.iter().find(|&&id| id >= g.m()) {
            return Err(CliError::Input(format!(
                "edge id {bad} out of range for m = {}",
                g.m()
            )));
        }
        let beta_len = a.beta_len.unwrap_or(g.n() as f64);
        m.arg("alpha", a.alpha)
            .arg("beta_len", beta_len)
            .arg("menger", a.menger);
        if let Some(me) = a.max_edges {
            m.arg("max_edges", me);
        }
        let opts = VerifyOptions {
            menger: a.menger,
            early_stop: !a.menger,
            max_edges: a.max_edges,
        };
        let r = verify_path_sparsifier(&g, &ids, a.alpha, beta_len, opts);
        let failures: Vec<Value> = r
            .checks
            .iter()
            .filter(|c| !c.passed())
            .take(50)
            .map(|c| json!({ "edge": c.edge, "required": c.required, "max_len": c.max_len, "peeled": c.peeled, "menger": c.menger }))
            .collect();
        json!({
            "mode": "path",
            "n": g.n(),
            "m": g.m(),
            "retained": ids.len(),
            "checked": r.checks.len(),
            "unchecked": r.unchecked,
            "passed": r.passed(),
            "failed": r.failed(),
            "pass_rate": num(r.pass_rate()),
            "first_failures": failures,
            "pass": r.pass(),
        })
    };
    let consts = report::constants(Vec::new(), Vec::new());
    emit(
        &a.common,
        &report::assemble(
            &m,
            consts,
            result,
            report::timing(start.elapsed().as_secs_f64()),
        ),
    )
}

pub fn cmd_decompose(a: DecomposeArgs) -> CliResult<()> {
    let start = Instant::now();
    let g = load_graph(&a.graph, &a.common)?;
    let mut m = manifest("decompose", &a.common, &[], &[&a.graph], &[]);
    m.arg("beta", a.beta).arg("radius", a.radius);
    let (buckets, count) = match a.delta {
        Some(d) => {
            m.arg("delta", d);
            let part = bucket_edges(&g, d)?;
            (
                part.bucket.iter().map(|b| b - 1).collect::<Vec<_>>(),
                part.count,
            )
        }
        None => (vec![0; g.m()], 1),
    };
    let d = decompose(&g, &buckets, count, a.beta, a.radius)?;
    let bounds = check_bounds(&g, &buckets, count, a.beta, a.radius, &d);
    let sizes: Vec<usize> = d.pieces.iter().map(Vec::len).collect();
    let result = json!({
        "n": g.n(),
        "m": g.m(),
        "buckets": count,
        "pieces": d.pieces.len(),
        "piece_sizes": sizes,
        "trees": d.tree_count(),
        "ball_radius": d.ball_radius,
        "cut_per_bucket": bounds.cut_per_bucket,
        "cut_bound_per_bucket": bounds.cut_bound_per_bucket.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "max_tree_radius": bounds.max_tree_radius,
        "tree_count_bound": num(bounds.tree_count_bound),
        "violations": bounds.violations(a.radius),
    });
    let consts = report::constants(Vec::new(), Vec::new());
    emit(
        &a.common,
        &report::assemble(
            &m,
            consts,
            result,
            report::timing(start.elapsed().as_secs_f64()),
        ),
    )
}

pub fn cmd_bench(a: BenchArgs) -> CliResult<()> {
    let overrides = io::config_overrides(&a.common.config)?;
    let (_, cfg) = solver_config(a.profile, &overrides)?;
    let family: Family = a.family.parse().map_err(CliError::Input)?;
    let threads = a
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = BenchOptions {
        family,
        sizes: a.sizes,
        seeds: a.seeds,
        first_seed: a.common.seed,
        eps: a.eps,
        degree: a.degree,
        ratio: a.ratio,
        threads,
        config: cfg,
    };
    let rows = bench::run_bench(&opts)?;
    let csv = bench::to_csv(&rows);
    match &a.out {
        Some(p) => fs::write(p, csv).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Input(e.to_string())),
    }
}
