//! JSON reports.
//!
//! Every report is one object with four keys: `manifest` (a [`RunManifest`]),
//! `constants` (`paper` and `effective` maps of every tunable), `result`
//! (command specific) and `timing`. Everything outside `timing` is a pure
//! function of the manifest, so two runs of the same manifest differ only
//! there.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use lapsolve_core::solvers::{LevelStats, SolveReport};
use lapsolve_core::spectral_subgraph::DistortionSubgraph;
use lapsolve_core::ultrasparsify::Ultrasparsifier;

/// Enough to rerun a command and get the same report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    /// Command-line flags other than inputs, outputs and `--config`.
    pub arguments: BTreeMap<String, String>,
    pub config_overrides: Vec<(String, String)>,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Default::default()
        }
    }

    pub fn arg(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.arguments.insert(key.to_string(), value.to_string());
        self
    }
}

pub fn constants(paper: Vec<(String, String)>, effective: Vec<(String, String)>) -> Value {
    let to_map = |v: Vec<(String, String)>| {
        v.into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect::<Map<_, _>>()
    };
    json!({ "paper": to_map(paper), "effective": to_map(effective) })
}

pub fn timing(wall_time_secs: f64) -> Value {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    json!({ "wall_time_secs": wall_time_secs, "timestamp_unix": stamp })
}

pub fn assemble(manifest: &RunManifest, constants: Value, result: Value, timing: Value) -> Value {
    json!({
        "manifest": manifest,
        "constants": constants,
        "result": result,
        "timing": timing,
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// JSON has no infinities or NaN; those become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn level(l: &LevelStats) -> Value {
    json!({
        "depth": l.depth,
        "calls": l.calls,
        "max_n": l.max_n,
        "max_m": l.max_m,
        "cg_solves": l.cg_solves,
        "cg_iterations": l.cg_iterations,
        "subgraph_edges": l.subgraph_edges,
        "kappa_measured": num(l.kappa_measured),
        "eta": num(l.eta),
        "agd_iterations": l.agd_iterations,
        "richardson_calls": l.richardson_calls,
        "richardson_iterations": l.richardson_iterations,
        "richardson_skipped": l.richardson_skipped,
        "sampled_edges": l.sampled_edges,
        "max_sampled_edges": l.max_sampled_edges,
        "draws": l.draws,
    })
}

/// The solver telemetry. The wall time goes into `timing`, not here.
pub fn solve_report(r: &SolveReport) -> Value {
    json!({
        "epsilon": num(r.epsilon),
        "levels": r.levels.iter().map(level).collect::<Vec<_>>(),
        "residual_trajectory": r.residual_trajectory.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "final_relative_residual": num(r.final_relative_residual),
    })
}

pub fn subgraph_summary(s: &DistortionSubgraph, m: usize) -> Value {
    let iterations: Vec<Value> = s
        .iterations
        .iter()
        .map(|it| {
            json!({
                "t": it.t,
                "window_start": it.window_start,
                "contracted_vertices": it.contracted_vertices,
                "window_edges": it.window_edges,
                "pieces": it.pieces,
                "trees": it.trees,
                "forest_added": it.forest_added,
                "sparsifier_added": it.sparsifier_added,
                "repaired": it.repaired,
                "settled": it.settled,
                "extra_kept": it.extra_kept,
                "dumped": it.dumped,
                "forest_diameter": num(it.forest_diameter),
                "forest_bound": num(it.forest_bound),
            })
        })
        .collect();
    json!({
        "m": m,
        "h_edges": s.h.len(),
        "kappa_measured": num(s.kappa_measured),
        "p": num(s.p),
        "tau_rule": s.rule.name(),
        "k": num(s.params.k),
        "beta": num(s.params.beta),
        "sigma": s.params.sigma,
        "delta": num(s.params.delta),
        "buckets": s.buckets,
        "forest_edges": s.forest_edges,
        "forced": s.forced,
        "paper_below_stretch": s.paper_below_stretch,
        "iterations": iterations,
    })
}

pub fn ultrasparsifier_summary(u: &Ultrasparsifier, n: usize, m: usize) -> Value {
    let presparsify = u.presparsified.as_ref().map_or(
        Value::Null,
        |p| json!({ "edges": p.edges.len(), "factor": num(p.factor), "attempts": p.attempts }),
    );
    let snapshots: Vec<Value> = u
        .augment
        .snapshots
        .iter()
        .map(|s| {
            json!({
                "step": s.step,
                "u": num(s.u),
                "l": num(s.l),
                "phi_upper": num(s.phi_upper),
                "phi_lower": num(s.phi_lower),
                "lambda_min": num(s.lambda_min),
                "lambda_max": num(s.lambda_max),
            })
        })
        .collect();
    json!({
        "n": n,
        "m": m,
        "k": num(u.k),
        "h_edges": u.h.m(),
        "edge_bound": num(u.edge_bound),
        "within_edge_bound": u.within_edge_bound(),
        "guaranteed_factor": num(u.guaranteed_factor),
        "pencil_max": num(u.pencil_max),
        "pencil_min": num(u.pencil_min),
        "condition_number": num(u.condition_number()),
        "dominated": u.dominated,
        "intermediate_sandwich": u.intermediate_sandwich,
        "scale": num(u.scale),
        "presparsify": presparsify,
        "trace_removal": {
            "selected": u.removal.selected.len(),
            "removed": u.removal.removed.len(),
            "final_trace": num(u.removal.final_trace),
            "bound": num(u.removal.bound),
            "step_violations": u.removal.step_violations,
            "max_inverse_drift": num(u.removal.max_inverse_drift),
            "refreshes": u.removal.refreshes,
        },
        "barrier": {
            "steps": u.augment.steps(),
            "kappa": num(u.augment.kappa),
            "q": num(u.augment.q),
            "gamma_upper": num(u.augment.gamma_upper),
            "gamma_lower": num(u.augment.gamma_lower),
            "violations": u.augment.violations,
            "lambda_min": num(u.augment.lambda_min),
            "lambda_max": num(u.augment.lambda_max),
            "snapshots": snapshots,
        },
    })
}
