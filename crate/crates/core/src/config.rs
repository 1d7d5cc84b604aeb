//! Tunable constants for the path sparsifier, the spectral subgraph and the
//! recursive solver.
//!
//! Every struct has a `paper()` profile holding the constants exactly as the
//! analysis states them and a `desk()` profile (the `Default`) whose values
//! keep the preconditions satisfiable on graphs with at most ~10⁴ vertices.
//! Keys accepted by [`SolverConfig::set`] are the field names, prefixed by
//! `path.` or `subgraph.` for the nested structs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSparsifyConfig {
    /// Constant in the uniform sampling rate `p = min(1, c_unif · ln n / d)`.
    pub c_unif: f64,
    /// `c_split = c_split_coeff · ln(4n)`.
    pub c_split_coeff: f64,
    /// `c_bip = c_bip_coeff · ln(2n)`.
    pub c_bip_coeff: f64,
    /// Outer-loop density floor `density_floor_coeff · ln²(2n)`.
    pub density_floor_coeff: f64,
    /// `k_partial = k · c_kp · ln³ n`.
    pub c_kp: f64,
    /// Allowed fraction of sampled edges cut by the expander decomposition.
    pub cut_fraction: f64,
    pub max_retries: usize,
    /// `phi_target = expander_phi_coeff / ln³ m`.
    pub expander_phi_coeff: f64,
    pub expander_max_depth: usize,
    /// Pieces up to this size get an exact dense λ₂; larger ones use Lanczos.
    pub exact_eigen_cap: usize,
    /// Hard cap on outer-loop iterations.
    pub max_iterations: usize,
}

impl PathSparsifyConfig {
    pub fn paper() -> Self {
        PathSparsifyConfig {
            c_unif: 1.0,
            c_split_coeff: 20.0,
            c_bip_coeff: 40.0,
            density_floor_coeff: 2000.0,
            c_kp: 1.0,
            cut_fraction: 0.125,
            max_retries: 64,
            expander_phi_coeff: 1.0,
            expander_max_depth: 64,
            exact_eigen_cap: 400,
            max_iterations: 64,
        }
    }

    pub fn desk() -> Self {
        PathSparsifyConfig {
            c_unif: 1.0,
            c_split_coeff: 0.5,
            c_bip_coeff: 0.5,
            density_floor_coeff: 1.0,
            c_kp: 0.01,
            ..Self::paper()
        }
    }

    pub fn c_split(&self, n: usize) -> f64 {
        self.c_split_coeff * ln(4.0 * n as f64)
    }

    pub fn c_bip(&self, n: usize) -> f64 {
        self.c_bip_coeff * ln(2.0 * n as f64)
    }

    pub fn density_floor(&self, n: usize) -> f64 {
        let l = ln(2.0 * n as f64);
        self.density_floor_coeff * l * l
    }

    pub fn k_partial(&self, k: usize, n: usize) -> f64 {
        let l = ln(n.max(2) as f64);
        (k as f64 * self.c_kp * l * l * l).max(1.0)
    }

    pub fn phi_target(&self, m: usize) -> f64 {
        let l = ln(m.max(3) as f64);
        (self.expander_phi_coeff / (l * l * l)).min(0.5)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "c_unif" => self.c_unif = parse(key, value)?,
            "c_split_coeff" => self.c_split_coeff = parse(key, value)?,
            "c_bip_coeff" => self.c_bip_coeff = parse(key, value)?,
            "density_floor_coeff" => self.density_floor_coeff = parse(key, value)?,
            "c_kp" => self.c_kp = parse(key, value)?,
            "cut_fraction" => self.cut_fraction = parse(key, value)?,
            "max_retries" => self.max_retries = parse(key, value)?,
            "expander_phi_coeff" => self.expander_phi_coeff = parse(key, value)?,
            "expander_max_depth" => self.expander_max_depth = parse(key, value)?,
            "exact_eigen_cap" => self.exact_eigen_cap = parse(key, value)?,
            "max_iterations" => self.max_iterations = parse(key, value)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        [
            ("c_unif", self.c_unif.to_string()),
            ("c_split_coeff", self.c_split_coeff.to_string()),
            ("c_bip_coeff", self.c_bip_coeff.to_string()),
            ("density_floor_coeff", self.density_floor_coeff.to_string()),
            ("c_kp", self.c_kp.to_string()),
            ("cut_fraction", self.cut_fraction.to_string()),
            ("max_retries", self.max_retries.to_string()),
            ("expander_phi_coeff", self.expander_phi_coeff.to_string()),
            ("expander_max_depth", self.expander_max_depth.to_string()),
            ("exact_eigen_cap", self.exact_eigen_cap.to_string()),
            ("max_iterations", self.max_iterations.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

impl Default for PathSparsifyConfig {
    fn default() -> Self {
        Self::desk()
    }
}

/// How the spectral subgraph reports leverage overestimates for edges left
/// out of `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauRule {
    /// `4 w_e δ^{t+1} / w_max` from the iteration that settled the edge.
    Paper,
    /// `w_e` times the resistance of the path joining the endpoints in a
    /// spanning forest of `H`.
    TreeStretch,
    /// The smaller of the two.
    Min,
}

impl TauRule {
    pub fn name(self) -> &'static str {
        match self {
            TauRule::Paper => "paper",
            TauRule::TreeStretch => "tree-stretch",
            TauRule::Min => "min",
        }
    }
}

impl core::str::FromStr for TauRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(TauRule::Paper),
            "tree-stretch" => Ok(TauRule::TreeStretch),
            "min" => Ok(TauRule::Min),
            other => Err(Error::InvalidInput(format!("unknown tau rule {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphConfig {
    /// Overrides the derived `β` when set.
    pub beta: Option<f64>,
    /// Overrides the derived `σ` when set.
    pub sigma: Option<usize>,
    /// Overrides the derived `δ` when set.
    pub delta: Option<f64>,
    pub tau_rule: TauRule,
    /// Inputs must satisfy `w_max / w_min ≤ n^weight_ratio_exponent`.
    pub weight_ratio_exponent: f64,
    /// Each window keeps `⌊extra_coeff · m / k²⌋` edges per bucket.
    pub extra_coeff: f64,
    /// Reported budget `|E(H)| ≤ n + sparsity_coeff · m / k`.
    pub sparsity_coeff: f64,
    /// The `k` handed to the path sparsifier inside tree augmentation.
    pub path_k: usize,
}

impl SubgraphConfig {
    pub fn paper() -> Self {
        SubgraphConfig {
            beta: None,
            sigma: None,
            delta: None,
            tau_rule: TauRule::Paper,
            weight_ratio_exponent: 12.0,
            extra_coeff: 6.0,
            sparsity_coeff: 64.0,
            path_k: 1,
        }
    }

    pub fn desk() -> Self {
        SubgraphConfig {
            beta: Some(0.25),
            delta: Some(8.0),
            tau_rule: TauRule::TreeStretch,
            ..Self::paper()
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "beta" => self.beta = parse_opt(key, value)?,
            "sigma" => self.sigma = parse_opt(key, value)?,
            "delta" => self.delta = parse_opt(key, value)?,
            "tau_rule" => self.tau_rule = value.parse()?,
            "weight_ratio_exponent" => self.weight_ratio_exponent = parse(key, value)?,
            "extra_coeff" => self.extra_coeff = parse(key, value)?,
            "sparsity_coeff" => self.sparsity_coeff = parse(key, value)?,
            "path_k" => self.path_k = parse(key, value)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref()
                .map_or_else(|| "auto".to_string(), ToString::to_string)
        }
        [
            ("beta", opt(&self.beta)),
            ("sigma", opt(&self.sigma)),
            ("delta", opt(&self.delta)),
            ("tau_rule", self.tau_rule.name().to_string()),
            (
                "weight_ratio_exponent",
                self.weight_ratio_exponent.to_string(),
            ),
            ("extra_coeff", self.extra_coeff.to_string()),
            ("sparsity_coeff", self.sparsity_coeff.to_string()),
            ("path_k", self.path_k.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

impl Default for SubgraphConfig {
    fn default() -> Self {
        Self::desk()
    }
}

fn parse_opt<T: core::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.trim() == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

/// Constants of the recursive solver, with the nested path-sparsifier and
/// subgraph constants.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// Distortion exponent of the subgraph.
    pub p: f64,
    /// Sampling parameter: about `Στ / sample_delta` draws per sample.
    pub sample_delta: f64,
    /// Richardson runs `⌈richardson_iters_coeff · ln(1/ε)⌉` iterations.
    pub richardson_iters_coeff: f64,
    /// Step length applied to each preconditioned correction.
    pub richardson_step: f64,
    /// A sample is discarded when it has more than
    /// `size_check_coeff · ‖τ‖_p^p + |E(G')|` edges.
    pub size_check_coeff: f64,
    pub c_s: f64,
    /// `η = eta_coeff · ((ln ln n) κ(m) / m)^{2/(2p−1) + eta_slack}`.
    pub eta_coeff: f64,
    pub eta_slack: f64,
    /// Upper clamp on `η`.
    pub eta_cap: Option<f64>,
    /// Floor `κ(m) ≥ kappa_envelope · m · (ln(k ln n))^{4p/(1−p)}`.
    pub kappa_envelope: f64,
    /// Subgraph sparsity target `k = lowstretch_k_coeff · ln² n`.
    pub lowstretch_k_coeff: f64,
    /// Inner solves request error `1 / (inner_error_coeff · c_s² · ln² n)`.
    pub inner_error_coeff: f64,
    pub base_case_edge_threshold: usize,
    /// Relative residual of the conjugate-gradient base case.
    pub base_case_tol: f64,
    /// Levels deeper than this are solved by conjugate gradient directly.
    pub max_depth: usize,
    /// Relative residual of conjugate gradient at the depth cap.
    pub depth_cap_tol: f64,
    pub path: PathSparsifyConfig,
    pub subgraph: SubgraphConfig,
}

impl SolverConfig {
    pub fn default_p() -> f64 {
        libm::sqrt(10.0) / 3.0 - 1.0 / 3.0
    }

    pub fn paper() -> Self {
        SolverConfig {
            epsilon: 1e-8,
            p: Self::default_p(),
            sample_delta: 0.1,
            richardson_iters_coeff: 200.0,
            richardson_step: 0.1,
            size_check_coeff: 1600.0,
            c_s: 4.0,
            eta_coeff: 8.0,
            eta_slack: 0.05,
            eta_cap: None,
            kappa_envelope: 1.0,
            lowstretch_k_coeff: 1.0,
            inner_error_coeff: 1600.0,
            base_case_edge_threshold: 512,
            base_case_tol: 1e-14,
            max_depth: 64,
            depth_cap_tol: 1e-14,
            path: PathSparsifyConfig::paper(),
            subgraph: SubgraphConfig::paper(),
        }
    }

    pub fn desk() -> Self {
        SolverConfig {
            sample_delta: 0.25,
            richardson_iters_coeff: 0.5,
            richardson_step: 1.0,
            eta_cap: Some(4.0),
            kappa_envelope: 0.0,
            max_depth: 1,
            depth_cap_tol: 1e-8,
            path: PathSparsifyConfig::desk(),
            subgraph: SubgraphConfig::desk(),
            ..Self::paper()
        }
    }

    /// `1 / (inner_error_coeff · c_s² · ln² n)`.
    pub fn inner_error(&self, n: usize) -> f64 {
        let l = ln(n.max(3) as f64);
        1.0 / (self.inner_error_coeff * self.c_s * self.c_s * l * l)
    }

    pub fn lowstretch_k(&self, n: usize) -> f64 {
        let l = ln(n.max(3) as f64);
        (self.lowstretch_k_coeff * l * l).max(1.0 + 1e-9)
    }

    /// `κ(m)` from the measured `‖τ‖_p^p` and the envelope floor.
    pub fn kappa(&self, measured: f64, n: usize, m: usize, k: f64) -> f64 {
        let l = ln(k * ln(n.max(3) as f64)).max(1.0);
        let env = self.kappa_envelope * m as f64 * libm::pow(l, 4.0 * self.p / (1.0 - self.p));
        measured.max(env)
    }

    /// `η` for a graph with `n` vertices and `m` edges, at least 1.
    pub fn eta(&self, kappa: f64, n: usize, m: usize) -> f64 {
        let lln = ln(ln(n.max(16) as f64));
        let expo = 2.0 / (2.0 * self.p - 1.0) + self.eta_slack;
        let eta = self.eta_coeff * libm::pow(lln * kappa / m.max(1) as f64, expo);
        let eta = match self.eta_cap {
            Some(cap) => eta.min(cap),
            None => eta,
        };
        eta.max(1.0)
    }

    pub fn richardson_iterations(&self, eps: f64) -> usize {
        if eps >= 1.0 {
            return 0;
        }
        libm::ceil(self.richardson_iters_coeff * ln(1.0 / eps)) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("solver config: {what}")));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon outside (0,1)");
        }
        if !(self.p > 0.5 && self.p < 1.0) {
            return bad("p outside (1/2,1)");
        }
        if !(self.sample_delta > 0.0 && self.sample_delta < 1.0) {
            return bad("sample_delta outside (0,1)");
        }
        let positive = [
            self.richardson_iters_coeff,
            self.richardson_step,
            self.size_check_coeff,
            self.c_s,
            self.eta_coeff,
            self.eta_slack,
            self.lowstretch_k_coeff,
            self.inner_error_coeff,
            self.base_case_tol,
            self.depth_cap_tol,
        ];
        if positive.iter().any(|&x| !(x > 0.0)) || self.kappa_envelope < 0.0 {
            return bad("coefficients must be positive");
        }
        if self.eta_cap.is_some_and(|c| !(c >= 1.0)) {
            return bad("eta_cap below 1");
        }
        Ok(())
    }

    /// Sets `key` (a field name, or `path.<field>` / `subgraph.<field>`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(rest) = key.strip_prefix("path.") {
            return self.path.set(rest, value);
        }
        if let Some(rest) = key.strip_prefix("subgraph.") {
            return self.subgraph.set(rest, value);
        }
        match key {
            "epsilon" => self.epsilon = parse(key, value)?,
            "p" => self.p = parse(key, value)?,
            "sample_delta" => self.sample_delta = parse(key, value)?,
            "richardson_iters_coeff" => self.richardson_iters_coeff = parse(key, value)?,
            "richardson_step" => self.richardson_step = parse(key, value)?,
            "size_check_coeff" => self.size_check_coeff = parse(key, value)?,
            "c_s" => self.c_s = parse(key, value)?,
            "eta_coeff" => self.eta_coeff = parse(key, value)?,
            "eta_slack" => self.eta_slack = parse(key, value)?,
            "eta_cap" => self.eta_cap = parse_opt(key, value)?,
            "kappa_envelope" => self.kappa_envelope = parse(key, value)?,
            "lowstretch_k_coeff" => self.lowstretch_k_coeff = parse(key, value)?,
            "inner_error_coeff" => self.inner_error_coeff = parse(key, value)?,
            "base_case_edge_threshold" => self.base_case_edge_threshold = parse(key, value)?,
            "base_case_tol" => self.base_case_tol = parse(key, value)?,
            "max_depth" => self.max_depth = parse(key, value)?,
            "depth_cap_tol" => self.depth_cap_tol = parse(key, value)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = [
            ("epsilon", self.epsilon.to_string()),
            ("p", self.p.to_string()),
            ("sample_delta", self.sample_delta.to_string()),
            (
                "richardson_iters_coeff",
                self.richardson_iters_coeff.to_string(),
            ),
            ("richardson_step", self.richardson_step.to_string()),
            ("size_check_coeff", self.size_check_coeff.to_string()),
            ("c_s", self.c_s.to_string()),
            ("eta_coeff", self.eta_coeff.to_string()),
            ("eta_slack", self.eta_slack.to_string()),
            (
                "eta_cap",
                self.eta_cap
                    .map_or_else(|| "auto".to_string(), |c| c.to_string()),
            ),
            ("kappa_envelope", self.kappa_envelope.to_string()),
            ("lowstretch_k_coeff", self.lowstretch_k_coeff.to_string()),
            ("inner_error_coeff", self.inner_error_coeff.to_string()),
            (
                "base_case_edge_threshold",
                self.base_case_edge_threshold.to_string(),
            ),
            ("base_case_tol", self.base_case_tol.to_string()),
            ("max_depth", self.max_depth.to_string()),
            ("depth_cap_tol", self.depth_cap_tol.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        out.extend(
            self.path
                .entries()
                .into_iter()
                .map(|(k, v)| (format!("path.{k}"), v)),
        );
        out.extend(
            self.subgraph
                .entries()
                .into_iter()
                .map(|(k, v)| (format!("subgraph.{k}"), v)),
        );
        out
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::desk()
    }
}

/// Tolerances and sizes for the dense ultrasparsifier.
#[derive(Clone, Debug, PartialEq)]
pub struct UltraConfig {
    /// Largest vertex count accepted.
    pub dense_cap: usize,
    /// Graphs with more than `presparsify_factor · n` edges are first cut down
    /// to that many edges by leverage-score sampling.
    pub presparsify_factor: f64,
    /// Independent sampling attempts; the one with the tightest sandwich wins.
    pub presparsify_attempts: usize,
    /// The maintained inverse is recomputed from scratch this often.
    pub refresh_every: usize,
    /// Compare the maintained inverse against a fresh one after every removal.
    pub check_every_step: bool,
    /// Allowed relative Frobenius gap between maintained and fresh inverses.
    pub consistency_tol: f64,
    /// A removal candidate needs `1 − vᵀB⁻¹v` above this.
    pub rank_guard: f64,
    /// Relative width at which the step-size bisection stops.
    pub bisection_tol: f64,
}

impl UltraConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dense_cap" => self.dense_cap = parse(key, value)?,
            "presparsify_factor" => self.presparsify_factor = parse(key, value)?,
            "presparsify_attempts" => self.presparsify_attempts = parse(key, value)?,
            "refresh_every" => self.refresh_every = parse(key, value)?,
            "check_every_step" => self.check_every_step = parse(key, value)?,
            "consistency_tol" => self.consistency_tol = parse(key, value)?,
            "rank_guard" => self.rank_guard = parse(key, value)?,
            "bisection_tol" => self.bisection_tol = parse(key, value)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        [
            ("dense_cap", self.dense_cap.to_string()),
            ("presparsify_factor", self.presparsify_factor.to_string()),
            (
                "presparsify_attempts",
                self.presparsify_attempts.to_string(),
            ),
            ("refresh_every", self.refresh_every.to_string()),
            ("check_every_step", self.check_every_step.to_string()),
            ("consistency_tol", self.consistency_tol.to_string()),
            ("rank_guard", self.rank_guard.to_string()),
            ("bisection_tol", self.bisection_tol.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

impl Default for UltraConfig {
    fn default() -> Self {
        UltraConfig {
            dense_cap: 200,
            presparsify_factor: 16.0,
            presparsify_attempts: 4,
            refresh_every: 50,
            check_every_step: true,
            consistency_tol: 1e-8,
            rank_guard: 1e-10,
            bisection_tol: 1e-10,
        }
    }
}

pub(crate) fn parse<T: core::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad value {value:?} for {key}")))
}

pub(crate) fn unknown(key: &str) -> Error {
    Error::InvalidInput(format!("unknown config key {key:?}"))
}
