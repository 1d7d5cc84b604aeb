//! Graph, vector and configuration files.
//!
//! Edge lists are a header `n m` followed by `m` lines `u v w` with 0-based
//! vertices. Matrix Market files hold a symmetric Laplacian (or adjacency
//! pattern) in coordinate form; an off-diagonal entry `−w` becomes an edge of
//! weight `w`. Lines starting with `#` (edge lists, vectors, configs) or `%`
//! (Matrix Market) are comments.
//!
//! Weights are written with Rust's shortest round-trip float formatting, so
//! writing and re-reading a graph reproduces every weight bit for bit.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use lapsolve_core::graph::{build_graph, Edge, WeightedMultiGraph};

/// A malformed or unreadable input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoError {
    pub source: String,
    pub line: Option<usize>,
    pub message: String,
}

impl IoError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        IoError {
            source: String::new(),
            line: Some(line),
            message: message.into(),
        }
    }

    fn whole(message: impl Into<String>) -> Self {
        IoError {
            source: String::new(),
            line: None,
            message: message.into(),
        }
    }

    fn in_file(mut self, path: &Path) -> Self {
        self.source = path.display().to_string();
        self
    }
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.source.is_empty() {
            write!(f, "{}", self.source)?;
            if let Some(l) = self.line {
                write!(f, ":{l}")?;
            }
            write!(f, ": ")?;
        } else if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for IoError {}

pub type IoResult<T> = Result<T, IoError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edgelist" => Ok(GraphFormat::EdgeList),
            "mtx" => Ok(GraphFormat::MatrixMarket),
            other => Err(format!(
                "unknown graph format {other:?} (expected edgelist or mtx)"
            )),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::EdgeList => "edgelist",
            GraphFormat::MatrixMarket => "mtx",
        })
    }
}

impl GraphFormat {
    /// `.mtx` files and files opening with the Matrix Market banner are
    /// Matrix Market; everything else is an edge list.
    pub fn detect(path: &Path, text: &str) -> Self {
        let by_ext = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
        if by_ext || text.trim_start().starts_with("%%MatrixMarket") {
            GraphFormat::MatrixMarket
        } else {
            GraphFormat::EdgeList
        }
    }
}

fn content_lines<'a>(
    text: &'a str,
    comment: &'a [char],
) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !l.starts_with(comment))
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> IoResult<T> {
    let tok = tok.ok_or_else(|| IoError::at(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| IoError::at(line, format!("bad {what} {tok:?}")))
}

fn finish(n: usize, edges: Vec<Edge>) -> IoResult<WeightedMultiGraph> {
    build_graph(n, edges.into_iter().map(|e| (e.u, e.v, e.w)))
        .map_err(|e| IoError::whole(e.to_string()))
}

pub fn parse_edge_list(text: &str) -> IoResult<WeightedMultiGraph> {
    let mut lines = content_lines(text, &['#']);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| IoError::whole("empty edge list"))?;
    let mut hs = header.split_whitespace();
    let n: usize = field(hs.next(), hl, "vertex count")?;
    let m: usize = field(hs.next(), hl, "edge count")?;
    if hs.next().is_some() {
        return Err(IoError::at(hl, "header must be \"n m\""));
    }
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut t = line.split_whitespace();
        let u: usize = field(t.next(), ln, "endpoint")?;
        let v: usize = field(t.next(), ln, "endpoint")?;
        let w: f64 = field(t.next(), ln, "weight")?;
        if t.next().is_some() {
            return Err(IoError::at(ln, "expected \"u v w\""));
        }
        if u >= n || v >= n {
            return Err(IoError::at(ln, format!("vertex out of range for n = {n}")));
        }
        edges.push(Edge { u, v, w });
    }
    if edges.len() != m {
        return Err(IoError::whole(format!(
            "header promises {m} edges, found {}",
            edges.len()
        )));
    }
    finish(n, edges)
}

pub fn write_edge_list(g: &WeightedMultiGraph) -> String {
    let mut s = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(s, "{} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {:?}", e.u, e.v, e.w);
    }
    s
}

/// Accepts `coordinate` data with `real`, `integer` or `pattern` values and
/// `symmetric` or `general` symmetry. For `general` files only the strictly
/// lower triangle is read; diagonal entries are ignored. Pattern entries are
/// unit-weight adjacency.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn parse_matrix_market(text: &str) -> IoResult<WeightedMultiGraph> {
    let mut raw = text.lines().enumerate();
    let (_, banner) = raw
        .next()
        .ok_or_else(|| IoError::whole("empty Matrix Market file"))?;
    let words: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() < 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(IoError::at(1, "missing %%MatrixMarket matrix banner"));
    }
    if words[2] != "coordinate" {
        return Err(IoError::at(
            1,
            "only coordinate Matrix Market files are supported",
        ));
    }
    let pattern = match words[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(IoError::at(1, format!("unsupported value type {other}"))),
    };
    let general = match words[4].as_str() {
        "symmetric" => false,
        "general" => true,
        other => return Err(IoError::at(1, format!("unsupported symmetry {other}"))),
    };
    let mut lines = content_lines(text, &['%']).skip_while(|(ln, _)| *ln == 1);
    let (sl, size) = lines
        .next()
        .ok_or_else(|| IoError::whole("missing size line"))?;
    let mut st = size.split_whitespace();
    let rows: usize = field(st.next(), sl, "row count")?;
    let cols: usize = field(st.next(), sl, "column count")?;
    let nnz: usize = field(st.next(), sl, "entry count")?;
    if rows != cols {
        return Err(IoError::at(sl, "Laplacian must be square"));
    }
    let mut edges = Vec::new();
    let mut seen = 0;
    for (ln, line) in lines {
        seen += 1;
        let mut t = line.split_whitespace();
        let i: usize = field(t.next(), ln, "row index")?;
        let j: usize = field(t.next(), ln, "column index")?;
        let val: f64 = if pattern {
            1.0
        } else {
            field(t.next(), ln, "value")?
        };
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(IoError::at(
                ln,
                format!("index out of range for a {rows}×{rows} matrix"),
            ));
        }
        if i == j || (general && i < j) {
            continue;
        }
        let w = if pattern { val } else { -val };
        if !(w > 0.0) {
            return Err(IoError::at(
                ln,
                format!("off-diagonal entry {val} is not a negative Laplacian weight"),
            ));
        }
        edges.push(Edge {
            u: j - 1,
            v: i - 1,
            w,
        });
    }
    if seen != nnz {
        return Err(IoError::whole(format!(
            "size line promises {nnz} entries, found {seen}"
        )));
    }
    finish(rows, edges)
}

/// Writes the Laplacian in symmetric coordinate form: diagonal degrees and
/// one `−w` entry per edge in the lower triangle. Self-loops have no
/// Laplacian entry and are dropped.
pub fn write_matrix_market(g: &WeightedMultiGraph) -> String {
    let n = g.n();
    let mut deg = vec![0.0; n];
    let mut off = Vec::with_capacity(g.m());
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        deg[e.u] += e.w;
        deg[e.v] += e.w;
        off.push((e.u.max(e.v), e.u.min(e.v), e.w));
    }
    let diag: Vec<usize> = (0..n).filter(|&v| deg[v] != 0.0).collect();
    let mut s = String::new();
    let _ = writeln!(s, "%%MatrixMarket matrix coordinate real symmetric");
    let _ = writeln!(s, "{n} {n} {}", diag.len() + off.len());
    for v in diag {
        let _ = writeln!(s, "{} {} {:?}", v + 1, v + 1, deg[v]);
    }
    for (i, j, w) in off {
        let _ = writeln!(s, "{} {} {:?}", i + 1, j + 1, -w);
    }
    s
}

fn read_text(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|e| IoError::whole(e.to_string()).in_file(path))
}

fn write_text(path: &Path, text: &str) -> IoResult<()> {
    fs::write(path, text).map_err(|e| IoError::whole(e.to_string()).in_file(path))
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> IoResult<WeightedMultiGraph> {
    let text = read_text(path)?;
    let parsed = match format.unwrap_or_else(|| GraphFormat::detect(path, &text)) {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::MatrixMarket => parse_matrix_market(&text),
    };
    parsed.map_err(|e| e.in_file(path))
}

pub fn format_graph(g: &WeightedMultiGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::EdgeList => write_edge_list(g),
        GraphFormat::MatrixMarket => write_matrix_market(g),
    }
}

pub fn write_graph(path: &Path, g: &WeightedMultiGraph, format: GraphFormat) -> IoResult<()> {
    write_text(path, &format_graph(g, format))
}

/// One number per line.
pub fn parse_vector(text: &str) -> IoResult<Vec<f64>> {
    content_lines(text, &['#'])
        .map(|(ln, l)| {
            let x: f64 = field(Some(l), ln, "value")?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(IoError::at(ln, "value is not finite"))
            }
        })
        .collect()
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(24 * v.len());
    for x in v {
        let _ = writeln!(s, "{x:?}");
    }
    s
}

pub fn read_vector(path: &Path) -> IoResult<Vec<f64>> {
    parse_vector(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn write_vector(path: &Path, v: &[f64]) -> IoResult<()> {
    write_text(path, &format_vector(v))
}

/// One id per line.
pub fn parse_ids(text: &str) -> IoResult<Vec<usize>> {
    content_lines(text, &['#'])
        .map(|(ln, l)| field(Some(l), ln, "edge id"))
        .collect()
}

pub fn read_ids(path: &Path) -> IoResult<Vec<usize>> {
    parse_ids(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn write_ids(path: &Path, ids: &[usize]) -> IoResult<()> {
    let mut s = String::new();
    for id in ids {
        let _ = writeln!(s, "{id}");
    }
    write_text(path, &s)
}

/// `key = value` lines.
pub fn parse_key_values(text: &str) -> IoResult<Vec<(String, String)>> {
    content_lines(text, &['#'])
        .map(|(ln, l)| {
            split_key_value(l)
                .ok_or_else(|| IoError::at(ln, format!("expected key=value, got {l:?}")))
        })
        .collect()
}

pub fn split_key_value(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        None
    } else {
        Some((k.to_string(), v.to_string()))
    }
}

/// A `--config` argument is either `KEY=VAL` or the path of a file of such
/// lines.
pub fn config_overrides(args: &[String]) -> IoResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for a in args {
        match split_key_value(a) {
            Some(kv) if !Path::new(a).exists() => out.push(kv),
            _ => {
                let path = Path::new(a);
                out.extend(parse_key_values(&read_text(path)?).map_err(|e| e.in_file(path))?);
            }
        }
    }
    Ok(out)
}
