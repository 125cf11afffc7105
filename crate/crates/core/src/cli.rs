//! Input documents, analysis orchestration, and the JSON report.
//!
//! Two line-oriented document kinds are accepted; `#` starts a comment and an
//! optional first line `format-version 1` pins the grammar version.
//!
//! ```text
//! # correspondence document
//! algebra 2 1              # block sizes n_1 n_2 ...
//! module 3 1               # multiplicities m_1 m_2 ...
//! lambda 1 1 1             # A-block 1 occurs once in module block 1
//! lambda 2 2 1
//! lambda-matrix 1 2        # explicit intertwiner: m_1 rows, c·n_2 columns
//! 0 0 1
//! ```
//!
//! ```text
//! # graph document
//! vertex u
//! vertex v
//! edge u v inf             # count or `inf`
//! ```
//!
//! Block indices in documents and reports are one-based. Complex entries are
//! written `a`, `a+bI`, `a-bI`, `bI`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correspondence::{Correspondence, HyperrigidityVerdict, Intertwiner};
use crate::cstar::MultiMatrixAlgebra;
use crate::error::Error;
use crate::graph::{Multigraph, Multiplicity};
use crate::hilbmod::{self, HilbertModule};
use crate::matcore::{self, CMatrix, Tol};
use crate::repcert::{self, CertificateReport};
use crate::sample;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputDocument {
    AlgebraCorrespondence(CorrespondenceDoc),
    Graph(GraphDoc),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrespondenceDoc {
    pub algebra: Vec<usize>,
    pub module: Vec<usize>,
    /// `(i, j) → c_ij`, one-based, zero entries omitted.
    #[serde(with = "echo::lambda")]
    pub lambda: BTreeMap<(usize, usize), usize>,
    /// `(i, j) → intertwiner rows`, one-based.
    #[serde(with = "echo::lambda_matrices")]
    pub lambda_matrices: BTreeMap<(usize, usize), Vec<Vec<Complex64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: BTreeSet<String>,
    /// Nonzero multiplicities.
    #[serde(with = "echo::edges")]
    pub edges: BTreeMap<(String, String), Multiplicity>,
}

/// Report-side encodings of the tuple-keyed maps as lists of named entries.
mod echo {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub mod lambda {
        use super::*;

        #[derive(Serialize, Deserialize)]
        struct Entry {
            i: usize,
            j: usize,
            count: usize,
        }

        pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, usize), usize>, s: S) -> Result<S::Ok, S::Error> {
            let v: Vec<Entry> = m.iter().map(|(&(i, j), &count)| Entry { i, j, count }).collect();
            v.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), usize>, D::Error> {
            Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| ((e.i, e.j), e.count)).collect())
        }
    }

    pub mod lambda_matrices {
        use super::*;

        #[derive(Serialize, Deserialize)]
        struct Entry {
            i: usize,
            j: usize,
            /// Rows of `[re, im]` pairs.
            rows: Vec<Vec<[f64; 2]>>,
        }

        type Map = BTreeMap<(usize, usize), Vec<Vec<Complex64>>>;

        pub fn serialize<S: Serializer>(m: &Map, s: S) -> Result<S::Ok, S::Error> {
            let v: Vec<Entry> = m
                .iter()
                .map(|(&(i, j), rows)| Entry {
                    i,
                    j,
                    rows: rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect(),
                })
                .collect();
            v.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Map, D::Error> {
            Ok(Vec::<Entry>::deserialize(d)?
                .into_iter()
                .map(|e| {
                    let rows = e.rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
                    ((e.i, e.j), rows)
                })
                .collect())
        }
    }

    pub mod edges {
        use super::*;

        #[derive(Serialize, Deserialize)]
        struct Entry {
            source: String,
            range: String,
            /// A decimal count or `inf`.
            multiplicity: String,
        }

        type Map = BTreeMap<(String, String), Multiplicity>;

        pub fn serialize<S: Serializer>(m: &Map, s: S) -> Result<S::Ok, S::Error> {
            let v: Vec<Entry> = m
                .iter()
                .map(|((u, v), k)| Entry { source: u.clone(), range: v.clone(), multiplicity: k.to_string() })
                .collect();
            v.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Map, D::Error> {
            Vec::<Entry>::deserialize(d)?
                .into_iter()
                .map(|e| {
                    let k = match e.multiplicity.as_str() {
                        "inf" => Multiplicity::Infinite,
                        n => Multiplicity::Finite(n.parse().map_err(serde::de::Error::custom)?),
                    };
                    Ok(((e.source, e.range), k))
                })
                .collect()
        }
    }
}

impl CorrespondenceDoc {
    /// Builds and validates the correspondence. Multiplicity entries of a
    /// module block occupy its leading coordinates in increasing `j`; explicit
    /// matrices are taken as given.
    pub fn build(&self, tol: Tol) -> Result<Correspondence, Error> {
        let algebra = MultiMatrixAlgebra::new(self.algebra.clone())?;
        let module = HilbertModule::new(algebra.clone(), self.module.clone())?;
        let mut ints = Vec::new();
        for (i, &m) in self.module.iter().enumerate() {
            let mut offset = 0;
            for (j, &n) in self.algebra.iter().enumerate() {
                let c = self.lambda.get(&(i + 1, j + 1)).copied().unwrap_or(0);
                let width = c * n;
                if width == 0 {
                    continue;
                }
                if offset + width > m {
                    return Err(Error::Shape(format!("module block {}: multiplicities exceed m = {m}", i + 1)));
                }
                let mut w = matcore::zeros(m, width);
                for k in 0..width {
                    w[(offset + k, k)] = matcore::ONE;
                }
                offset += width;
                ints.push(Intertwiner { module_block: i, algebra_block: j, matrix: w });
            }
        }
        for (&(i, j), rows) in &self.lambda_matrices {
            let cols = rows.first().map_or(0, Vec::len);
            let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
            let matrix = matcore::from_row_major(rows.len(), cols, &entries)?;
            ints.push(Intertwiner { module_block: i - 1, algebra_block: j - 1, matrix });
        }
        Correspondence::from_intertwiners(module, &ints, tol)
    }
}

impl GraphDoc {
    pub fn to_multigraph(&self) -> Multigraph {
        let mut g = Multigraph::new();
        for v in &self.vertices {
            g.add_vertex(v.clone());
        }
        for ((u, v), m) in &self.edges {
            g.set_edges(u.clone(), v.clone(), *m);
        }
        g
    }
}

struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { col: body[..s].chars().count() + 1, text: &body[s..idx] });
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push(Token { col: body[..s].chars().count() + 1, text: &body[s..] });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn parse_count(line: usize, t: &Token<'_>) -> Result<usize, ParseError> {
    t.text
        .parse::<usize>()
        .map_err(|_| err(line, t.col, format!("expected a non-negative integer, found {:?}", t.text)))
}

/// Parses `a`, `a+bI`, `a-bI`, `bI`, `I`, `-I`.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let finite = |z: Complex64| (z.re.is_finite() && z.im.is_finite()).then_some(z);
    let Some(body) = text.strip_suffix('I') else {
        return finite(Complex64::new(text.parse().ok()?, 0.0));
    };
    // the sign separating real and imaginary parts: last '+'/'-' not at the
    // start and not directly after an exponent marker
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Option<f64> {
        match s {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => s.parse().ok(),
        }
    };
    match split {
        Some(k) => finite(Complex64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => finite(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}I", z.re, -z.im)
    } else {
        format!("{}+{}I", z.re, z.im)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Correspondence,
    Graph,
}

struct PendingMatrix {
    key: (usize, usize),
    rows_needed: usize,
    rows: Vec<Vec<Complex64>>,
    line: usize,
    col: usize,
}

pub fn parse(text: &str) -> Result<InputDocument, ParseError> {
    let mut kind: Option<Kind> = None;
    let mut corr = CorrespondenceDoc::default();
    let mut graph = GraphDoc::default();
    let mut seen_lambda: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut seen_edges: BTreeSet<(String, String)> = BTreeSet::new();
    let mut have_algebra = false;
    let mut have_module = false;
    let mut pending: Option<PendingMatrix> = None;
    let mut first_directive = true;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        last_line = ln;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }

        if let Some(p) = pending.as_mut() {
            let row = toks
                .iter()
                .map(|t| parse_complex(t.text).ok_or_else(|| err(ln, t.col, format!("expected a complex number, found {:?}", t.text))))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = p.rows.first() {
                if first.len() != row.len() {
                    return Err(err(ln, 1, format!("row has {} entries, previous rows have {}", row.len(), first.len())));
                }
            }
            p.rows.push(row);
            if p.rows.len() == p.rows_needed {
                let p = pending.take().unwrap();
                let n = corr.algebra[p.key.1 - 1];
                let cols = p.rows[0].len();
                if cols == 0 || !cols.is_multiple_of(n) {
                    return Err(err(p.line, p.col, format!("lambda-matrix needs a positive multiple of {n} columns, found {cols}")));
                }
                check_block_capacity(&corr, p.key.0, cols, p.line, p.col)?;
                corr.lambda_matrices.insert(p.key, p.rows);
            }
            continue;
        }

        let head = &toks[0];
        let args = &toks[1..];
        if head.text == "format-version" {
            if !first_directive {
                return Err(err(ln, head.col, "format-version must be the first directive"));
            }
            first_directive = false;
            match args {
                [v] if v.text == FORMAT_VERSION => continue,
                [v] => return Err(err(ln, v.col, format!("unsupported format version {:?}", v.text))),
                _ => return Err(err(ln, head.col, "format-version takes exactly one argument")),
            }
        }
        first_directive = false;

        let this_kind = match head.text {
            "algebra" | "module" | "lambda" | "lambda-matrix" => Kind::Correspondence,
            "vertex" | "edge" | "topology" => Kind::Graph,
            other => return Err(err(ln, head.col, format!("unknown directive {other:?}"))),
        };
        match kind {
            None => kind = Some(this_kind),
            Some(k) if k != this_kind => {
                return Err(err(ln, head.col, format!("directive {:?} does not belong in this document kind", head.text)))
            }
            _ => {}
        }

        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                Err(err(ln, head.col, format!("{} takes {n} argument(s), found {}", head.text, args.len())))
            } else {
                Ok(())
            }
        };

        match head.text {
            "algebra" => {
                if have_algebra {
                    return Err(err(ln, head.col, "duplicate algebra line"));
                }
                if args.is_empty() {
                    return Err(err(ln, head.col, "algebra needs at least one block size"));
                }
                for t in args {
                    let n = parse_count(ln, t)?;
                    if n == 0 {
                        return Err(err(ln, t.col, "block sizes must be positive"));
                    }
                    corr.algebra.push(n);
                }
                have_algebra = true;
            }
            "module" => {
                if !have_algebra {
                    return Err(err(ln, head.col, "module must follow algebra"));
                }
                if have_module {
                    return Err(err(ln, head.col, "duplicate module line"));
                }
                if args.len() != corr.algebra.len() {
                    return Err(err(
                        ln,
                        head.col,
                        format!("module needs {} multiplicities, found {}", corr.algebra.len(), args.len()),
                    ));
                }
                for t in args {
                    corr.module.push(parse_count(ln, t)?);
                }
                have_module = true;
            }
            "lambda" | "lambda-matrix" => {
                if !have_module {
                    return Err(err(ln, head.col, format!("{} must follow algebra and module", head.text)));
                }
                let is_matrix = head.text == "lambda-matrix";
                arity(if is_matrix { 2 } else { 3 })?;
                let b = corr.algebra.len();
                let i = parse_count(ln, &args[0])?;
                let j = parse_count(ln, &args[1])?;
                for (v, t) in [(i, &args[0]), (j, &args[1])] {
                    if v == 0 || v > b {
                        return Err(err(ln, t.col, format!("block index {v} out of range 1..={b}")));
                    }
                }
                if !seen_lambda.insert((i, j)) {
                    return Err(err(ln, head.col, format!("duplicate left-action entry for blocks ({i}, {j})")));
                }
                if is_matrix {
                    let rows_needed = corr.module[i - 1];
                    if rows_needed == 0 {
                        return Err(err(ln, head.col, format!("module block {i} is zero; no intertwiner possible")));
                    }
                    pending = Some(PendingMatrix { key: (i, j), rows_needed, rows: Vec::new(), line: ln, col: head.col });
                } else {
                    let c = parse_count(ln, &args[2])?;
                    if c > 0 {
                        check_block_capacity(&corr, i, c * corr.algebra[j - 1], ln, args[2].col)?;
                        corr.lambda.insert((i, j), c);
                    }
                }
            }
            "vertex" => {
                arity(1)?;
                if !graph.vertices.insert(args[0].text.to_string()) {
                    return Err(err(ln, args[0].col, format!("duplicate vertex {:?}", args[0].text)));
                }
            }
            "edge" => {
                arity(3)?;
                for t in &args[..2] {
                    if !graph.vertices.contains(t.text) {
                        return Err(err(ln, t.col, format!("unknown vertex {:?}", t.text)));
                    }
                }
                let key = (args[0].text.to_string(), args[1].text.to_string());
                if !seen_edges.insert(key.clone()) {
                    return Err(err(ln, head.col, format!("duplicate edge line for {} -> {}", key.0, key.1)));
                }
                let m = match args[2].text {
                    "inf" => Multiplicity::Infinite,
                    s => Multiplicity::Finite(
                        s.parse::<u64>()
                            .map_err(|_| err(ln, args[2].col, format!("expected a count or `inf`, found {s:?}")))?,
                    ),
                };
                if !m.is_zero() {
                    graph.edges.insert(key, m);
                }
            }
            "topology" => {
                arity(1)?;
                if args[0].text != "discrete" {
                    return Err(err(
                        ln,
                        args[0].col,
                        "only discrete graphs are supported; inputs without an open range map are refused",
                    ));
                }
            }
            _ => unreachable!("directive kinds are matched above"),
        }
    }

    if let Some(p) = pending {
        return Err(err(
            last_line + 1,
            1,
            format!("end of input inside lambda-matrix ({} of {} rows)", p.rows.len(), p.rows_needed),
        ));
    }
    match kind {
        None => Err(err(1, 1, "empty document")),
        Some(Kind::Graph) => Ok(InputDocument::Graph(graph)),
        Some(Kind::Correspondence) => {
            if !have_module {
                return Err(err(last_line + 1, 1, "correspondence document needs algebra and module lines"));
            }
            Ok(InputDocument::AlgebraCorrespondence(corr))
        }
    }
}

fn check_block_capacity(doc: &CorrespondenceDoc, i: usize, extra: usize, line: usize, col: usize) -> Result<(), ParseError> {
    let used: usize = doc
        .lambda
        .iter()
        .filter(|((bi, _), _)| *bi == i)
        .map(|((_, j), c)| c * doc.algebra[j - 1])
        .sum::<usize>()
        + doc
            .lambda_matrices
            .iter()
            .filter(|((bi, _), _)| *bi == i)
            .map(|(_, rows)| rows.first().map_or(0, Vec::len))
            .sum::<usize>();
    let m = doc.module[i - 1];
    if used + extra > m {
        return Err(err(
            line,
            col,
            format!("shape mismatch: module block {i} would need {} coordinates but has m = {m}", used + extra),
        ));
    }
    Ok(())
}

/// Canonical text form; `parse(&serialize(doc)) == doc`.
pub fn serialize(doc: &InputDocument) -> String {
    let mut out = format!("format-version {FORMAT_VERSION}\n");
    let join = |xs: &[usize]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    match doc {
        InputDocument::AlgebraCorrespondence(c) => {
            writeln!(out, "algebra {}", join(&c.algebra)).unwrap();
            writeln!(out, "module {}", join(&c.module)).unwrap();
            for ((i, j), k) in &c.lambda {
                writeln!(out, "lambda {i} {j} {k}").unwrap();
            }
            for ((i, j), rows) in &c.lambda_matrices {
                writeln!(out, "lambda-matrix {i} {j}").unwrap();
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
                    writeln!(out, "{}", cells.join(" ")).unwrap();
                }
            }
        }
        InputDocument::Graph(g) => {
            for v in &g.vertices {
                writeln!(out, "vertex {v}").unwrap();
            }
            for ((u, v), m) in &g.edges {
                writeln!(out, "edge {u} {v} {m}").unwrap();
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub tol: Tol,
    pub depth: usize,
    pub shift: usize,
    pub certify: bool,
    pub frame: bool,
    pub truncate: Option<u64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { tol: Tol::DEFAULT, depth: 2, shift: 4, certify: false, frame: false, truncate: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(rename = "format-version")]
    pub format_version: String,
    pub input: InputDocument,
    pub verdict: VerdictBlock,
    pub certificate: Option<CertificateBlock>,
    pub frame: Option<FrameBlock>,
    /// `passed`, `failed`, or `skipped` (no certificate, or truncated input).
    pub cross_check: String,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn cross_check_failed(&self) -> bool {
        self.cross_check == "failed"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictBlock {
    /// `structural` (𝒥_X·X = X test) or `graph-symbolic` (E⁰_fin = E⁰ test).
    pub method: String,
    pub hyperrigid: bool,
    /// One-based block indices, or vertex labels for graphs.
    pub katsura_ideal: Vec<String>,
    pub kernel: Vec<String>,
    /// Basis vector `(block, row, col)`, one-based, not fixed by `λ(u_J)`.
    pub witness: Option<[usize; 3]>,
    /// Vertices of infinite in-degree (graphs only).
    pub offending_vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    pub defect: f64,
    pub agreement_on_s: f64,
    pub depth: usize,
    pub shift: usize,
    pub tol: f64,
    pub verdict: bool,
    pub formula_gap: f64,
    pub covariance_residual: f64,
    /// Pairs `(x, y)` of one-based basis labels with defect above `tol`.
    pub nonzero_pairs: Vec<PairEntry>,
    /// Truncation cap applied to infinite multiplicities, if any.
    pub truncated: Option<u64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub x: [usize; 3],
    pub y: [usize; 3],
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBlock {
    pub generators: usize,
    /// `‖Σ θ_{x_k,x_k} - id‖`.
    pub identity_residual: f64,
    /// Max reconstruction residual over the basis and seeded random vectors.
    pub reconstruction_residual: f64,
    /// `‖e_N T - T‖` for seeded random operators `T`.
    pub approximate_unit_residual: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal consistency failure: {0}")]
    Internal(Error),
}

impl AnalyzeError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalyzeError::Input(_) => 1,
            AnalyzeError::Internal(_) => 2,
        }
    }
}

fn classify(e: Error) -> AnalyzeError {
    match e {
        Error::AgreementFailure { .. } | Error::NonCommutingProjection { .. } | Error::NoConvergence => {
            AnalyzeError::Internal(e)
        }
        other => AnalyzeError::Input(other.to_string()),
    }
}

fn one_based(xs: &[usize]) -> Vec<String> {
    xs.iter().map(|i| (i + 1).to_string()).collect()
}

fn label3(x: [usize; 3]) -> [usize; 3] {
    [x[0] + 1, x[1] + 1, x[2] + 1]
}

fn structural_block(v: &HyperrigidityVerdict) -> VerdictBlock {
    VerdictBlock {
        method: "structural".into(),
        hyperrigid: v.hyperrigid,
        katsura_ideal: one_based(&v.katsura_blocks),
        kernel: one_based(&v.kernel_blocks),
        witness: v.witness.map(|w| [w.block + 1, w.row + 1, w.col + 1]),
        offending_vertices: Vec::new(),
    }
}

fn certificate_block(r: &CertificateReport, truncated: Option<u64>, status: &str) -> CertificateBlock {
    CertificateBlock {
        defect: r.defect,
        agreement_on_s: r.agreement_on_s,
        depth: r.depth,
        shift: r.shift_dim,
        tol: r.tol,
        verdict: r.verdict,
        formula_gap: r.formula_gap,
        covariance_residual: r.covariance_residual,
        nonzero_pairs: r
            .pairs
            .iter()
            .filter(|p| p.defect > r.tol)
            .map(|p| PairEntry { x: label3(p.x), y: label3(p.y), defect: p.defect })
            .collect(),
        truncated,
        status: status.into(),
    }
}

const FRAME_SAMPLES: usize = 20;
const FRAME_SEED: u64 = 0x5eed;

fn frame_block(module: &HilbertModule, tol: Tol) -> Result<FrameBlock, Error> {
    let gens = module.basis();
    let f = hilbmod::frame(module, &gens, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(FRAME_SEED);
    let mut recon = 0.0f64;
    let probes: Vec<_> = gens.iter().cloned().chain((0..FRAME_SAMPLES).map(|_| sample::random_element(&mut rng, module))).collect();
    for x in &probes {
        recon = recon.max(f.reconstruct(x)?.try_sub(x)?.max_abs());
    }
    let mut au = 0.0f64;
    if !f.is_empty() {
        let e = hilbmod::approximate_unit(&f, f.len())?;
        for _ in 0..FRAME_SAMPLES {
            let t = sample::random_operator(&mut rng, module);
            au = au.max(e.compose(&t)?.try_sub(&t)?.norm());
        }
    }
    Ok(FrameBlock {
        generators: gens.len(),
        identity_residual: f.identity_residual()?,
        reconstruction_residual: recon,
        approximate_unit_residual: au,
    })
}

fn cross_check(structural: bool, cert: Option<&CertificateReport>) -> String {
    match cert {
        None => "skipped".into(),
        Some(r) if r.verdict == structural => "passed".into(),
        Some(_) => "failed".into(),
    }
}

pub fn run_analyze(doc: &InputDocument, opts: &AnalyzeOptions) -> Result<Report, AnalyzeError> {
    let tol = opts.tol;
    let mut warnings = Vec::new();
    let (verdict, certificate, frame, check) = match doc {
        InputDocument::AlgebraCorrespondence(d) => {
            let c = d.build(tol).map_err(classify)?;
            let v = c.is_hyperrigid(tol);
            warnings.extend(v.warnings.iter().cloned());
            let cert = if opts.certify {
                Some(repcert::certificate(&c, opts.depth, opts.shift, tol).map_err(classify)?)
            } else {
                None
            };
            let check = cross_check(v.hyperrigid, cert.as_ref());
            let frame = if opts.frame { Some(frame_block(c.module(), tol).map_err(classify)?) } else { None };
            (structural_block(&v), cert.map(|r| certificate_block(&r, None, "exact")), frame, check)
        }
        InputDocument::Graph(gd) => {
            let g = gd.to_multigraph();
            if g.num_vertices() == 0 {
                return Err(AnalyzeError::Input("graph has no vertices".into()));
            }
            let symbolic = g.is_hyperrigid();
            let block = VerdictBlock {
                method: "graph-symbolic".into(),
                hyperrigid: symbolic.hyperrigid,
                katsura_ideal: symbolic.katsura_support.clone(),
                kernel: g.vertices().filter(|v| g.indeg(v).is_zero()).map(String::from).collect(),
                witness: None,
                offending_vertices: symbolic.offending.clone(),
            };
            let needs_matrices = opts.certify || opts.frame;
            let finite = match (g.is_finite(), opts.truncate) {
                (true, _) => Some((g.clone(), None)),
                (false, Some(cap)) => Some((g.truncate(cap).map_err(classify)?, Some(cap))),
                (false, None) if needs_matrices => {
                    return Err(AnalyzeError::Input(
                        "graph has infinite multiplicities; --certify/--frame need an explicit --truncate <cap>".into(),
                    ))
                }
                (false, None) => None,
            };
            let mut cert = None;
            let mut frame = None;
            let mut check = "skipped".to_string();
            if let (Some((fg, cap)), true) = (finite, needs_matrices) {
                let gc = fg.graph_correspondence().map_err(classify)?;
                let structural = gc.correspondence.is_hyperrigid(tol);
                if opts.certify {
                    let r = repcert::certificate(&gc.correspondence, opts.depth, opts.shift, tol).map_err(classify)?;
                    if let Some(cap) = cap {
                        cert = Some(certificate_block(&r, Some(cap), "truncated — symbolic verdict governs"));
                        if r.verdict != symbolic.hyperrigid {
                            warnings.push(format!(
                                "limit phenomenon: truncation at {} is hyperrigid (defect {:.3e}) while the symbolic verdict is not; vertices of infinite in-degree: {}",
                                cap,
                                r.defect,
                                symbolic.offending.join(", ")
                            ));
                        }
                    } else {
                        check = if r.verdict == symbolic.hyperrigid && structural.hyperrigid == symbolic.hyperrigid {
                            "passed".into()
                        } else {
                            "failed".into()
                        };
                        cert = Some(certificate_block(&r, None, "exact"));
                    }
                }
                if opts.frame {
                    frame = Some(frame_block(gc.correspondence.module(), tol).map_err(classify)?);
                }
            }
            (block, cert, frame, check)
        }
    };
    Ok(Report {
        format_version: FORMAT_VERSION.into(),
        input: doc.clone(),
        verdict,
        certificate,
        frame,
        cross_check: check,
        warnings,
    })
}

/// Convenience for callers that already hold a correspondence matrix.
pub fn lambda_matrix_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}
