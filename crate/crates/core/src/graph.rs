//! Directed multigraphs with edge multiplicities in `ℕ ∪ {∞}`.
//!
//! `mult(u, v)` counts edges with source `u` and range `v`. For the graph
//! correspondence, the right action of `C(E⁰)` goes through the source map
//! and the left action through the range map:
//!
//! ```text
//! (f · g)(e) = f(e) g(s(e))      (g · f)(e) = g(r(e)) f(e)
//! ⟨f, h⟩(x) = Σ_{s(e) = x} conj(f(e)) h(e)
//! ```
//!
//! Infinite multiplicities stay symbolic. They are exactly where `λ(δ_v)`
//! fails to be compact, so anything that needs matrices asks for an explicit
//! [`Multigraph::truncate`] first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correspondence::Correspondence;
use crate::cstar::MultiMatrixAlgebra;
use crate::error::{Error, Result};
use crate::hilbmod::ModuleElement;
use crate::matcore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub fn is_finite(self) -> bool {
        matches!(self, Multiplicity::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == Multiplicity::Finite(0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(n) => Some(n),
            Multiplicity::Infinite => None,
        }
    }
}

impl std::ops::Add for Multiplicity {
    type Output = Multiplicity;
    fn add(self, rhs: Multiplicity) -> Multiplicity {
        match (self, rhs) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => {
                a.checked_add(b).map_or(Multiplicity::Infinite, Multiplicity::Finite)
            }
            _ => Multiplicity::Infinite,
        }
    }
}

impl std::iter::Sum for Multiplicity {
    fn sum<I: Iterator<Item = Multiplicity>>(iter: I) -> Multiplicity {
        iter.fold(Multiplicity::Finite(0), |a, b| a + b)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    vertices: BTreeSet<String>,
    mult: BTreeMap<(String, String), Multiplicity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVerdict {
    pub hyperrigid: bool,
    pub e0_fin: Vec<String>,
    pub katsura_support: Vec<String>,
    /// Vertices receiving infinitely many edges.
    pub offending: Vec<String>,
}

/// An edge in the finite graph correspondence: the `index`-th edge from
/// `source` to `range`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: String,
    pub range: String,
    pub index: u64,
}

#[derive(Debug, Clone)]
pub struct GraphCorrespondence {
    pub correspondence: Correspondence,
    /// Vertex labels in block order.
    pub vertices: Vec<String>,
    /// Edges of each module block (block = source vertex), in coordinate order.
    pub edges: Vec<Vec<Edge>>,
}

impl GraphCorrespondence {
    pub fn vertex_block(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    /// Vectorizes a function on edges into a module element.
    pub fn element(&self, f: impl Fn(&Edge) -> Complex64) -> ModuleElement {
        let module = self.correspondence.module();
        let blocks = self
            .edges
            .iter()
            .map(|es| {
                let mut b = matcore::zeros(es.len(), 1);
                for (k, e) in es.iter().enumerate() {
                    b[(k, 0)] = f(e);
                }
                b
            })
            .collect();
        module.element(blocks).expect("edge lists match module multiplicities")
    }
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) {
        self.vertices.insert(label.into());
    }

    /// Sets `mult(src, dst)`, adding both endpoints as vertices.
    pub fn set_edges(&mut self, src: impl Into<String>, dst: impl Into<String>, m: Multiplicity) {
        let (src, dst) = (src.into(), dst.into());
        self.vertices.insert(src.clone());
        self.vertices.insert(dst.clone());
        if m.is_zero() {
            self.mult.remove(&(src, dst));
        } else {
            self.mult.insert((src, dst), m);
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Nonzero multiplicities, ordered by (source, range).
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, Multiplicity)> {
        self.mult.iter().map(|((u, v), m)| (u.as_str(), v.as_str(), *m))
    }

    pub fn mult(&self, u: &str, v: &str) -> Multiplicity {
        self.mult.get(&(u.to_string(), v.to_string())).copied().unwrap_or(Multiplicity::Finite(0))
    }

    pub fn indeg(&self, v: &str) -> Multiplicity {
        self.mult.iter().filter(|((_, r), _)| r == v).map(|(_, m)| *m).sum()
    }

    pub fn outdeg(&self, v: &str) -> Multiplicity {
        self.mult.iter().filter(|((s, _), _)| s == v).map(|(_, m)| *m).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.mult.values().all(|m| m.is_finite())
    }

    /// Vertices receiving finitely many edges (sources and isolated vertices included).
    pub fn e0_fin(&self) -> BTreeSet<String> {
        self.vertices.iter().filter(|v| self.indeg(v).is_finite()).cloned().collect()
    }

    /// Regular vertices: `0 < indeg(v) < ∞`.
    pub fn katsura_support(&self) -> BTreeSet<String> {
        self.vertices
            .iter()
            .filter(|v| matches!(self.indeg(v), Multiplicity::Finite(n) if n > 0))
            .cloned()
            .collect()
    }

    /// Hyperrigid iff every vertex receives finitely many edges.
    pub fn is_hyperrigid(&self) -> GraphVerdict {
        let e0_fin = self.e0_fin();
        let offending: Vec<String> = self.vertices.iter().filter(|v| !e0_fin.contains(*v)).cloned().collect();
        GraphVerdict {
            hyperrigid: offending.is_empty(),
            e0_fin: e0_fin.into_iter().collect(),
            katsura_support: self.katsura_support().into_iter().collect(),
            offending,
        }
    }

    /// Replaces every infinite multiplicity by `cap`.
    pub fn truncate(&self, cap: u64) -> Result<Multigraph> {
        if cap == 0 {
            return Err(Error::Invalid("truncation cap must be at least 1".into()));
        }
        let mult = self
            .mult
            .iter()
            .map(|(k, m)| (k.clone(), if m.is_finite() { *m } else { Multiplicity::Finite(cap) }))
            .collect();
        Ok(Multigraph { vertices: self.vertices.clone(), mult })
    }

    /// Union of two graphs with disjoint vertex sets.
    pub fn disjoint_union(&self, other: &Multigraph) -> Result<Multigraph> {
        if let Some(v) = self.vertices.intersection(&other.vertices).next() {
            return Err(Error::Invalid(format!("vertex {v:?} occurs in both graphs")));
        }
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().cloned());
        out.mult.extend(other.mult.iter().map(|(k, v)| (k.clone(), *v)));
        Ok(out)
    }

    /// The graph correspondence over `A = ⊕_v C`, one block per vertex in label order.
    pub fn graph_correspondence(&self) -> Result<GraphCorrespondence> {
        if !self.is_finite() {
            return Err(Error::InfiniteMultiplicity);
        }
        if self.vertices.is_empty() {
            return Err(Error::Invalid("graph has no vertices".into()));
        }
        let vertices: Vec<String> = self.vertices.iter().cloned().collect();
        let to_usize = |m: Multiplicity| -> Result<usize> {
            let n = m.finite().expect("checked finite");
            usize::try_from(n).map_err(|_| Error::Invalid(format!("multiplicity {n} too large")))
        };
        let mut c = vec![vec![0usize; vertices.len()]; vertices.len()];
        let mut edges = vec![Vec::new(); vertices.len()];
        for (i, s) in vertices.iter().enumerate() {
            for (j, r) in vertices.iter().enumerate() {
                let m = to_usize(self.mult(s, r))?;
                c[i][j] = m;
                edges[i].extend((0..m as u64).map(|index| Edge { source: s.clone(), range: r.clone(), index }));
            }
        }
        let outdeg: Vec<usize> = c.iter().map(|row| row.iter().sum()).collect();
        let algebra = MultiMatrixAlgebra::new(vec![1; vertices.len()])?;
        let correspondence = Correspondence::from_multiplicities(&algebra, &outdeg, &c)?;
        Ok(GraphCorrespondence { correspondence, vertices, edges })
    }
}
