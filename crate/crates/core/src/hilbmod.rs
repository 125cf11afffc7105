//! Finitely generated right Hilbert modules over a multi-matrix algebra.
//!
//! A module is kept in standard form `X = ⊕_i Mat(m_i × n_i)`: right action is
//! blockwise right multiplication and `⟨x, y⟩_i = x_i* y_i`, linear in the
//! second variable. Adjointable operators are `⊕_i M_{m_i}` acting by left
//! multiplication; every one of them is a finite sum of rank-one operators,
//! so compacts and adjointables coincide. Blocks with `m_i = 0` are allowed.
//!
//! Since `A` is unital the multiplier module of `X` is `X` itself, and
//! countable generation reduces to finite generation.

use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cstar::{AlgebraElement, MultiMatrixAlgebra};
use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix, Tol};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertModule {
    algebra: MultiMatrixAlgebra,
    multiplicities: Vec<usize>,
}

/// Position of a standard basis vector: entry `(row, col)` of block `block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl HilbertModule {
    pub fn new(algebra: MultiMatrixAlgebra, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != algebra.num_blocks() {
            return Err(Error::Shape(format!(
                "{} multiplicities for an algebra with {} blocks",
                multiplicities.len(),
                algebra.num_blocks()
            )));
        }
        Ok(Self { algebra, multiplicities })
    }

    /// `A` as a module over itself.
    pub fn regular(algebra: &MultiMatrixAlgebra) -> Self {
        Self { multiplicities: algebra.block_sizes().to_vec(), algebra: algebra.clone() }
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.multiplicities[i]
    }

    pub fn num_blocks(&self) -> usize {
        self.multiplicities.len()
    }

    /// Complex dimension `Σ m_i n_i`.
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().zip(self.algebra.block_sizes()).map(|(m, n)| m * n).sum()
    }

    pub fn block_shape(&self, i: usize) -> (usize, usize) {
        (self.multiplicities[i], self.algebra.block_size(i))
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement {
            module: self.clone(),
            blocks: (0..self.num_blocks()).map(|i| {
                let (m, n) = self.block_shape(i);
                matcore::zeros(m, n)
            }).collect(),
        }
    }

    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<ModuleElement> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::Shape(format!("{} blocks for a module with {}", blocks.len(), self.num_blocks())));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.shape() != self.block_shape(i) {
                return Err(Error::Shape(format!(
                    "module block {i} has shape {:?}, expected {:?}",
                    b.shape(),
                    self.block_shape(i)
                )));
            }
            if !matcore::is_finite(b) {
                return Err(Error::NonFinite);
            }
        }
        Ok(ModuleElement { module: self.clone(), blocks })
    }

    /// Standard basis in block/row/column order.
    pub fn basis_indices(&self) -> Vec<BasisIndex> {
        let mut out = Vec::with_capacity(self.dim());
        for block in 0..self.num_blocks() {
            let (m, n) = self.block_shape(block);
            for row in 0..m {
                for col in 0..n {
                    out.push(BasisIndex { block, row, col });
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, idx: BasisIndex) -> ModuleElement {
        let mut x = self.zero();
        x.blocks[idx.block][(idx.row, idx.col)] = matcore::ONE;
        x
    }

    pub fn basis(&self) -> Vec<ModuleElement> {
        self.basis_indices().into_iter().map(|i| self.basis_vector(i)).collect()
    }

    pub fn identity_operator(&self) -> ModuleOperator {
        ModuleOperator {
            module: self.clone(),
            blocks: self.multiplicities.iter().map(|&m| matcore::identity(m)).collect(),
        }
    }

    pub fn zero_operator(&self) -> ModuleOperator {
        ModuleOperator {
            module: self.clone(),
            blocks: self.multiplicities.iter().map(|&m| matcore::zeros(m, m)).collect(),
        }
    }

    pub fn operator(&self, blocks: Vec<CMatrix>) -> Result<ModuleOperator> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::Shape(format!("{} operator blocks for a module with {}", blocks.len(), self.num_blocks())));
        }
        for (i, (b, &m)) in blocks.iter().zip(&self.multiplicities).enumerate() {
            if b.shape() != (m, m) {
                return Err(Error::Shape(format!("operator block {i} has shape {:?}, expected {m}x{m}", b.shape())));
            }
            if !matcore::is_finite(b) {
                return Err(Error::NonFinite);
            }
        }
        Ok(ModuleOperator { module: self.clone(), blocks })
    }

    fn check(&self, other: &HilbertModule) -> Result<()> {
        if self != other {
            return Err(Error::Mismatch(format!(
                "module {:?} vs {:?}",
                self.multiplicities, other.multiplicities
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    module: HilbertModule,
    blocks: Vec<CMatrix>,
}

impl ModuleElement {
    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.module.check(&other.module)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self { module: self.module.clone(), blocks })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { module: self.module.clone(), blocks: self.blocks.iter().map(|b| b * z).collect() }
    }

    /// Right action `x · a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Result<Self> {
        if a.algebra() != self.module.algebra() {
            return Err(Error::Mismatch("right action by an element of another algebra".into()));
        }
        let blocks = self.blocks.iter().zip(a.blocks()).map(|(x, a)| x * a).collect();
        Ok(Self { module: self.module.clone(), blocks })
    }

    /// Largest entry modulus, used for numerical zero tests.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(matcore::max_abs).fold(0.0, f64::max)
    }
}

impl Add for &ModuleElement {
    type Output = ModuleElement;
    fn add(self, rhs: &ModuleElement) -> ModuleElement {
        self.try_add(rhs).expect("ModuleElement::add on mismatched modules")
    }
}

impl Sub for &ModuleElement {
    type Output = ModuleElement;
    fn sub(self, rhs: &ModuleElement) -> ModuleElement {
        self.try_sub(rhs).expect("ModuleElement::sub on mismatched modules")
    }
}

/// `⟨x, y⟩` with blocks `x_i* y_i`.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    x.module.check(&y.module)?;
    let blocks = x.blocks.iter().zip(&y.blocks).map(|(a, b)| a.adjoint() * b).collect();
    x.module.algebra.element(blocks)
}

/// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`.
pub fn module_norm(x: &ModuleElement) -> f64 {
    // ‖x_i* x_i‖ = ‖x_i‖², so the block operator norms give the same value
    x.blocks.iter().map(matcore::op_norm).fold(0.0, f64::max)
}

/// The operator `z ↦ x⟨y, z⟩`; blockwise left multiplication by `x_i y_i*`.
pub fn rank_one(x: &ModuleElement, y: &ModuleElement) -> Result<ModuleOperator> {
    x.module.check(&y.module)?;
    let blocks = x.blocks.iter().zip(&y.blocks).map(|(a, b)| a * b.adjoint()).collect();
    Ok(ModuleOperator { module: x.module.clone(), blocks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    module: HilbertModule,
    blocks: Vec<CMatrix>,
}

impl ModuleOperator {
    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.module.check(&x.module)?;
        let blocks = self.blocks.iter().zip(&x.blocks).map(|(t, x)| t * x).collect();
        Ok(ModuleElement { module: self.module.clone(), blocks })
    }

    pub fn compose(&self, other: &ModuleOperator) -> Result<ModuleOperator> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &ModuleOperator) -> Result<ModuleOperator> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ModuleOperator) -> Result<ModuleOperator> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.module.check(&other.module)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self { module: self.module.clone(), blocks })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { module: self.module.clone(), blocks: self.blocks.iter().map(|b| b * z).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self { module: self.module.clone(), blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(matcore::op_norm).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(matcore::max_abs).fold(0.0, f64::max)
    }

    pub fn is_positive(&self, tol: Tol) -> Result<bool> {
        for b in &self.blocks {
            if !matcore::is_psd(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Writes the operator as a finite sum of rank-one operators built from
    /// scaled standard basis vectors: `T_i = Σ_{p,q} T_i[p,q] e_{p0} e_{q0}*`.
    pub fn rank_one_terms(&self) -> Vec<(ModuleElement, ModuleElement)> {
        let mut out = Vec::new();
        for (block, t) in self.blocks.iter().enumerate() {
            for p in 0..t.nrows() {
                for q in 0..t.ncols() {
                    if t[(p, q)] == matcore::ZERO {
                        continue;
                    }
                    let x = self.module.basis_vector(BasisIndex { block, row: p, col: 0 }).scale(t[(p, q)]);
                    let y = self.module.basis_vector(BasisIndex { block, row: q, col: 0 });
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Normalized tight frame: `Σ_k θ_{x_k, x_k} = id`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    module: HilbertModule,
    vectors: Vec<ModuleElement>,
}

impl Frame {
    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn vectors(&self) -> &[ModuleElement] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `Σ_k x_k⟨x_k, x⟩`.
    pub fn reconstruct(&self, x: &ModuleElement) -> Result<ModuleElement> {
        let mut acc = self.module.zero();
        for v in &self.vectors {
            acc = acc.try_add(&v.right_mul(&inner_product(v, x)?)?)?;
        }
        Ok(acc)
    }

    /// `‖Σ_k θ_{x_k,x_k} - id‖`.
    pub fn identity_residual(&self) -> Result<f64> {
        let total = sum_rank_ones(&self.module, &self.vectors, self.vectors.len())?;
        Ok(total.try_sub(&self.module.identity_operator())?.norm())
    }
}

fn sum_rank_ones(module: &HilbertModule, vectors: &[ModuleElement], n: usize) -> Result<ModuleOperator> {
    let mut acc = module.zero_operator();
    for v in &vectors[..n] {
        acc = acc.try_add(&rank_one(v, v)?)?;
    }
    Ok(acc)
}

/// Normalizes a generating set into a tight frame `x_k = T^{-1/2} g_k`, where
/// `T = Σ_k θ_{g_k, g_k}` must be invertible on every nonzero block.
pub fn frame(module: &HilbertModule, generators: &[ModuleElement], tol: Tol) -> Result<Frame> {
    for g in generators {
        module.check(g.module())?;
    }
    let t = sum_rank_ones(module, generators, generators.len())?;
    let mut root_inv = Vec::with_capacity(module.num_blocks());
    for (block, tb) in t.blocks.iter().enumerate() {
        if tb.nrows() == 0 {
            root_inv.push(matcore::zeros(0, 0));
            continue;
        }
        match matcore::inv_sqrt(tb, tol) {
            Ok(r) => root_inv.push(r),
            Err(Error::NotPositive { min_eigenvalue }) => {
                return Err(Error::NotGenerating { block, min_eigenvalue })
            }
            Err(e) => return Err(e),
        }
    }
    let normalizer = ModuleOperator { module: module.clone(), blocks: root_inv };
    let vectors = generators.iter().map(|g| normalizer.apply(g)).collect::<Result<Vec<_>>>()?;
    Ok(Frame { module: module.clone(), vectors })
}

/// `e_n = Σ_{k ≤ n} θ_{x_k, x_k}` for `1 ≤ n ≤ frame length`.
///
/// In general the approximate unit is indexed by pairs (countably generated
/// submodule, frame index). Here `X` itself is finitely generated, so the net
/// is eventually constant at the full frame, where `e_n = id_X`.
pub fn approximate_unit(frame: &Frame, n: usize) -> Result<ModuleOperator> {
    if n == 0 || n > frame.len() {
        return Err(Error::OutOfRange { index: n, len: frame.len() });
    }
    sum_rank_ones(&frame.module, &frame.vectors, n)
}
