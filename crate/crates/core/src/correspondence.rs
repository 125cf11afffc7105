//! C*-correspondences `(A, X, λ)` over multi-matrix algebras, the Katsura
//! ideal, the hyperrigidity decision, and internal tensor products.
//!
//! The left action is stored as its values on the matrix units of `A`. Two
//! presentations feed into that: a multiplicity matrix `c_ij` (A-block `j`
//! appears `c_ij` times inside `𝓛(X)`-block `i`, placed on consecutive
//! coordinates) and explicit isometric intertwiners. Both are reduced to
//! intertwiners `W` with `λ(a)_i = Σ_j W_ij (I_c ⊗ a_j) W_ij*`.
//!
//! Because `𝒦(X) = 𝓛(X)` here, the Katsura ideal is the annihilator of
//! `ker λ`, i.e. the complement of the kernel blocks, and `𝒥_X · X = λ(u_J) X`
//! for the unit `u_J` of that ideal.

use serde::{Deserialize, Serialize};

use crate::cstar::{AlgebraElement, Ideal, MatrixUnit, MultiMatrixAlgebra};
use crate::error::{Error, Result};
use crate::hilbmod::{BasisIndex, HilbertModule, ModuleElement, ModuleOperator};
use crate::matcore::{self, CMatrix, Tol};

/// Isometric placement of `c` copies of A-block `algebra_block` inside
/// module block `module_block`: columns `t·n_j + s` carry copy `t`, row `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub module_block: usize,
    pub algebra_block: usize,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    module: HilbertModule,
    units: Vec<ModuleOperator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperrigidityVerdict {
    pub hyperrigid: bool,
    /// Block indices (zero-based) of the Katsura ideal.
    pub katsura_blocks: Vec<usize>,
    /// Block indices (zero-based) of `ker λ`.
    pub kernel_blocks: Vec<usize>,
    /// `max_b ‖λ(u_J) b - b‖` over the standard basis of `X`.
    pub residual: f64,
    /// Standard basis vector moved most by `λ(u_J)`, present iff not hyperrigid.
    pub witness: Option<WitnessVector>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessVector {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub residual: f64,
}

impl WitnessVector {
    pub fn basis_index(&self) -> BasisIndex {
        BasisIndex { block: self.block, row: self.row, col: self.col }
    }
}

impl Correspondence {
    /// Builds a correspondence from the images of the matrix units, ordered as
    /// [`MultiMatrixAlgebra::matrix_units`], and validates them.
    pub fn from_unit_images(module: HilbertModule, units: Vec<ModuleOperator>, tol: Tol) -> Result<Self> {
        let expected = module.algebra().dim();
        if units.len() != expected {
            return Err(Error::Shape(format!("{} unit images, expected {expected}", units.len())));
        }
        if let Some(bad) = units.iter().find(|u| u.module() != &module) {
            return Err(Error::Mismatch(format!("unit image over module {:?}", bad.module().multiplicities())));
        }
        let c = Self { module, units };
        c.validate(tol)?;
        Ok(c)
    }

    /// Left action from a multiplicity matrix: `c[i][j]` copies of A-block `j`
    /// inside module block `i`, placed on consecutive leading coordinates in
    /// increasing `j`. Requires `Σ_j c_ij n_j ≤ m_i`.
    pub fn from_multiplicities(algebra: &MultiMatrixAlgebra, multiplicities: &[usize], c: &[Vec<usize>]) -> Result<Self> {
        let module = HilbertModule::new(algebra.clone(), multiplicities.to_vec())?;
        let b = algebra.num_blocks();
        if c.len() != b || c.iter().any(|row| row.len() != b) {
            return Err(Error::Shape(format!("multiplicity matrix must be {b}x{b}")));
        }
        let mut ints = Vec::new();
        for (i, row) in c.iter().enumerate() {
            let used: usize = row.iter().zip(algebra.block_sizes()).map(|(c, n)| c * n).sum();
            if used > multiplicities[i] {
                return Err(Error::Shape(format!(
                    "module block {}: Σ_j c_ij n_j = {used} exceeds multiplicity {}",
                    i + 1,
                    multiplicities[i]
                )));
            }
            let mut offset = 0;
            for (j, &cij) in row.iter().enumerate() {
                let width = cij * algebra.block_size(j);
                if width == 0 {
                    continue;
                }
                let mut w = matcore::zeros(multiplicities[i], width);
                for k in 0..width {
                    w[(offset + k, k)] = matcore::ONE;
                }
                offset += width;
                ints.push(Intertwiner { module_block: i, algebra_block: j, matrix: w });
            }
        }
        Ok(Self::assemble(module, &ints))
    }

    /// Left action `λ(a)_i = Σ W (I_c ⊗ a_j) W*` from explicit intertwiners,
    /// then validated.
    pub fn from_intertwiners(module: HilbertModule, ints: &[Intertwiner], tol: Tol) -> Result<Self> {
        let algebra = module.algebra().clone();
        for w in ints {
            if w.module_block >= module.num_blocks() || w.algebra_block >= algebra.num_blocks() {
                return Err(Error::OutOfRange {
                    index: w.module_block.max(w.algebra_block) + 1,
                    len: module.num_blocks(),
                });
            }
            let n = algebra.block_size(w.algebra_block);
            let m = module.multiplicity(w.module_block);
            if w.matrix.nrows() != m || w.matrix.ncols() % n != 0 {
                return Err(Error::Shape(format!(
                    "intertwiner for blocks ({}, {}) has shape {:?}; needs {m} rows and a multiple of {n} columns",
                    w.module_block + 1,
                    w.algebra_block + 1,
                    w.matrix.shape()
                )));
            }
        }
        let c = Self::assemble(module, ints);
        c.validate(tol)?;
        Ok(c)
    }

    fn assemble(module: HilbertModule, ints: &[Intertwiner]) -> Self {
        let algebra = module.algebra().clone();
        let units = algebra
            .matrix_units()
            .into_iter()
            .map(|u| {
                let mut blocks: Vec<CMatrix> =
                    module.multiplicities().iter().map(|&m| matcore::zeros(m, m)).collect();
                let n = algebra.block_size(u.block);
                for w in ints.iter().filter(|w| w.algebra_block == u.block) {
                    let copies = w.matrix.ncols() / n;
                    let mut e = matcore::zeros(n, n);
                    e[(u.row, u.col)] = matcore::ONE;
                    let inner = matcore::kron(&matcore::identity(copies), &e);
                    blocks[w.module_block] += &w.matrix * inner * w.matrix.adjoint();
                }
                module.operator(blocks).expect("assembled blocks have module shapes")
            })
            .collect();
        Self { module, units }
    }

    /// `A` acting on itself by left multiplication.
    pub fn identity(algebra: &MultiMatrixAlgebra) -> Self {
        let b = algebra.num_blocks();
        let c: Vec<Vec<usize>> = (0..b).map(|i| (0..b).map(|j| usize::from(i == j)).collect()).collect();
        Self::from_multiplicities(algebra, algebra.block_sizes(), &c).expect("identity correspondence is well formed")
    }

    /// The zero left action on `module`.
    pub fn zero_action(module: HilbertModule) -> Self {
        let units = vec![module.zero_operator(); module.algebra().dim()];
        Self { module, units }
    }

    /// Unitary change of basis on each module block: `λ'(a)_i = U_i λ(a)_i U_i*`.
    /// The module itself is unchanged; only the left action is rotated.
    pub fn conjugated(&self, unitaries: &[CMatrix]) -> Result<Self> {
        if unitaries.len() != self.module.num_blocks() {
            return Err(Error::Shape("one unitary per module block required".into()));
        }
        let units = self
            .units
            .iter()
            .map(|op| {
                let blocks = op.blocks().iter().zip(unitaries).map(|(b, u)| u * b * u.adjoint()).collect();
                self.module.operator(blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { module: self.module.clone(), units })
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        self.module.algebra()
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn unit_image(&self, u: MatrixUnit) -> &ModuleOperator {
        &self.units[self.algebra().unit_index(u)]
    }

    pub fn unit_images(&self) -> &[ModuleOperator] {
        &self.units
    }

    /// `λ(a)`.
    pub fn lambda(&self, a: &AlgebraElement) -> Result<ModuleOperator> {
        if a.algebra() != self.algebra() {
            return Err(Error::Mismatch("λ applied to an element of another algebra".into()));
        }
        let mut blocks: Vec<CMatrix> = self.module.multiplicities().iter().map(|&m| matcore::zeros(m, m)).collect();
        for (u, op) in self.algebra().matrix_units().into_iter().zip(&self.units) {
            let coeff = a.block(u.block)[(u.row, u.col)];
            if coeff == matcore::ZERO {
                continue;
            }
            for (acc, b) in blocks.iter_mut().zip(op.blocks()) {
                *acc += b * coeff;
            }
        }
        self.module.operator(blocks)
    }

    /// Left action `a · x = λ(a) x`.
    pub fn left_mul(&self, a: &AlgebraElement, x: &ModuleElement) -> Result<ModuleElement> {
        self.lambda(a)?.apply(x)
    }

    /// Checks `λ(u)* = λ(u*)` and `λ(uv) = λ(u)λ(v)` on all matrix units.
    pub fn validate(&self, tol: Tol) -> Result<()> {
        let algebra = self.algebra();
        let units = algebra.matrix_units();
        let scale = self.units.iter().map(|u| u.norm()).fold(1.0, f64::max);
        let bound = tol.scaled(scale * scale);
        let key = |u: MatrixUnit| (u.block + 1, u.row + 1, u.col + 1);

        let mut worst: Option<(f64, &'static str, MatrixUnit, MatrixUnit)> = None;
        let mut record = |r: f64, what: &'static str, u: MatrixUnit, v: MatrixUnit| {
            if r > bound && worst.is_none_or(|w| r > w.0) {
                worst = Some((r, what, u, v));
            }
        };

        for &u in &units {
            let star = MatrixUnit { block: u.block, row: u.col, col: u.row };
            let r = self.unit_image(u).adjoint().try_sub(self.unit_image(star))?.norm();
            record(r, "λ(u)* = λ(u*)", u, star);
        }
        for &u in &units {
            for &v in &units {
                let prod = self.unit_image(u).compose(self.unit_image(v))?;
                let expected = if u.block == v.block && u.col == v.row {
                    self.unit_image(MatrixUnit { block: u.block, row: u.row, col: v.col }).clone()
                } else {
                    self.module.zero_operator()
                };
                let r = prod.try_sub(&expected)?.norm();
                record(r, "λ(uv) = λ(u)λ(v)", u, v);
            }
        }
        match worst {
            None => Ok(()),
            Some((residual, identity, u, v)) => {
                Err(Error::NotHomomorphism { identity, left: key(u), right: key(v), residual })
            }
        }
    }

    fn block_action_norms(&self) -> Vec<f64> {
        let algebra = self.algebra();
        let mut norms = vec![0.0f64; algebra.num_blocks()];
        for (u, op) in algebra.matrix_units().into_iter().zip(&self.units) {
            norms[u.block] = norms[u.block].max(op.norm());
        }
        norms
    }

    /// Blocks `j` of `A` whose matrix units all act with norm at most `tol`.
    pub fn kernel_of_lambda(&self, tol: Tol) -> Ideal {
        let members = self
            .block_action_norms()
            .into_iter()
            .enumerate()
            .filter(|&(_, n)| tol.is_small(n))
            .map(|(j, _)| j);
        self.algebra().ideal(members).expect("block indices are in range")
    }

    /// The Katsura ideal: every block outside `ker λ`.
    pub fn katsura_ideal(&self, tol: Tol) -> Ideal {
        self.kernel_of_lambda(tol).complement()
    }

    /// Decides whether `𝒥_X · X = X`, i.e. whether `λ(u_J)` fixes every
    /// standard basis vector of `X`.
    pub fn is_hyperrigid(&self, tol: Tol) -> HyperrigidityVerdict {
        let kernel = self.kernel_of_lambda(tol);
        let katsura = kernel.complement();
        let mut warnings = Vec::new();
        for (j, n) in self.block_action_norms().into_iter().enumerate() {
            if n > tol.value() && n < 10.0 * tol.value() {
                warnings.push(format!(
                    "A-block {} acts with borderline norm {n:.3e}; counted outside ker λ",
                    j + 1
                ));
            }
        }

        let p = self.lambda(&katsura.unit()).expect("unit lives in the same algebra");
        let mut worst: Option<WitnessVector> = None;
        let mut residual = 0.0f64;
        for idx in self.module.basis_indices() {
            let b = self.module.basis_vector(idx);
            let moved = p.apply(&b).expect("same module");
            let r = matcore::frobenius(&(moved.block(idx.block) - b.block(idx.block)));
            residual = residual.max(r);
            if r > tol.value() && worst.is_none_or(|w| r > w.residual) {
                worst = Some(WitnessVector { block: idx.block, row: idx.row, col: idx.col, residual: r });
            }
            if r > tol.value() && r < 10.0 * tol.value() {
                warnings.push(format!(
                    "basis vector ({}, {}, {}) is moved by a borderline {r:.3e}",
                    idx.block + 1,
                    idx.row + 1,
                    idx.col + 1
                ));
            }
        }
        HyperrigidityVerdict {
            hyperrigid: worst.is_none(),
            katsura_blocks: katsura.members().iter().copied().collect(),
            kernel_blocks: kernel.members().iter().copied().collect(),
            residual,
            witness: worst,
            warnings,
        }
    }

    /// `c_ij`: how often A-block `j` occurs inside module block `i`, read off
    /// as `rank λ(e^j_00)_i`.
    pub fn multiplicity_matrix(&self) -> Vec<Vec<usize>> {
        let algebra = self.algebra();
        (0..self.module.num_blocks())
            .map(|i| {
                (0..algebra.num_blocks())
                    .map(|j| {
                        let p = self.unit_image(MatrixUnit { block: j, row: 0, col: 0 }).block(i);
                        p.trace().re.round().max(0.0) as usize
                    })
                    .collect()
            })
            .collect()
    }

    /// For each module block `i` and A-block `j`, an isometry
    /// `W_ij : C^{n_j} ⊗ C^{r_ij} → C^{m_i}` with `λ(a)_i W_ij = W_ij (I ⊗ a_j)`.
    pub fn isotypic_intertwiners(&self, tol: Tol) -> Result<Vec<Vec<CMatrix>>> {
        let algebra = self.algebra();
        let mut out = Vec::with_capacity(self.module.num_blocks());
        for i in 0..self.module.num_blocks() {
            let m = self.module.multiplicity(i);
            let mut row = Vec::with_capacity(algebra.num_blocks());
            for j in 0..algebra.num_blocks() {
                let n = algebra.block_size(j);
                let p = self.unit_image(MatrixUnit { block: j, row: 0, col: 0 }).block(i);
                let range = matcore::projection_range(p, tol)?;
                let r = range.ncols();
                let mut w = matcore::zeros(m, r * n);
                for s in 0..n {
                    let e = self.unit_image(MatrixUnit { block: j, row: s, col: 0 }).block(i);
                    let img = e * &range;
                    for t in 0..r {
                        w.set_column(t * n + s, &img.column(t));
                    }
                }
                row.push(w);
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// Internal tensor product `X ⊗_A Y` together with the data needed to map
/// elementary tensors into it.
#[derive(Debug, Clone)]
pub struct TensorProduct {
    left: Correspondence,
    right_intertwiners: Vec<Vec<CMatrix>>,
    product: Correspondence,
}

impl TensorProduct {
    pub fn new(left: &Correspondence, right: &Correspondence, tol: Tol) -> Result<Self> {
        if left.algebra() != right.algebra() {
            return Err(Error::Mismatch("tensor product over different algebras".into()));
        }
        let algebra = left.algebra().clone();
        let ws = right.isotypic_intertwiners(tol)?;
        let n_blocks = right.module().num_blocks();

        // r_ij = number of copies of A-block j inside right module block i
        let copies: Vec<Vec<usize>> = ws
            .iter()
            .map(|row| row.iter().enumerate().map(|(j, w)| w.ncols() / algebra.block_size(j)).collect())
            .collect();
        let mults: Vec<usize> = (0..n_blocks)
            .map(|i| (0..algebra.num_blocks()).map(|j| copies[i][j] * left.module().multiplicity(j)).sum())
            .collect();
        let module = HilbertModule::new(algebra.clone(), mults)?;
        let units = left
            .unit_images()
            .iter()
            .map(|op| {
                let blocks = (0..n_blocks)
                    .map(|i| {
                        let parts: Vec<CMatrix> = (0..algebra.num_blocks())
                            .map(|j| matcore::kron(&matcore::identity(copies[i][j]), op.block(j)))
                            .collect();
                        matcore::block_diag(&parts)
                    })
                    .collect();
                module.operator(blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            left: left.clone(),
            right_intertwiners: ws,
            product: Correspondence { module, units },
        })
    }

    pub fn correspondence(&self) -> &Correspondence {
        &self.product
    }

    pub fn into_correspondence(self) -> Correspondence {
        self.product
    }

    /// Matrix of `y ↦ x ⊗ y` on right-module block `i`: maps `C^{m^Y_i}` columns
    /// to `C^{m^Z_i}` columns.
    pub fn creation_block(&self, x: &ModuleElement, i: usize) -> Result<CMatrix> {
        if x.module() != self.left.module() {
            return Err(Error::Mismatch("left tensor factor from another module".into()));
        }
        let row = &self.right_intertwiners[i];
        let m_right = row.first().map_or(0, |w| w.nrows());
        let parts: Vec<CMatrix> = row
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let n = self.left.algebra().block_size(j);
                let r = w.ncols() / n;
                matcore::kron(&matcore::identity(r), x.block(j)) * w.adjoint()
            })
            .collect();
        matcore::vstack(&parts, m_right)
    }

    /// The elementary tensor `x ⊗ y` as an element of the product module.
    pub fn elementary(&self, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleElement> {
        let blocks = (0..self.product.module().num_blocks())
            .map(|i| Ok(self.creation_block(x, i)? * y.block(i)))
            .collect::<Result<Vec<_>>>()?;
        self.product.module().element(blocks)
    }
}

/// `X^{⊗k}` with its left action; `X^{⊗0} = A`.
pub fn tensor_power(c: &Correspondence, k: usize, tol: Tol) -> Result<Correspondence> {
    let mut acc = Correspondence::identity(c.algebra());
    for _ in 0..k {
        acc = TensorProduct::new(c, &acc, tol)?.into_correspondence();
    }
    Ok(acc)
}
