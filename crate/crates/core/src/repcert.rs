//! Truncated Fock representations, the shift dilation, and the numerical
//! hyperrigidity certificate.
//!
//! The Fock space is `H = ⊕_{k=0}^{N} X^{⊗k} ⊗_A H₀` with `H₀ = ⊕_i C^{n_i}`.
//! Level `k` is stored as `⊕_i C^{m^{(k)}_i}`, where `m^{(k)}` are the right
//! multiplicities of `X^{⊗k}`; `π⁰` acts diagonally through the left action
//! of each tensor power and `π¹(x)` creates `x` from level `k` to `k + 1`,
//! annihilating the top level.
//!
//! Given an ideal `J` with unit `u_J`, set `P = π⁰(u_J)` and `Q = I - P`. For
//! an isometry `S` on a shift space,
//!
//! ```text
//! τ⁰(a)   = π⁰(a) ⊗ I
//! τ¹_S(x) = P π¹(x) ⊗ I + Q π¹(x) ⊗ S
//! ```
//!
//! The unilateral shift `V` lives on `C^M`, the bilateral shift `U` on
//! `C^{2M+1}` (indices `-M..=M`), and `Φ` compresses onto indices `0..M`.
//! Both pairs agree after `Φ` on `τ(a)`, `τ(x)`, `τ(y)*`; on products
//! `τ(x)τ(y)*` they differ by `Qπ¹(x)π¹(y)*Q ⊗ e_00`, which vanishes for all
//! `x, y` exactly when `𝒥_X · X = X`.
//!
//! Operators on `H ⊗ C^K` are kept as sums of Kronecker products so the shift
//! factor can be compressed termwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{Correspondence, TensorProduct};
use crate::cstar::{AlgebraElement, Ideal};
use crate::error::{Error, Result};
use crate::hilbmod::{inner_product, BasisIndex, ModuleElement};
use crate::matcore::{self, CMatrix, Tol};

/// Truncated Fock representation `(π⁰, π¹)` of a correspondence.
#[derive(Debug, Clone)]
pub struct ToeplitzRep {
    correspondence: Correspondence,
    depth: usize,
    /// `X^{⊗k}` for `k = 0..=depth`.
    levels: Vec<Correspondence>,
    /// `X ⊗ X^{⊗k}` for `k = 0..depth`.
    creators: Vec<TensorProduct>,
    offsets: Vec<usize>,
    dims: Vec<usize>,
}

pub fn fock_rep(c: &Correspondence, depth: usize, tol: Tol) -> Result<ToeplitzRep> {
    if depth == 0 {
        return Err(Error::Invalid("Fock depth must be at least 1".into()));
    }
    let mut levels = vec![Correspondence::identity(c.algebra())];
    let mut creators = Vec::with_capacity(depth);
    for k in 0..depth {
        let tp = TensorProduct::new(c, &levels[k], tol)?;
        levels.push(tp.correspondence().clone());
        creators.push(tp);
    }
    let dims: Vec<usize> = levels.iter().map(|l| l.module().multiplicities().iter().sum()).collect();
    let offsets = dims
        .iter()
        .scan(0, |acc, d| {
            let start = *acc;
            *acc += d;
            Some(start)
        })
        .collect();
    Ok(ToeplitzRep { correspondence: c.clone(), depth, levels, creators, offsets, dims })
}

impl ToeplitzRep {
    pub fn correspondence(&self) -> &Correspondence {
        &self.correspondence
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn level_dims(&self) -> &[usize] {
        &self.dims
    }

    /// `X^{⊗k}` with its left action.
    pub fn level(&self, k: usize) -> &Correspondence {
        &self.levels[k]
    }

    /// Index ranges of levels `1..=N` (rows) and `0..N` (columns): every
    /// `π¹(x)`, and hence every product `π¹(x)Bπ¹(y)*` with `B` level-diagonal,
    /// is supported in this window.
    pub fn creation_window(&self) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let h = self.hilbert_dim();
        (self.offsets[1]..h, 0..self.offsets[self.depth])
    }

    /// Orthogonal projection onto level `k`.
    pub fn level_projection(&self, k: usize) -> CMatrix {
        self.levels_projection(k..k + 1)
    }

    /// Orthogonal projection onto the levels in `range`.
    pub fn levels_projection(&self, range: std::ops::Range<usize>) -> CMatrix {
        let mut p = matcore::zeros(self.hilbert_dim(), self.hilbert_dim());
        for k in range {
            for d in 0..self.dims[k] {
                let i = self.offsets[k] + d;
                p[(i, i)] = matcore::ONE;
            }
        }
        p
    }

    pub fn pi0(&self, a: &AlgebraElement) -> Result<CMatrix> {
        let mut out = matcore::zeros(self.hilbert_dim(), self.hilbert_dim());
        for (k, level) in self.levels.iter().enumerate() {
            let op = level.lambda(a)?;
            let block = matcore::block_diag(op.blocks());
            out.view_mut((self.offsets[k], self.offsets[k]), block.shape()).copy_from(&block);
        }
        Ok(out)
    }

    pub fn pi1(&self, x: &ModuleElement) -> Result<CMatrix> {
        let mut out = matcore::zeros(self.hilbert_dim(), self.hilbert_dim());
        for (k, tp) in self.creators.iter().enumerate() {
            let blocks = (0..self.levels[k].module().num_blocks())
                .map(|i| tp.creation_block(x, i))
                .collect::<Result<Vec<_>>>()?;
            let block = matcore::block_diag(&blocks);
            out.view_mut((self.offsets[k + 1], self.offsets[k]), block.shape()).copy_from(&block);
        }
        Ok(out)
    }

    /// `‖π⁰(a)π¹(x) - π¹(a·x)‖`.
    pub fn module_identity_residual(&self, a: &AlgebraElement, x: &ModuleElement) -> Result<f64> {
        let lhs = self.pi0(a)? * self.pi1(x)?;
        let rhs = self.pi1(&self.correspondence.left_mul(a, x)?)?;
        Ok(matcore::op_norm(&(lhs - rhs)))
    }

    /// `π¹(x)*π¹(y) - π⁰(⟨x,y⟩)` compressed below the top level, and on the top level.
    pub fn inner_identity_residuals(&self, x: &ModuleElement, y: &ModuleElement) -> Result<(f64, f64)> {
        let d = self.pi1(x)?.adjoint() * self.pi1(y)? - self.pi0(&inner_product(x, y)?)?;
        let below = self.levels_projection(0..self.depth);
        let top = self.level_projection(self.depth);
        Ok((matcore::op_norm(&(&below * &d * &below)), matcore::op_norm(&(&top * &d * &top))))
    }
}

/// `Σ_t B_t ⊗ S_t` on `H ⊗ C^K`.
#[derive(Debug, Clone)]
pub struct KronOp {
    terms: Vec<(CMatrix, CMatrix)>,
}

impl KronOp {
    pub fn new(terms: Vec<(CMatrix, CMatrix)>) -> Self {
        Self { terms }
    }

    pub fn simple(left: CMatrix, right: CMatrix) -> Self {
        Self { terms: vec![(left, right)] }
    }

    pub fn terms(&self) -> &[(CMatrix, CMatrix)] {
        &self.terms
    }

    pub fn adjoint(&self) -> Self {
        Self { terms: self.terms.iter().map(|(b, s)| (b.adjoint(), s.adjoint())).collect() }
    }

    pub fn mul(&self, other: &KronOp) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (b1, s1) in &self.terms {
            for (b2, s2) in &other.terms {
                terms.push((b1 * b2, s1 * s2));
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &KronOp) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(b, s)| (-b, s.clone())));
        Self { terms }
    }

    /// Applies `S ↦ f(S)` to each shift factor (used for compressions).
    pub fn map_right(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self { terms: self.terms.iter().map(|(b, s)| (b.clone(), f(s))).collect() }
    }

    /// Applies `B ↦ f(B)` to each Hilbert-space factor.
    pub fn map_left(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self { terms: self.terms.iter().map(|(b, s)| (f(b), s.clone())).collect() }
    }

    pub fn materialize(&self) -> CMatrix {
        let mut iter = self.terms.iter();
        let Some((b, s)) = iter.next() else {
            return matcore::zeros(0, 0);
        };
        let mut acc = matcore::kron(b, s);
        for (b, s) in iter {
            acc += matcore::kron(b, s);
        }
        acc
    }

    /// Operator norm. The operator is viewed as a block matrix indexed by
    /// shift coordinates, `D_pq = Σ_t S_t[p,q] B_t`; block rows and columns
    /// that vanish identically do not affect the norm and are dropped before
    /// the dense computation.
    pub fn norm(&self) -> f64 {
        let Some((b0, s0)) = self.terms.first() else {
            return 0.0;
        };
        let (hr, hc) = b0.shape();
        let (kr, kc) = s0.shape();
        let mut blocks: Vec<Vec<Option<CMatrix>>> = vec![vec![None; kc]; kr];
        for (b, s) in &self.terms {
            for p in 0..kr {
                for q in 0..kc {
                    let z = s[(p, q)];
                    if z == matcore::ZERO {
                        continue;
                    }
                    match blocks[p][q].as_mut() {
                        Some(m) => *m += b * z,
                        None => blocks[p][q] = Some(b * z),
                    }
                }
            }
        }
        for row in blocks.iter_mut() {
            for cell in row.iter_mut() {
                if cell.as_ref().is_some_and(|m| m.iter().all(|z| *z == matcore::ZERO)) {
                    *cell = None;
                }
            }
        }
        let rows: Vec<usize> = (0..kr).filter(|&p| blocks[p].iter().any(Option::is_some)).collect();
        let cols: Vec<usize> = (0..kc).filter(|&q| (0..kr).any(|p| blocks[p][q].is_some())).collect();
        if rows.is_empty() {
            return 0.0;
        }
        let mut dense = matcore::zeros(rows.len() * hr, cols.len() * hc);
        for (ri, &p) in rows.iter().enumerate() {
            for (ci, &q) in cols.iter().enumerate() {
                if let Some(m) = &blocks[p][q] {
                    dense.view_mut((ri * hr, ci * hc), (hr, hc)).copy_from(m);
                }
            }
        }
        matcore::op_norm(&dense)
    }
}

/// Truncated unilateral shift on `C^dim`: `e_k ↦ e_{k+1}`, last vector to 0.
pub fn unilateral_shift(dim: usize) -> CMatrix {
    let mut v = matcore::zeros(dim, dim);
    for k in 0..dim.saturating_sub(1) {
        v[(k + 1, k)] = matcore::ONE;
    }
    v
}

/// Truncated bilateral shift on `C^{2M+1}` with coordinates `-M..=M`.
pub fn bilateral_shift(m: usize) -> CMatrix {
    unilateral_shift(2 * m + 1)
}

/// Isometric embedding `C^M → C^{2M+1}` of the indices `0..M`.
fn half_line_embedding(m: usize) -> CMatrix {
    let mut e = matcore::zeros(2 * m + 1, m);
    for q in 0..m {
        e[(m + q, q)] = matcore::ONE;
    }
    e
}

/// The pairs `(τ⁰, τ¹_V)` and `(τ⁰, τ¹_U)` built from a Fock representation.
#[derive(Debug, Clone)]
pub struct DilatedPair<'a> {
    base: &'a ToeplitzRep,
    shift_dim: usize,
    p: CMatrix,
    q: CMatrix,
    v: CMatrix,
    u: CMatrix,
    embedding: CMatrix,
}

pub fn shift_dilation<'a>(rep: &'a ToeplitzRep, ideal: &Ideal, shift_dim: usize, tol: Tol) -> Result<DilatedPair<'a>> {
    if shift_dim < 2 {
        return Err(Error::Invalid("shift dimension must be at least 2".into()));
    }
    let algebra = rep.correspondence().algebra();
    if ideal.algebra() != algebra {
        return Err(Error::Mismatch("ideal of another algebra".into()));
    }
    let p = rep.pi0(&ideal.unit())?;
    let q = matcore::identity(p.nrows()) - &p;
    let mut residual = 0.0f64;
    for unit in algebra.matrix_units() {
        let a = rep.pi0(&algebra.unit(unit))?;
        residual = residual.max(matcore::op_norm(&(&p * &a - &a * &p)));
    }
    if !tol.is_small(residual) {
        return Err(Error::NonCommutingProjection { residual });
    }
    Ok(DilatedPair {
        base: rep,
        shift_dim,
        p,
        q,
        v: unilateral_shift(shift_dim),
        u: bilateral_shift(shift_dim),
        embedding: half_line_embedding(shift_dim),
    })
}

impl<'a> DilatedPair<'a> {
    pub fn base(&self) -> &ToeplitzRep {
        self.base
    }

    pub fn shift_dim(&self) -> usize {
        self.shift_dim
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    fn tau1(&self, x: &ModuleElement, shift: &CMatrix) -> Result<KronOp> {
        let pi = self.base.pi1(x)?;
        let id = matcore::identity(shift.nrows());
        Ok(KronOp::new(vec![(&self.p * &pi, id), (&self.q * pi, shift.clone())]))
    }

    /// `τ⁰(a)` on `H ⊗ C^M`.
    pub fn tau0_v(&self, a: &AlgebraElement) -> Result<KronOp> {
        Ok(KronOp::simple(self.base.pi0(a)?, matcore::identity(self.shift_dim)))
    }

    /// `τ⁰(a)` on `H ⊗ C^{2M+1}`.
    pub fn tau0_u(&self, a: &AlgebraElement) -> Result<KronOp> {
        Ok(KronOp::simple(self.base.pi0(a)?, matcore::identity(2 * self.shift_dim + 1)))
    }

    pub fn tau1_v(&self, x: &ModuleElement) -> Result<KronOp> {
        self.tau1(x, &self.v)
    }

    pub fn tau1_u(&self, x: &ModuleElement) -> Result<KronOp> {
        self.tau1(x, &self.u)
    }

    /// `Φ`: compression of the bilateral shift factor onto the half line.
    pub fn compress(&self, op: &KronOp) -> KronOp {
        op.map_right(|s| self.compress_shift(s))
    }

    fn compress_shift(&self, s: &CMatrix) -> CMatrix {
        self.embedding.adjoint() * s * &self.embedding
    }

    /// Shift factors `(I, U)` of the two terms of `τ¹_U`.
    fn shift_factors_u(&self) -> [CMatrix; 2] {
        [matcore::identity(self.u.nrows()), self.u.clone()]
    }

    /// Shift factors `(I, V)` of the two terms of `τ¹_V`.
    fn shift_factors_v(&self) -> [CMatrix; 2] {
        [matcore::identity(self.v.nrows()), self.v.clone()]
    }

    /// `‖τ⁰(a)τ¹_V(x) - τ¹_V(a·x)‖`.
    pub fn module_identity_residual(&self, a: &AlgebraElement, x: &ModuleElement) -> Result<f64> {
        let ax = self.base.correspondence().left_mul(a, x)?;
        Ok(self.tau0_v(a)?.mul(&self.tau1_v(x)?).sub(&self.tau1_v(&ax)?).norm())
    }

    /// `τ¹_V(x)*τ¹_V(y) - τ⁰(⟨x,y⟩)`, compressed to Fock levels below the top
    /// and shift coordinates below the last one (where `V*V = I` holds).
    pub fn inner_identity_residual(&self, x: &ModuleElement, y: &ModuleElement) -> Result<f64> {
        let d = self.tau1_v(x)?.adjoint().mul(&self.tau1_v(y)?).sub(&self.tau0_v(&inner_product(x, y)?)?);
        let below = self.base.levels_projection(0..self.base.depth());
        let mut window = matcore::identity(self.shift_dim);
        window[(self.shift_dim - 1, self.shift_dim - 1)] = matcore::ZERO;
        Ok(d.map_left(|b| &below * b * &below).map_right(|s| &window * s * &window).norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDefect {
    pub x: [usize; 3],
    pub y: [usize; 3],
    /// `‖Φ(τ¹_U(x)τ¹_U(y)*) - τ¹_V(x)τ¹_V(y)*‖`.
    pub defect: f64,
    /// `‖Qπ¹(x)π¹(y)*Q‖`, the value the defect is expected to equal.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub depth: usize,
    pub shift_dim: usize,
    pub tol: f64,
    pub defect: f64,
    pub agreement_on_s: f64,
    pub verdict: bool,
    /// `max |defect - predicted|` over all pairs.
    pub formula_gap: f64,
    /// `max_a ‖Σ_k π¹(a·b_k)π¹(b_k)* - π⁰(a)‖` over matrix units of `𝒥_X`;
    /// diagnostic only (the truncated Fock representation is not covariant).
    pub covariance_residual: f64,
    pub pairs: Vec<PairDefect>,
}

fn label(i: BasisIndex) -> [usize; 3] {
    [i.block, i.row, i.col]
}

/// Builds the Fock representation, dilates it along the Katsura ideal, and
/// measures how far `Φ ∘ (τ⁰ × τ¹_U)` is from `τ⁰ × τ¹_V` on products
/// `τ(x)τ(y)*` of basis vectors.
pub fn certificate(c: &Correspondence, depth: usize, shift_dim: usize, tol: Tol) -> Result<CertificateReport> {
    let rep = fock_rep(c, depth, tol)?;
    let katsura = c.katsura_ideal(tol);
    let dil = shift_dilation(&rep, &katsura, shift_dim, tol)?;
    let module = c.module();
    let algebra = c.algebra();
    let basis_idx = module.basis_indices();
    let basis: Vec<ModuleElement> = basis_idx.iter().map(|&i| module.basis_vector(i)).collect();

    let tv = basis.iter().map(|x| dil.tau1_v(x)).collect::<Result<Vec<_>>>()?;
    let tu = basis.iter().map(|x| dil.tau1_u(x)).collect::<Result<Vec<_>>>()?;

    let mut agreement = 0.0f64;
    for (v, u) in tv.iter().zip(&tu) {
        agreement = agreement.max(dil.compress(u).sub(v).norm());
        agreement = agreement.max(dil.compress(&u.adjoint()).sub(&v.adjoint()).norm());
    }
    for unit in algebra.matrix_units() {
        let a = algebra.unit(unit);
        agreement = agreement.max(dil.compress(&dil.tau0_u(&a)?).sub(&dil.tau0_v(&a)?).norm());
    }
    if !tol.is_small(agreement) {
        return Err(Error::AgreementFailure { deviation: agreement });
    }

    // τ¹_U(x) and τ¹_V(x) share their Hilbert-space factors (Pπ¹(x), Qπ¹(x));
    // both products expand over the same four factor products h_ab, with
    // shift coefficients Φ(S_a S_b*) on the U side and S_a S_b* on the V side.
    let (rows, cols) = rep.creation_window();
    let window = |m: &CMatrix| m.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned();
    let pis: Vec<CMatrix> = basis.iter().map(|x| rep.pi1(x)).collect::<Result<_>>()?;
    let factors: Vec<[CMatrix; 2]> = pis.iter().map(|pi| [window(&(dil.p() * pi)), window(&(dil.q() * pi))]).collect();
    let pis: Vec<CMatrix> = pis.iter().map(window).collect();
    let q_top = dil.q().view((rows.start, rows.start), (rows.len(), rows.len())).into_owned();
    let (su, sv) = (dil.shift_factors_u(), dil.shift_factors_v());
    let mut coeffs = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let u_side = dil.compress_shift(&(&su[a] * su[b].adjoint()));
            let v_side = &sv[a] * sv[b].adjoint();
            let c = u_side - v_side;
            if c.iter().any(|z| *z != matcore::ZERO) {
                coeffs.push((a, b, c));
            }
        }
    }

    let n = basis.len();
    let pairs: Vec<PairDefect> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let terms = coeffs
                .iter()
                .map(|(a, b, c)| (&factors[i][*a] * factors[j][*b].adjoint(), c.clone()))
                .collect();
            PairDefect {
                x: label(basis_idx[i]),
                y: label(basis_idx[j]),
                defect: KronOp::new(terms).norm(),
                predicted: matcore::op_norm(&(&q_top * (&pis[i] * pis[j].adjoint()) * &q_top)),
            }
        })
        .collect();

    let defect = pairs.iter().map(|p| p.defect).fold(0.0, f64::max);
    let formula_gap = pairs.iter().map(|p| (p.defect - p.predicted).abs()).fold(0.0, f64::max);

    let mut covariance_residual = 0.0f64;
    for unit in algebra.matrix_units().into_iter().filter(|u| katsura.contains(u.block)) {
        let a = algebra.unit(unit);
        let mut acc = -rep.pi0(&a)?;
        for b in &basis {
            acc += rep.pi1(&c.left_mul(&a, b)?)? * rep.pi1(b)?.adjoint();
        }
        covariance_residual = covariance_residual.max(matcore::op_norm(&acc));
    }

    Ok(CertificateReport {
        depth,
        shift_dim,
        tol: tol.value(),
        defect,
        agreement_on_s: agreement,
        verdict: tol.is_small(defect),
        formula_gap,
        covariance_residual,
        pairs,
    })
}

/// Unital completely positive map in Stinespring form
/// `φ(a) = W* (I_r ⊗ a) W` with `W : C^m → C^{d·r}` an isometry.
#[derive(Debug, Clone)]
pub struct StinespringMap {
    input_dim: usize,
    multiplicity: usize,
    isometry: CMatrix,
}

impl StinespringMap {
    pub fn new(input_dim: usize, multiplicity: usize, isometry: CMatrix, tol: Tol) -> Result<Self> {
        if isometry.nrows() != input_dim * multiplicity {
            return Err(Error::Shape(format!(
                "isometry has {} rows, expected {}",
                isometry.nrows(),
                input_dim * multiplicity
            )));
        }
        let residual = matcore::op_norm(&(isometry.adjoint() * &isometry - matcore::identity(isometry.ncols())));
        if !tol.is_small(residual) {
            return Err(Error::NotIsometry { residual });
        }
        Ok(Self { input_dim, multiplicity, isometry })
    }

    /// The identity map on `M_d`, a *-homomorphism.
    pub fn identity(d: usize) -> Self {
        Self { input_dim: d, multiplicity: 1, isometry: matcore::identity(d) }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.input_dim, self.input_dim) {
            return Err(Error::Shape(format!("φ expects {0}x{0} input, got {1:?}", self.input_dim, a.shape())));
        }
        let rho = matcore::kron(&matcore::identity(self.multiplicity), a);
        Ok(self.isometry.adjoint() * rho * &self.isometry)
    }
}

/// `φ(ab*) - φ(a)φ(b)*`.
pub fn schwarz_defect(phi: &StinespringMap, a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(phi.apply(&(a * b.adjoint()))? - phi.apply(a)? * phi.apply(b)?.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockPositivity {
    /// Whether `[[I, C*], [C, M]]` is positive, with `C = [A; B]`.
    pub block_positive: bool,
    /// Whether `M - CC*` is positive.
    pub schur_positive: bool,
    pub block_min_eigenvalue: f64,
    pub schur_min_eigenvalue: f64,
}

impl BlockPositivity {
    pub fn agree(&self) -> bool {
        self.block_positive == self.schur_positive
    }
}

/// Decides positivity of `[[I, C*], [C, M]]` for the stacked rows `C = [A; B]`,
/// both directly and through the Schur complement `M - CC*`.
pub fn block_positivity(a_row: &CMatrix, b_row: &CMatrix, m_block: &CMatrix, tol: Tol) -> Result<BlockPositivity> {
    if a_row.shape() != b_row.shape() {
        return Err(Error::Shape(format!("rows have shapes {:?} and {:?}", a_row.shape(), b_row.shape())));
    }
    let (p, q) = a_row.shape();
    if m_block.shape() != (2 * p, 2 * p) {
        return Err(Error::Shape(format!("M must be {0}x{0}, got {1:?}", 2 * p, m_block.shape())));
    }
    let c = matcore::vstack(&[a_row.clone(), b_row.clone()], q)?;
    let full = matcore::block2x2(&matcore::identity(q), &c.adjoint(), &c, m_block)?;
    let schur = m_block - &c * c.adjoint();
    let block_min = matcore::min_eigenvalue(&full, tol)?.unwrap_or(0.0);
    let schur_min = matcore::min_eigenvalue(&schur, tol)?.unwrap_or(0.0);
    Ok(BlockPositivity {
        block_positive: block_min >= -tol.value(),
        schur_positive: schur_min >= -tol.value(),
        block_min_eigenvalue: block_min,
        schur_min_eigenvalue: schur_min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBound {
    /// `‖φ(AA*) - φ(A)φ(A)*‖`.
    pub corner: f64,
    /// `‖φ(AB*) - φ(A)φ(B)*‖²`.
    pub lhs: f64,
    /// `eps · ‖φ(BB*) - φ(B)φ(B)*‖`.
    pub middle: f64,
    /// `2 eps ‖BB*‖`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `‖φ(AB*) - φ(A)φ(B)*‖² ≤ eps‖φ(BB*) - φ(B)φ(B)*‖ ≤ 2 eps ‖BB*‖` for
/// rows `A = (α_k)`, `B = (β_k)` of square matrices, given the corner bound
/// `‖φ(AA*) - φ(A)φ(A)*‖ ≤ eps`. `slack` absorbs rounding in both comparisons.
pub fn epsilon_bound_check(
    phi: &StinespringMap,
    a_elems: &[CMatrix],
    b_elems: &[CMatrix],
    eps: f64,
    slack: Tol,
) -> Result<EpsilonBound> {
    if a_elems.len() != b_elems.len() {
        return Err(Error::Shape(format!("rows of lengths {} and {}", a_elems.len(), b_elems.len())));
    }
    let d = phi.input_dim();
    let m = phi.output_dim();
    let defect = |xs: &[CMatrix], ys: &[CMatrix]| -> Result<CMatrix> {
        let mut prod = matcore::zeros(d, d);
        let mut split = matcore::zeros(m, m);
        for (x, y) in xs.iter().zip(ys) {
            prod += x * y.adjoint();
            split += phi.apply(x)? * phi.apply(y)?.adjoint();
        }
        Ok(phi.apply(&prod)? - split)
    };
    let corner = matcore::op_norm(&defect(a_elems, a_elems)?);
    if corner > eps + slack.value() {
        return Err(Error::CornerHypothesis { corner, eps });
    }
    let off = matcore::op_norm(&defect(a_elems, b_elems)?);
    let lhs = off * off;
    let middle = eps * matcore::op_norm(&defect(b_elems, b_elems)?);
    let mut bb = matcore::zeros(d, d);
    for b in b_elems {
        bb += b * b.adjoint();
    }
    let rhs = 2.0 * eps * matcore::op_norm(&bb);
    let holds = lhs <= middle + slack.value() && middle <= rhs + slack.value();
    Ok(EpsilonBound { corner, lhs, middle, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::{MatrixUnit, MultiMatrixAlgebra};
    use crate::matcore::c64;

    fn diag_example() -> Correspondence {
        let a = MultiMatrixAlgebra::new(vec![1]).unwrap();
        Correspondence::from_multiplicities(&a, &[2], &[vec![1]]).unwrap()
    }

    #[test]
    fn fock_of_scalars_is_truncated_shift() {
        let a = MultiMatrixAlgebra::new(vec![1]).unwrap();
        let c = Correspondence::identity(&a);
        let rep = fock_rep(&c, 3, Tol::DEFAULT).unwrap();
        assert_eq!(rep.hilbert_dim(), 4);
        let one = c.module().basis()[0].clone();
        assert!(matcore::max_abs(&(rep.pi1(&one).unwrap() - unilateral_shift(4))) < 1e-14);
    }

    #[test]
    fn depth_zero_rejected() {
        assert!(fock_rep(&diag_example(), 0, Tol::DEFAULT).is_err());
    }

    #[test]
    fn dilation_extremes() {
        let a = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let c = Correspondence::from_multiplicities(&a, &[3, 1], &[vec![1, 1], vec![0, 1]]).unwrap();
        let rep = fock_rep(&c, 2, Tol::DEFAULT).unwrap();
        let x = c.module().basis()[2].clone();
        let pi = rep.pi1(&x).unwrap();

        let full = shift_dilation(&rep, &a.full_ideal(), 3, Tol::DEFAULT).unwrap();
        assert!(matcore::max_abs(&(full.p() - matcore::identity(rep.hilbert_dim()))) < 1e-14);
        let expected = KronOp::simple(pi.clone(), matcore::identity(3));
        assert!(full.tau1_v(&x).unwrap().sub(&expected).norm() < 1e-14);

        let none = shift_dilation(&rep, &a.zero_ideal(), 3, Tol::DEFAULT).unwrap();
        assert!(matcore::max_abs(none.p()) == 0.0);
        let expected = KronOp::simple(pi, unilateral_shift(3));
        assert!(none.tau1_v(&x).unwrap().sub(&expected).norm() < 1e-14);

        assert!(shift_dilation(&rep, &a.full_ideal(), 1, Tol::DEFAULT).is_err());
    }

    #[test]
    fn degenerate_example_has_q_leak() {
        let c = diag_example();
        let rep = fock_rep(&c, 1, Tol::DEFAULT).unwrap();
        let dil = shift_dilation(&rep, &c.katsura_ideal(Tol::DEFAULT), 4, Tol::DEFAULT).unwrap();
        let e2 = c.module().basis()[1].clone();
        let pi = rep.pi1(&e2).unwrap();
        assert!(matcore::op_norm(&(dil.p() * &pi - &pi)) > 0.5);
        assert!(matcore::op_norm(&(dil.q() * &pi)) > 0.5);
    }

    #[test]
    fn kron_norm_matches_dense() {
        let b = CMatrix::from_fn(3, 3, |i, j| c64((i + 2 * j) as f64, i as f64 - j as f64));
        let s = unilateral_shift(4);
        let op = KronOp::new(vec![(b.clone(), s.clone()), (b.adjoint(), s.adjoint() * &s)]);
        assert!((op.norm() - matcore::op_norm(&op.materialize())).abs() < 1e-10);
    }

    #[test]
    fn certificate_extremes() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let r = certificate(&Correspondence::identity(&a), 2, 4, Tol::DEFAULT).unwrap();
        assert!(r.verdict && r.defect == 0.0);

        let r = certificate(&diag_example(), 2, 4, Tol::DEFAULT).unwrap();
        assert!(!r.verdict);
        let worst = r.pairs.iter().max_by(|a, b| a.defect.total_cmp(&b.defect)).unwrap();
        assert_eq!((worst.x, worst.y), ([0, 1, 0], [0, 1, 0]));
        assert!((worst.defect - 1.0).abs() < 1e-10);
        assert!(r.formula_gap < 1e-10);
    }

    #[test]
    fn schwarz_examples() {
        let id = StinespringMap::identity(2);
        let a = CMatrix::from_fn(2, 2, |i, j| c64(i as f64, j as f64));
        assert!(matcore::max_abs(&schwarz_defect(&id, &a, &a.adjoint()).unwrap()) < 1e-14);

        let w = CMatrix::from_column_slice(2, 1, &[matcore::ONE, matcore::ZERO]);
        let phi = StinespringMap::new(2, 1, w, Tol::DEFAULT).unwrap();
        let nil = CMatrix::from_row_slice(2, 2, &[matcore::ZERO, matcore::ONE, matcore::ZERO, matcore::ZERO]);
        let d = schwarz_defect(&phi, &nil, &nil).unwrap();
        assert!((matcore::op_norm(&d) - 1.0).abs() < 1e-14);

        let not_iso = CMatrix::from_column_slice(2, 1, &[matcore::ONE, matcore::ONE]);
        assert!(matches!(StinespringMap::new(2, 1, not_iso, Tol::DEFAULT), Err(Error::NotIsometry { .. })));
    }

    #[test]
    fn block_positivity_examples() {
        let z = matcore::zeros(1, 2);
        let r = block_positivity(&z, &z, &matcore::zeros(2, 2), Tol::DEFAULT).unwrap();
        assert!(r.block_positive && r.schur_positive);
        assert!(block_positivity(&z, &matcore::zeros(2, 2), &matcore::zeros(2, 2), Tol::DEFAULT).is_err());
    }

    #[test]
    fn epsilon_bound_trivial_cases() {
        let id = StinespringMap::identity(2);
        let a = vec![CMatrix::from_fn(2, 2, |i, j| c64(i as f64 - 0.5, j as f64))];
        let b = vec![matcore::zeros(2, 2)];
        let r = epsilon_bound_check(&id, &a, &b, 0.0, Tol::new(1e-9).unwrap()).unwrap();
        assert!(r.holds && r.lhs < 1e-20 && r.rhs == 0.0);
        let w = CMatrix::from_column_slice(2, 1, &[matcore::ONE, matcore::ZERO]);
        let phi = StinespringMap::new(2, 1, w, Tol::DEFAULT).unwrap();
        let nil = vec![CMatrix::from_row_slice(2, 2, &[matcore::ZERO, matcore::ONE, matcore::ZERO, matcore::ZERO])];
        assert!(matches!(
            epsilon_bound_check(&phi, &nil, &nil, 0.1, Tol::new(1e-9).unwrap()),
            Err(Error::CornerHypothesis { .. })
        ));
    }

    #[test]
    fn unit_images_commute_with_p() {
        let a = MultiMatrixAlgebra::new(vec![1, 1]).unwrap();
        let c = Correspondence::from_multiplicities(&a, &[2, 1], &[vec![1, 0], vec![0, 0]]).unwrap();
        let rep = fock_rep(&c, 2, Tol::DEFAULT).unwrap();
        let dil = shift_dilation(&rep, &c.katsura_ideal(Tol::DEFAULT), 2, Tol::DEFAULT).unwrap();
        let e = rep.pi0(&a.unit(MatrixUnit { block: 1, row: 0, col: 0 })).unwrap();
        assert!(matcore::op_norm(&(dil.p() * &e - &e * dil.p())) < 1e-14);
    }
}
