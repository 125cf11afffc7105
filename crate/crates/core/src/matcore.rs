//! Dense complex matrices and the handful of spectral routines the rest of
//! the crate is built on.
//!
//! Storage is delegated to [`nalgebra::DMatrix`]; this module adds the
//! Hermitian eigendecomposition with descending eigenvalues, positive square
//! roots, the operator norm, and block utilities. Zero-sized matrices are
//! legal everywhere and behave as empty sums.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex dense matrix.
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tolerance policy shared by every numerical comparison in the crate.
///
/// The stored value is an absolute threshold for quantities of unit scale;
/// [`Tol::scaled`] turns it into a relative one for larger operands.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tol(f64);

impl Tol {
    pub const DEFAULT: Tol = Tol(1e-10);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Tol(value))
        } else {
            Err(Error::Invalid(format!("tolerance must be positive and finite, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `tol · max(1, scale)`.
    #[inline]
    pub fn scaled(self, scale: f64) -> f64 {
        self.0 * scale.max(1.0)
    }

    #[inline]
    pub fn is_small(self, x: f64) -> bool {
        x <= self.0
    }

    #[inline]
    pub fn is_small_rel(self, x: f64, scale: f64) -> bool {
        x <= self.scaled(scale)
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol::DEFAULT
    }
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Builds a matrix from row-major entries.
pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<CMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::Shape(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(CMatrix::from_row_slice(rows, cols, entries))
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let mut m = zeros(diag.len(), diag.len());
    for (i, &d) in diag.iter().enumerate() {
        m[(i, i)] = c64(d, 0.0);
    }
    m
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value. Zero for matrices with an empty dimension.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖M - M*‖` measured in Frobenius norm (an upper bound for the operator norm).
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// Eigendecomposition `M = U diag(values) U*` of a Hermitian matrix, with
/// eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        &self.vectors * from_real_diagonal(&self.values) * self.vectors.adjoint()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("expected square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub fn herm_eig(m: &CMatrix, tol: Tol) -> Result<HermEig> {
    check_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermEig { values: Vec::new(), vectors: zeros(0, 0) });
    }
    let asymmetry = hermitian_asymmetry(m);
    if asymmetry > tol.scaled(frobenius(m)) {
        return Err(Error::NotHermitian { asymmetry });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        normalize_phase(col.as_mut_slice());
        vectors.set_column(dst, &col);
    }
    Ok(HermEig { values, vectors })
}

/// Rotates a vector so its largest-magnitude entry is real and positive.
/// Makes eigenvector output reproducible independent of solver phase choices.
fn normalize_phase(v: &mut [Complex64]) {
    let Some(pivot) = v
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(_, z)| z)
    else {
        return;
    };
    let r = pivot.norm();
    if r == 0.0 {
        return;
    }
    let phase = pivot.conj() / r;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Smallest eigenvalue of a Hermitian matrix; `None` for the empty matrix.
pub fn min_eigenvalue(m: &CMatrix, tol: Tol) -> Result<Option<f64>> {
    Ok(herm_eig(m, tol)?.min())
}

/// Whether a Hermitian matrix is positive semidefinite up to `-tol`.
pub fn is_psd(m: &CMatrix, tol: Tol) -> Result<bool> {
    Ok(min_eigenvalue(m, tol)?.is_none_or(|v| v >= -tol.value()))
}

/// Positive square root of a positive semidefinite matrix. Eigenvalues in
/// `[-tol·max(1,‖M‖), 0)` are clamped to zero.
pub fn psd_sqrt(m: &CMatrix, tol: Tol) -> Result<CMatrix> {
    let eig = herm_eig(m, tol)?;
    let scale = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if let Some(min) = eig.min() {
        if min < -tol.scaled(scale) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(&eig.vectors * from_real_diagonal(&roots) * eig.vectors.adjoint())
}

/// Inverse square root of a positive definite matrix. Fails if some
/// eigenvalue is not above `tol·max(1,‖M‖)`, reporting that eigenvalue.
pub fn inv_sqrt(m: &CMatrix, tol: Tol) -> Result<CMatrix> {
    let eig = herm_eig(m, tol)?;
    let scale = eig.max().unwrap_or(0.0).abs();
    if let Some(min) = eig.min() {
        if min <= tol.scaled(scale) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    Ok(&eig.vectors * from_real_diagonal(&roots) * eig.vectors.adjoint())
}

/// Orthonormal basis (as columns) of the range of an orthogonal projection.
pub fn projection_range(p: &CMatrix, tol: Tol) -> Result<CMatrix> {
    let eig = herm_eig(p, tol)?;
    let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
    Ok(eig.vectors.columns(0, rank).into_owned())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal matrix with the given (possibly rectangular) diagonal blocks.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[CMatrix], cols: usize) -> Result<CMatrix> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::Shape(format!("vstack: block has {} columns, expected {cols}", b.ncols())));
        }
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    Ok(out)
}

/// `[[a, b], [c, d]]` from four blocks of compatible shapes.
pub fn block2x2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != b.nrows() || c.nrows() != d.nrows() || a.ncols() != c.ncols() || b.ncols() != d.ncols() {
        return Err(Error::Shape("block2x2: incompatible block shapes".into()));
    }
    let (r0, c0) = a.shape();
    let mut out = zeros(r0 + c.nrows(), c0 + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, c0), b.shape()).copy_from(b);
    out.view_mut((r0, 0), c.shape()).copy_from(c);
    out.view_mut((r0, c0), d.shape()).copy_from(d);
    Ok(out)
}
