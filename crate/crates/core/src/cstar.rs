//! Finite-dimensional C*-algebras `A = M_{n_1} ⊕ … ⊕ M_{n_B}`.
//!
//! Every closed two-sided ideal of such an algebra is the direct sum of some
//! of its blocks, so an [`Ideal`] is just a set of block indices. Indices are
//! zero-based throughout the library; the CLI converts to one-based labels.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix, Tol};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiMatrixAlgebra {
    block_sizes: Vec<usize>,
}

/// Matrix unit `e^{(block)}_{row,col}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MultiMatrixAlgebra {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::Invalid("algebra needs at least one block".into()));
        }
        if block_sizes.contains(&0) {
            return Err(Error::Invalid("algebra block sizes must be positive".into()));
        }
        Ok(Self { block_sizes })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_size(&self, i: usize) -> usize {
        self.block_sizes[i]
    }

    /// Complex dimension `Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|n| n * n).sum()
    }

    /// All matrix units, ordered by block, then row, then column.
    pub fn matrix_units(&self) -> Vec<MatrixUnit> {
        let mut out = Vec::with_capacity(self.dim());
        for (block, &n) in self.block_sizes.iter().enumerate() {
            for row in 0..n {
                for col in 0..n {
                    out.push(MatrixUnit { block, row, col });
                }
            }
        }
        out
    }

    /// Position of `u` in [`matrix_units`](Self::matrix_units).
    pub fn unit_index(&self, u: MatrixUnit) -> usize {
        let offset: usize = self.block_sizes[..u.block].iter().map(|n| n * n).sum();
        offset + u.row * self.block_sizes[u.block] + u.col
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.block_sizes.iter().map(|&n| matcore::zeros(n, n)).collect(),
        }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.block_sizes.iter().map(|&n| matcore::identity(n)).collect(),
        }
    }

    pub fn unit(&self, u: MatrixUnit) -> AlgebraElement {
        let mut a = self.zero();
        a.blocks[u.block][(u.row, u.col)] = matcore::ONE;
        a
    }

    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<AlgebraElement> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::Shape(format!("{} blocks for an algebra with {}", blocks.len(), self.num_blocks())));
        }
        for (i, (b, &n)) in blocks.iter().zip(&self.block_sizes).enumerate() {
            if b.shape() != (n, n) {
                return Err(Error::Shape(format!("block {i} has shape {:?}, expected {n}x{n}", b.shape())));
            }
            if !matcore::is_finite(b) {
                return Err(Error::NonFinite);
            }
        }
        Ok(AlgebraElement { algebra: self.clone(), blocks })
    }

    pub fn full_ideal(&self) -> Ideal {
        Ideal { algebra: self.clone(), members: (0..self.num_blocks()).collect() }
    }

    pub fn zero_ideal(&self) -> Ideal {
        Ideal { algebra: self.clone(), members: BTreeSet::new() }
    }

    pub fn ideal(&self, members: impl IntoIterator<Item = usize>) -> Result<Ideal> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= self.num_blocks()) {
            return Err(Error::OutOfRange { index: bad + 1, len: self.num_blocks() });
        }
        Ok(Ideal { algebra: self.clone(), members })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: MultiMatrixAlgebra,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::Mismatch(format!(
                "algebra {:?} vs {:?}",
                self.algebra.block_sizes, other.algebra.block_sizes
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn adjoint(&self) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b * z).collect() }
    }

    /// C*-norm: the largest operator norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(matcore::op_norm).fold(0.0, f64::max)
    }

    pub fn hermitian_asymmetry(&self) -> f64 {
        self.blocks.iter().map(matcore::hermitian_asymmetry).fold(0.0, f64::max)
    }

    /// Whether the smallest eigenvalue over all blocks is at least `-tol`.
    /// Non-Hermitian input is rejected.
    pub fn is_positive(&self, tol: Tol) -> Result<bool> {
        for b in &self.blocks {
            if !matcore::is_psd(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Blocks on which the element is not (numerically) zero.
    pub fn support(&self, tol: Tol) -> BTreeSet<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !tol.is_small(matcore::max_abs(b)))
            .map(|(i, _)| i)
            .collect()
    }

    /// The ideal generated by this element: the blocks on which it is nonzero.
    pub fn generated_ideal(&self, tol: Tol) -> Ideal {
        Ideal { algebra: self.algebra.clone(), members: self.support(tol) }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                self.$inner(rhs).expect(concat!("AlgebraElement::", stringify!($method), " on mismatched algebras"))
            }
        }
    };
}

forward_binop!(Mul, mul, try_mul);
forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Closed two-sided ideal, given by the blocks it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    algebra: MultiMatrixAlgebra,
    members: BTreeSet<usize>,
}

impl Ideal {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, block: usize) -> bool {
        self.members.contains(&block)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn complement(&self) -> Ideal {
        Ideal {
            algebra: self.algebra.clone(),
            members: (0..self.algebra.num_blocks()).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    /// Identity on member blocks, zero elsewhere.
    pub fn unit(&self) -> AlgebraElement {
        let blocks = self
            .algebra
            .block_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| if self.members.contains(&i) { matcore::identity(n) } else { matcore::zeros(n, n) })
            .collect();
        AlgebraElement { algebra: self.algebra.clone(), blocks }
    }
}

pub fn unit_of_ideal(ideal: &Ideal) -> AlgebraElement {
    ideal.unit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(alg: &MultiMatrixAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
        let blocks = alg
            .block_sizes()
            .iter()
            .map(|&n| CMatrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        alg.element(blocks).unwrap()
    }

    #[test]
    fn algebra_invariants() {
        assert!(MultiMatrixAlgebra::new(vec![]).is_err());
        assert!(MultiMatrixAlgebra::new(vec![2, 0]).is_err());
        let a = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        assert_eq!(a.dim(), 5);
        for (k, u) in a.matrix_units().into_iter().enumerate() {
            assert_eq!(a.unit_index(u), k);
        }
    }

    #[test]
    fn unit_law_and_adjoint_of_product() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(&alg, &mut rng);
        let b = random(&alg, &mut rng);
        assert_eq!(&a * &alg.one(), a);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!((&lhs - &rhs).norm() < 1e-14);
    }

    #[test]
    fn blockwise_product() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(&alg, &mut rng);
        let b = random(&alg, &mut rng);
        let ab = &a * &b;
        assert_eq!(ab.block(0), &(a.block(0) * b.block(0)));
        assert_eq!(ab.block(1), &(a.block(1) * b.block(1)));
    }

    #[test]
    fn mismatched_algebras() {
        let a = MultiMatrixAlgebra::new(vec![2]).unwrap().one();
        let b = MultiMatrixAlgebra::new(vec![1]).unwrap().one();
        assert!(matches!(a.try_mul(&b), Err(Error::Mismatch(_))));
    }

    #[test]
    fn norm_cases() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        assert!((alg.one().norm() - 1.0).abs() < 1e-14);
        let a = alg.element(vec![matcore::identity(2) * c64(2.0, 0.0), matcore::identity(1) * c64(3.0, 0.0)]).unwrap();
        assert!((a.norm() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn c_star_identity() {
        let alg = MultiMatrixAlgebra::new(vec![3, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random(&alg, &mut rng);
            let n = a.norm();
            assert!(((&a.adjoint() * &a).norm() - n * n).abs() <= 1e-10 * n * n);
        }
    }

    #[test]
    fn ideal_units() {
        let alg = MultiMatrixAlgebra::new(vec![2, 3]).unwrap();
        assert_eq!(alg.full_ideal().unit(), alg.one());
        assert_eq!(alg.zero_ideal().unit(), alg.zero());
        let first = alg.ideal([0]).unwrap();
        let u = unit_of_ideal(&first);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random(&alg, &mut rng);
        let a1 = &a * &u;
        assert_eq!(&u * &a1, a1);
        assert_eq!(&a1 * &u, a1);
        assert_eq!((&(&u * &a) * &u).support(Tol::DEFAULT), [0].into_iter().collect());
        assert!(alg.ideal([5]).is_err());
    }

    #[test]
    fn positivity() {
        let alg = MultiMatrixAlgebra::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&alg, &mut rng);
        assert!((&a.adjoint() * &a).is_positive(Tol::DEFAULT).unwrap());
        assert!(!(-&alg.one()).is_positive(Tol::DEFAULT).unwrap());
        let half = c64(0.5, 0.0);
        let p = alg
            .element(vec![
                CMatrix::from_row_slice(2, 2, &[half, half, half, half]),
                matcore::zeros(2, 2),
            ])
            .unwrap();
        assert!((&(&p * &p) - &p).norm() < 1e-15);
        assert!(p.is_positive(Tol::DEFAULT).unwrap());
        assert!(matches!(a.is_positive(Tol::DEFAULT), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn positive_both_ways_means_small() {
        let alg = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let tiny = alg.one().scale(c64(1e-12, 0.0));
        assert!(tiny.is_positive(Tol::DEFAULT).unwrap() && (-&tiny).is_positive(Tol::DEFAULT).unwrap());
        assert!(tiny.norm() <= 1e-10);
    }

    #[test]
    fn generated_ideal_from_support() {
        let alg = MultiMatrixAlgebra::new(vec![1, 2, 1]).unwrap();
        let e = alg.unit(MatrixUnit { block: 1, row: 0, col: 1 });
        assert_eq!(e.generated_ideal(Tol::DEFAULT), alg.ideal([1]).unwrap());
    }
}
