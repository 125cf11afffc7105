//! Random instances for the self-test corpus and for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::correspondence::Correspondence;
use crate::cstar::{AlgebraElement, MultiMatrixAlgebra};
use crate::graph::{Multigraph, Multiplicity};
use crate::hilbmod::{HilbertModule, ModuleElement, ModuleOperator};
use crate::matcore::{self, c64, CMatrix, Tol};
use crate::repcert::StinespringMap;

/// Shape of the left action drawn by [`random_correspondence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    /// `λ(1) = id_X`.
    Unital,
    /// `λ(1) ≠ id_X` but `λ ≠ 0`.
    SubUnital,
    /// `λ = 0` on a nonzero module.
    Zero,
}

impl ActionKind {
    pub const ALL: [ActionKind; 3] = [ActionKind::Unital, ActionKind::SubUnital, ActionKind::Zero];
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-ish unitary: eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return matcore::zeros(0, 0);
    }
    matcore::herm_eig(&random_hermitian(rng, n), Tol::DEFAULT)
        .expect("random Hermitian matrices diagonalize")
        .vectors
}

/// Isometry `C^cols → C^rows` (`cols ≤ rows`), obtained by polar decomposition.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows, "an isometry needs cols <= rows");
    loop {
        let g = random_matrix(rng, rows, cols);
        if let Ok(r) = matcore::inv_sqrt(&(g.adjoint() * &g), Tol::new(1e-6).unwrap()) {
            return g * r;
        }
    }
}

pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize, max_size: usize) -> MultiMatrixAlgebra {
    let b = rng.gen_range(1..=max_blocks);
    MultiMatrixAlgebra::new((0..b).map(|_| rng.gen_range(1..=max_size)).collect()).unwrap()
}

pub fn random_algebra_element<R: Rng + ?Sized>(rng: &mut R, algebra: &MultiMatrixAlgebra) -> AlgebraElement {
    algebra
        .element(algebra.block_sizes().iter().map(|&n| random_matrix(rng, n, n)).collect())
        .unwrap()
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, module: &HilbertModule) -> ModuleElement {
    let blocks = (0..module.num_blocks())
        .map(|i| {
            let (m, n) = module.block_shape(i);
            random_matrix(rng, m, n)
        })
        .collect();
    module.element(blocks).unwrap()
}

pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, module: &HilbertModule) -> ModuleOperator {
    module
        .operator(module.multiplicities().iter().map(|&m| random_matrix(rng, m, m)).collect())
        .unwrap()
}

/// Random correspondence with at most 3 algebra blocks of size at most 3 and
/// module multiplicities at most 4. The left action is built from a
/// multiplicity matrix and then rotated by a random unitary on each block.
pub fn random_correspondence<R: Rng + ?Sized>(rng: &mut R, kind: ActionKind) -> Correspondence {
    const MAX_MULT: usize = 4;
    loop {
        let algebra = random_algebra(rng, 3, 3);
        let b = algebra.num_blocks();
        let mut c = vec![vec![0usize; b]; b];
        let mut mults = vec![0usize; b];
        if kind != ActionKind::Zero {
            for i in 0..b {
                let mut used = 0;
                let mut order: Vec<usize> = (0..b).collect();
                order.shuffle(rng);
                for j in order {
                    let n = algebra.block_size(j);
                    let room = (MAX_MULT - used) / n;
                    let k = rng.gen_range(0..=room.min(2));
                    c[i][j] = k;
                    used += k * n;
                }
                mults[i] = used;
            }
        }
        match kind {
            ActionKind::Unital => {}
            ActionKind::SubUnital => {
                if c.iter().all(|row| row.iter().all(|&k| k == 0)) {
                    continue;
                }
                let open: Vec<usize> = (0..b).filter(|&i| mults[i] < MAX_MULT).collect();
                let Some(&i) = open.choose(rng) else { continue };
                mults[i] += rng.gen_range(1..=MAX_MULT - mults[i]);
            }
            ActionKind::Zero => {
                for m in mults.iter_mut() {
                    *m = rng.gen_range(0..=MAX_MULT);
                }
                if mults.iter().all(|&m| m == 0) {
                    continue;
                }
            }
        }
        let base = Correspondence::from_multiplicities(&algebra, &mults, &c).expect("sampled within bounds");
        let unitaries: Vec<CMatrix> = mults.iter().map(|&m| random_unitary(rng, m)).collect();
        return base.conjugated(&unitaries).expect("one unitary per block");
    }
}

/// A module together with `k ∈ 1..=6` random generators that generate it.
pub fn random_generated_module<R: Rng + ?Sized>(rng: &mut R) -> (HilbertModule, Vec<ModuleElement>) {
    let k = rng.gen_range(1..=6);
    let algebra = random_algebra(rng, 3, 3);
    let mults = algebra
        .block_sizes()
        .iter()
        .map(|&n| rng.gen_range(0..=(k * n).min(4)))
        .collect();
    let module = HilbertModule::new(algebra, mults).unwrap();
    let gens = (0..k).map(|_| random_element(rng, &module)).collect();
    (module, gens)
}

/// Stinespring map `M_d → M_m` with random isometry and multiplicity `r`.
pub fn random_stinespring<R: Rng + ?Sized>(rng: &mut R, d: usize, r: usize, m: usize) -> StinespringMap {
    let w = random_isometry(rng, d * r, m);
    StinespringMap::new(d, r, w, Tol::DEFAULT).expect("polar factor is an isometry")
}

/// Random finite multigraph on `n` vertices `v0..`, with multiplicities below `max_mult`.
pub fn random_multigraph<R: Rng + ?Sized>(rng: &mut R, n: usize, max_mult: u64) -> Multigraph {
    let mut g = Multigraph::new();
    for i in 0..n {
        g.add_vertex(format!("v{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.4) {
                g.set_edges(format!("v{i}"), format!("v{j}"), Multiplicity::Finite(rng.gen_range(1..=max_mult)));
            }
        }
    }
    g
}
