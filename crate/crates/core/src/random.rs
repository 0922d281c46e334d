//! Seeded random matrices and states for restarts and property tests.

use crate::qmat::ComplexMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random density matrix `G G† / Tr(G G†)` with `G` of shape `d x rank`.
pub fn random_density(rng: &mut Rng, d: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

/// Haar-distributed unit vector.
pub fn random_pure(rng: &mut Rng, d: usize) -> Vec<C64> {
    let g = ginibre(rng, d, 1);
    let n = g.frobenius_norm();
    g.data().iter().map(|z| z / n).collect()
}

/// Isometry with orthonormal columns (`rows >= cols`), Gram–Schmidt on a Ginibre matrix.
pub fn random_isometry(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    orthonormalize_columns(&ginibre(rng, rows, cols))
}

/// Haar-like unitary.
pub fn random_unitary(rng: &mut Rng, d: usize) -> ComplexMatrix {
    random_isometry(rng, d, d)
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian(rng: &mut Rng, d: usize) -> ComplexMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Modified Gram–Schmidt on the columns; columns must be linearly independent.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for u in &q {
                let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 1e-12, "columns are linearly dependent");
        q.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}
