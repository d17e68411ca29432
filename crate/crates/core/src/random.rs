//! Seeded random matrices for search initialization and test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::{orthonormal_factor, Matrix, Subspace, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase of `R` removed).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    isometry(rng, n, n)
}

/// `rows × cols` matrix with orthonormal columns, `rows ≥ cols`.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    orthonormal_factor(&gaussian_matrix(rng, rows, cols))
}

/// Random subspace of the requested dimension (capped by the ambient dimension).
pub fn subspace<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    dim: usize,
    tol: f64,
) -> Subspace {
    let gens: Vec<Matrix> = (0..dim.min(rows * cols))
        .map(|_| gaussian_matrix(rng, rows, cols))
        .collect();
    Subspace::span(rows, cols, gens.iter(), tol).expect("generators share a shape")
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let v = gaussian_matrix(rng, n, 1);
    let norm = v.norm();
    v.unscale(norm)
}
