//! Seeded random matrices for generators and tests.

use rand::Rng;

use super::matrix::{c, Field, Matrix};
use super::qr::householder_qr;

/// Entries uniform in [-1, 1] (real and imaginary parts independently for complex).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, field: Field) -> Matrix {
    let cx = field == Field::Complex;
    let data = (0..m * n)
        .map(|_| c(rng.gen_range(-1.0..=1.0), if cx { rng.gen_range(-1.0..=1.0) } else { 0.0 }))
        .collect();
    Matrix::try_new(m, n, field, data).expect("finite entries")
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field) -> Matrix {
    householder_qr(&random_matrix(rng, n, n, field)).expect("finite entries").0
}

/// `U diag(d) W` with unitary `U, W` and `d` in [1/2, 2], so the condition number is at most 4.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field) -> Matrix {
    let u = random_unitary(rng, n, field);
    let w = random_unitary(rng, n, field);
    let d: Vec<f64> = (0..n).map(|_| 2f64.powf(rng.gen_range(-1.0..=1.0))).collect();
    &(&u * &Matrix::diag_real(&d)) * &w
}

/// `G G*` with `G` n×rank.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize, field: Field) -> Matrix {
    let g = random_matrix(rng, n, rank, field);
    (&g * &g.adjoint()).hermitian_part()
}

pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, n: usize, field: Field) -> Matrix {
    random_matrix(rng, n, n, field).skew_part()
}
