//! Dense linear algebra over the real or complex field.

mod csd;
mod eig;
mod matrix;
mod qr;
mod random;
mod schur;
mod svd;

pub use csd::{cs_decomposition, Csd};
pub use eig::{
    hermitian_eig, hermitian_eig_tol, hermitian_part_eig, max_eig, min_eig, pinv_hermitian, pinv_sqrt, psd_sqrt,
    simultaneous_diagonalize, HermitianEig,
};
pub use matrix::{c, re, Field, Matrix, Tolerance, C64};
pub use qr::{complete_unitary, householder_qr, inverse, orthonormal_complement, orthonormalize, ql, solve, Lu};
pub use random::{random_invertible, random_matrix, random_psd, random_skew, random_unitary};
pub use schur::{eigenvalues, hessenberg, ordered_schur_zero_trailing, reorder_front, schur, swap_adjacent};
pub use svd::{
    null_space, numerical_rank, pseudoinverse, pseudoinverse_abs, range_basis, range_projector, singular_values, svd,
    Svd,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("stacked columns are not orthonormal")]
    ColumnsNotOrthonormal,
    #[error("no convergence: {0}")]
    ConvergenceFailure(String),
}
