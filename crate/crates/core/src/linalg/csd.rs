//! CS decomposition of an orthonormal two-block column stack.

use super::matrix::{re, Matrix};
use super::qr::householder_qr;
use super::svd::svd;
use super::LinalgError;

#[derive(Debug, Clone)]
pub struct Csd {
    pub u1: Matrix,
    pub u2: Matrix,
    pub v: Matrix,
    pub c: Vec<f64>,
    pub s: Vec<f64>,
}

/// Computes unitary `U1, U2, V` with `U1 Z1 V = diag(c)`, `U2 Z2 V = diag(s)`, `c, s ≥ 0`.
pub fn cs_decomposition(z1: &Matrix, z2: &Matrix) -> Result<Csd, LinalgError> {
    let n = z1.cols();
    if !z1.is_square() || z2.shape() != (n, n) {
        return Err(LinalgError::InvalidInput("cs_decomposition needs two n×n blocks".into()));
    }
    let z = Matrix::vstack(&[z1, z2]);
    let gram = &z.adjoint() * &z;
    if gram.max_diff(&Matrix::identity(n)) > 1e-10 * (n.max(1) as f64) {
        return Err(LinalgError::ColumnsNotOrthonormal);
    }
    let d = svd(z1)?;
    let c: Vec<f64> = d.sigma.iter().map(|&x| x.min(1.0)).collect();
    let rev: Vec<usize> = (0..n).rev().collect();
    let v = d.v.permute_cols(&rev);
    let c: Vec<f64> = rev.iter().map(|&k| c[k]).collect();
    let u1 = d.u.permute_cols(&rev).adjoint();
    // columns of Z2 V are mutually orthogonal with norms sqrt(1-c²), largest first
    let w = z2 * &v;
    let (q, r) = householder_qr(&w)?;
    let mut q = q;
    let mut s = Vec::with_capacity(n);
    for k in 0..n {
        let rk = r[(k, k)];
        let mag = rk.norm();
        if mag > 0.0 {
            let ph = rk / mag;
            for i in 0..n {
                q[(i, k)] *= ph;
            }
        }
        s.push(mag);
    }
    let back: Vec<usize> = (0..n).rev().collect();
    let field = z1.field().join(z2.field());
    Ok(Csd {
        u1: u1.permute_rows(&back).with_field(field),
        u2: q.permute_cols(&back).adjoint().with_field(field),
        v: v.permute_cols(&back).with_field(field),
        c: back.iter().map(|&k| c[k]).collect(),
        s: back.iter().map(|&k| s[k]).collect(),
    })
}

impl Csd {
    pub fn c_matrix(&self) -> Matrix {
        Matrix::diag(&self.c.iter().map(|&x| re(x)).collect::<Vec<_>>())
    }

    pub fn s_matrix(&self) -> Matrix {
        Matrix::diag(&self.s.iter().map(|&x| re(x)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_split() {
        let h = Matrix::identity(2).scale_real(0.5f64.sqrt());
        let d = cs_decomposition(&h, &h).unwrap();
        for k in 0..2 {
            assert!((d.c[k] - 0.5f64.sqrt()).abs() < 1e-14 && (d.s[k] - 0.5f64.sqrt()).abs() < 1e-14);
        }
        assert!((&(&d.u2 * &h) * &d.v).max_diff(&d.s_matrix()) < 1e-14);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let a = Matrix::identity(2);
        assert!(matches!(cs_decomposition(&a, &a), Err(LinalgError::ColumnsNotOrthonormal)));
    }
}
