//! One-sided Jacobi SVD and the rank-revealing helpers built on it.

use super::matrix::{re, Matrix, Tolerance};
use super::qr::orthonormal_complement;
use super::LinalgError;

#[derive(Debug, Clone)]
pub struct Svd {
    /// m×m unitary.
    pub u: Matrix,
    /// min(m,n) singular values, descending.
    pub sigma: Vec<f64>,
    /// n×n unitary.
    pub v: Matrix,
}

impl Svd {
    /// The m×n matrix Σ.
    pub fn sigma_matrix(&self) -> Matrix {
        let mut s = Matrix::zeros(self.u.cols(), self.v.cols());
        for (i, &x) in self.sigma.iter().enumerate() {
            s[(i, i)] = re(x);
        }
        s
    }

    pub fn reconstruct(&self) -> Matrix {
        &(&self.u * &self.sigma_matrix()) * &self.v.adjoint()
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > threshold).count()
    }
}

/// Jacobi sweeps on the columns of `w` (m×n, m ≥ n). Returns the accumulated right rotations.
fn jacobi_columns(w: &mut Matrix, accumulate: bool) -> Matrix {
    let (m, n) = w.shape();
    let mut v = if accumulate { Matrix::identity(n).with_field(w.field()) } else { Matrix::zeros(0, 0) };
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = re(0.0);
                for i in 0..m {
                    let a = w[(i, p)];
                    let b = w[(i, q)];
                    alpha += a.norm_sqr();
                    beta += b.norm_sqr();
                    gamma += a.conj() * b;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                rotated = true;
                let phase_c = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..m {
                    let a = w[(i, p)];
                    let b = w[(i, q)] * phase_c;
                    w[(i, p)] = a * cs - b * sn;
                    w[(i, q)] = a * sn + b * cs;
                }
                if accumulate {
                    for i in 0..n {
                        let a = v[(i, p)];
                        let b = v[(i, q)] * phase_c;
                        v[(i, p)] = a * cs - b * sn;
                        v[(i, q)] = a * sn + b * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn svd_tall(a: &Matrix) -> Svd {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let v = jacobi_columns(&mut w, true);
    let norms: Vec<f64> = (0..n).map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = v.permute_cols(&order);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cut = smax * f64::EPSILON * (m.max(n) as f64) * 4.0;
    let keep: Vec<usize> = (0..n).filter(|&k| sigma[k] > cut && sigma[k] > f64::MIN_POSITIVE).collect();
    let mut u_keep = Matrix::zeros(m, keep.len()).with_field(a.field());
    for (c, &k) in keep.iter().enumerate() {
        let j = order[k];
        for i in 0..m {
            u_keep[(i, c)] = w[(i, j)] / sigma[k];
        }
    }
    // keep indices form a prefix because sigma is sorted
    let comp = orthonormal_complement(&u_keep);
    let u = Matrix::hstack(&[&u_keep, &comp]).with_field(a.field());
    Svd { u, sigma, v: v.with_field(a.field()) }
}

/// Full singular value decomposition `A = U Σ V*`.
pub fn svd(a: &Matrix) -> Result<Svd, LinalgError> {
    a.ensure_finite()?;
    let (m, n) = a.shape();
    if m >= n {
        Ok(svd_tall(a))
    } else {
        let t = svd_tall(&a.adjoint());
        Ok(Svd { u: t.v, sigma: t.sigma, v: t.u })
    }
}

/// Singular values only, descending.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let mut w = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    jacobi_columns(&mut w, false);
    let (m, n) = w.shape();
    let mut s: Vec<f64> = (0..n).map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `max(m,n)·relative·σ_max + absolute`.
pub fn numerical_rank(a: &Matrix, tol: &Tolerance) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = singular_values(a);
    let thr = tol.threshold(a.rows().max(a.cols()), s[0]);
    s.iter().filter(|&&x| x > thr).count()
}

/// Moore-Penrose inverse with truncation at the numerical rank.
pub fn pseudoinverse(a: &Matrix, tol: &Tolerance) -> Matrix {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Matrix::zeros(n, m).with_field(a.field());
    }
    let d = svd(a).expect("finite input");
    let thr = tol.threshold(m.max(n), d.sigma[0]);
    pinv_from_svd(&d, thr, a)
}

/// Pseudoinverse with an explicit absolute singular value cutoff.
pub fn pseudoinverse_abs(a: &Matrix, thr: f64) -> Matrix {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Matrix::zeros(n, m).with_field(a.field());
    }
    let d = svd(a).expect("finite input");
    pinv_from_svd(&d, thr, a)
}

fn pinv_from_svd(d: &Svd, thr: f64, a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let r = d.rank(thr);
    let mut out = Matrix::zeros(n, m);
    for k in 0..r {
        let inv = 1.0 / d.sigma[k];
        for i in 0..n {
            let vik = d.v[(i, k)] * inv;
            for j in 0..m {
                out[(i, j)] += vik * d.u[(j, k)].conj();
            }
        }
    }
    out.with_field(a.field())
}

/// Orthonormal basis of the numerical null space (singular values ≤ thr).
pub fn null_space(a: &Matrix, thr: f64) -> Matrix {
    let n = a.cols();
    if a.rows() == 0 {
        return Matrix::identity(n).with_field(a.field());
    }
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let d = svd(a).expect("finite input");
    let r = d.rank(thr);
    d.v.columns(r, n)
}

/// Orthonormal basis of the numerical range (left singular vectors above thr).
pub fn range_basis(a: &Matrix, thr: f64) -> Matrix {
    let m = a.rows();
    if a.cols() == 0 || m == 0 {
        return Matrix::zeros(m, 0).with_field(a.field());
    }
    let d = svd(a).expect("finite input");
    let r = d.rank(thr);
    d.u.columns(0, r)
}

/// Orthogonal projector onto the numerical range of `a`.
pub fn range_projector(a: &Matrix, thr: f64) -> Matrix {
    let b = range_basis(a, thr);
    &b * &b.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_nilpotent() {
        let s = singular_values(&Matrix::diag_real(&[3.0, 0.0]));
        assert_eq!(s, vec![3.0, 0.0]);
        let n = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let d = svd(&n).unwrap();
        assert!((d.sigma[0] - 1.0).abs() < 1e-15 && d.sigma[1] == 0.0);
        assert!(d.reconstruct().max_diff(&n) < 1e-15);
    }

    #[test]
    fn pinv_rank_one() {
        let a = Matrix::from_rows(&[vec![1.0], vec![1.0]]);
        let p = pseudoinverse(&a, &Tolerance::default());
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-15 && (p[(0, 1)].re - 0.5).abs() < 1e-15);
    }
}
