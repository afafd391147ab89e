//! Householder QR/QL, LU solves, orthonormal completion.

use super::matrix::{re, Matrix, C64};
use super::LinalgError;

/// Reflector `H = I - tau v v*` with `v[0] = 1` mapping `x` to `beta e1`.
struct Reflector {
    v: Vec<C64>,
    tau: f64,
}

fn make_reflector(x: &[C64]) -> Option<Reflector> {
    let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if tail == 0.0 {
        return None;
    }
    let norm = (tail + x[0].norm_sqr()).sqrt();
    let x0 = x[0];
    let phase = if x0.norm() == 0.0 { re(1.0) } else { x0 / x0.norm() };
    let alpha = -phase * norm;
    let mut v: Vec<C64> = x.to_vec();
    v[0] -= alpha;
    let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vn2 == 0.0 {
        return None;
    }
    Some(Reflector { tau: 2.0 / vn2, v })
}

/// Applies `H` from the left to rows `r0..` and columns `c0..c1` of `a`.
fn apply_left(a: &mut Matrix, h: &Reflector, r0: usize, c0: usize, c1: usize) {
    for j in c0..c1 {
        let mut s = re(0.0);
        for (k, vk) in h.v.iter().enumerate() {
            s += vk.conj() * a[(r0 + k, j)];
        }
        let s = s * h.tau;
        if s.norm() == 0.0 {
            continue;
        }
        for (k, vk) in h.v.iter().enumerate() {
            a[(r0 + k, j)] -= vk * s;
        }
    }
}

/// Applies `H` from the right to columns `c0..` and rows `r0..r1` of `a`.
fn apply_right(a: &mut Matrix, h: &Reflector, c0: usize, r0: usize, r1: usize) {
    for i in r0..r1 {
        let mut s = re(0.0);
        for (k, vk) in h.v.iter().enumerate() {
            s += a[(i, c0 + k)] * vk;
        }
        let s = s * h.tau;
        if s.norm() == 0.0 {
            continue;
        }
        for (k, vk) in h.v.iter().enumerate() {
            a[(i, c0 + k)] -= s * vk.conj();
        }
    }
}

/// Full QR factorization `A = Q R` with `Q` unitary (m×m) and `R` upper triangular (m×n).
pub fn householder_qr(a: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    a.ensure_finite()?;
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut q = Matrix::identity(m).with_field(a.field());
    for k in 0..n.min(m.saturating_sub(1)) {
        let x: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        if let Some(h) = make_reflector(&x) {
            apply_left(&mut r, &h, k, k, n);
            apply_right(&mut q, &h, k, 0, m);
            for i in k + 1..m {
                r[(i, k)] = re(0.0);
            }
        }
    }
    Ok((q, r))
}

/// Full QL factorization `A = Q L` with `L` lower triangular, for square `A`.
pub fn ql(a: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    let n = a.rows();
    let rev: Vec<usize> = (0..n).rev().collect();
    let revc: Vec<usize> = (0..a.cols()).rev().collect();
    let flipped = a.select(&rev, &revc);
    let (q, r) = householder_qr(&flipped)?;
    Ok((q.select(&rev, &rev), r.select(&rev, &revc)))
}

/// Orthonormal basis of the orthogonal complement of the column span of `u`,
/// assumed to have orthonormal columns.
pub fn orthonormal_complement(u: &Matrix) -> Matrix {
    let (m, r) = u.shape();
    if r == 0 {
        return Matrix::identity(m).with_field(u.field());
    }
    let (q, _) = householder_qr(u).expect("finite input");
    q.columns(r, m)
}

/// Extends orthonormal columns `u` to a full unitary matrix `[u, complement]`.
pub fn complete_unitary(u: &Matrix) -> Matrix {
    let comp = orthonormal_complement(u);
    Matrix::hstack(&[u, &comp])
}

/// Orthonormalizes the columns of `a` by modified Gram-Schmidt with reorthogonalization,
/// dropping columns whose residual falls below `drop_tol` relative to their norm.
pub fn orthonormalize(a: &Matrix, drop_tol: f64) -> Matrix {
    let m = a.rows();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for j in 0..a.cols() {
        let orig = a.col(j);
        let on = orig.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if on == 0.0 {
            continue;
        }
        let mut v = orig;
        for _ in 0..2 {
            for b in &basis {
                let p: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn > drop_tol * on {
            basis.push(v.into_iter().map(|z| z / vn).collect());
        }
    }
    let mut out = Matrix::zeros(m, basis.len()).with_field(a.field());
    for (j, b) in basis.iter().enumerate() {
        for i in 0..m {
            out[(i, j)] = b[i];
        }
    }
    out.with_field(a.field())
}

/// LU factorization with partial pivoting, stored compactly.
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Lu, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::InvalidInput("LU needs a square matrix".into()));
        }
        a.ensure_finite()?;
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            min_pivot = min_pivot.min(pv);
            max_pivot = max_pivot.max(pv);
            if pv == 0.0 {
                return Err(LinalgError::Singular);
            }
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        if n == 0 {
            min_pivot = 1.0;
            max_pivot = 1.0;
        }
        Ok(Lu { lu, perm, min_pivot, max_pivot })
    }

    /// Crude reciprocal conditioning indicator: smallest over largest pivot.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    pub fn solve(&self, b: &Matrix) -> Matrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let mut x = b.permute_rows(&self.perm);
        for j in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        x.with_field(self.lu.field().join(b.field()))
    }
}

/// Solves `A X = B` for square nonsingular `A`.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    Ok(Lu::new(a)?.solve(b))
}

pub fn inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    solve(a, &Matrix::identity(a.rows()).with_field(a.field()))
}
