//! Hermitian eigendecomposition (cyclic Jacobi) and functions of psd matrices.

use super::matrix::{re, Matrix, C64};
use super::LinalgError;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column k belongs to `values[k]`.
    pub vectors: Matrix,
}

impl HermitianEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out.with_field(v.field()).hermitian_part()
    }
}

/// Applies the 2×2 unitary `g` to columns (p,q) from the right.
pub(crate) fn rot_cols(a: &mut Matrix, p: usize, q: usize, g: [[C64; 2]; 2]) {
    for i in 0..a.rows() {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * g[0][0] + y * g[1][0];
        a[(i, q)] = x * g[0][1] + y * g[1][1];
    }
}

/// Applies `g*` to rows (p,q) from the left.
pub(crate) fn rot_rows_adj(a: &mut Matrix, p: usize, q: usize, g: [[C64; 2]; 2]) {
    for j in 0..a.cols() {
        let x = a[(p, j)];
        let y = a[(q, j)];
        a[(p, j)] = g[0][0].conj() * x + g[1][0].conj() * y;
        a[(q, j)] = g[0][1].conj() * x + g[1][1].conj() * y;
    }
}

fn jacobi_eig(a: &Matrix) -> HermitianEig {
    let n = a.rows();
    let mut h = a.hermitian_part();
    let mut v = Matrix::identity(n).with_field(a.field());
    let scale = h.norm_fro();
    if scale == 0.0 {
        return HermitianEig { values: vec![0.0; n], vectors: v };
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 0.5 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = h[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    h[(p, q)] = re(0.0);
                    h[(q, p)] = re(0.0);
                    continue;
                }
                let ph = (apq / g).conj();
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let rot = [[re(cs), re(sn)], [-ph * sn, ph * cs]];
                rot_cols(&mut h, p, q, rot);
                rot_rows_adj(&mut h, p, q, rot);
                h[(p, q)] = re(0.0);
                h[(q, p)] = re(0.0);
                h[(p, p)] = re(h[(p, p)].re);
                h[(q, q)] = re(h[(q, q)].re);
                rot_cols(&mut v, p, q, rot);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(i, i)].re.partial_cmp(&h[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| h[(i, i)].re).collect();
    HermitianEig { values, vectors: v.permute_cols(&order).with_field(a.field()) }
}

/// Eigendecomposition of a Hermitian matrix; rejects inputs with ‖A−A*‖ > 1e-10·‖A‖.
pub fn hermitian_eig(a: &Matrix) -> Result<HermitianEig, LinalgError> {
    hermitian_eig_tol(a, 1e-10)
}

pub fn hermitian_eig_tol(a: &Matrix, rel: f64) -> Result<HermitianEig, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::InvalidInput("hermitian_eig needs a square matrix".into()));
    }
    a.ensure_finite()?;
    let asym = (a - &a.adjoint()).norm_fro();
    let nrm = a.norm_fro();
    if asym > rel * nrm + 1e-300 {
        return Err(LinalgError::NotHermitian { residual: asym });
    }
    Ok(jacobi_eig(a))
}

/// Eigendecomposition of the Hermitian part, without a symmetry check.
pub fn hermitian_part_eig(a: &Matrix) -> HermitianEig {
    jacobi_eig(&a.hermitian_part())
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eig(a: &Matrix) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    hermitian_part_eig(a).min()
}

pub fn max_eig(a: &Matrix) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    hermitian_part_eig(a).max()
}

/// Principal square root of a psd matrix; eigenvalues in [-clip, 0) are clipped to zero.
pub fn psd_sqrt(a: &Matrix, clip: f64) -> Result<Matrix, LinalgError> {
    let e = hermitian_eig(a)?;
    if e.min() < -clip {
        return Err(LinalgError::NotPsd { min_eigenvalue: e.min() });
    }
    Ok(e.apply(|l| l.max(0.0).sqrt()).with_field(a.field()))
}

/// `(A|im A)^{-1/2}` extended by zero on the kernel; eigenvalues ≤ thr count as zero.
pub fn pinv_sqrt(a: &Matrix, thr: f64) -> Matrix {
    hermitian_part_eig(a).apply(|l| if l > thr { 1.0 / l.sqrt() } else { 0.0 }).with_field(a.field())
}

/// `(A|im A)^{-1}` extended by zero on the kernel.
pub fn pinv_hermitian(a: &Matrix, thr: f64) -> Matrix {
    hermitian_part_eig(a).apply(|l| if l.abs() > thr { 1.0 / l } else { 0.0 }).with_field(a.field())
}

/// Unitary `V` diagonalizing every member of a commuting Hermitian family.
///
/// The family is processed in order; each member splits the current groups of
/// columns along its eigenvalue clusters (gap > `rel`·‖member‖).
pub fn simultaneous_diagonalize(family: &[Matrix], rel: f64) -> Matrix {
    let n = family.first().map(|m| m.rows()).unwrap_or(0);
    let field = family.iter().fold(super::Field::Real, |f, m| f.join(m.field()));
    let mut v = Matrix::identity(n).with_field(field);
    let mut groups: Vec<Vec<usize>> = if n == 0 { vec![] } else { vec![(0..n).collect()] };
    for h in family {
        let thr = rel * h.norm_fro().max(1e-300);
        let mut next: Vec<Vec<usize>> = Vec::new();
        for g in &groups {
            let vg = v.permute_cols(g);
            let hg = &(&vg.adjoint() * h) * &vg;
            let e = hermitian_part_eig(&hg);
            let rotated = &vg * &e.vectors;
            for (k, &col) in g.iter().enumerate() {
                for i in 0..n {
                    v[(i, col)] = rotated[(i, k)];
                }
            }
            let mut start = 0;
            for k in 1..=g.len() {
                if k == g.len() || e.values[k] - e.values[k - 1] > thr {
                    next.push(g[start..k].to_vec());
                    start = k;
                }
            }
        }
        groups = next;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_matrix_eigs() {
        let e = hermitian_eig(&Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonhermitian() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&a), Err(LinalgError::NotHermitian { .. })));
    }
}
