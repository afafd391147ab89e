//! Complex Schur form via Hessenberg reduction and shifted QR, plus reordering.

use super::eig::{rot_cols, rot_rows_adj};
use super::matrix::{re, Matrix, Tolerance, C64};
use super::LinalgError;

/// Unitary `g` with `g* [x; y] = [r; 0]`.
pub(crate) fn givens(x: C64, y: C64) -> [[C64; 2]; 2] {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return [[re(1.0), re(0.0)], [re(0.0), re(1.0)]];
    }
    [[x / r, -y.conj() / r], [y / r, x.conj() / r]]
}

/// Upper Hessenberg reduction `A = Q H Q*`.
pub fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n).with_field(a.field());
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { re(1.0) } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * norm;
        let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vn2;
        // left: rows k+1.., all columns
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)]).sum::<C64>() * tau;
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vt * s;
            }
        }
        // right: columns k+1.., all rows
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(t, vt)| mat[(i, k + 1 + t)] * vt).sum::<C64>() * tau;
                for (t, vt) in v.iter().enumerate() {
                    mat[(i, k + 1 + t)] -= s * vt.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = re(0.0);
        }
    }
    (q, h)
}

fn wilkinson(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * cc;
    let s = disc.sqrt();
    let l1 = tr + s;
    let l2 = tr - s;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition `A = Q T Q*` with `T` upper triangular.
pub fn schur(a: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::InvalidInput("schur needs a square matrix".into()));
    }
    a.ensure_finite()?;
    let n = a.rows();
    let (mut q, mut h) = hessenberg(a);
    if n <= 1 {
        return Ok((q, h));
    }
    let eps = f64::EPSILON;
    let anorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { anorm } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = re(0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(LinalgError::ConvergenceFailure("complex QR iteration".into()));
        }
        let mu = if iter % 11 == 0 {
            h[(hi, hi)] + re(1.5 * h[(hi, hi - 1)].norm())
        } else if iter % 17 == 0 {
            h[(hi, hi)] + C64::new(0.0, 1.0) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let g = givens(x, y);
            rot_rows_adj(&mut h, k, k + 1, g);
            rot_cols(&mut h, k, k + 1, g);
            rot_cols(&mut q, k, k + 1, g);
            if k > l {
                h[(k + 1, k - 1)] = re(0.0);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = re(0.0);
        }
    }
    Ok((q, h))
}

/// Swaps diagonal entries k and k+1 of upper triangular `t`, updating `q`.
pub fn swap_adjacent(q: &mut Matrix, t: &mut Matrix, k: usize) {
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let g = givens(t[(k, k + 1)], b - a);
    rot_rows_adj(t, k, k + 1, g);
    rot_cols(t, k, k + 1, g);
    rot_cols(q, k, k + 1, g);
    t[(k + 1, k)] = re(0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Stable reordering of an upper Schur form so that diagonal entries with `select` come first.
/// Returns the number selected.
pub fn reorder_front(q: &mut Matrix, t: &mut Matrix, select: impl Fn(C64) -> bool) -> usize {
    let n = t.rows();
    let mut placed = 0;
    for i in 0..n {
        if select(t[(i, i)]) {
            let mut k = i;
            while k > placed {
                swap_adjacent(q, t, k - 1);
                k -= 1;
            }
            placed += 1;
        }
    }
    placed
}

/// Eigenvalues of a square matrix (Schur diagonal order).
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>, LinalgError> {
    let (_, t) = schur(a)?;
    Ok(t.diagonal())
}

fn is_lower(m: &Matrix) -> bool {
    (0..m.rows()).all(|i| (i + 1..m.cols()).all(|j| m[(i, j)].norm() == 0.0))
}

/// Computes unitary `W` and lower triangular `T = W* M W` whose trailing `n_zero`
/// diagonal entries are the ones with modulus ≤ tol·‖M‖. When the trailing block is
/// numerically zero (zero eigenvalue semisimple) it is set to exact zero.
pub fn ordered_schur_zero_trailing(m: &Matrix, tol: &Tolerance) -> Result<(Matrix, Matrix, usize), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::InvalidInput("ordered_schur_zero_trailing needs a square matrix".into()));
    }
    m.ensure_finite()?;
    let n = m.rows();
    let thr = tol.threshold(n, m.norm_fro());
    let is_zero = |z: C64| z.norm() <= thr;

    let (w, mut t, nz) = if is_lower(m) && {
        let d = m.diagonal();
        let first_zero = d.iter().position(|&z| is_zero(z)).unwrap_or(n);
        d[first_zero..].iter().all(|&z| is_zero(z))
    } {
        let nz = m.diagonal().iter().filter(|&&z| is_zero(z)).count();
        (Matrix::identity(n).with_field(m.field()), m.clone(), nz)
    } else {
        let (mut q, mut tu) = schur(m)?;
        let nz = reorder_front(&mut q, &mut tu, is_zero);
        let rev: Vec<usize> = (0..n).rev().collect();
        let t = tu.select(&rev, &rev);
        let w = q.permute_cols(&rev);
        (w, t, nz)
    };
    let lead = n - nz;
    for i in lead..n {
        t[(i, i)] = re(0.0);
    }
    let trailing = t.sub(lead, n, lead, n).norm_fro();
    if nz > 0 && trailing <= thr.max(f64::EPSILON * m.norm_fro() * n as f64 * 10.0) {
        t.zero_block(lead, n, lead, n);
    }
    for i in 0..n {
        for j in i + 1..n {
            t[(i, j)] = re(0.0);
        }
    }
    let tol_im = thr.max(1e-14);
    Ok((w.settle_field(m.field(), tol_im), t.settle_field(m.field(), tol_im), nz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_matrix_eigs() {
        let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn reorder_zero_trailing() {
        let (w, t, nz) = ordered_schur_zero_trailing(&Matrix::diag_real(&[0.0, 3.0]), &Tolerance::default()).unwrap();
        assert_eq!(nz, 1);
        assert!(t.max_diff(&Matrix::diag_real(&[3.0, 0.0])) < 1e-14);
        assert!((&(&w.adjoint() * &Matrix::diag_real(&[0.0, 3.0])) * &w).max_diff(&t) < 1e-14);
    }
}
