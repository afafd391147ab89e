//! Kronecker invariants, regular parts and regular deflating subspaces of `λE − A`.

mod staircase;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::linalg::{pseudoinverse_abs, reorder_front, Matrix, Tolerance};

pub use staircase::{
    staircase, Block, Cluster, Eigenvalue, FiniteEigenvalue, KroneckerStructure, Partition, Staircase, CLUSTER_REL,
};
pub(crate) use staircase::in_cluster;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KroneckerError {
    #[error("{0:?} is not an eigenvalue of the pencil")]
    NotAnEigenvalue(Eigenvalue),
    #[error("E and A differ in shape")]
    ShapeMismatch,
}

fn check_shapes(e: &Matrix, a: &Matrix) -> Result<(), KroneckerError> {
    if e.shape() != a.shape() {
        return Err(KroneckerError::ShapeMismatch);
    }
    Ok(())
}

/// Kronecker structure only.
pub fn kronecker_structure(e: &Matrix, a: &Matrix, tol: &Tolerance) -> Result<KroneckerStructure, KroneckerError> {
    check_shapes(e, a)?;
    Ok(staircase(e, a, tol).structure)
}

/// All eigenvalues with algebraic multiplicities, `∞` included when present.
pub fn eigenvalues(e: &Matrix, a: &Matrix, tol: &Tolerance) -> Result<Vec<(Eigenvalue, usize)>, KroneckerError> {
    Ok(kronecker_structure(e, a, tol)?.eigenvalues())
}

/// Square regular sub-pencil carrying every eigenvalue, with its position in the staircase.
#[derive(Debug, Clone)]
pub struct RegularPart {
    pub e: Matrix,
    pub a: Matrix,
    /// Staircase transforms: `left · (λE − A) · right` is block upper triangular.
    pub left: Matrix,
    pub right: Matrix,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

pub fn regular_part(e: &Matrix, a: &Matrix, tol: &Tolerance) -> Result<RegularPart, KroneckerError> {
    check_shapes(e, a)?;
    let st = staircase(e, a, tol);
    let b = &st.blocks;
    let rows = b.zero.rows.start..b.infinite.rows.end;
    let cols = b.zero.cols.start..b.infinite.cols.end;
    Ok(RegularPart {
        e: st.e.sub(rows.start, rows.end, cols.start, cols.end),
        a: st.a.sub(rows.start, rows.end, cols.start, cols.end),
        left: st.left,
        right: st.right,
        rows,
        cols,
    })
}

/// Regular deflating subspace together with the block diagonal split certifying it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeflatingBasis {
    pub eigenvalue: Eigenvalue,
    /// m×k; the first k columns of `x`.
    pub v: Matrix,
    /// `y (λE − A) x = diag(λ e_reg − a_reg, λ e_rest − a_rest)` up to roundoff.
    pub x: Matrix,
    pub y: Matrix,
    pub e_reg: Matrix,
    pub a_reg: Matrix,
    pub e_rest: Matrix,
    pub a_rest: Matrix,
}

impl DeflatingBasis {
    pub fn dim(&self) -> usize {
        self.v.cols()
    }

    /// `max(‖y E x − diag‖, ‖y A x − diag‖)`.
    pub fn certificate_residual(&self, e: &Matrix, a: &Matrix) -> f64 {
        let de = Matrix::block_diag(&[&self.e_reg, &self.e_rest]);
        let da = Matrix::block_diag(&[&self.a_reg, &self.a_rest]);
        let re = (&(&self.y * e) * &self.x).max_diff(&de);
        let ra = (&(&self.y * a) * &self.x).max_diff(&da);
        re.max(ra)
    }
}

/// Solves `C R + L G = −D` simultaneously for the E and A parts (least squares, minimum norm).
pub(crate) fn sylvester(c: (&Matrix, &Matrix), g: (&Matrix, &Matrix), d: (&Matrix, &Matrix), thr: f64) -> (Matrix, Matrix) {
    let (p, q) = d.0.shape();
    let rc = c.0.cols();
    let rg = g.0.rows();
    let nr = rc * q;
    let nl = p * rg;
    if p * q == 0 || nr + nl == 0 {
        return (Matrix::zeros(rc, q), Matrix::zeros(p, rg));
    }
    // unknown ordering: R(i,j) -> i + j*rc ; L(i,j) -> nr + i + j*p ; equation (i,j) -> i + j*p (+ p*q for A)
    let mut k = Matrix::zeros(2 * p * q, nr + nl);
    let mut rhs = Matrix::zeros(2 * p * q, 1);
    for (part, (cm, gm, dm)) in [(c.0, g.0, d.0), (c.1, g.1, d.1)].into_iter().enumerate() {
        let off = part * p * q;
        for j in 0..q {
            for i in 0..p {
                let row = off + i + j * p;
                rhs[(row, 0)] = -dm[(i, j)];
                for t in 0..rc {
                    k[(row, t + j * rc)] += cm[(i, t)];
                }
                for t in 0..rg {
                    k[(row, nr + i + t * p)] += gm[(t, j)];
                }
            }
        }
    }
    let sol = &pseudoinverse_abs(&k, thr) * &rhs;
    let mut r = Matrix::zeros(rc, q);
    let mut l = Matrix::zeros(p, rg);
    for j in 0..q {
        for i in 0..rc {
            r[(i, j)] = sol[(i + j * rc, 0)];
        }
    }
    for j in 0..rg {
        for i in 0..p {
            l[(i, j)] = sol[(nr + i + j * p, 0)];
        }
    }
    (r, l)
}

fn sub(m: &Matrix, r: &Range<usize>, c: &Range<usize>) -> Matrix {
    m.sub(r.start, r.end, c.start, c.end)
}

/// Computes a regular deflating subspace of `λE − A` for `λ0` (finite or `∞`).
pub fn regular_deflating_basis(
    e: &Matrix,
    a: &Matrix,
    lambda0: Eigenvalue,
    tol: &Tolerance,
) -> Result<DeflatingBasis, KroneckerError> {
    check_shapes(e, a)?;
    let st = staircase(e, a, tol);
    regular_deflating_basis_from(&st, lambda0)
}

/// As [`regular_deflating_basis`], reusing a computed staircase.
pub fn regular_deflating_basis_from(st: &Staircase, lambda0: Eigenvalue) -> Result<DeflatingBasis, KroneckerError> {
    let (n, m) = st.e.shape();
    let b = &st.blocks;
    let mut ee = st.e.clone();
    let mut aa = st.a.clone();
    let mut s = st.left.clone();
    let mut t = st.right.clone();
    let zero_tol = st.cluster_tol.max(st.threshold);
    let (rc, cc) = match lambda0 {
        Eigenvalue::Infinite => (b.infinite.rows.clone(), b.infinite.cols.clone()),
        Eigenvalue::Finite(z) if z.norm() <= zero_tol => (b.zero.rows.clone(), b.zero.cols.clone()),
        Eigenvalue::Finite(z) => {
            let cl = st
                .clusters
                .iter()
                .find(|c| in_cluster(c, z, st.cluster_tol) || (c.value - z).norm() <= st.cluster_tol)
                .ok_or(KroneckerError::NotAnEigenvalue(lambda0))?;
            let fr = b.finite.rows.clone();
            let fc = b.finite.cols.clone();
            let mut tf = sub(&aa, &fr, &fc);
            let kf = tf.rows();
            let mut q = Matrix::identity(kf).with_field(tf.field());
            let k = reorder_front(&mut q, &mut tf, |w| in_cluster(cl, w, st.cluster_tol));
            // unitary similarity on the F block keeps E_f = I
            let qh = q.adjoint();
            for mtx in [&mut ee, &mut aa, &mut s] {
                let blk = mtx.sub(fr.start, fr.end, 0, mtx.cols());
                mtx.set_block(fr.start, 0, &(&qh * &blk));
            }
            for mtx in [&mut ee, &mut aa, &mut t] {
                let blk = mtx.sub(0, mtx.rows(), fc.start, fc.end);
                mtx.set_block(0, fc.start, &(&blk * &q));
            }
            ee.set_block(fr.start, fc.start, &Matrix::identity(kf));
            aa.set_block(fr.start, fc.start, &tf);
            (fr.start..fr.start + k, fc.start..fc.start + k)
        }
    };
    if rc.is_empty() {
        return Err(KroneckerError::NotAnEigenvalue(lambda0));
    }
    let rb = 0..rc.start;
    let cb = 0..cc.start;
    let ra = rc.end..n;
    let ca = cc.end..m;
    let thr = st.threshold;

    // decouple (c, after)
    let (rr, ll) = sylvester(
        (&sub(&ee, &rc, &cc), &sub(&aa, &rc, &cc)),
        (&sub(&ee, &ra, &ca), &sub(&aa, &ra, &ca)),
        (&sub(&ee, &rc, &ca), &sub(&aa, &rc, &ca)),
        thr,
    );
    for mtx in [&mut ee, &mut aa, &mut t] {
        let add = &sub(mtx, &(0..mtx.rows()), &cc) * &rr;
        let cur = sub(mtx, &(0..mtx.rows()), &ca);
        mtx.set_block(0, ca.start, &(&cur + &add));
    }
    for mtx in [&mut ee, &mut aa, &mut s] {
        let add = &ll * &sub(mtx, &ra, &(0..mtx.cols()));
        let cur = sub(mtx, &rc, &(0..mtx.cols()));
        mtx.set_block(rc.start, 0, &(&cur + &add));
    }

    // decouple (before, c)
    let (rr, ll) = sylvester(
        (&sub(&ee, &rb, &cb), &sub(&aa, &rb, &cb)),
        (&sub(&ee, &rc, &cc), &sub(&aa, &rc, &cc)),
        (&sub(&ee, &rb, &cc), &sub(&aa, &rb, &cc)),
        thr,
    );
    for mtx in [&mut ee, &mut aa, &mut t] {
        let add = &sub(mtx, &(0..mtx.rows()), &cb) * &rr;
        let cur = sub(mtx, &(0..mtx.rows()), &cc);
        mtx.set_block(0, cc.start, &(&cur + &add));
    }
    for mtx in [&mut ee, &mut aa, &mut s] {
        let add = &ll * &sub(mtx, &rc, &(0..mtx.cols()));
        let cur = sub(mtx, &rb, &(0..mtx.cols()));
        mtx.set_block(rb.start, 0, &(&cur + &add));
    }

    let row_order: Vec<usize> = rc.clone().chain(rb.clone()).chain(ra.clone()).collect();
    let col_order: Vec<usize> = cc.clone().chain(cb.clone()).chain(ca.clone()).collect();
    let rest_rows: Vec<usize> = rb.clone().chain(ra.clone()).collect();
    let rest_cols: Vec<usize> = cb.clone().chain(ca.clone()).collect();
    let x = t.permute_cols(&col_order);
    let y = s.permute_rows(&row_order);
    let rcv: Vec<usize> = rc.collect();
    let ccv: Vec<usize> = cc.collect();
    Ok(DeflatingBasis {
        eigenvalue: lambda0,
        v: x.columns(0, ccv.len()),
        e_reg: ee.select(&rcv, &ccv),
        a_reg: aa.select(&rcv, &ccv),
        e_rest: ee.select(&rest_rows, &rest_cols),
        a_rest: aa.select(&rest_rows, &rest_cols),
        x,
        y,
    })
}

/// Jordan sizes of `λ0` in a structure; finite values match within `tol`.
pub fn jordan_sizes(s: &KroneckerStructure, lambda0: Eigenvalue, tol: f64) -> Vec<usize> {
    match lambda0 {
        Eigenvalue::Infinite => s.infinite_jordan_sizes.clone(),
        Eigenvalue::Finite(z) => s
            .finite_eigenvalues
            .iter()
            .find(|f| (f.value - z).norm() <= tol)
            .map(|f| f.jordan_sizes.clone())
            .unwrap_or_default(),
    }
}
