//! Canonical and condensed forms of pairs `(E, Q)` with `E*Q = Q*E`, and generators of such pairs.

mod generate;

use serde::{Deserialize, Serialize};

use crate::kronecker::{staircase, sylvester};
use crate::linalg::{
    complete_unitary, householder_qr, inverse, min_eig, numerical_rank, orthonormalize, re, simultaneous_diagonalize, solve,
    Field, LinalgError, Matrix, Tolerance, C64,
};

pub use generate::{
    generate_prescribed_left_indices, hankel_from_nodes, hankel_tilde, random_structured_pencil, HankelFactor,
    HankelSpec, RandomPencilOptions,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CanonicalError {
    #[error("structural hypothesis violated (residual {residual:e})")]
    StructureViolated { residual: f64 },
    #[error("pencil λE − Q is singular")]
    SingularPencil,
    #[error("E*Q is not positive semidefinite (min eigenvalue {min_eigenvalue:e}), so both diagonals cannot be nonnegative")]
    BothNonnegInfeasible { min_eigenvalue: f64 },
    #[error("infeasible dimensions: {0}")]
    InfeasibleDimensions(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid Hankel nodes: {0}")]
    InvalidNodes(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pencil(#[from] crate::pencil::PencilError),
}

/// Which diagonal factor is made nonnegative by sign flips of the rows of `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Nonneg {
    #[default]
    None,
    E,
    Q,
    Both,
}

/// `U E X = D_E`, `U Q X = D_Q` with real (rectangular) diagonal `D_E`, `D_Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPairForm {
    pub u: Matrix,
    /// Right factor; unitary for commuting pairs.
    pub x: Matrix,
    pub d_e: Matrix,
    pub d_q: Matrix,
}

impl DiagonalPairForm {
    /// `max(‖UEX − D_E‖_max, ‖UQX − D_Q‖_max)`.
    pub fn residual(&self, e: &Matrix, q: &Matrix) -> f64 {
        let re = (&(&self.u * e) * &self.x).max_diff(&self.d_e);
        let rq = (&(&self.u * q) * &self.x).max_diff(&self.d_q);
        re.max(rq)
    }

    pub fn diag_e(&self) -> Vec<f64> {
        self.d_e.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn diag_q(&self) -> Vec<f64> {
        self.d_q.diagonal().iter().map(|z| z.re).collect()
    }
}

const SIMDIAG_REL: f64 = 1e-8;
// fixed irrational weights for the generic combination preceding per-cluster refinement
const MIX: [f64; 3] = [0.754_877_666_246_692_7, 0.569_840_290_998_053_3, 0.324_717_957_244_746];

/// `‖E*Q − Q*E‖_F` and the threshold it is held to.
pub fn b1a_residual(e: &Matrix, q: &Matrix, tol: &Tolerance) -> (f64, f64) {
    let eq = &e.adjoint() * q;
    let res = (&eq - &eq.adjoint()).norm_fro();
    (res, tol.threshold(e.rows().max(e.cols()), e.norm_fro() * q.norm_fro()))
}

fn b1b_residual(e: &Matrix, q: &Matrix, tol: &Tolerance) -> (f64, f64) {
    let eq = e * &q.adjoint();
    let res = (&eq - &eq.adjoint()).norm_fro();
    (res, tol.threshold(e.rows().max(e.cols()), e.norm_fro() * q.norm_fro()))
}

fn require_b1a(e: &Matrix, q: &Matrix, tol: &Tolerance) -> Result<(), CanonicalError> {
    let (res, thr) = b1a_residual(e, q, tol);
    if res > thr {
        return Err(CanonicalError::StructureViolated { residual: res });
    }
    Ok(())
}

fn require_same_shape(e: &Matrix, q: &Matrix) -> Result<(), CanonicalError> {
    if e.shape() != q.shape() {
        return Err(CanonicalError::ShapeMismatch(format!(
            "E is {}x{} but Q is {}x{}",
            e.rows(),
            e.cols(),
            q.rows(),
            q.cols()
        )));
    }
    Ok(())
}

fn eq_min_eig(e: &Matrix, q: &Matrix) -> f64 {
    min_eig(&(&e.adjoint() * q))
}

/// Row signs making the requested diagonals nonnegative. `ce`, `cq` are the current diagonals.
fn sign_flips(ce: &[f64], cq: &[f64], nonneg: Nonneg) -> Vec<f64> {
    ce.iter()
        .zip(cq)
        .map(|(&a, &b)| {
            let lead = match nonneg {
                Nonneg::None => return 1.0,
                Nonneg::E => a,
                Nonneg::Q => b,
                Nonneg::Both => {
                    if a.abs() >= b.abs() {
                        a
                    } else {
                        b
                    }
                }
            };
            if lead < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

fn check_both(e: &Matrix, q: &Matrix, nonneg: Nonneg, tol: &Tolerance) -> Result<(), CanonicalError> {
    if nonneg == Nonneg::Both {
        let mu = eq_min_eig(e, q);
        if mu < -tol.threshold(e.cols(), e.norm_fro() * q.norm_fro()) {
            return Err(CanonicalError::BothNonnegInfeasible { min_eigenvalue: mu });
        }
    }
    Ok(())
}

fn scale_rows(m: &Matrix, s: &[f64]) -> Matrix {
    let mut out = m.clone();
    for (i, &si) in s.iter().enumerate() {
        if si < 0.0 {
            for j in 0..out.cols() {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

/// Clears tiny negative values left by roundoff in a diagonal meant to be nonnegative.
fn clamp_nonneg(d: &mut [f64], thr: f64) {
    for x in d.iter_mut() {
        if *x < 0.0 && *x >= -thr {
            *x = 0.0;
        }
    }
}

fn rect_diag(rows: usize, cols: usize, d: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = re(x);
    }
    m
}

fn is_rect_diag(m: &Matrix) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].norm() == 0.0))
}

/// Phases for diagonal inputs: `U = diag(conj φ_i)` makes both diagonals real.
fn diagonal_phases(e: &Matrix, q: &Matrix) -> (Vec<C64>, Vec<f64>, Vec<f64>) {
    let n = e.rows();
    let k = n.min(e.cols());
    let mut phase = vec![re(1.0); n];
    let mut de = vec![0.0; k];
    let mut dq = vec![0.0; k];
    for i in 0..k {
        let (a, b) = (e[(i, i)], q[(i, i)]);
        let lead = if a.norm() >= b.norm() { a } else { b };
        if lead.norm() > 0.0 {
            phase[i] = lead / lead.norm();
        }
        de[i] = (a * phase[i].conj()).re;
        dq[i] = (b * phase[i].conj()).re;
    }
    (phase, de, dq)
}

fn finish_diagonal(
    mut u: Matrix,
    x: Matrix,
    mut de: Vec<f64>,
    mut dq: Vec<f64>,
    shape: (usize, usize),
    nonneg: Nonneg,
    thr: f64,
    field: Field,
) -> DiagonalPairForm {
    let mut flips = sign_flips(&de, &dq, nonneg);
    flips.resize(shape.0, 1.0);
    u = scale_rows(&u, &flips);
    for i in 0..de.len() {
        de[i] *= flips[i];
        dq[i] *= flips[i];
    }
    if nonneg == Nonneg::Both {
        clamp_nonneg(&mut de, thr);
        clamp_nonneg(&mut dq, thr);
    }
    DiagonalPairForm {
        u: u.settle_field(field, 0.0),
        x: x.settle_field(field, 0.0),
        d_e: rect_diag(shape.0, shape.1, &de),
        d_q: rect_diag(shape.0, shape.1, &dq),
    }
}

/// Unitary `U` and invertible `X` with `UEX = diag(c)`, `UQX = diag(s)`, `c² + s² = 1`, for a regular
/// square pencil `λE − Q` with `E*Q = Q*E`.
pub fn diagonalize_regular_pair(
    e: &Matrix,
    q: &Matrix,
    nonneg: Nonneg,
    tol: &Tolerance,
) -> Result<DiagonalPairForm, CanonicalError> {
    require_same_shape(e, q)?;
    if !e.is_square() {
        return Err(CanonicalError::ShapeMismatch(format!("E is {}x{}, not square", e.rows(), e.cols())));
    }
    e.ensure_finite()?;
    q.ensure_finite()?;
    require_b1a(e, q, tol)?;
    check_both(e, q, nonneg, tol)?;
    let n = e.rows();
    let field = e.field().join(q.field());
    if n == 0 {
        let z = Matrix::zeros(0, 0);
        return Ok(DiagonalPairForm { u: z.clone(), x: z.clone(), d_e: z.clone(), d_q: z });
    }
    let stacked = Matrix::vstack(&[e, q]);
    if numerical_rank(&stacked, tol) < n {
        return Err(CanonicalError::SingularPencil);
    }
    if is_rect_diag(e) && is_rect_diag(q) {
        let (phase, de, dq) = diagonal_phases(e, q);
        let r: Vec<f64> = de.iter().zip(&dq).map(|(a, b)| a.hypot(*b)).collect();
        let u = Matrix::diag(&phase.iter().map(|p| p.conj()).collect::<Vec<_>>());
        let x = Matrix::diag_real(&r.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
        let de: Vec<f64> = de.iter().zip(&r).map(|(a, x)| a / x).collect();
        let dq: Vec<f64> = dq.iter().zip(&r).map(|(a, x)| a / x).collect();
        return Ok(finish_diagonal(u, x, de, dq, (n, n), nonneg, tol.threshold(n, 1.0), field));
    }
    let (zf, rf) = householder_qr(&stacked)?;
    let z1 = zf.sub(0, n, 0, n);
    let z2 = zf.sub(n, 2 * n, 0, n);
    let t = rf.sub(0, n, 0, n);

    // Z1 + iZ2 is unitary, so G + 2iH is a normal matrix with commuting Hermitian parts
    let g = (&(&z1.adjoint() * &z1) - &(&z2.adjoint() * &z2)).hermitian_part();
    let h = (&z1.adjoint() * &z2).hermitian_part();
    let combo = &g + &h.scale_real(MIX[0]);
    let v = simultaneous_diagonalize(&[combo, g.clone(), h.clone()], SIMDIAG_REL);
    let gd = (&(&v.adjoint() * &g) * &v).diagonal();
    let hd = (&(&v.adjoint() * &h) * &v).diagonal();
    let theta: Vec<f64> = gd.iter().zip(&hd).map(|(gi, hi)| (2.0 * hi.re).atan2(gi.re) * 0.5).collect();
    let cs: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let sn: Vec<f64> = theta.iter().map(|t| t.sin()).collect();

    let zv1 = &z1 * &v;
    let zv2 = &z2 * &v;
    let ustar = &(&zv1 * &Matrix::diag_real(&cs)) + &(&zv2 * &Matrix::diag_real(&sn));
    let u0 = ustar.adjoint();
    let x = solve(&t, &v)?;

    let flips = sign_flips(&cs, &sn, nonneg);
    let u = scale_rows(&u0, &flips).settle_field(field, 0.0);
    let mut de: Vec<f64> = cs.iter().zip(&flips).map(|(a, s)| a * s).collect();
    let mut dq: Vec<f64> = sn.iter().zip(&flips).map(|(a, s)| a * s).collect();
    if nonneg == Nonneg::Both {
        let thr = tol.threshold(n, 1.0);
        clamp_nonneg(&mut de, thr);
        clamp_nonneg(&mut dq, thr);
    }
    Ok(DiagonalPairForm {
        u,
        x: x.settle_field(field, 0.0),
        d_e: Matrix::diag_real(&de),
        d_q: Matrix::diag_real(&dq),
    })
}

/// Unitary `U`, `V` with `UEV` and `UQV` real rectangular diagonal, for `E*Q = Q*E` and `EQ* = QE*`.
pub fn diagonalize_commuting_pair(
    e: &Matrix,
    q: &Matrix,
    nonneg: Nonneg,
    tol: &Tolerance,
) -> Result<DiagonalPairForm, CanonicalError> {
    require_same_shape(e, q)?;
    e.ensure_finite()?;
    q.ensure_finite()?;
    require_b1a(e, q, tol)?;
    let (res, thr) = b1b_residual(e, q, tol);
    if res > thr {
        return Err(CanonicalError::StructureViolated { residual: res });
    }
    check_both(e, q, nonneg, tol)?;
    let (n, m) = e.shape();
    let field = e.field().join(q.field());
    let scale = e.norm_fro().max(q.norm_fro());
    let cut = tol.threshold(n.max(m), scale);
    if is_rect_diag(e) && is_rect_diag(q) {
        let (phase, de, dq) = diagonal_phases(e, q);
        let u = Matrix::diag(&phase.iter().map(|p| p.conj()).collect::<Vec<_>>());
        return Ok(finish_diagonal(u, Matrix::identity(m), de, dq, (n, m), nonneg, cut, field));
    }
    let ee = (&e.adjoint() * e).hermitian_part();
    let qq = (&q.adjoint() * q).hermitian_part();
    let eq = (&e.adjoint() * q).hermitian_part();
    let combo = &(&ee.scale_real(MIX[0]) + &qq.scale_real(MIX[1])) + &eq.scale_real(MIX[2]);
    let v0 = simultaneous_diagonalize(&[combo, ee, qq, eq], SIMDIAG_REL);

    let ev = e * &v0;
    let qv = q * &v0;
    let mut live = Vec::new();
    let mut dead = Vec::new();
    let mut dirs = Matrix::zeros(n, 0).with_field(field);
    for j in 0..m {
        let a = ev.col(j);
        let b = qv.col(j);
        let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if na.max(nb) <= cut || live.len() == n {
            dead.push(j);
            continue;
        }
        let (src, nrm) = if na >= nb { (a, na) } else { (b, nb) };
        let mut col = Matrix::zeros(n, 1).with_field(field);
        for (i, z) in src.iter().enumerate() {
            col[(i, 0)] = z / nrm;
        }
        dirs = Matrix::hstack(&[&dirs, &col]);
        live.push(j);
    }
    let dirs = orthonormalize(&dirs, 0.0);
    let ustar = complete_unitary(&dirs);
    let order: Vec<usize> = live.iter().chain(&dead).copied().collect();
    let v = v0.permute_cols(&order);
    let u0 = ustar.adjoint();
    let de0: Vec<f64> = (&(&u0 * e) * &v).diagonal().iter().map(|z| z.re).collect();
    let dq0: Vec<f64> = (&(&u0 * q) * &v).diagonal().iter().map(|z| z.re).collect();
    let r = live.len();
    let mut flips = sign_flips(&de0[..r], &dq0[..r], nonneg);
    flips.resize(n, 1.0);
    let u = scale_rows(&u0, &flips).settle_field(field, 0.0);
    let mut de: Vec<f64> = de0.iter().zip(&flips).map(|(a, s)| a * s).take(r).collect();
    let mut dq: Vec<f64> = dq0.iter().zip(&flips).map(|(a, s)| a * s).take(r).collect();
    if nonneg == Nonneg::Both {
        clamp_nonneg(&mut de, cut);
        clamp_nonneg(&mut dq, cut);
    }
    Ok(DiagonalPairForm {
        u,
        x: v.settle_field(field, 0.0),
        d_e: rect_diag(n, m, &de),
        d_q: rect_diag(n, m, &dq),
    })
}

/// `U E X = [[E11, E12, 0], [0, E22, 0]]` and likewise for `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedFormEQ {
    pub u: Matrix,
    pub x: Matrix,
    /// Size of the regular part.
    pub n1: usize,
    /// Rows and columns of the left singular part.
    pub m2: usize,
    pub n2: usize,
    /// Common null space dimension (zero right minimal indices).
    pub zero_cols: usize,
    pub e11: Matrix,
    pub e12: Matrix,
    pub e22: Matrix,
    pub q11: Matrix,
    pub q12: Matrix,
    pub q22: Matrix,
}

impl CondensedFormEQ {
    fn assemble(&self, b11: &Matrix, b12: &Matrix, b22: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.n1 + self.m2, self.n1 + self.n2 + self.zero_cols);
        m.set_block(0, 0, b11);
        m.set_block(0, self.n1, b12);
        m.set_block(self.n1, self.n1, b22);
        m
    }

    pub fn assembled_e(&self) -> Matrix {
        self.assemble(&self.e11, &self.e12, &self.e22)
    }

    pub fn assembled_q(&self) -> Matrix {
        self.assemble(&self.q11, &self.q12, &self.q22)
    }

    /// The pencil with the coupling blocks removed; it has the same Kronecker structure.
    pub fn decoupled(&self) -> (Matrix, Matrix) {
        let z = Matrix::zeros(self.n1, self.n2);
        (self.assemble(&self.e11, &z, &self.e22), self.assemble(&self.q11, &z, &self.q22))
    }

    /// `max(‖UEX − form_E‖_max, ‖UQX − form_Q‖_max)`.
    pub fn residual(&self, e: &Matrix, q: &Matrix) -> f64 {
        let re = (&(&self.u * e) * &self.x).max_diff(&self.assembled_e());
        let rq = (&(&self.u * q) * &self.x).max_diff(&self.assembled_q());
        re.max(rq)
    }
}

/// Condensed form of a possibly rectangular pair with `E*Q = Q*E`.
pub fn condensed_form_eq(
    e: &Matrix,
    q: &Matrix,
    nonneg: Nonneg,
    tol: &Tolerance,
) -> Result<CondensedFormEQ, CanonicalError> {
    require_same_shape(e, q)?;
    e.ensure_finite()?;
    q.ensure_finite()?;
    require_b1a(e, q, tol)?;
    check_both(e, q, nonneg, tol)?;
    let (n, m) = e.shape();
    let field = e.field().join(q.field());
    let st = staircase(e, q, tol);
    if st.structure.right_minimal_indices.iter().any(|&k| k > 0) || !st.blocks.right.rows.is_empty() {
        return Err(CanonicalError::StructureViolated { residual: b1a_residual(e, q, tol).0 });
    }
    let b = &st.blocks;
    let reg_r = b.zero.rows.start..b.infinite.rows.end;
    let reg_c = b.zero.cols.start..b.infinite.cols.end;
    let sing_r = b.left.rows.clone();
    let sing_c = b.left.cols.clone();
    let null_c = b.right.cols.clone();
    let (n1, m2, n2, nz) = (reg_r.len(), sing_r.len(), sing_c.len(), null_c.len());
    debug_assert_eq!(n1 + m2, n);
    debug_assert_eq!(n1 + n2 + nz, m);

    // unitary left factor from the QR of the inverse left transform keeps the block triangular shape
    let row_order: Vec<usize> = reg_r.clone().chain(sing_r.clone()).collect();
    let col_order: Vec<usize> = reg_c.clone().chain(sing_c.clone()).chain(null_c.clone()).collect();
    let sinv = inverse(&st.left.permute_rows(&row_order))?;
    let (vq, _) = householder_qr(&sinv)?;
    let w = vq.adjoint();
    let mut x = st.right.permute_cols(&col_order);
    let ue0 = &(&w * e) * &x;
    let uq0 = &(&w * q) * &x;
    let blk = |mm: &Matrix, r0: usize, r1: usize, c0: usize, c1: usize| mm.sub(r0, r1, c0, c1);
    let er = blk(&ue0, 0, n1, 0, n1);
    let qr_ = blk(&uq0, 0, n1, 0, n1);
    let el = blk(&ue0, n1, n, n1, n1 + n2);
    let ql_ = blk(&uq0, n1, n, n1, n1 + n2);
    let ec = blk(&ue0, 0, n1, n1, n1 + n2);
    let qc = blk(&uq0, 0, n1, n1, n1 + n2);

    // column operations make the coupling a left multiple of the singular block
    let (rr, _) = sylvester((&er, &qr_), (&el, &ql_), (&ec, &qc), st.threshold);
    if n1 > 0 && n2 > 0 {
        let add = &x.sub(0, m, 0, n1) * &rr;
        let cur = x.sub(0, m, n1, n1 + n2);
        x.set_block(0, n1, &(&cur + &add));
    }

    let d = diagonalize_regular_pair(&er, &qr_, nonneg, tol)?;
    let u = &Matrix::block_diag(&[&d.u, &Matrix::identity(m2)]) * &w;
    let x = &x * &Matrix::block_diag(&[&d.x, &Matrix::identity(m - n1)]);
    let ue = &(&u * e) * &x;
    let uq = &(&u * q) * &x;
    Ok(CondensedFormEQ {
        n1,
        m2,
        n2,
        zero_cols: nz,
        e11: d.d_e,
        q11: d.d_q,
        e12: ue.sub(0, n1, n1, n1 + n2),
        q12: uq.sub(0, n1, n1, n1 + n2),
        e22: ue.sub(n1, n, n1, n1 + n2),
        q22: uq.sub(n1, n, n1, n1 + n2),
        u: u.settle_field(field, 0.0),
        x: x.settle_field(field, 0.0),
    })
}
