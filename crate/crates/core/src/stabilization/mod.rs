//! Condensed form around the eigenvalue zero and structure-preserving perturbations of `L`
//! that make zero a semisimple eigenvalue.

mod generate;
mod lemmas;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::canonical::{diagonalize_regular_pair, CanonicalError, Nonneg};
use crate::kronecker::{staircase, KroneckerStructure};
use crate::linalg::{
    hermitian_part_eig, inverse, min_eig, ordered_schur_zero_trailing, ql, range_projector, LinalgError, Matrix,
    Tolerance,
};
use crate::pencil::{check_structure, PencilError, StructuredPencil};

pub use generate::{random_zero_defective_pencil, PlantedZeroPencil, ZeroBlockSpec};
pub use lemmas::{
    gamma_certificate, min_norm_annihilator, psd_completion, range_defect, GammaCertificate, PsdCompletion, GAMMA_SLACK,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilizationError {
    #[error("the pencil has index {index}; at most one is supported")]
    IndexTooHigh { index: usize },
    #[error("the pencil is singular")]
    SingularPencil,
    #[error("structure violated: {0}")]
    StructureViolated(String),
    #[error("pencil must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("im Y* is not contained in im R0 (defect {residual:e})")]
    RangeConditionViolated { residual: f64 },
    #[error("no symmetric perturbation: P L3* leaves im R0 (defect {residual:e})")]
    SymmetricModeInfeasible { residual: f64 },
    #[error("`{name}` is not Hermitian (residual {residual:e})")]
    NotHermitian { name: &'static str, residual: f64 },
    #[error("`{name}` is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { name: &'static str, min_eigenvalue: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Block form with partition `(n1, n2, n3, n4)`:
///
/// ```text
/// Q̃ = [Q11 Q12 0 0; Q21 Q22 0 0; 0 0 0 0; Q41 Q42 0 I]
/// Ẽ = [E11 0 0 0; E21 E22 0 0; 0 0 I 0; 0 0 0 0]
/// Ã = [A11 0 0 A14; A21 0 0 A24; A31 A32 0 A34; 0 0 0 A44]
/// ```
///
/// with `Ẽ = ŨEX̃`, `Q̃ = ŨQX̃`, `L̃ = ŨLŨ⋆`, `Ã = ŨLQX̃`; `E11`, `E22`, `A11` lower triangular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section5Form {
    pub u: Matrix,
    pub x: Matrix,
    pub partition: [usize; 4],
    pub e: Matrix,
    pub q: Matrix,
    pub l: Matrix,
    pub a: Matrix,
    /// Largest entry removed when enforcing the zero pattern.
    pub pattern_residual: f64,
}

fn ranges(p: [usize; 4]) -> [Range<usize>; 4] {
    let mut out: [Range<usize>; 4] = Default::default();
    let mut s = 0;
    for (k, &size) in p.iter().enumerate() {
        out[k] = s..s + size;
        s += size;
    }
    out
}

fn idx(rs: &[&Range<usize>]) -> Vec<usize> {
    rs.iter().flat_map(|&r| r.clone()).collect()
}

fn put(m: &mut Matrix, rows: &[usize], cols: &[usize], b: &Matrix) {
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m[(r, c)] = b[(i, j)];
        }
    }
}

#[derive(Clone, Copy)]
enum Pattern {
    Zero,
    Identity,
    Lower,
}

/// Sets the blocks to their pattern and returns the largest deviation removed.
fn enforce(m: &mut Matrix, rg: &[Range<usize>; 4], rules: &[(usize, usize, Pattern)]) -> f64 {
    let mut dev: f64 = 0.0;
    for &(bi, bj, pat) in rules {
        for (a, i) in rg[bi].clone().enumerate() {
            for (b, j) in rg[bj].clone().enumerate() {
                let target = match pat {
                    Pattern::Zero => Some(0.0),
                    Pattern::Identity => Some(if a == b { 1.0 } else { 0.0 }),
                    Pattern::Lower => (b > a).then_some(0.0),
                };
                if let Some(t) = target {
                    dev = dev.max((m[(i, j)] - t).norm());
                    m[(i, j)] = t.into();
                }
            }
        }
    }
    dev
}

impl Section5Form {
    pub fn ranges(&self) -> [Range<usize>; 4] {
        ranges(self.partition)
    }

    /// Block `(i, j)` of `m`, 1-based as in the block layout.
    pub fn block(&self, m: &Matrix, i: usize, j: usize) -> Matrix {
        let rg = self.ranges();
        let (r, c) = (&rg[i - 1], &rg[j - 1]);
        m.sub(r.start, r.end, c.start, c.end)
    }

    /// Largest reconstruction error of the four condensed matrices.
    pub fn residual(&self, p: &StructuredPencil) -> f64 {
        let ut = &self.u;
        let e = (&(ut * p.e()) * &self.x).max_diff(&self.e);
        let q = (&(ut * p.q()) * &self.x).max_diff(&self.q);
        let l = (&(ut * p.l()) * &ut.adjoint()).max_diff(&self.l);
        let a = (&(ut * &p.a()) * &self.x).max_diff(&self.a);
        e.max(q).max(l).max(a)
    }

    /// `Ã₃₂ = L₃Q₂`.
    pub fn a32(&self) -> Matrix {
        self.block(&self.a, 3, 2)
    }
}

fn validate(p: &StructuredPencil, tol: &Tolerance) -> Result<KroneckerStructure, StabilizationError> {
    let (n, m) = (p.n(), p.m());
    if n != m {
        return Err(StabilizationError::NotSquare(n, m));
    }
    let rep = check_structure(p, tol);
    if !rep.is_dh() {
        return Err(StabilizationError::StructureViolated(format!(
            "b1a {} (residual {:e}), b1c {} (min eigenvalue {:e}), R psd {} (min eigenvalue {:e})",
            rep.b1a.holds,
            rep.b1a.residual,
            rep.b1c.holds,
            rep.b1c.min_eigenvalue,
            rep.r_psd.holds,
            rep.r_psd.min_eigenvalue
        )));
    }
    let s = staircase(p.e(), &p.a(), tol).structure;
    if !s.is_regular() {
        return Err(StabilizationError::SingularPencil);
    }
    if s.index > 1 {
        return Err(StabilizationError::IndexTooHigh { index: s.index });
    }
    Ok(s)
}

/// Computes the block form around the eigenvalue zero of a regular dH pencil of index at most one.
pub fn section5_condensed_form(p: &StructuredPencil, tol: &Tolerance) -> Result<Section5Form, StabilizationError> {
    validate(p, tol)?;
    let n = p.n();
    let field = p.field();
    let (e, q, l) = (p.e(), p.q(), p.l());

    // UEX = diag(E1, I, 0), UQX = diag(Q1, 0, I) with E1 = I after column scaling
    let d = diagonalize_regular_pair(e, q, Nonneg::Both, tol)?;
    let (de, dq) = (d.diag_e(), d.diag_q());
    let cut = 1e3 * tol.threshold(n, 1.0);
    let mut both = Vec::new();
    let mut only_e = Vec::new();
    let mut only_q = Vec::new();
    for i in 0..n {
        if dq[i] <= cut {
            only_e.push(i);
        } else if de[i] <= cut {
            only_q.push(i);
        } else {
            both.push(i);
        }
    }
    let k = both.len();
    let (n3, n4) = (only_e.len(), only_q.len());
    let perm: Vec<usize> = both.iter().chain(&only_e).chain(&only_q).copied().collect();
    let u0 = d.u.permute_rows(&perm);
    let mut x0 = d.x.permute_cols(&perm);
    for (c, &i) in both.iter().enumerate() {
        let s = 1.0 / de[i];
        for r in 0..n {
            x0[(r, c)] = x0[(r, c)].scale(s);
        }
    }
    let q1 = Matrix::diag_real(&both.iter().map(|&i| dq[i] / de[i]).collect::<Vec<_>>());

    let lh = &(&u0 * l) * &u0.adjoint();
    let (ra, rc) = (0..k, k + n3..n);
    let block = |m: &Matrix, r: &Range<usize>, c: &Range<usize>| m.sub(r.start, r.end, c.start, c.end);
    let l31 = block(&lh, &rc, &ra);
    let l13 = block(&lh, &ra, &rc);
    let l33 = block(&lh, &rc, &rc);
    let (schur, corr) = if n4 > 0 {
        let inv = inverse(&l33).map_err(|_| StabilizationError::IndexTooHigh { index: 2 })?;
        let corr = &inv * &l31;
        (&block(&lh, &ra, &ra) - &(&l13 * &corr), corr)
    } else {
        (block(&lh, &ra, &ra), Matrix::zeros(0, k))
    };
    let mut t = Matrix::identity(n).with_field(field);
    t.set_block(k + n3, 0, &(&corr * &q1).scale_real(-1.0));

    // lower triangular Schur form of the Schur complement with the zero block trailing
    let kmat = &schur * &q1;
    let (w2, n2) = if k > 0 {
        let (w, _, nz) = ordered_schur_zero_trailing(&kmat, tol)?;
        (w, nz)
    } else {
        (Matrix::zeros(0, 0), 0)
    };
    let w1 = if k > 0 { ql(&w2)?.0.adjoint() } else { Matrix::zeros(0, 0) };
    let id_rest = Matrix::identity(n - k);
    let ut = &Matrix::block_diag(&[&w1, &id_rest]) * &u0;
    let xt = &(&x0 * &t) * &Matrix::block_diag(&[&w2, &id_rest]);

    let partition = [k - n2, n2, n3, n4];
    let rg = ranges(partition);
    let mut et = &(&ut * e) * &xt;
    let mut qt = &(&ut * q) * &xt;
    let lt = &(&ut * l) * &ut.adjoint();
    let mut at = &(&ut * &p.a()) * &xt;
    use Pattern::*;
    let mut dev: f64 = 0.0;
    dev = dev.max(enforce(
        &mut qt,
        &rg,
        &[(0, 2, Zero), (0, 3, Zero), (1, 2, Zero), (1, 3, Zero), (2, 0, Zero), (2, 1, Zero), (2, 2, Zero), (2, 3, Zero), (3, 2, Zero), (3, 3, Identity)],
    ));
    dev = dev.max(enforce(
        &mut et,
        &rg,
        &[
            (0, 0, Lower),
            (0, 1, Zero),
            (0, 2, Zero),
            (0, 3, Zero),
            (1, 1, Lower),
            (1, 2, Zero),
            (1, 3, Zero),
            (2, 0, Zero),
            (2, 1, Zero),
            (2, 2, Identity),
            (2, 3, Zero),
            (3, 0, Zero),
            (3, 1, Zero),
            (3, 2, Zero),
            (3, 3, Zero),
        ],
    ));
    dev = dev.max(enforce(
        &mut at,
        &rg,
        &[(0, 0, Lower), (0, 1, Zero), (0, 2, Zero), (1, 1, Zero), (1, 2, Zero), (2, 2, Zero), (3, 0, Zero), (3, 1, Zero), (3, 2, Zero)],
    ));
    let scale = p.scale().max(1.0) * xt.norm2().max(1.0);
    if dev > 1e-6 * scale {
        return Err(StabilizationError::StructureViolated(format!("condensed pattern off by {dev:e}")));
    }
    Ok(Section5Form {
        u: ut.settle_field(field, 0.0),
        x: xt.settle_field(field, 0.0),
        partition,
        e: et.settle_field(field, 0.0),
        q: qt.settle_field(field, 0.0),
        l: lt.settle_field(field, 0.0),
        a: at.settle_field(field, 0.0),
        pattern_residual: dev,
    })
}

/// The three equivalent characterizations of a semisimple zero eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSemisimpleReport {
    /// `Ã₃₂ = 0`.
    pub semisimple: bool,
    pub a32_norm: f64,
    /// `L₃Q₂ = 0`.
    pub kernel_condition: bool,
    pub l3q2_norm: f64,
    /// Zero Jordan sizes from the staircase of the condensed pencil.
    pub zero_jordan_sizes: Vec<usize>,
    pub staircase_semisimple: bool,
}

impl ZeroSemisimpleReport {
    pub fn consistent(&self) -> bool {
        self.semisimple == self.kernel_condition && self.semisimple == self.staircase_semisimple
    }
}

pub fn zero_semisimple_test(f: &Section5Form, tol: &Tolerance) -> ZeroSemisimpleReport {
    let n = f.e.rows();
    let scale = f.e.norm_fro().max(f.a.norm_fro());
    let thr = tol.threshold(n, scale);
    let a32_norm = f.a32().norm2();
    let rg = f.ranges();
    let l3 = f.l.sub(rg[2].start, rg[2].end, 0, n);
    let q2 = f.q.sub(0, n, rg[1].start, rg[1].end);
    let l3q2_norm = (&l3 * &q2).norm2();
    let zero_jordan_sizes = staircase(&f.e, &f.a, tol).structure.zero_jordan_sizes();
    ZeroSemisimpleReport {
        semisimple: a32_norm <= thr,
        a32_norm,
        kernel_condition: l3q2_norm <= thr,
        l3q2_norm,
        staircase_semisimple: zero_jordan_sizes.iter().all(|&s| s <= 1),
        zero_jordan_sizes,
    }
}

/// Choice of the coupling `Y` in the perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum YChoice {
    /// `Y = 0`: skew-Hermitian perturbation only.
    Zero,
    /// Explicit `Y`, n3 × (n1+n2+n4) in condensed coordinates.
    Mixed(Matrix),
    /// `Y = −L₃P_{im Q₂}`, which makes `Δ_J = 0`.
    SymmetricOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationMode {
    SkewOnly,
    Mixed,
    SymmetricOnly,
}

/// Checks on the perturbed pencil `λE − (J + Δ_J − R − Δ_R)Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    pub structure_before: KroneckerStructure,
    pub structure_after: KroneckerStructure,
    /// `‖Ã₃₂‖` with the same transforms after perturbing.
    pub a32_after: f64,
    pub zero_semisimple: bool,
    pub r_min_eigenvalue: f64,
    pub r_psd: bool,
    pub bound_r_holds: bool,
    pub bound_j_holds: bool,
    /// Nonzero finite and infinite Kronecker data unchanged.
    pub nonzero_structure_preserved: bool,
}

impl PerturbationCheck {
    pub fn passed(&self) -> bool {
        self.zero_semisimple && self.r_psd && self.bound_r_holds && self.bound_j_holds && self.nonzero_structure_preserved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizingPerturbation {
    /// Original coordinates.
    pub delta_j: Matrix,
    pub delta_r: Matrix,
    /// Right side of the `‖Δ_R‖₂` bound.
    pub bound_r: f64,
    /// Right side of the `‖Δ_J‖_F` bound.
    pub bound_j: f64,
    pub mode: PerturbationMode,
    /// Condensed-frame `Y`, n3 × (n1+n2+n4).
    pub y: Matrix,
    pub alpha: f64,
    pub form: Section5Form,
    pub check: PerturbationCheck,
}

impl StabilizingPerturbation {
    /// `λE − (J + sΔ_J − R − tΔ_R)Q`.
    pub fn perturbed(&self, p: &StructuredPencil, s: f64, t: f64) -> Result<StructuredPencil, StabilizationError> {
        let j = p.j() + &self.delta_j.scale_real(s);
        let r = p.r() + &self.delta_r.scale_real(t);
        Ok(StructuredPencil::from_jr(p.e().clone(), j, r, p.q().clone())?)
    }
}

/// Relative tolerance for matching nonzero eigenvalues before and after a perturbation.
pub const EIGENVALUE_MATCH: f64 = 1e-7;

/// Same nonzero finite eigenvalues (values and Jordan sizes) and same infinite Jordan sizes.
pub fn same_nonzero_structure(a: &KroneckerStructure, b: &KroneckerStructure, rel: f64) -> bool {
    if a.infinite_jordan_sizes != b.infinite_jordan_sizes {
        return false;
    }
    let xs: Vec<_> = a.nonzero_eigenvalues().collect();
    let mut ys: Vec<_> = b.nonzero_eigenvalues().collect();
    if xs.len() != ys.len() {
        return false;
    }
    for x in xs {
        let best = ys
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (y.value - x.value).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((i, dist)) if dist <= rel * x.value.norm().max(1.0) && ys[i].jordan_sizes == x.jordan_sizes => {
                ys.swap_remove(i);
            }
            _ => return false,
        }
    }
    true
}

fn inv_norm_restricted(r0: &Matrix, thr: f64, power: f64) -> f64 {
    if r0.is_empty() {
        return 0.0;
    }
    let e = hermitian_part_eig(r0);
    e.values.iter().filter(|&&l| l > thr).map(|&l| l.powf(-power)).fold(0.0, f64::max)
}

/// Builds `Δ_J = −Δ_J⋆` and `Δ_R = Δ_R⋆` with `R + Δ_R ⪰ 0` making zero a semisimple eigenvalue
/// while keeping the nonzero and infinite Kronecker structure.
pub fn stabilize(p: &StructuredPencil, y: &YChoice, tol: &Tolerance) -> Result<StabilizingPerturbation, StabilizationError> {
    let before = validate(p, tol)?;
    let f = section5_condensed_form(p, tol)?;
    let n = p.n();
    let field = p.field();
    let rg = f.ranges();
    let rest = idx(&[&rg[0], &rg[1], &rg[3]]);
    let three: Vec<usize> = rg[2].clone().collect();
    let all: Vec<usize> = (0..n).collect();
    let n3 = three.len();

    let ut = &f.u;
    let rt = (&(ut * p.r()) * &ut.adjoint()).hermitian_part();
    let r0 = rt.select(&rest, &rest);
    let r33 = rt.select(&three, &three);
    let c = rt.select(&three, &rest);
    let l3 = f.l.select(&three, &all);
    let q2 = f.q.select(&all, &rg[1].clone().collect::<Vec<_>>());
    let thr_q = tol.threshold(n, f.q.norm_fro());
    let p_q2 = if q2.cols() == 0 { Matrix::zeros(n, n) } else { range_projector(&q2, thr_q) };
    let r_thr = tol.threshold(n, p.r().norm_fro());

    let (ymat, mode) = match y {
        YChoice::Zero => (Matrix::zeros(n3, rest.len()).with_field(field), PerturbationMode::SkewOnly),
        YChoice::Mixed(ym) => {
            if ym.shape() != (n3, rest.len()) {
                return Err(StabilizationError::ShapeMismatch(format!(
                    "Y must be {}x{} for partition {:?}",
                    n3,
                    rest.len(),
                    f.partition
                )));
            }
            (ym.clone(), PerturbationMode::Mixed)
        }
        YChoice::SymmetricOnly => {
            let full = (&l3 * &p_q2).scale_real(-1.0);
            let mut ym = full.select(&(0..n3).collect::<Vec<_>>(), &rest);
            if ym.norm_fro() <= tol.threshold(n, p.scale()) {
                ym = Matrix::zeros(n3, rest.len()).with_field(field);
            }
            let defect = range_defect(&r0, &ym, tol);
            if defect > tol.threshold(n, r0.norm_fro().max(ym.norm_fro())) {
                return Err(StabilizationError::SymmetricModeInfeasible { residual: defect });
            }
            (ym, PerturbationMode::SymmetricOnly)
        }
    };
    let y_norm = ymat.norm2();
    if y_norm > 0.0 {
        let defect = range_defect(&r0, &ymat, tol);
        if defect > tol.threshold(n, r0.norm_fro().max(y_norm)) {
            if mode == PerturbationMode::SymmetricOnly {
                return Err(StabilizationError::SymmetricModeInfeasible { residual: defect });
            }
            return Err(StabilizationError::RangeConditionViolated { residual: defect });
        }
    }

    // R + ΔR = [[R0, (C − Y)*], [C − Y, R33 + W]] after moving block 3 last
    let comp = psd_completion(&r0, &r33, &c, &ymat.scale_real(-1.0), tol)?;
    let mut dr = Matrix::zeros(n, n).with_field(field);
    put(&mut dr, &three, &rest, &ymat.scale_real(-1.0));
    put(&mut dr, &rest, &three, &ymat.adjoint().scale_real(-1.0));
    put(&mut dr, &three, &three, &comp.w);

    let mut yhat = Matrix::zeros(n3, n).with_field(field);
    put(&mut yhat, &(0..n3).collect::<Vec<_>>(), &rest, &ymat);
    let target = (&l3 + &yhat).adjoint();
    let bound_j = 2.0 * (&p_q2 * &target).norm_fro();
    let mut zl = min_norm_annihilator(&q2.adjoint(), &target, tol);
    for &i in &three {
        for j in 0..n3 {
            zl[(i, j)] = 0.0.into();
        }
    }
    if zl.norm_fro() <= tol.threshold(n, p.scale()) || mode == PerturbationMode::SymmetricOnly {
        zl = Matrix::zeros(n, n3).with_field(field);
    }
    let mut half = Matrix::zeros(n, n).with_field(field);
    put(&mut half, &three, &all, &zl.adjoint());
    let dj = &half - &half.adjoint();

    let r0_inv = inv_norm_restricted(&r0, r_thr, 1.0);
    let r0_inv_half = inv_norm_restricted(&r0, r_thr, 0.5);
    let r33_norm = r33.norm2();
    let bound_r = 2.0 * y_norm + (r0_inv * y_norm + 2.0 * r0_inv_half * y_norm.sqrt()) * (r33_norm + y_norm);

    let back = |m: &Matrix| &(&ut.adjoint() * m) * ut;
    let delta_j = back(&dj).skew_part().settle_field(field, 0.0);
    let delta_r = if y_norm == 0.0 { Matrix::zeros(n, n).with_field(field) } else { back(&dr).hermitian_part().settle_field(field, 0.0) };

    let out = StabilizingPerturbation {
        delta_j,
        delta_r,
        bound_r,
        bound_j,
        mode,
        y: ymat,
        alpha: comp.alpha,
        check: PerturbationCheck {
            structure_before: before.clone(),
            structure_after: before,
            a32_after: 0.0,
            zero_semisimple: false,
            r_min_eigenvalue: 0.0,
            r_psd: false,
            bound_r_holds: false,
            bound_j_holds: false,
            nonzero_structure_preserved: false,
        },
        form: f,
    };
    let check = verify(p, &out, tol)?;
    Ok(StabilizingPerturbation { check, ..out })
}

fn verify(p: &StructuredPencil, s: &StabilizingPerturbation, tol: &Tolerance) -> Result<PerturbationCheck, StabilizationError> {
    let n = p.n();
    let before = staircase(p.e(), &p.a(), tol).structure;
    let pp = s.perturbed(p, 1.0, 1.0)?;
    let after = staircase(pp.e(), &pp.a(), tol).structure;
    let f = &s.form;
    let at = &(&f.u * &pp.a()) * &f.x;
    let a32_after = f.block(&at, 3, 2).norm2();
    let r_new = pp.r();
    let r_min = min_eig(r_new);
    let slack = tol.threshold(n, p.scale().max(1.0) + s.bound_r);
    let dr_norm = s.delta_r.norm2();
    let dj_norm = s.delta_j.norm_fro();
    Ok(PerturbationCheck {
        zero_semisimple: after.is_regular() && after.zero_jordan_sizes().iter().all(|&k| k <= 1),
        nonzero_structure_preserved: after.is_regular() && same_nonzero_structure(&before, &after, EIGENVALUE_MATCH),
        structure_before: before,
        structure_after: after,
        a32_after,
        r_min_eigenvalue: r_min,
        r_psd: r_min >= -slack,
        bound_r_holds: dr_norm <= s.bound_r + slack,
        bound_j_holds: dj_norm <= s.bound_j + slack,
    })
}

/// One point of the `(s, t)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s: f64,
    pub t: f64,
    pub regular: bool,
    pub preserved: bool,
}

/// Kronecker comparison of `λE − (J + sΔ_J − R − tΔ_R)Q` against the unperturbed pencil.
pub fn perturbation_sweep(
    p: &StructuredPencil,
    pert: &StabilizingPerturbation,
    values: &[f64],
    tol: &Tolerance,
) -> Result<Vec<SweepPoint>, StabilizationError> {
    let base = staircase(p.e(), &p.a(), tol).structure;
    let mut out = Vec::new();
    for &s in values {
        for &t in values {
            let pp = pert.perturbed(p, s, t)?;
            let st = staircase(pp.e(), &pp.a(), tol).structure;
            out.push(SweepPoint {
                s,
                t,
                regular: st.is_regular(),
                preserved: st.is_regular() && same_nonzero_structure(&base, &st, EIGENVALUE_MATCH),
            });
        }
    }
    Ok(out)
}
