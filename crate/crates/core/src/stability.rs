//! Spectral guarantees for `λE − LQ`: half-plane location, semisimplicity on the imaginary axis,
//! index and minimal index bounds, plus the quadratic and Lyapunov-type consequences.

use serde::{Deserialize, Serialize};

use crate::kronecker::{regular_deflating_basis_from, staircase, Eigenvalue, KroneckerStructure, Staircase};
use crate::linalg::{
    hermitian_eig, inverse, min_eig, numerical_rank, pseudoinverse, range_basis, LinalgError, Matrix, Tolerance,
};
use crate::pencil::{check_structure, FlagEigen, FlagResidual, PencilError, StructureReport, StructuredPencil};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error("`{name}` is not Hermitian (residual {residual:e})")]
    NotHermitian { name: &'static str, residual: f64 },
    #[error("`{name}` is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { name: &'static str, min_eigenvalue: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Discretization of the imaginary axis, relative to the pencil scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisOptions {
    /// `|Re λ| ≤ axis · scale` counts as on the axis.
    pub axis: f64,
    /// `|λ| ≤ zero · scale` counts as zero.
    pub zero: f64,
    /// Allowed `‖RQV‖ / (‖R‖‖Q‖‖V‖)`, on top of the rank threshold at scale `‖L‖‖Q‖`.
    pub rqv: f64,
}

impl Default for AxisOptions {
    fn default() -> Self {
        AxisOptions { axis: 1e-8, zero: 1e-8, rqv: 1e-7 }
    }
}

/// An observed property and whether the hypotheses guarantee it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guarantee {
    pub observed: bool,
    pub guaranteed: bool,
}

impl Guarantee {
    /// Guaranteed but not observed.
    pub fn violated(&self) -> bool {
        self.guaranteed && !self.observed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqvResidual {
    pub eigenvalue: Eigenvalue,
    /// Dimension of the deflating subspace.
    pub dim: usize,
    /// `‖R Q V‖₂` for an orthonormal basis `V`.
    pub residual: f64,
    pub bound: f64,
}

/// Hypotheses on `E`, `Q` and `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub structure: StructureReport,
    /// Kronecker structure of `λE − Q`.
    pub eq_structure: KroneckerStructure,
    pub eq_left_indices_zero: bool,
    pub eq_regular: bool,
}

impl HypothesisReport {
    /// `E⋆Q = Q⋆E ⪰ 0`, `R ⪰ 0` and all left minimal indices of `λE − Q` zero.
    pub fn holds(&self) -> bool {
        self.structure.b1a.holds && self.structure.b1c.holds && self.structure.r_psd.holds && self.eq_left_indices_zero
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eigen_data: KroneckerStructure,
    pub scale: f64,
    pub max_real_part: Option<f64>,
    /// Finite eigenvalues in the closed left half-plane.
    pub lhp_ok: Guarantee,
    /// Nonzero imaginary eigenvalues, each with its Jordan sizes.
    pub imaginary_eigenvalues: Vec<(Eigenvalue, Vec<usize>)>,
    pub imaginary_semisimple_ok: Guarantee,
    pub rqv_residuals: Vec<RqvResidual>,
    pub rqv_ok: Guarantee,
    pub index_ok: Guarantee,
    pub right_indices_ok: Guarantee,
    /// Guaranteed only when `λE − Q` is regular.
    pub left_indices_ok: Guarantee,
    /// Described only; no bound applies.
    pub zero_jordan_sizes: Vec<usize>,
    pub hypothesis_report: HypothesisReport,
}

impl StabilityReport {
    fn guarantees(&self) -> [Guarantee; 6] {
        [
            self.lhp_ok,
            self.imaginary_semisimple_ok,
            self.rqv_ok,
            self.index_ok,
            self.right_indices_ok,
            self.left_indices_ok,
        ]
    }

    /// Hypotheses verified yet a guarantee fails.
    pub fn counterexample(&self) -> bool {
        self.guarantees().iter().any(Guarantee::violated)
    }

    /// Every property observed, guaranteed or not.
    pub fn all_observed(&self) -> bool {
        self.guarantees().iter().all(|g| g.observed)
    }
}

fn hypotheses(p: &StructuredPencil, tol: &Tolerance) -> HypothesisReport {
    let structure = check_structure(p, tol);
    let eq_structure = staircase(p.e(), p.q(), tol).structure;
    HypothesisReport {
        structure,
        eq_left_indices_zero: eq_structure.left_minimal_indices.iter().all(|&x| x == 0),
        eq_regular: eq_structure.is_regular(),
        eq_structure,
    }
}

fn orthonormal(v: &Matrix) -> Matrix {
    let thr = 1e-10 * v.norm_fro().max(f64::MIN_POSITIVE);
    range_basis(v, thr)
}

fn analyze_staircase(
    p: &StructuredPencil,
    st: &Staircase,
    hypothesis_report: HypothesisReport,
    tol: &Tolerance,
    opts: &AxisOptions,
) -> StabilityReport {
    let s = &st.structure;
    let scale = if st.scale > 0.0 { st.scale } else { 1.0 };
    let hyp = hypothesis_report.holds();
    let max_real_part = s.finite_eigenvalues.iter().map(|f| f.value.re).reduce(f64::max);
    let lhp = max_real_part.map_or(true, |x| x <= opts.axis * scale);

    let imaginary: Vec<_> = s
        .finite_eigenvalues
        .iter()
        .filter(|f| f.value.re.abs() <= opts.axis * scale && f.value.norm() > opts.zero * scale)
        .collect();
    let semisimple = imaginary.iter().all(|f| f.jordan_sizes.iter().all(|&k| k == 1));

    let (r, q) = (p.r(), p.q());
    let rq_scale = r.norm2() * q.norm2();
    let floor = tol.threshold(p.n().max(p.m()), p.l().norm2() * q.norm2());
    let mut rqv_residuals = Vec::new();
    for f in &imaginary {
        let lambda = Eigenvalue::Finite(f.value);
        let Ok(basis) = regular_deflating_basis_from(st, lambda) else { continue };
        let v = orthonormal(&basis.v);
        let residual = if v.cols() == 0 { 0.0 } else { (&(r * q) * &v).norm2() };
        rqv_residuals.push(RqvResidual { eigenvalue: lambda, dim: v.cols(), residual, bound: opts.rqv * rq_scale + floor });
    }
    let rqv = rqv_residuals.iter().all(|x| x.residual <= x.bound);

    let guarantee = |observed: bool| Guarantee { observed, guaranteed: hyp };
    StabilityReport {
        eigen_data: s.clone(),
        scale,
        max_real_part,
        lhp_ok: guarantee(lhp),
        imaginary_eigenvalues: imaginary.iter().map(|f| (Eigenvalue::Finite(f.value), f.jordan_sizes.clone())).collect(),
        imaginary_semisimple_ok: guarantee(semisimple),
        rqv_residuals,
        rqv_ok: guarantee(rqv),
        index_ok: guarantee(s.index <= 2),
        right_indices_ok: guarantee(s.right_minimal_indices.iter().all(|&x| x <= 1)),
        left_indices_ok: Guarantee {
            observed: s.left_minimal_indices.iter().all(|&x| x == 0),
            guaranteed: hyp && hypothesis_report.eq_regular,
        },
        zero_jordan_sizes: s.zero_jordan_sizes(),
        hypothesis_report,
    }
}

pub fn analyze_dh_pencil(p: &StructuredPencil, tol: &Tolerance) -> StabilityReport {
    analyze_dh_pencil_with(p, tol, &AxisOptions::default())
}

pub fn analyze_dh_pencil_with(p: &StructuredPencil, tol: &Tolerance, opts: &AxisOptions) -> StabilityReport {
    let st = staircase(p.e(), &p.a(), tol);
    analyze_staircase(p, &st, hypotheses(p, tol), tol, opts)
}

/// Results for `S(λ) = λ²M + λD + K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticReport {
    /// Report on the companion linearization.
    pub linearization: StabilityReport,
    pub left_minimal_indices: Vec<usize>,
    /// Linearization right indices minus one.
    pub right_minimal_indices: Vec<usize>,
    /// A linearization right index was zero, which no quadratic index maps to.
    pub index_shift_inconsistent: bool,
    pub lhp_ok: bool,
    pub imaginary_semisimple_ok: bool,
    pub zero_chains_ok: bool,
    pub infinite_chains_ok: bool,
    pub minimal_indices_zero: bool,
}

impl QuadraticReport {
    pub fn all_ok(&self) -> bool {
        self.lhp_ok
            && self.imaginary_semisimple_ok
            && self.zero_chains_ok
            && self.infinite_chains_ok
            && self.minimal_indices_zero
            && !self.index_shift_inconsistent
    }
}

fn require_psd(name: &'static str, a: &Matrix, n: usize, tol: &Tolerance) -> Result<(), StabilityError> {
    if a.shape() != (n, n) {
        return Err(StabilityError::ShapeMismatch(format!("`{name}` is {}x{}, expected {n}x{n}", a.rows(), a.cols())));
    }
    let scale = a.norm_fro();
    let residual = a.max_diff(&a.adjoint());
    if residual > tol.threshold(n, scale) {
        return Err(StabilityError::NotHermitian { name, residual });
    }
    let lo = min_eig(a);
    if lo < -tol.threshold(n, scale) {
        return Err(StabilityError::NotPsd { name, min_eigenvalue: lo });
    }
    Ok(())
}

/// The dH companion linearization `λ diag(M, I) − (J − diag(D, 0)) diag(I, K)` with `J = [[0, I], [−I, 0]]`.
pub fn quadratic_linearization(m: &Matrix, d: &Matrix, k: &Matrix) -> Result<StructuredPencil, StabilityError> {
    let n = m.rows();
    let i = Matrix::identity(n);
    let z = Matrix::zeros(n, n);
    let e = Matrix::block_diag(&[m, &i]);
    let j = Matrix::blocks(&[vec![&z, &i], vec![&i.scale_real(-1.0), &z]]);
    let r = Matrix::block_diag(&[d, &z]);
    let q = Matrix::block_diag(&[&i, k]);
    Ok(StructuredPencil::from_jr(e, j, r, q)?)
}

pub fn analyze_quadratic(m: &Matrix, d: &Matrix, k: &Matrix, tol: &Tolerance) -> Result<QuadraticReport, StabilityError> {
    let n = m.rows();
    require_psd("M", m, n, tol)?;
    require_psd("D", d, n, tol)?;
    require_psd("K", k, n, tol)?;
    let p = quadratic_linearization(m, d, k)?;
    let lin = analyze_dh_pencil(&p, tol);
    let s = &lin.eigen_data;
    let index_shift_inconsistent = s.right_minimal_indices.contains(&0);
    let right: Vec<usize> = s.right_minimal_indices.iter().map(|&x| x.saturating_sub(1)).collect();
    let left = s.left_minimal_indices.clone();
    Ok(QuadraticReport {
        lhp_ok: lin.lhp_ok.observed,
        imaginary_semisimple_ok: lin.imaginary_semisimple_ok.observed,
        zero_chains_ok: s.zero_jordan_sizes().iter().all(|&x| x <= 2),
        infinite_chains_ok: s.infinite_jordan_sizes.iter().all(|&x| x <= 2),
        minimal_indices_zero: left.iter().chain(&right).all(|&x| x == 0),
        left_minimal_indices: left,
        right_minimal_indices: right,
        index_shift_inconsistent,
        linearization: lin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LyapunovVariant {
    /// `E⋆Q ⪰ 0`, `AQ† + Q†⋆A⋆ ⪯ 0`, `ker Q ⊆ ker A`.
    #[default]
    General,
    /// `E⋆Q ⪰ 0`, `Q⋆A + A⋆Q ⪯ 0` with `Q` square and invertible.
    SquareInvertible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub variant: LyapunovVariant,
    /// All minimal indices of `λE − Q` zero.
    pub eq_minimal_indices_zero: bool,
    pub eq_structure: KroneckerStructure,
    pub e_star_q_psd: FlagEigen,
    /// Largest eigenvalue of the dissipation inequality's left side.
    pub dissipation: FlagEigen,
    /// `‖A (I − Q†Q)‖_F`.
    pub kernel_inclusion: FlagResidual,
    /// `Q` square and invertible; required by the square variant.
    pub q_invertible: bool,
    /// Report on `λE − A` with `L = AQ†`, hypotheses included.
    pub stability: StabilityReport,
}

impl LyapunovReport {
    pub fn conditions_hold(&self) -> bool {
        let base = self.e_star_q_psd.holds && self.dissipation.holds;
        match self.variant {
            LyapunovVariant::General => self.eq_minimal_indices_zero && base && self.kernel_inclusion.holds,
            LyapunovVariant::SquareInvertible => self.q_invertible && base,
        }
    }

    /// Conditions hold and the guarantees are confirmed on `λE − A`.
    pub fn guarantees_confirmed(&self) -> bool {
        self.conditions_hold() && self.stability.all_observed()
    }
}

fn psd_flag(h: &Matrix, dim: usize, tol: &Tolerance, nonpositive: bool) -> FlagEigen {
    let h = h.hermitian_part();
    let scale = h.norm_fro();
    let thr = tol.threshold(dim, scale);
    let vals = hermitian_eig(&h).map(|x| x.values).unwrap_or_default();
    if nonpositive {
        let hi = vals.last().copied().unwrap_or(0.0);
        FlagEigen { holds: hi <= thr, min_eigenvalue: hi }
    } else {
        let lo = vals.first().copied().unwrap_or(0.0);
        FlagEigen { holds: lo >= -thr, min_eigenvalue: lo }
    }
}

/// Lyapunov-type sufficient conditions for the guarantees on `λE − A`.
pub fn lyapunov_check(
    e: &Matrix,
    a: &Matrix,
    q: &Matrix,
    tol: &Tolerance,
    variant: LyapunovVariant,
) -> Result<LyapunovReport, StabilityError> {
    if e.shape() != a.shape() || e.shape() != q.shape() {
        return Err(StabilityError::ShapeMismatch(format!(
            "E {}x{}, A {}x{}, Q {}x{}",
            e.rows(),
            e.cols(),
            a.rows(),
            a.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let (n, m) = e.shape();
    let dim = n.max(m);
    let eq_structure = staircase(e, q, tol).structure;
    let eq_minimal_indices_zero = eq_structure.left_minimal_indices.iter().chain(&eq_structure.right_minimal_indices).all(|&x| x == 0);
    let e_star_q = &e.adjoint() * q;
    let sym_res = e_star_q.max_diff(&e_star_q.adjoint());
    let mut e_star_q_psd = psd_flag(&e_star_q, m, tol, false);
    e_star_q_psd.holds &= sym_res <= tol.threshold(m, e_star_q.norm_fro());

    let q_inv = if n == m { inverse(q).ok().filter(|qi| qi.is_finite()) } else { None };
    let q_invertible = q_inv.is_some() && numerical_rank(q, tol) == n;
    let q_pinv = pseudoinverse(q, tol);
    let l = match (variant, &q_inv) {
        (LyapunovVariant::SquareInvertible, Some(qi)) if q_invertible => a * qi,
        _ => a * &q_pinv,
    };
    let dissipation = match variant {
        LyapunovVariant::General => psd_flag(&(&l + &l.adjoint()), n, tol, true),
        LyapunovVariant::SquareInvertible => {
            let qa = &q.adjoint() * a;
            psd_flag(&(&qa + &qa.adjoint()), n, tol, true)
        }
    };
    let proj = &q_pinv * q;
    let leak = (a - &(a * &proj)).norm_fro();
    let kernel_inclusion = FlagResidual { holds: leak <= tol.threshold(dim, a.norm_fro()), residual: leak };

    let field = e.field().join(a.field()).join(q.field());
    let p = StructuredPencil::new(e.clone(), q.clone(), l.settle_field(field, 0.0))?;
    let st = staircase(e, a, tol);
    let stability = analyze_staircase(&p, &st, hypotheses(&p, tol), tol, &AxisOptions::default());
    Ok(LyapunovReport {
        variant,
        eq_minimal_indices_zero,
        eq_structure,
        e_star_q_psd,
        dissipation,
        kernel_inclusion,
        q_invertible,
        stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{fixture, FixtureParams};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn nonsimple_zero_is_described_only() {
        let p = fixture("nonsimple0", &FixtureParams::new()).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert_eq!(r.zero_jordan_sizes, vec![2]);
        assert!(r.lhp_ok.observed && r.imaginary_eigenvalues.is_empty());
        assert_eq!(r.eigen_data.index, 0);
        assert!(!r.counterexample());
    }

    #[test]
    fn rhp_example_withholds_guarantees() {
        let p = fixture("ex:rhp", &FixtureParams::new().scalar("a", 1.0)).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert!(!r.lhp_ok.observed && !r.lhp_ok.guaranteed);
        assert_eq!(r.hypothesis_report.eq_structure.left_minimal_indices, vec![1]);
        assert!(!r.counterexample());
    }

    #[test]
    fn lossless_oscillator() {
        let j = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let p = StructuredPencil::new(Matrix::identity(2), Matrix::identity(2), j).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert_eq!(r.imaginary_eigenvalues.len(), 2);
        assert!(r.imaginary_semisimple_ok.observed && r.rqv_ok.observed);
        assert!(r.rqv_residuals.iter().all(|x| x.residual == 0.0 && x.dim == 1));
        for (lam, _) in &r.imaginary_eigenvalues {
            let Eigenvalue::Finite(z) = lam else { panic!() };
            assert!((z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12);
        }
    }
}
