//! Matrix lemmas behind the structured perturbation: minimal-norm annihilators,
//! contraction certificates for psd block matrices, and psd completion.

use serde::{Deserialize, Serialize};

use super::StabilizationError;
use crate::linalg::{hermitian_eig, hermitian_part_eig, min_eig, pinv_sqrt, psd_sqrt, range_projector, Matrix, Tolerance};

/// Slack allowed on `‖Γ‖ ≤ 1`.
pub const GAMMA_SLACK: f64 = 1e-8;

/// The Frobenius-minimal `Z` with `B(C + Z) = 0`, namely `Z = −P_{im B⋆} C`.
pub fn min_norm_annihilator(b: &Matrix, c: &Matrix, tol: &Tolerance) -> Matrix {
    assert_eq!(b.cols(), c.rows(), "B and C are not conformable");
    if b.is_empty() || b.max_abs() == 0.0 {
        return Matrix::zeros(c.rows(), c.cols()).with_field(c.field());
    }
    let thr = tol.threshold(b.rows().max(b.cols()), b.norm_fro());
    let p = range_projector(&b.adjoint(), thr);
    (&p * c).scale_real(-1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GammaCertificate {
    /// `E⋆ = B^{1/2} Γ F^{1/2}` with `‖Γ‖ ≤ 1`: the block matrix is psd.
    Certified { gamma: Matrix, norm: f64, residual: f64 },
    /// No contraction exists; `min_eigenvalue` of the block matrix confirms it.
    Failed { norm: f64, residual: f64, min_eigenvalue: f64 },
}

impl GammaCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, GammaCertificate::Certified { .. })
    }
}

fn require_psd(name: &'static str, a: &Matrix, tol: &Tolerance) -> Result<(), StabilizationError> {
    let n = a.rows();
    if !a.is_square() {
        return Err(StabilizationError::ShapeMismatch(format!("`{name}` is {}x{}", a.rows(), a.cols())));
    }
    let thr = tol.threshold(n, a.norm_fro());
    let residual = a.max_diff(&a.adjoint());
    if residual > thr {
        return Err(StabilizationError::NotHermitian { name, residual });
    }
    let lo = min_eig(a);
    if lo < -thr {
        return Err(StabilizationError::NotPsd { name, min_eigenvalue: lo });
    }
    Ok(())
}

/// Tests `[[B, E⋆], [E, F]] ⪰ 0` through the factorization `E⋆ = B^{1/2} Γ F^{1/2}`.
pub fn gamma_certificate(b: &Matrix, f: &Matrix, e: &Matrix, tol: &Tolerance) -> Result<GammaCertificate, StabilizationError> {
    require_psd("B", b, tol)?;
    require_psd("F", f, tol)?;
    if e.shape() != (f.rows(), b.rows()) {
        return Err(StabilizationError::ShapeMismatch(format!(
            "E is {}x{}, expected {}x{}",
            e.rows(),
            e.cols(),
            f.rows(),
            b.rows()
        )));
    }
    let dim = b.rows() + f.rows();
    let tb = tol.threshold(dim, b.norm_fro());
    let tf = tol.threshold(dim, f.norm_fro());
    let es = e.adjoint();
    let gamma = &(&pinv_sqrt(b, tb) * &es) * &pinv_sqrt(f, tf);
    let sb = psd_sqrt(&b.hermitian_part(), f64::INFINITY)?;
    let sf = psd_sqrt(&f.hermitian_part(), f64::INFINITY)?;
    let residual = (&es - &(&(&sb * &gamma) * &sf)).norm2();
    let norm = gamma.norm2();
    let scale = b.norm2().max(f.norm2()).max(e.norm2());
    let ok = norm <= 1.0 + GAMMA_SLACK && residual <= tol.threshold(dim, scale).max(GAMMA_SLACK * scale);
    if ok {
        Ok(GammaCertificate::Certified { gamma, norm, residual })
    } else {
        let t = Matrix::blocks(&[vec![b, &es], vec![e, f]]);
        let min_eigenvalue = hermitian_eig(&t.hermitian_part())?.min();
        Ok(GammaCertificate::Failed { norm, residual, min_eigenvalue })
    }
}

/// `W` and `α` making `[[B, (C+Y)⋆], [C+Y, D+W]]` psd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdCompletion {
    pub w: Matrix,
    pub alpha: f64,
    /// `‖Y‖₂`.
    pub y_norm: f64,
}

/// `‖(I − P_{im B}) Y⋆‖₂`.
pub fn range_defect(b: &Matrix, y: &Matrix, tol: &Tolerance) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let thr = tol.threshold(b.rows(), b.norm_fro());
    let ys = y.adjoint();
    let p = hermitian_part_eig(b).apply(|l| if l > thr { 1.0 } else { 0.0 });
    (&ys - &(&p * &ys)).norm2()
}

pub fn psd_completion(b: &Matrix, d: &Matrix, c: &Matrix, y: &Matrix, tol: &Tolerance) -> Result<PsdCompletion, StabilizationError> {
    require_psd("B", b, tol)?;
    require_psd("D", d, tol)?;
    let (k, m) = (b.rows(), d.rows());
    if c.shape() != (m, k) || y.shape() != (m, k) {
        return Err(StabilizationError::ShapeMismatch(format!("C and Y must be {m}x{k}")));
    }
    let t = Matrix::blocks(&[vec![b, &c.adjoint()], vec![c, d]]);
    let scale = t.norm_fro();
    let lo = min_eig(&t);
    if lo < -tol.threshold(k + m, scale) {
        return Err(StabilizationError::NotPsd { name: "[[B, C*], [C, D]]", min_eigenvalue: lo });
    }
    let y_norm = if y.is_empty() { 0.0 } else { y.norm2() };
    if y_norm == 0.0 {
        return Ok(PsdCompletion { w: Matrix::zeros(m, m).with_field(d.field()), alpha: 0.0, y_norm });
    }
    let defect = range_defect(b, y, tol);
    if defect > tol.threshold(k + m, scale.max(y_norm)) {
        return Err(StabilizationError::RangeConditionViolated { residual: defect });
    }
    let shifted = d + &Matrix::identity(m).scale_real(y_norm);
    let tb = tol.threshold(k, b.norm_fro());
    let alpha = (&(&pinv_sqrt(b, tb) * &y.adjoint()) * &pinv_sqrt(&shifted, 0.0)).norm2();
    let w = &shifted.scale_real(alpha * alpha + 2.0 * alpha) + &Matrix::identity(m).scale_real(y_norm);
    Ok(PsdCompletion { w: w.hermitian_part(), alpha, y_norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn annihilator_examples() {
        let t = Tolerance::default();
        let z = min_norm_annihilator(&m(&[&[1.0, 0.0]]), &m(&[&[3.0], &[4.0]]), &t);
        assert!(z.max_diff(&m(&[&[-3.0], &[0.0]])) < 1e-15);
        assert!((z.norm_fro() - 3.0).abs() < 1e-15);
        let z = min_norm_annihilator(&Matrix::zeros(1, 2), &m(&[&[3.0], &[4.0]]), &t);
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn gamma_examples() {
        let t = Tolerance::default();
        let i = Matrix::identity(2);
        match gamma_certificate(&i, &i, &i, &t).unwrap() {
            GammaCertificate::Certified { gamma, norm, .. } => {
                assert!(gamma.max_diff(&i) < 1e-14 && (norm - 1.0).abs() < 1e-14)
            }
            other => panic!("{other:?}"),
        }
        match gamma_certificate(&i, &i, &i.scale_real(2.0), &t).unwrap() {
            GammaCertificate::Failed { min_eigenvalue, .. } => assert!((min_eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn completion_example() {
        let t = Tolerance::default();
        let c = psd_completion(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[0.0]]), &m(&[&[1.0]]), &t).unwrap();
        assert!((c.alpha - 1.0).abs() < 1e-15);
        assert!((c.w[(0, 0)].re - 4.0).abs() < 1e-14);
        let z = psd_completion(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[0.0]]), &m(&[&[0.0]]), &t).unwrap();
        assert_eq!(z.w.max_abs(), 0.0);
        assert_eq!(z.alpha, 0.0);
        let bad = psd_completion(&m(&[&[0.0]]), &m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[1.0]]), &t);
        assert!(matches!(bad, Err(StabilizationError::RangeConditionViolated { .. })));
    }
}
