//! Structured pencils `λE − LQ` with `L = J − R`, and checks of their structural hypotheses.

mod fixtures;

use serde::{Deserialize, Serialize};

use crate::linalg::{min_eig, max_eig, Field, LinalgError, Matrix, Tolerance};

pub use fixtures::{fixture, fixture_names, FixtureParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PencilError {
    #[error("matrix must be square: {0}")]
    NonSquare(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("invalid fixture parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Splits `L` into its skew part `J` and the negated Hermitian part `R`, so `L = J − R`.
pub fn split_dissipative(l: &Matrix) -> Result<(Matrix, Matrix), PencilError> {
    if !l.is_square() {
        return Err(PencilError::NonSquare(format!("L is {}x{}", l.rows(), l.cols())));
    }
    let lt = l.adjoint();
    let j = (l - &lt).scale_real(0.5);
    let r = (l + &lt).scale_real(-0.5);
    Ok((j, r))
}

/// The pencil `λE − LQ`. `E` and `Q` are n×m, `L` is n×n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredPencil {
    e: Matrix,
    q: Matrix,
    l: Matrix,
    j: Matrix,
    r: Matrix,
    #[serde(default)]
    l_identity: bool,
}

impl StructuredPencil {
    pub fn new(e: Matrix, q: Matrix, l: Matrix) -> Result<Self, PencilError> {
        e.ensure_finite()?;
        q.ensure_finite()?;
        l.ensure_finite()?;
        if e.shape() != q.shape() {
            return Err(PencilError::ShapeMismatch(format!(
                "E is {}x{} but Q is {}x{}",
                e.rows(),
                e.cols(),
                q.rows(),
                q.cols()
            )));
        }
        if !l.is_square() {
            return Err(PencilError::NonSquare(format!("L is {}x{}", l.rows(), l.cols())));
        }
        if l.rows() != e.rows() {
            return Err(PencilError::ShapeMismatch(format!("L is {0}x{0} but E has {1} rows", l.rows(), e.rows())));
        }
        let (j, r) = split_dissipative(&l)?;
        Ok(StructuredPencil { e, q, l, j, r, l_identity: false })
    }

    /// Builds the pencil from `J` and `R`. `L = J − R` is formed exactly.
    pub fn from_jr(e: Matrix, j: Matrix, r: Matrix, q: Matrix) -> Result<Self, PencilError> {
        if j.shape() != r.shape() {
            return Err(PencilError::ShapeMismatch("J and R differ in shape".into()));
        }
        let l = &j - &r;
        let mut p = Self::new(e, q, l)?;
        if j.max_diff(&j.adjoint().scale_real(-1.0)) == 0.0 && r.max_diff(&r.adjoint()) == 0.0 {
            p.j = j;
            p.r = r;
        }
        Ok(p)
    }

    /// Wraps a plain pair `(E, A)` as `(E, Q = A, L = I)`. The caller asserts this reading.
    pub fn with_identity_l(e: Matrix, a: Matrix) -> Result<Self, PencilError> {
        let n = e.rows();
        let mut p = Self::new(e, a, Matrix::identity(n))?;
        p.l_identity = true;
        Ok(p)
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn l_is_identity(&self) -> bool {
        self.l_identity
    }

    /// Rows of `E`.
    pub fn n(&self) -> usize {
        self.e.rows()
    }

    /// Columns of `E`.
    pub fn m(&self) -> usize {
        self.e.cols()
    }

    pub fn field(&self) -> Field {
        self.e.field().join(self.q.field()).join(self.l.field())
    }

    /// `A = LQ`.
    pub fn a(&self) -> Matrix {
        &self.l * &self.q
    }

    /// `max(‖E‖_F, ‖LQ‖_F)`.
    pub fn scale(&self) -> f64 {
        self.e.norm_fro().max(self.a().norm_fro())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagResidual {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagEigen {
    pub holds: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `E⋆Q = Q⋆E`.
    pub b1a: FlagResidual,
    /// `EQ⋆ = QE⋆`.
    pub b1b: FlagResidual,
    /// `E⋆Q ⪰ 0`; requires `b1a`.
    pub b1c: FlagEigen,
    /// `R ⪰ 0`.
    pub r_psd: FlagEigen,
    /// `λ_max(L + L⋆) ≤ tol`.
    pub dissipative: bool,
    pub dissipative_max_eigenvalue: f64,
}

impl StructureReport {
    /// `b1a`, `b1c` and `r_psd` together.
    pub fn is_dh(&self) -> bool {
        self.b1a.holds && self.b1c.holds && self.r_psd.holds
    }
}

pub fn check_structure(p: &StructuredPencil, tol: &Tolerance) -> StructureReport {
    let (e, q) = (p.e(), p.q());
    let dim = p.n().max(p.m());
    let eq_scale = e.norm_fro() * q.norm_fro();
    let eq = &e.adjoint() * q;
    let b1a_res = (&eq - &eq.adjoint()).norm_fro();
    let b1a = FlagResidual { holds: b1a_res <= tol.threshold(dim, eq_scale), residual: b1a_res };
    let eqh = e * &q.adjoint();
    let b1b_res = (&eqh - &eqh.adjoint()).norm_fro();
    let b1b = FlagResidual { holds: b1b_res <= tol.threshold(dim, eq_scale), residual: b1b_res };
    let eq_min = min_eig(&eq);
    let b1c = FlagEigen { holds: b1a.holds && eq_min >= -tol.threshold(dim, eq.norm_fro()), min_eigenvalue: eq_min };
    let l_scale = p.l().norm_fro();
    let r_min = min_eig(p.r());
    let r_psd = FlagEigen { holds: r_min >= -tol.threshold(p.n(), l_scale), min_eigenvalue: r_min };
    let sym = p.l() + &p.l().adjoint();
    let d_max = max_eig(&sym);
    StructureReport {
        b1a,
        b1b,
        b1c,
        r_psd,
        dissipative: d_max <= tol.threshold(p.n(), l_scale),
        dissipative_max_eigenvalue: d_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        let (j, r) = split_dissipative(&Matrix::from_rows(&[vec![-1.0, 1.0], vec![-1.0, 0.0]])).unwrap();
        assert_eq!(j, Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]));
        assert_eq!(r, Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]));
        let (j, r) = split_dissipative(&Matrix::identity(2).scale_real(-1.0)).unwrap();
        assert_eq!(j.max_abs(), 0.0);
        assert_eq!(r, Matrix::identity(2));
        assert!(matches!(split_dissipative(&Matrix::zeros(2, 3)), Err(PencilError::NonSquare(_))));
    }

    #[test]
    fn identity_pencil_passes() {
        let p = StructuredPencil::new(Matrix::identity(2), Matrix::identity(2), Matrix::identity(2).scale_real(-1.0)).unwrap();
        let rep = check_structure(&p, &Tolerance::default());
        assert!(rep.b1a.holds && rep.b1b.holds && rep.b1c.holds && rep.r_psd.holds && rep.dissipative);
    }
}
