//! Example pencils from the literature on dissipative Hamiltonian descriptor systems.

use std::collections::BTreeMap;

use super::{PencilError, StructuredPencil};
use crate::linalg::{inverse, min_eig, Matrix};

/// Named parameters: matrices (block entries) and scalars (sizes, coefficients).
#[derive(Debug, Clone, Default)]
pub struct FixtureParams {
    pub matrices: BTreeMap<String, Matrix>,
    pub scalars: BTreeMap<String, f64>,
}

impl FixtureParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn matrix(mut self, name: &str, m: Matrix) -> Self {
        self.matrices.insert(name.to_string(), m);
        self
    }

    pub fn scalar(mut self, name: &str, v: f64) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    fn get_matrix(&self, name: &str, default: impl FnOnce() -> Matrix) -> Matrix {
        self.matrices.get(name).cloned().unwrap_or_else(default)
    }

    fn get_scalar(&self, name: &str, default: f64) -> f64 {
        self.scalars.get(name).copied().unwrap_or(default)
    }

    fn get_size(&self, name: &str, default: usize, min: usize) -> Result<usize, PencilError> {
        let v = self.get_scalar(name, default as f64);
        if v.fract() != 0.0 || v < min as f64 {
            return Err(PencilError::InvalidParams(format!("`{name}` must be an integer ≥ {min}, got {v}")));
        }
        Ok(v as usize)
    }
}

const NAMES: [&str; 10] = [
    "rlc",
    "stokes",
    "gas",
    "mech-quadratic",
    "mech-constrained",
    "ex:rhp",
    "nonsimple0",
    "index2",
    "right-index",
    "rem:ind",
];

pub fn fixture_names() -> &'static [&'static str] {
    &NAMES
}

fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn z(r: usize, c: usize) -> Matrix {
    Matrix::zeros(r, c)
}

fn eye(n: usize) -> Matrix {
    Matrix::identity(n)
}

fn require_hermitian(name: &str, a: &Matrix, definite: bool) -> Result<(), PencilError> {
    if !a.is_square() || a.max_diff(&a.adjoint()) > 1e-14 * a.max_abs().max(1.0) {
        return Err(PencilError::InvalidParams(format!("`{name}` must be Hermitian")));
    }
    let lo = min_eig(a);
    let floor = -1e-12 * a.max_abs().max(1.0);
    if definite && lo <= 0.0 || !definite && lo < floor {
        let kind = if definite { "positive definite" } else { "positive semidefinite" };
        return Err(PencilError::InvalidParams(format!("`{name}` must be {kind}")));
    }
    Ok(())
}

fn require_rows(name: &str, a: &Matrix, rows: usize) -> Result<(), PencilError> {
    if a.rows() != rows {
        return Err(PencilError::InvalidParams(format!("`{name}` must have {rows} rows, has {}", a.rows())));
    }
    Ok(())
}

fn require_cols(name: &str, a: &Matrix, cols: usize) -> Result<(), PencilError> {
    if a.cols() != cols {
        return Err(PencilError::InvalidParams(format!("`{name}` must have {cols} columns, has {}", a.cols())));
    }
    Ok(())
}

/// Builds a named example pencil. Unspecified parameters take small defaults.
pub fn fixture(name: &str, params: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    match name {
        "rlc" => rlc(params),
        "stokes" => stokes(params),
        "gas" => gas(params),
        "mech-quadratic" => mech_quadratic(params),
        "mech-constrained" => mech_constrained(params),
        "ex:rhp" => {
            let a = params.get_scalar("a", 1.0);
            if !(a > 0.0 && a.is_finite()) {
                return Err(PencilError::InvalidParams("`a` must be positive".into()));
            }
            StructuredPencil::new(m(&[&[1.0, 0.0], &[0.0, 0.0]]), m(&[&[0.0, 0.0], &[a, 0.0]]), m(&[&[0.0, 1.0], &[-1.0, 0.0]]))
        }
        "nonsimple0" => {
            StructuredPencil::new(eye(2), Matrix::diag_real(&[1.0, 0.0]), m(&[&[0.0, -1.0], &[1.0, 0.0]]))
        }
        "index2" => StructuredPencil::new(Matrix::diag_real(&[1.0, 0.0]), eye(2), m(&[&[0.0, -1.0], &[1.0, 0.0]])),
        "right-index" => StructuredPencil::new(
            Matrix::diag_real(&[1.0, 0.0]),
            Matrix::diag_real(&[0.0, 1.0]),
            m(&[&[-1.0, 1.0], &[-1.0, 0.0]]),
        ),
        "rem:ind" => {
            let n = params.get_size("n", 3, 2)?;
            let mut d = vec![1.0; n];
            d[n - 1] = 0.0;
            let e = Matrix::diag_real(&d);
            let mut j = z(n, n);
            for i in 0..n - 1 {
                j[(i, i + 1)] = (-1.0).into();
                j[(i + 1, i)] = 1.0.into();
            }
            StructuredPencil::from_jr(e.clone(), j, z(n, n), e)
        }
        _ => Err(PencilError::UnknownFixture(name.to_string())),
    }
}

fn rlc(p: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    // two nodes: capacitor at 1, resistor 1-2, inductor at 2, voltage source at 1
    let gc = p.get_matrix("Gc", || m(&[&[1.0], &[0.0]]));
    let k = gc.rows();
    let c = p.get_matrix("C", || eye(gc.cols()));
    let gr = p.get_matrix("Gr", || m(&[&[1.0], &[-1.0]]));
    let rr = p.get_matrix("Rr", || eye(gr.cols()));
    let gl = p.get_matrix("Gl", || m(&[&[0.0], &[1.0]]));
    let lind = p.get_matrix("Lind", || eye(gl.cols()));
    let gv = p.get_matrix("Gv", || m(&[&[1.0], &[0.0]]));
    for (nm, g) in [("Gr", &gr), ("Gl", &gl), ("Gv", &gv)] {
        require_rows(nm, g, k)?;
    }
    require_hermitian("C", &c, true)?;
    require_hermitian("Rr", &rr, true)?;
    require_hermitian("Lind", &lind, true)?;
    require_cols("C", &c, gc.cols())?;
    require_cols("Rr", &rr, gr.cols())?;
    require_cols("Lind", &lind, gl.cols())?;
    if crate::linalg::numerical_rank(&gv, &Default::default()) < gv.cols() {
        return Err(PencilError::InvalidParams("`Gv` must have full column rank".into()));
    }
    let (nl, nv) = (gl.cols(), gv.cols());
    let e11 = &(&gc * &c) * &gc.adjoint();
    let e = Matrix::block_diag(&[&e11, &lind, &z(nv, nv)]);
    let rinv = inverse(&rr)?;
    let a11 = (&(&gr * &rinv) * &gr.adjoint()).scale_real(-1.0);
    let l = Matrix::blocks(&[
        vec![&a11, &gl.scale_real(-1.0), &gv.scale_real(-1.0)],
        vec![&gl.adjoint(), &z(nl, nl), &z(nl, nv)],
        vec![&gv.adjoint(), &z(nv, nl), &z(nv, nv)],
    ]);
    let n = e.rows();
    StructuredPencil::new(e, eye(n), l)
}

fn stokes(p: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    let a = p.get_matrix("A", || eye(1));
    let b = p.get_matrix("B", || eye(1));
    let mm = p.get_matrix("M", || eye(a.rows()));
    require_hermitian("A", &a, false)?;
    require_hermitian("M", &mm, true)?;
    require_rows("B", &b, a.rows())?;
    require_rows("M", &mm, a.rows())?;
    let (n, k) = (a.rows(), b.cols());
    let e = Matrix::block_diag(&[&mm, &z(k, k)]);
    let j = Matrix::blocks(&[vec![&z(n, n), &b], vec![&b.adjoint().scale_real(-1.0), &z(k, k)]]);
    let r = Matrix::block_diag(&[&a, &z(k, k)]);
    StructuredPencil::from_jr(e, j, r, eye(n + k))
}

fn gas(p: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    let g = p.get_matrix("G", || m(&[&[1.0, 1.0]]));
    let k = p.get_matrix("K", || m(&[&[1.0, -1.0]]));
    let (np, nq, nr) = (g.rows(), g.cols(), k.rows());
    let m1 = p.get_matrix("M1", || eye(np));
    let m2 = p.get_matrix("M2", || eye(nq));
    let d = p.get_matrix("D", || eye(nq));
    require_cols("K", &k, nq)?;
    require_hermitian("M1", &m1, true)?;
    require_hermitian("M2", &m2, true)?;
    require_hermitian("D", &d, true)?;
    require_rows("M1", &m1, np)?;
    require_rows("M2", &m2, nq)?;
    require_rows("D", &d, nq)?;
    let gk = Matrix::hstack(&[&g.adjoint(), &k.adjoint()]);
    if crate::linalg::numerical_rank(&gk, &Default::default()) < np + nr {
        return Err(PencilError::InvalidParams("[G⋆ K⋆] must have full column rank".into()));
    }
    let e = Matrix::block_diag(&[&m1, &m2, &z(nr, nr)]);
    let j = Matrix::blocks(&[
        vec![&z(np, np), &g.scale_real(-1.0), &z(np, nr)],
        vec![&g.adjoint(), &z(nq, nq), &k.adjoint()],
        vec![&z(nr, np), &k.scale_real(-1.0), &z(nr, nr)],
    ]);
    let r = Matrix::block_diag(&[&z(np, np), &d, &z(nr, nr)]);
    StructuredPencil::from_jr(e, j, r, eye(np + nq + nr))
}

fn mech_quadratic(p: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    let mm = p.get_matrix("M", || eye(1));
    let n = mm.rows();
    let d = p.get_matrix("D", || eye(n));
    let k = p.get_matrix("K", || eye(n));
    for (nm, x) in [("M", &mm), ("D", &d), ("K", &k)] {
        require_hermitian(nm, x, false)?;
        require_rows(nm, x, n)?;
    }
    let e = Matrix::block_diag(&[&mm, &eye(n)]);
    let j = Matrix::blocks(&[vec![&z(n, n), &eye(n)], vec![&eye(n).scale_real(-1.0), &z(n, n)]]);
    let r = Matrix::block_diag(&[&d, &z(n, n)]);
    let q = Matrix::block_diag(&[&eye(n), &k]);
    StructuredPencil::from_jr(e, j, r, q)
}

fn mech_constrained(p: &FixtureParams) -> Result<StructuredPencil, PencilError> {
    let mm = p.get_matrix("M", || eye(1));
    let n = mm.rows();
    let d = p.get_matrix("D", || z(n, n));
    let k = p.get_matrix("K", || eye(n));
    let g = p.get_matrix("G", || Matrix::from_rows(&[vec![1.0; n]]));
    for (nm, x) in [("M", &mm), ("D", &d), ("K", &k)] {
        require_hermitian(nm, x, false)?;
        require_rows(nm, x, n)?;
    }
    require_cols("G", &g, n)?;
    let c = g.rows();
    let e = Matrix::block_diag(&[&mm, &z(c, c), &eye(n), &eye(c)]);
    // skew completion: the (4,2) block is −I
    let j = Matrix::blocks(&[
        vec![&z(n, n), &z(n, c), &eye(n), &z(n, c)],
        vec![&z(c, n), &z(c, c), &z(c, n), &eye(c)],
        vec![&eye(n).scale_real(-1.0), &z(n, c), &z(n, n), &z(n, c)],
        vec![&z(c, n), &eye(c).scale_real(-1.0), &z(c, n), &z(c, c)],
    ]);
    let r = Matrix::block_diag(&[&d, &z(c, c), &z(n, n), &z(c, c)]);
    let kg = Matrix::blocks(&[vec![&k, &g.adjoint()], vec![&g, &z(c, c)]]);
    let q = Matrix::block_diag(&[&eye(n), &eye(c), &kg]);
    StructuredPencil::from_jr(e, j, r, q)
}
