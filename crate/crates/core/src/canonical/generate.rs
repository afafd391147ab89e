//! Hankel factors and generators of pairs with prescribed left minimal indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CanonicalError;
use crate::linalg::{householder_qr, random_invertible, random_psd, random_skew, random_unitary, re, svd, Field, Matrix};
use crate::pencil::StructuredPencil;

/// Strictly decreasing positive nodes `ξ₁ > … > ξ_k > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelSpec {
    nodes: Vec<f64>,
}

impl HankelSpec {
    pub fn new(nodes: Vec<f64>) -> Result<Self, CanonicalError> {
        if nodes.is_empty() {
            return Err(CanonicalError::InvalidNodes("no nodes".into()));
        }
        if nodes.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(CanonicalError::InvalidNodes("nodes must be positive and finite".into()));
        }
        if nodes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(CanonicalError::InvalidNodes("nodes must be strictly decreasing".into()));
        }
        Ok(HankelSpec { nodes })
    }

    /// Nodes `k, k−1, …, 1`.
    pub fn integer(k: usize) -> Result<Self, CanonicalError> {
        Self::new((1..=k).rev().map(|x| x as f64).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    /// `V_{l,i} = ξ_l^i`, i = 1..k; `VᵀV = H`.
    pub fn vandermonde(&self) -> Matrix {
        let k = self.k();
        let mut v = Matrix::zeros(k, k);
        for (l, &x) in self.nodes.iter().enumerate() {
            for i in 0..k {
                v[(l, i)] = re(x.powi(i as i32 + 1));
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HankelFactor {
    /// Principal square root.
    #[default]
    Sqrt,
    /// Upper triangular with positive diagonal.
    Cholesky,
}

/// `H = [Σ_l ξ_l^{i+j}]` and a factor `S` with `S⋆S = H`, both computed from the Vandermonde matrix.
pub fn hankel_from_nodes(spec: &HankelSpec, factor: HankelFactor) -> (Matrix, Matrix) {
    let k = spec.k();
    let mut h = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let s: f64 = spec.nodes.iter().map(|&x| x.powi((i + j + 2) as i32)).sum();
            h[(i, j)] = re(s);
        }
    }
    let v = spec.vandermonde();
    let s = match factor {
        HankelFactor::Sqrt => {
            let d = svd(&v).expect("finite nodes");
            let w = &d.v;
            (&(w * &Matrix::diag_real(&d.sigma)) * &w.adjoint()).hermitian_part().into_real()
        }
        HankelFactor::Cholesky => {
            let (_, mut r) = householder_qr(&v).expect("finite nodes");
            for i in 0..k {
                if r[(i, i)].re < 0.0 {
                    for j in 0..k {
                        r[(i, j)] = -r[(i, j)];
                    }
                }
            }
            r.into_real()
        }
    };
    (h, s)
}

/// The submatrix of `H` without its first row and last column.
pub fn hankel_tilde(h: &Matrix) -> Matrix {
    let k = h.rows();
    if k == 0 {
        return Matrix::zeros(0, 0);
    }
    h.sub(1, k, 0, k - 1)
}

/// Block `(W, ΞW)` of size (η+1)×η with left minimal index η, where `ΞW` spans the pencil
/// `S(λE₀ − Q₀)` for the Vandermonde factor `S`, brought to orthonormal `E` by a right equivalence.
fn left_block(spec: &HankelSpec) -> (Matrix, Matrix) {
    let k = spec.k();
    if k == 1 {
        return (Matrix::zeros(1, 0), Matrix::zeros(1, 0));
    }
    let v = spec.vandermonde();
    let se0 = v.columns(0, k - 1);
    let (qf, _) = householder_qr(&se0).expect("finite nodes");
    let w = qf.columns(0, k - 1);
    let xi = Matrix::diag_real(spec.nodes());
    let qw = &xi * &w;
    (w, qw)
}

fn theta_pair(theta: &[f64]) -> (Matrix, Matrix) {
    let c: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let s: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    (Matrix::diag_real(&c), Matrix::diag_real(&s))
}

fn assemble(blocks: &[(Matrix, Matrix)], rows: usize, cols: usize) -> (Matrix, Matrix) {
    let mut e = Matrix::zeros(rows, cols);
    let mut q = Matrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for (be, bq) in blocks {
        e.set_block(r0, c0, be);
        q.set_block(r0, c0, bq);
        r0 += be.rows();
        c0 += be.cols();
    }
    (e, q)
}

/// Feasibility for `n` rows, `m` columns and left indices `etas`: `n − q ≤ m` and `Σ η ≤ n − q`.
fn check_feasible(n: usize, m: usize, etas: &[usize]) -> Result<(), CanonicalError> {
    let q = etas.len();
    let eta: usize = etas.iter().sum();
    if q > n || n - q > m || eta > n - q {
        return Err(CanonicalError::InfeasibleDimensions(format!(
            "{n}x{m} pencil cannot carry left minimal indices {etas:?}"
        )));
    }
    Ok(())
}

/// An n×m pair with `Q*E = E*Q ⪰ 0` whose left minimal indices are exactly `etas`.
///
/// Each index η contributes an (η+1)×η block built from the nodes `η+1, …, 1`; the rest is a
/// diagonal regular block with positive eigenvalues followed by zero columns.
pub fn generate_prescribed_left_indices(n: usize, m: usize, etas: &[usize]) -> Result<(Matrix, Matrix), CanonicalError> {
    check_feasible(n, m, etas)?;
    let eta: usize = etas.iter().sum();
    let r = n - eta - etas.len();
    let mut blocks: Vec<(Matrix, Matrix)> = etas.iter().map(|&k| left_block(&HankelSpec::integer(k + 1).unwrap())).collect();
    let theta: Vec<f64> = (0..r).map(|i| std::f64::consts::FRAC_PI_2 * (i + 1) as f64 / (r + 1) as f64).collect();
    blocks.push(theta_pair(&theta));
    Ok(assemble(&blocks, n, m))
}

/// Options for [`random_structured_pencil`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomPencilOptions {
    /// `λE − Q` regular (needs n = m).
    pub regular: bool,
    /// All left minimal indices zero; otherwise random small left indices may appear.
    pub zero_left_indices: bool,
    /// Random dissipative `L = J − R`; otherwise `L = −I`.
    pub with_l: bool,
    pub field: Field,
}

impl Default for RandomPencilOptions {
    fn default() -> Self {
        RandomPencilOptions { regular: false, zero_left_indices: false, with_l: true, field: Field::Real }
    }
}

fn random_theta(rng: &mut ChaCha8Rng, r: usize) -> Vec<f64> {
    (0..r)
        .map(|_| match rng.gen_range(0..5) {
            0 => 0.0,
            1 => std::f64::consts::FRAC_PI_2,
            _ => rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
        })
        .collect()
}

fn random_nodes(rng: &mut ChaCha8Rng, k: usize) -> HankelSpec {
    let mut x = 3.0 + 0.6 * k as f64;
    let nodes: Vec<f64> = (0..k)
        .map(|_| {
            x -= rng.gen_range(0.2..0.6);
            x
        })
        .collect();
    HankelSpec::new(nodes).expect("decreasing positive nodes")
}

/// Random n×m pencil with `E*Q = Q*E ⪰ 0`: a block diagonal condensed pair disguised by a random
/// unitary on the left and a random invertible matrix on the right.
pub fn random_structured_pencil(
    n: usize,
    m: usize,
    seed: u64,
    opts: RandomPencilOptions,
) -> Result<StructuredPencil, CanonicalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = opts.field;
    if opts.regular && n != m {
        return Err(CanonicalError::InfeasibleDimensions(format!("a regular pencil must be square, got {n}x{m}")));
    }
    let etas: Vec<usize> = if opts.regular {
        Vec::new()
    } else if opts.zero_left_indices {
        let hi = n.min(m);
        let n1 = if n == m { rng.gen_range(0..n.max(1)) } else { rng.gen_range(0..=hi) };
        vec![0; n - n1.min(n)]
    } else {
        let lo = n.saturating_sub(m).max(1).min(n);
        let q = if n == 0 { 0 } else { rng.gen_range(lo..=n.min(lo + 2)) };
        let mut budget = n - q;
        let mut etas = vec![0; q];
        for e in etas.iter_mut() {
            let take = rng.gen_range(0..=budget.min(3));
            *e = take;
            budget -= take;
        }
        etas
    };
    check_feasible(n, m, &etas)?;
    let eta: usize = etas.iter().sum();
    let r = n - eta - etas.len();
    let mut blocks: Vec<(Matrix, Matrix)> = etas
        .iter()
        .map(|&k| if k == 0 { (Matrix::zeros(1, 0), Matrix::zeros(1, 0)) } else { left_block(&random_nodes(&mut rng, k + 1)) })
        .collect();
    blocks.push(theta_pair(&random_theta(&mut rng, r)));
    let (e0, q0) = assemble(&blocks, n, m);
    let u = random_unitary(&mut rng, n, field);
    let xinv = random_invertible(&mut rng, m, field);
    let e = &(&u * &e0) * &xinv;
    let q = &(&u * &q0) * &xinv;
    let (j, rr) = if opts.with_l {
        let rank = rng.gen_range(0..=n);
        (random_skew(&mut rng, n, field), random_psd(&mut rng, n, rank, field))
    } else {
        (Matrix::zeros(n, n), Matrix::identity(n))
    };
    Ok(StructuredPencil::from_jr(e, j, rr, q)?)
}
