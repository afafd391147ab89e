#![allow(dead_code)]

pub mod oracle;

use dh_pencil::linalg::Matrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
pub use dh_pencil::linalg::{random_invertible, random_matrix as random, random_psd, random_unitary};

pub fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>())
}

/// A Kronecker block with integer data.
#[derive(Debug, Clone, Copy)]
pub enum KBlock {
    /// `L_ε`, size ε×(ε+1).
    Right(usize),
    /// `L_η⊤`, size (η+1)×η.
    Left(usize),
    /// Jordan block of size ρ at an integer eigenvalue.
    Jordan(i64, usize),
    /// `N_σ`.
    Infinite(usize),
}

impl KBlock {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            KBlock::Right(e) => (e, e + 1),
            KBlock::Left(e) => (e + 1, e),
            KBlock::Jordan(_, r) => (r, r),
            KBlock::Infinite(s) => (s, s),
        }
    }

    fn fill(&self, e: &mut [Vec<i64>], a: &mut [Vec<i64>], r0: usize, c0: usize) {
        match *self {
            KBlock::Right(k) => {
                for i in 0..k {
                    e[r0 + i][c0 + i] = 1;
                    a[r0 + i][c0 + i + 1] = 1;
                }
            }
            KBlock::Left(k) => {
                for i in 0..k {
                    e[r0 + i][c0 + i] = 1;
                    a[r0 + i + 1][c0 + i] = 1;
                }
            }
            KBlock::Jordan(l, k) => {
                for i in 0..k {
                    e[r0 + i][c0 + i] = 1;
                    a[r0 + i][c0 + i] = l;
                    if i + 1 < k {
                        a[r0 + i][c0 + i + 1] = 1;
                    }
                }
            }
            KBlock::Infinite(k) => {
                for i in 0..k {
                    a[r0 + i][c0 + i] = 1;
                    if i + 1 < k {
                        e[r0 + i][c0 + i + 1] = 1;
                    }
                }
            }
        }
    }
}

/// Block diagonal integer pencil `(E, A)` from Kronecker blocks.
pub fn assemble(blocks: &[KBlock]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n: usize = blocks.iter().map(|b| b.shape().0).sum();
    let m: usize = blocks.iter().map(|b| b.shape().1).sum();
    let mut e = vec![vec![0; m]; n];
    let mut a = vec![vec![0; m]; n];
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        b.fill(&mut e, &mut a, r0, c0);
        r0 += b.shape().0;
        c0 += b.shape().1;
    }
    (e, a)
}

/// Random unimodular integer matrix: a few elementary operations with multipliers in {−1, 1} plus a permutation.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize, ops: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    if n < 2 {
        return u;
    }
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let f = if rng.gen_bool(0.5) { 1 } else { -1 };
        for k in 0..n {
            u[i][k] += f * u[j][k];
        }
    }
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    u.swap(i, j);
    u
}

pub fn imul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

/// Random block list with total rows and columns at most `max_dim` (and at least one block).
pub fn random_blocks(rng: &mut ChaCha8Rng, max_dim: usize) -> Vec<KBlock> {
    loop {
        let count = rng.gen_range(1..=4);
        let mut blocks = Vec::new();
        for _ in 0..count {
            let b = match rng.gen_range(0..5) {
                0 => KBlock::Right(rng.gen_range(0..=2)),
                1 => KBlock::Left(rng.gen_range(0..=2)),
                2 => KBlock::Jordan(0, rng.gen_range(1..=2)),
                3 => KBlock::Jordan([-2, -1, 1, 2, 3][rng.gen_range(0..5)], rng.gen_range(1..=2)),
                _ => KBlock::Infinite(rng.gen_range(1..=2)),
            };
            blocks.push(b);
        }
        let n: usize = blocks.iter().map(|b| b.shape().0).sum();
        let m: usize = blocks.iter().map(|b| b.shape().1).sum();
        if n <= max_dim && m <= max_dim && n > 0 {
            return blocks;
        }
    }
}

/// `S·(E, A)·T` with random unimodular `S`, `T`.
pub fn disguise(rng: &mut ChaCha8Rng, e: &[Vec<i64>], a: &[Vec<i64>], ops: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = e.len();
    let m = if n == 0 { 0 } else { e[0].len() };
    let s = unimodular(rng, n, ops);
    let t = unimodular(rng, m, ops);
    (imul(&imul(&s, e), &t), imul(&imul(&s, a), &t))
}
