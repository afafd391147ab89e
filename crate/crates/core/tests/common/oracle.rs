//! Exact Kronecker invariants over the rationals (Van Dooren reduction with invertible compressions).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactStructure {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    /// Descending.
    pub infinite: Vec<usize>,
    /// Descending.
    pub zero: Vec<usize>,
    /// Size of the regular part with nonzero finite eigenvalues.
    pub nonzero_degree: usize,
    /// Number of distinct nonzero finite eigenvalues.
    pub nonzero_distinct: usize,
    pub normal_rank: usize,
    pub index: usize,
}

#[derive(Clone)]
struct Mat {
    rows: usize,
    cols: usize,
    d: Vec<Q>,
}

impl Mat {
    fn from_int(rows: usize, cols: usize, src: &[Vec<i64>]) -> Mat {
        let mut d = Vec::with_capacity(rows * cols);
        for r in src {
            for &x in r {
                d.push(Q::from_integer(BigInt::from(x)));
            }
        }
        Mat { rows, cols, d }
    }

    fn at(&self, i: usize, j: usize) -> &Q {
        &self.d[i * self.cols + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Q {
        &mut self.d[i * self.cols + j]
    }

    fn sub(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut d = Vec::new();
        for i in r0..r1 {
            for j in c0..c1 {
                d.push(self.at(i, j).clone());
            }
        }
        Mat { rows: r1 - r0, cols: c1 - c0, d }
    }

    fn transpose(&self) -> Mat {
        let mut d = Vec::new();
        for j in 0..self.cols {
            for i in 0..self.rows {
                d.push(self.at(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, d }
    }

    /// Right-multiplies columns c0.. by `t` (square, size cols−c0).
    fn right_mul(&mut self, c0: usize, t: &Mat) {
        let k = t.rows;
        for i in 0..self.rows {
            let row: Vec<Q> = (0..k).map(|j| self.at(i, c0 + j).clone()).collect();
            for j in 0..k {
                let mut s = Q::zero();
                for (p, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        s += x * t.at(p, j);
                    }
                }
                *self.at_mut(i, c0 + j) = s;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.d.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// row_i += f·row_j
    fn add_row(&mut self, i: usize, j: usize, f: &Q) {
        for c in 0..self.cols {
            let v = self.at(j, c) * f;
            *self.at_mut(i, c) += v;
        }
    }
}

/// Reduced row echelon form; returns pivot columns.
fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.at(i, c).is_zero()) else { continue };
        a.swap_rows(r, p);
        let inv = Q::one() / a.at(r, c).clone();
        for j in 0..a.cols {
            let v = a.at(r, j) * &inv;
            *a.at_mut(r, j) = v;
        }
        for i in 0..a.rows {
            if i != r && !a.at(i, c).is_zero() {
                let f = -a.at(i, c).clone();
                a.add_row(i, r, &f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Exact stage: `(ν_i, μ_i)` steps and the processed block size.
fn stage(e: &mut Mat, a: &mut Mat) -> (Vec<(usize, usize)>, usize, usize) {
    let (n, m) = (e.rows, e.cols);
    let (mut r0, mut c0) = (0, 0);
    let mut steps = Vec::new();
    while c0 < m {
        let k = m - c0;
        let act = a.sub(r0, n, c0, m);
        let (rr, piv) = rref(&act);
        let free: Vec<usize> = (0..k).filter(|j| !piv.contains(j)).collect();
        let nu = free.len();
        if nu == 0 {
            break;
        }
        // columns: null vectors first, then pivot unit vectors
        let mut t = Mat { rows: k, cols: k, d: vec![Q::zero(); k * k] };
        for (col, &f) in free.iter().enumerate() {
            *t.at_mut(f, col) = Q::one();
            for (pr, &pc) in piv.iter().enumerate() {
                *t.at_mut(pc, col) = -rr.at(pr, f).clone();
            }
        }
        for (off, &pc) in piv.iter().enumerate() {
            *t.at_mut(pc, nu + off) = Q::one();
        }
        e.right_mul(c0, &t);
        a.right_mul(c0, &t);
        // row echelon on E[r0.., c0..c0+nu] applied to full rows of E and A
        let mut r = r0;
        for c in c0..c0 + nu {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| !e.at(i, c).is_zero()) else { continue };
            e.swap_rows(r, p);
            a.swap_rows(r, p);
            for i in r + 1..n {
                if !e.at(i, c).is_zero() {
                    let f = -(e.at(i, c) / e.at(r, c));
                    e.add_row(i, r, &f);
                    a.add_row(i, r, &f);
                }
            }
            r += 1;
        }
        let mu = r - r0;
        steps.push((nu, mu));
        r0 += mu;
        c0 += nu;
    }
    (steps, r0, c0)
}

fn right_counts(steps: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &(nu, mu)) in steps.iter().enumerate() {
        out.extend(std::iter::repeat(i).take(nu - mu));
    }
    out.sort_unstable();
    out
}

fn jordan_counts(steps: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &(_, mu)) in steps.iter().enumerate() {
        let next = steps.get(i + 1).map(|s| s.0).unwrap_or(0);
        out.extend(std::iter::repeat(i + 1).take(mu - next));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

type Poly = Vec<Q>; // coefficients, lowest degree first

fn trim(p: &mut Poly) {
    while p.last().map(|x| x.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap().clone() / lead.clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &f * bi;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Characteristic polynomial of `M` by Faddeev-LeVerrier.
fn charpoly(m: &Mat) -> Poly {
    let n = m.rows;
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = Mat { rows: n, cols: n, d: vec![Q::zero(); n * n] };
    for k in 1..=n {
        // mk = M·mk + c_{n-k+1} I
        let mut next = Mat { rows: n, cols: n, d: vec![Q::zero(); n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for t in 0..n {
                    s += m.at(i, t) * mk.at(t, j);
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                *next.at_mut(i, j) = s;
            }
        }
        mk = next;
        let mut tr = Q::zero();
        for i in 0..n {
            for t in 0..n {
                tr += m.at(i, t) * mk.at(t, i);
            }
        }
        coeffs[n - k] = -tr / Q::from_integer(BigInt::from(k as i64));
    }
    coeffs
}

fn inverse(m: &Mat) -> Mat {
    let n = m.rows;
    let mut aug = Mat { rows: n, cols: 2 * n, d: vec![Q::zero(); 2 * n * n] };
    for i in 0..n {
        for j in 0..n {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, n + i) = Q::one();
    }
    let (r, piv) = rref(&aug);
    assert!(piv.len() == n && piv[n - 1] == n - 1, "singular finite block");
    r.sub(0, n, n, 2 * n)
}

/// Kronecker invariants of the integer pencil `λE − A` (n×m).
pub fn exact_structure(n: usize, m: usize, e: &[Vec<i64>], a: &[Vec<i64>]) -> ExactStructure {
    let mut e = Mat::from_int(n, m, e);
    let mut a = Mat::from_int(n, m, a);
    let (s1, r1, c1) = stage(&mut e, &mut a);
    let mut er = a.sub(r1, n, c1, m).transpose();
    let mut ar = e.sub(r1, n, c1, m).transpose();
    let (s2, r2, c2) = stage(&mut er, &mut ar);
    // remainder of the transposed reversed pencil holds the nonzero finite part
    let ft_rows = er.rows;
    let ft_cols = er.cols;
    let ef = ar.sub(r2, ft_rows, c2, ft_cols).transpose();
    let af = er.sub(r2, ft_rows, c2, ft_cols).transpose();
    assert_eq!(ef.rows, ef.cols, "finite block must be square");
    let k = ef.rows;
    let distinct = if k == 0 {
        0
    } else {
        let inv = inverse(&ef);
        let mut mm = Mat { rows: k, cols: k, d: vec![Q::zero(); k * k] };
        for i in 0..k {
            for j in 0..k {
                let mut s = Q::zero();
                for t in 0..k {
                    s += inv.at(i, t) * af.at(t, j);
                }
                *mm.at_mut(i, j) = s;
            }
        }
        let p = charpoly(&mm);
        assert!(!p[0].is_zero(), "zero eigenvalue left in finite block");
        let dp: Poly = (1..p.len()).map(|i| &p[i] * Q::from_integer(BigInt::from(i as i64))).collect();
        let g = poly_gcd(&p, &dp);
        k - (g.len() - 1)
    };
    let right = right_counts(&s1);
    let left = right_counts(&s2);
    let infinite = jordan_counts(&s2);
    ExactStructure {
        normal_rank: n - left.len(),
        index: infinite.first().copied().unwrap_or(0),
        right,
        left,
        infinite,
        zero: jordan_counts(&s1),
        nonzero_degree: k,
        nonzero_distinct: distinct,
    }
}
