//! Unitary staircase reduction of `λE − A` to the block order R, Z, F, I, L.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::linalg::{inverse, re, reorder_front, schur, singular_values, svd, Matrix, Tolerance, C64};

/// Output of one Van Dooren pass on a standalone pencil: `e = P⋆ E Z`, `a = P⋆ A Z`.
pub(crate) struct Pass {
    pub p: Matrix,
    pub z: Matrix,
    pub e: Matrix,
    pub a: Matrix,
    /// `(ν_i, μ_i)`: null-space width of A and rank of E on those columns, per step.
    pub steps: Vec<(usize, usize)>,
    pub rows_done: usize,
    pub cols_done: usize,
}

/// Extracts the right-singular and zero-eigenvalue structure of `λE − A` into the leading block.
pub(crate) fn van_dooren(e: &Matrix, a: &Matrix, thr: f64) -> Pass {
    let (n, m) = e.shape();
    let field = e.field().join(a.field());
    let mut e = e.clone().with_field(field);
    let mut a = a.clone().with_field(field);
    let mut p = Matrix::identity(n).with_field(field);
    let mut z = Matrix::identity(m).with_field(field);
    let (mut r0, mut c0) = (0, 0);
    let mut steps = Vec::new();
    while c0 < m {
        let nu = if r0 == n {
            m - c0
        } else {
            let act = a.sub(r0, n, c0, m);
            let d = svd(&act).expect("finite");
            let rank = d.rank(thr);
            let k = m - c0;
            let order: Vec<usize> = (rank..k).chain(0..rank).collect();
            let v = d.v.permute_cols(&order);
            right_apply(&mut e, c0, &v);
            right_apply(&mut a, c0, &v);
            right_apply(&mut z, c0, &v);
            k - rank
        };
        if nu == 0 {
            break;
        }
        a.zero_block(r0, n, c0, c0 + nu);
        let mu = if r0 == n {
            0
        } else {
            let e1 = e.sub(r0, n, c0, c0 + nu);
            let d = svd(&e1).expect("finite");
            let mu = d.rank(thr);
            let uh = d.u.adjoint();
            left_apply(&mut e, r0, &uh);
            left_apply(&mut a, r0, &uh);
            right_apply(&mut p, r0, &d.u);
            e.zero_block(r0 + mu, n, c0, c0 + nu);
            a.zero_block(r0, n, c0, c0 + nu);
            mu
        };
        steps.push((nu, mu));
        r0 += mu;
        c0 += nu;
    }
    Pass { p, z, e, a, steps, rows_done: r0, cols_done: c0 }
}

/// `M[r0.., :] = L · M[r0.., :]`.
pub(crate) fn left_apply(m: &mut Matrix, r0: usize, l: &Matrix) {
    let rows = m.rows();
    let blk = m.sub(r0, rows, 0, m.cols());
    m.set_block(r0, 0, &(l * &blk));
}

/// `M[:, c0..] = M[:, c0..] · R`.
pub(crate) fn right_apply(m: &mut Matrix, c0: usize, r: &Matrix) {
    let cols = m.cols();
    let blk = m.sub(0, m.rows(), c0, cols);
    m.set_block(0, c0, &(&blk * r));
}

fn right_index_counts(steps: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &(nu, mu)) in steps.iter().enumerate() {
        out.extend(std::iter::repeat(i).take(nu.saturating_sub(mu)));
    }
    out
}

fn zero_jordan_counts(steps: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &(_, mu)) in steps.iter().enumerate() {
        let next = steps.get(i + 1).map(|s| s.0).unwrap_or(0);
        out.extend(std::iter::repeat(i + 1).take(mu.saturating_sub(next)));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl Block {
    fn new(r0: usize, r1: usize, c0: usize, c1: usize) -> Block {
        Block { rows: r0..r1, cols: c0..c1 }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }
}

/// Diagonal blocks of the staircase form, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Right singular blocks.
    pub right: Block,
    /// Zero eigenvalue.
    pub zero: Block,
    /// Nonzero finite eigenvalues (normalized to `E = I`, `A` upper triangular).
    pub finite: Block,
    /// Infinite eigenvalue.
    pub infinite: Block,
    /// Left singular blocks.
    pub left: Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Eigenvalue {
    Finite(C64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteEigenvalue {
    pub value: C64,
    /// Descending.
    pub jordan_sizes: Vec<usize>,
}

impl FiniteEigenvalue {
    pub fn multiplicity(&self) -> usize {
        self.jordan_sizes.iter().sum()
    }
}

/// Kronecker invariants of a pencil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerStructure {
    pub rows: usize,
    pub cols: usize,
    /// Zero (if present) first, then nonzero values by real then imaginary part.
    pub finite_eigenvalues: Vec<FiniteEigenvalue>,
    /// Descending.
    pub infinite_jordan_sizes: Vec<usize>,
    /// Ascending.
    pub right_minimal_indices: Vec<usize>,
    /// Ascending.
    pub left_minimal_indices: Vec<usize>,
    pub normal_rank: usize,
    pub index: usize,
}

impl KroneckerStructure {
    pub fn is_regular(&self) -> bool {
        self.rows == self.cols && self.right_minimal_indices.is_empty() && self.left_minimal_indices.is_empty()
    }

    pub fn zero_jordan_sizes(&self) -> Vec<usize> {
        self.finite_eigenvalues
            .iter()
            .find(|f| f.value == re(0.0))
            .map(|f| f.jordan_sizes.clone())
            .unwrap_or_default()
    }

    pub fn nonzero_eigenvalues(&self) -> impl Iterator<Item = &FiniteEigenvalue> {
        self.finite_eigenvalues.iter().filter(|f| f.value != re(0.0))
    }

    /// Sum of all finite Jordan block sizes.
    pub fn finite_degree(&self) -> usize {
        self.finite_eigenvalues.iter().map(|f| f.multiplicity()).sum()
    }

    /// Row and column totals of the Kronecker block sum.
    pub fn block_dimensions(&self) -> (usize, usize) {
        let fin = self.finite_degree();
        let inf: usize = self.infinite_jordan_sizes.iter().sum();
        let eps: usize = self.right_minimal_indices.iter().sum();
        let eta: usize = self.left_minimal_indices.iter().sum();
        let rows = fin + inf + eps + eta + self.left_minimal_indices.len();
        let cols = fin + inf + eps + self.right_minimal_indices.len() + eta;
        (rows, cols)
    }

    /// All eigenvalues with algebraic multiplicity, `∞` last.
    pub fn eigenvalues(&self) -> Vec<(Eigenvalue, usize)> {
        let mut out: Vec<(Eigenvalue, usize)> =
            self.finite_eigenvalues.iter().map(|f| (Eigenvalue::Finite(f.value), f.multiplicity())).collect();
        let inf: usize = self.infinite_jordan_sizes.iter().sum();
        if inf > 0 {
            out.push((Eigenvalue::Infinite, inf));
        }
        out
    }
}

/// Cluster of nonzero finite eigenvalues inside the F block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: C64,
    pub members: Vec<C64>,
}

/// Staircase form `S (λE − A) T = λ e − a` with block upper triangular `e`, `a`.
#[derive(Debug, Clone)]
pub struct Staircase {
    pub structure: KroneckerStructure,
    pub left: Matrix,
    pub right: Matrix,
    pub e: Matrix,
    pub a: Matrix,
    pub blocks: Partition,
    pub clusters: Vec<Cluster>,
    /// `max(‖E‖_F, ‖A‖_F)` of the input.
    pub scale: f64,
    /// Rank threshold used in all compressions.
    pub threshold: f64,
    /// Eigenvalues closer than this are merged.
    pub cluster_tol: f64,
}

/// Relative distance below which finite eigenvalues are merged.
pub const CLUSTER_REL: f64 = 1e-7;

struct Work {
    e: Matrix,
    a: Matrix,
    s: Matrix,
    t: Matrix,
}

impl Work {
    /// Applies `L` to rows `rows` and `R` to columns `cols`, then stores the exact local blocks.
    fn apply(&mut self, rows: &Range<usize>, cols: &Range<usize>, l: &Matrix, r: &Matrix, e_loc: &Matrix, a_loc: &Matrix) {
        for m in [&mut self.e, &mut self.a, &mut self.s] {
            let blk = m.sub(rows.start, rows.end, 0, m.cols());
            m.set_block(rows.start, 0, &(l * &blk));
        }
        for m in [&mut self.e, &mut self.a, &mut self.t] {
            let blk = m.sub(0, m.rows(), cols.start, cols.end);
            m.set_block(0, cols.start, &(&blk * r));
        }
        self.e.set_block(rows.start, cols.start, e_loc);
        self.a.set_block(rows.start, cols.start, a_loc);
    }

    fn block(&self, rows: &Range<usize>, cols: &Range<usize>) -> (Matrix, Matrix) {
        (
            self.e.sub(rows.start, rows.end, cols.start, cols.end),
            self.a.sub(rows.start, rows.end, cols.start, cols.end),
        )
    }
}

/// Reverses the order of rows and columns and moves the first `r×c` block of a lower
/// block triangular adjoint form to the trailing position.
fn rotate(k: usize, first: usize) -> Matrix {
    let perm: Vec<usize> = (first..k).chain(0..first).collect();
    Matrix::identity(k).permute_cols(&perm)
}

/// Runs the staircase reduction.
pub fn staircase(e: &Matrix, a: &Matrix, tol: &Tolerance) -> Staircase {
    assert_eq!(e.shape(), a.shape(), "E and A must have the same shape");
    let (n, m) = e.shape();
    let field = e.field().join(a.field());
    let scale = e.norm_fro().max(a.norm_fro());
    let thr = tol.threshold(n.max(m), scale);
    let mut w = Work {
        e: e.clone().with_field(field),
        a: a.clone().with_field(field),
        s: Matrix::identity(n).with_field(field),
        t: Matrix::identity(m).with_field(field),
    };

    // right singular + zero structure
    let p1 = van_dooren(&w.e, &w.a, thr);
    let all_r = 0..n;
    let all_c = 0..m;
    w.apply(&all_r, &all_c, &p1.p.adjoint(), &p1.z, &p1.e, &p1.a);
    let (r1, c1) = (p1.rows_done, p1.cols_done);

    // left singular + infinite structure, via the adjoint of the remainder
    let rest_r = r1..n;
    let rest_c = c1..m;
    let (er, ar) = w.block(&rest_r, &rest_c);
    let p2 = van_dooren(&ar.adjoint(), &er.adjoint(), thr);
    let (nr, mr) = (n - r1, m - c1);
    // local form is the adjoint pass transposed: [[B11⋆,0],[B12⋆,B22⋆]] with B11⋆ of size cols_done×rows_done
    let li_rows = p2.cols_done;
    let li_cols = p2.rows_done;
    let pr = rotate(nr, li_rows);
    let pc = rotate(mr, li_cols);
    let l2 = &pr.adjoint() * &p2.z.adjoint();
    let r2 = &p2.p * &pc;
    let e2 = &(&pr.adjoint() * &p2.a.adjoint()) * &pc;
    let a2 = &(&pr.adjoint() * &p2.e.adjoint()) * &pc;
    w.apply(&rest_r, &rest_c, &l2, &r2, &e2, &a2);
    let f_rows = r1..n - li_rows;
    let f_cols = c1..m - li_cols;
    let li_r = n - li_rows..n;
    let li_c = m - li_cols..m;

    // split LI into I then L: zero structure of the reversed pencil
    let (eli, ali) = w.block(&li_r, &li_c);
    let p3 = van_dooren(&ali, &eli, thr);
    w.apply(&li_r, &li_c, &p3.p.adjoint(), &p3.z, &p3.a, &p3.e);
    let inf_block = Block::new(li_r.start, li_r.start + p3.rows_done, li_c.start, li_c.start + p3.cols_done);
    let left_block = Block::new(li_r.start + p3.rows_done, n, li_c.start + p3.cols_done, m);

    // split RZ into R then Z via the adjoint
    let rz_r = 0..r1;
    let rz_c = 0..c1;
    let (erz, arz) = w.block(&rz_r, &rz_c);
    let p4 = van_dooren(&erz.adjoint(), &arz.adjoint(), thr);
    let z_rows = p4.cols_done;
    let z_cols = p4.rows_done;
    let pr = rotate(r1, z_rows);
    let pc = rotate(c1, z_cols);
    let l4 = &pr.adjoint() * &p4.z.adjoint();
    let r4 = &p4.p * &pc;
    let e4 = &(&pr.adjoint() * &p4.e.adjoint()) * &pc;
    let a4 = &(&pr.adjoint() * &p4.a.adjoint()) * &pc;
    w.apply(&rz_r, &rz_c, &l4, &r4, &e4, &a4);
    let right_block = Block::new(0, r1 - z_rows, 0, c1 - z_cols);
    let zero_block = Block::new(r1 - z_rows, r1, c1 - z_cols, c1);

    // finite nonzero part: E_f = I, A_f = Schur form of E_f⁻¹ A_f
    let (ef, af) = w.block(&f_rows, &f_cols);
    let kf = ef.rows();
    let mut clusters = Vec::new();
    let mut finite_eigs = Vec::new();
    let mut cluster_tol = 0.0;
    if kf > 0 && kf == ef.cols() {
        let einv = inverse(&ef).expect("finite block has invertible E");
        let mm = &einv * &af;
        let (q, tt) = schur(&mm).expect("schur converges");
        let l = &q.adjoint() * &einv;
        let id = Matrix::identity(kf).with_field(field);
        w.apply(&f_rows, &f_cols, &l, &q, &id, &tt);
        let tscale = tt.norm_fro();
        cluster_tol = CLUSTER_REL * tscale.max(scale) + tol.absolute;
        clusters = cluster(&tt.diagonal(), cluster_tol);
        let thr_f = tol.threshold(kf, tscale);
        for c in &clusters {
            let sizes = cluster_jordan_sizes(&tt, c, cluster_tol, thr_f);
            finite_eigs.push(FiniteEigenvalue { value: c.value, jordan_sizes: sizes });
        }
    }

    let zero_sizes = zero_jordan_counts(&p1.steps);
    let mut finite_eigenvalues = Vec::new();
    if !zero_sizes.is_empty() {
        finite_eigenvalues.push(FiniteEigenvalue { value: re(0.0), jordan_sizes: zero_sizes });
    }
    finite_eigs.sort_by(|x, y| (x.value.re, x.value.im).partial_cmp(&(y.value.re, y.value.im)).unwrap());
    finite_eigenvalues.extend(finite_eigs);
    let right_idx = right_index_counts(&p1.steps);
    let mut left_idx = right_index_counts(&p2.steps);
    left_idx.sort_unstable();
    let inf_sizes = zero_jordan_counts(&p2.steps);
    let index = inf_sizes.first().copied().unwrap_or(0);
    let structure = KroneckerStructure {
        rows: n,
        cols: m,
        finite_eigenvalues,
        infinite_jordan_sizes: inf_sizes,
        right_minimal_indices: right_idx,
        left_minimal_indices: left_idx.clone(),
        normal_rank: n - left_idx.len(),
        index,
    };
    let blocks = Partition {
        right: right_block,
        zero: zero_block,
        finite: Block { rows: f_rows, cols: f_cols },
        infinite: inf_block,
        left: left_block,
    };
    Staircase {
        structure,
        left: w.s,
        right: w.t,
        e: w.e,
        a: w.a,
        blocks,
        clusters,
        scale,
        threshold: thr,
        cluster_tol,
    }
}

/// Single-linkage clustering of eigenvalues at distance `tol`; the value is the mean.
fn cluster(values: &[C64], tol: f64) -> Vec<Cluster> {
    let k = values.len();
    let mut label: Vec<usize> = (0..k).collect();
    fn find(l: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..k {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(values[i]),
            None => groups.push((r, vec![values[i]])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let value = members.iter().sum::<C64>() / members.len() as f64;
            Cluster { value, members }
        })
        .collect()
}

pub(crate) fn in_cluster(c: &Cluster, z: C64, tol: f64) -> bool {
    c.members.iter().any(|&w| (w - z).norm() <= tol)
}

/// Jordan sizes of one cluster from the zero structure of `T_cc − μI`.
fn numerical_rank_abs(m: &Matrix, thr: f64) -> usize {
    singular_values(m).iter().filter(|&&x| x > thr).count()
}

fn cluster_jordan_sizes(t: &Matrix, c: &Cluster, tol: f64, thr: f64) -> Vec<usize> {
    let k = t.rows();
    let mut tt = t.clone();
    let mut q = Matrix::identity(k).with_field(t.field());
    let kc = reorder_front(&mut q, &mut tt, |z| in_cluster(c, z, tol));
    let mut block = tt.sub(0, kc, 0, kc);
    let mut spread: f64 = 0.0;
    for i in 0..kc {
        block[(i, i)] -= c.value;
        spread = spread.max(block[(i, i)].norm());
    }
    // ranks of powers; perturbed defective clusters leave residues of the order of their spread
    let bn = block.norm_fro().max(f64::MIN_POSITIVE);
    let cut = thr.max(10.0 * spread);
    let mut ranks = vec![kc];
    let mut power = Matrix::identity(kc).with_field(block.field());
    while *ranks.last().unwrap() > 0 && ranks.len() <= kc {
        power = &power * &block;
        let k = ranks.len() as f64;
        let r = numerical_rank_abs(&power, cut * k * bn.max(1.0).powf(k - 1.0));
        ranks.push(r.min(*ranks.last().unwrap()));
    }
    ranks.push(0);
    let mut sizes = Vec::new();
    for k in 1..ranks.len() - 1 {
        let at_least_k = ranks[k - 1] - ranks[k];
        let at_least_next = ranks[k] - ranks[k + 1];
        sizes.extend(std::iter::repeat(k).take(at_least_k.saturating_sub(at_least_next)));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
