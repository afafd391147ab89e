use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::StabilizationError;
use crate::linalg::{random_invertible, random_matrix, random_psd, random_skew, random_unitary, Field, Matrix};
use crate::pencil::StructuredPencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroBlockSpec {
    pub partition: [usize; 4],
    /// Zero out the coupling `J₃₂` so that zero is semisimple.
    pub semisimple: bool,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedZeroPencil {
    pub pencil: StructuredPencil,
    pub partition: [usize; 4],
    /// Zero Jordan sizes, descending.
    pub zero_jordan_sizes: Vec<usize>,
}

/// Random regular dH pencil of index at most one whose zero eigenvalue has the block
/// sizes of `spec`, disguised by a random unitary from the left and an invertible map from the right.
pub fn random_zero_defective_pencil(spec: ZeroBlockSpec, seed: u64) -> Result<PlantedZeroPencil, StabilizationError> {
    let [n1, n2, n3, n4] = spec.partition;
    let n = n1 + n2 + n3 + n4;
    if n == 0 {
        return Err(StabilizationError::ShapeMismatch("empty partition".into()));
    }
    let field = spec.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag = |len: usize, rng: &mut ChaCha8Rng| -> Vec<f64> { (0..len).map(|_| rng.gen_range(0.5..2.0)).collect() };

    let e1 = diag(n1 + n2, &mut rng);
    let q1 = diag(n1 + n2, &mut rng);
    let mut ed = e1.clone();
    ed.extend(std::iter::repeat(1.0).take(n3));
    ed.extend(std::iter::repeat(0.0).take(n4));
    let mut qd = q1.clone();
    qd.extend(std::iter::repeat(0.0).take(n3));
    qd.extend(std::iter::repeat(1.0).take(n4));
    let eh = Matrix::diag_real(&ed).with_field(field);
    let qh = Matrix::diag_real(&qd).with_field(field);

    let b2 = n1..n1 + n2;
    let b3 = n1 + n2..n1 + n2 + n3;
    let rest: Vec<usize> = (0..n).filter(|i| !b2.contains(i)).collect();
    let mut r = Matrix::zeros(n, n).with_field(field);
    let r0 = &random_psd(&mut rng, rest.len(), rest.len(), field) + &Matrix::identity(rest.len()).scale_real(0.1);
    for (a, &i) in rest.iter().enumerate() {
        for (b, &j) in rest.iter().enumerate() {
            r[(i, j)] = r0[(a, b)];
        }
    }
    let mut j = random_skew(&mut rng, n, field);
    let rank = if spec.semisimple { 0 } else { n2.min(n3) };
    let coupling = if rank > 0 {
        let mut g = random_matrix(&mut rng, n3, n2, field);
        let s = crate::linalg::singular_values(&g);
        if s.last().copied().unwrap_or(1.0) < 1e-2 {
            g = &g + &Matrix::identity(n3.max(n2)).sub(0, n3, 0, n2);
        }
        g
    } else {
        Matrix::zeros(n3, n2).with_field(field)
    };
    for i in 0..n {
        for k in b2.clone() {
            let v = if b3.contains(&i) { coupling[(i - b3.start, k - b2.start)] } else { 0.0.into() };
            j[(i, k)] = v;
            j[(k, i)] = -v.conj();
        }
    }
    let lh = &j - &r;
    let u = random_unitary(&mut rng, n, field);
    let v = random_invertible(&mut rng, n, field);
    let e = &(&u * &eh) * &v;
    let q = &(&u * &qh) * &v;
    let l = &(&u * &lh) * &u.adjoint();
    let pencil = StructuredPencil::new(e, q, l)?;

    let mut sizes = vec![2; rank];
    sizes.extend(std::iter::repeat(1).take(n2 + n3 - 2 * rank));
    Ok(PlantedZeroPencil { pencil, partition: spec.partition, zero_jordan_sizes: sizes })
}
