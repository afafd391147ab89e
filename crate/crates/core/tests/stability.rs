mod common;

use common::*;
use dh_pencil::canonical::{random_structured_pencil, RandomPencilOptions};
use dh_pencil::kronecker::{kronecker_structure, Eigenvalue};
use dh_pencil::linalg::*;
use dh_pencil::pencil::{fixture, FixtureParams, StructuredPencil};
use dh_pencil::stability::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rows(r: &[&[f64]]) -> Matrix {
    Matrix::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>())
}

#[test]
fn fixture_reports() {
    let p = fixture("nonsimple0", &FixtureParams::new()).unwrap();
    let r = analyze_dh_pencil(&p, &tol());
    assert_eq!(r.zero_jordan_sizes, vec![2]);
    assert!(r.lhp_ok.observed && r.imaginary_semisimple_ok.observed);
    assert_eq!(r.eigen_data.index, 0);

    let p = fixture("ex:rhp", &FixtureParams::new().scalar("a", 1.0)).unwrap();
    let r = analyze_dh_pencil(&p, &tol());
    let plus_one = r.eigen_data.finite_eigenvalues.iter().any(|f| (f.value - re(1.0)).norm() < 1e-12);
    assert!(plus_one && !r.lhp_ok.observed);
    assert!(r.hypothesis_report.structure.b1a.holds && r.hypothesis_report.structure.b1c.holds);
    assert_eq!(r.hypothesis_report.eq_structure.left_minimal_indices, vec![1]);
    assert!(!r.hypothesis_report.holds() && !r.counterexample());

    let p = StructuredPencil::new(
        Matrix::diag_real(&[1.0, 0.0]),
        Matrix::diag_real(&[0.0, 1.0]),
        rows(&[&[-1.0, 1.0], &[-1.0, 0.0]]),
    )
    .unwrap();
    let r = analyze_dh_pencil(&p, &tol());
    assert_eq!(r.eigen_data.right_minimal_indices, vec![1]);
    assert_eq!(r.eigen_data.left_minimal_indices, vec![0]);
    assert!(r.hypothesis_report.holds() && r.hypothesis_report.eq_regular);
    assert!(r.right_indices_ok.observed && r.left_indices_ok.observed && !r.counterexample());

    let p = StructuredPencil::new(Matrix::diag_real(&[1.0, 0.0]), Matrix::identity(2), rows(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
    let r = analyze_dh_pencil(&p, &tol());
    assert_eq!(r.eigen_data.infinite_jordan_sizes, vec![2]);
    assert_eq!(r.eigen_data.index, 2);
    assert!(r.index_ok.observed && r.index_ok.guaranteed);
}

#[test]
fn guarantees_withheld_not_violated() {
    // scalar pencil 1 − λ: E⋆Q = −1 fails the hypotheses
    let p = StructuredPencil::from_jr(rows(&[&[-1.0]]), rows(&[&[0.0]]), rows(&[&[1.0]]), rows(&[&[1.0]])).unwrap();
    let r = analyze_dh_pencil(&p, &tol());
    assert!(!r.lhp_ok.observed && !r.lhp_ok.guaranteed);
    assert!(!r.counterexample());
}

#[test]
fn left_indices_of_rem_ind_are_not_guaranteed() {
    for n in 3..=5 {
        let p = fixture("rem:ind", &FixtureParams::new().scalar("n", n as f64)).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert_eq!(r.eigen_data.left_minimal_indices, vec![n - 1]);
        assert!(r.hypothesis_report.holds() && !r.hypothesis_report.eq_regular);
        assert!(!r.left_indices_ok.observed && !r.left_indices_ok.guaranteed);
        assert!(!r.counterexample());
    }
}

fn random_options(rng: &mut ChaCha8Rng, n: usize, m: usize) -> RandomPencilOptions {
    let field = if rng.gen_bool(0.5) { Field::Real } else { Field::Complex };
    let regular = n == m && rng.gen_bool(0.5);
    RandomPencilOptions { regular, zero_left_indices: true, with_l: true, field }
}

#[test]
fn randomized_theorem_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut imaginary_seen = 0;
    for trial in 0..240u64 {
        let n = rng.gen_range(2..=12);
        let m = if rng.gen_bool(0.6) { n } else { rng.gen_range(2..=12) };
        let opts = random_options(&mut rng, n, m);
        let p = random_structured_pencil(n, m, 1000 + trial, opts).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert!(r.hypothesis_report.holds(), "trial {trial}: hypotheses");
        assert!(r.lhp_ok.observed, "trial {trial}: max real part {:?}", r.max_real_part);
        assert!(r.imaginary_semisimple_ok.observed, "trial {trial}: {:?}", r.imaginary_eigenvalues);
        assert!(r.rqv_ok.observed, "trial {trial}: {:?}", r.rqv_residuals);
        assert!(r.index_ok.observed && r.right_indices_ok.observed, "trial {trial}");
        if r.hypothesis_report.eq_regular {
            assert!(r.left_indices_ok.observed, "trial {trial}");
        }
        assert!(!r.counterexample());
        imaginary_seen += r.imaginary_eigenvalues.len();
    }
    assert!(imaginary_seen > 0);
}

#[test]
fn lossless_pencils_have_semisimple_axis_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..40 {
        let n = rng.gen_range(2..=8);
        let field = if trial % 2 == 0 { Field::Real } else { Field::Complex };
        let h = random_psd(&mut rng, n, n, field);
        let e = Matrix::identity(n);
        let j = random_skew(&mut rng, n, field);
        let p = StructuredPencil::from_jr(e, j, Matrix::zeros(n, n), h).unwrap();
        let r = analyze_dh_pencil(&p, &tol());
        assert!(r.lhp_ok.observed && r.imaginary_semisimple_ok.observed && r.rqv_ok.observed);
        let on_axis: usize = r.imaginary_eigenvalues.iter().map(|(_, s)| s.len()).sum();
        assert!(on_axis + r.zero_jordan_sizes.len() >= n - 1, "trial {trial}");
    }
}

#[test]
fn rqv_vanishes_on_imaginary_deflating_subspaces() {
    // R acts only on a block that J does not couple to the oscillating part
    let j = rows(&[&[0.0, 2.0, 0.0], &[-2.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    let r = Matrix::diag_real(&[0.0, 0.0, 3.0]);
    let p = StructuredPencil::from_jr(Matrix::identity(3), j, r, Matrix::identity(3)).unwrap();
    let rep = analyze_dh_pencil(&p, &tol());
    assert_eq!(rep.imaginary_eigenvalues.len(), 2);
    assert!(rep.rqv_residuals.iter().all(|x| x.residual < 1e-12));
    assert!(rep
        .eigen_data
        .finite_eigenvalues
        .iter()
        .any(|f| (f.value - re(-3.0)).norm() < 1e-12));
    assert!(matches!(rep.imaginary_eigenvalues[0].0, Eigenvalue::Finite(_)));
}

#[test]
fn regular_pencil_with_b1a_has_regular_eq() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut regular_cases = 0;
    for trial in 0..150u64 {
        let n = rng.gen_range(1..=8);
        let opts = RandomPencilOptions { regular: rng.gen_bool(0.5), zero_left_indices: rng.gen_bool(0.5), ..Default::default() };
        let p = random_structured_pencil(n, n, 5000 + trial, opts).unwrap();
        let s = kronecker_structure(p.e(), &p.a(), &tol()).unwrap();
        if s.is_regular() {
            regular_cases += 1;
            assert!(kronecker_structure(p.e(), p.q(), &tol()).unwrap().is_regular(), "trial {trial}");
        }
    }
    assert!(regular_cases > 20);
}

#[test]
fn quadratic_examples() {
    let one = Matrix::identity(1);
    let r = analyze_quadratic(&one, &Matrix::zeros(1, 1), &one, &tol()).unwrap();
    let lin = &r.linearization;
    assert_eq!(lin.imaginary_eigenvalues.len(), 2);
    assert!(r.all_ok());

    let r = analyze_quadratic(&one, &one.scale_real(2.0), &one, &tol()).unwrap();
    let f = &r.linearization.eigen_data.finite_eigenvalues;
    assert_eq!(f.len(), 1);
    assert!((f[0].value - re(-1.0)).norm() < 1e-6);
    assert_eq!(f[0].jordan_sizes, vec![2]);
    assert!(r.all_ok());

    let z = Matrix::zeros(2, 2);
    let r = analyze_quadratic(&z, &Matrix::diag_real(&[1.0, 0.0]), &z, &tol()).unwrap();
    assert!(!r.linearization.eigen_data.is_regular());
    assert!(r.minimal_indices_zero && !r.left_minimal_indices.is_empty() && !r.right_minimal_indices.is_empty());
    assert!(r.all_ok());
}

#[test]
fn quadratic_rejects_bad_coefficients() {
    let one = Matrix::identity(1);
    let neg = one.scale_real(-1.0);
    assert!(matches!(analyze_quadratic(&one, &neg, &one, &tol()), Err(StabilityError::NotPsd { name: "D", .. })));
    let skew = rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let i2 = Matrix::identity(2);
    assert!(matches!(analyze_quadratic(&skew, &i2, &i2, &tol()), Err(StabilityError::NotHermitian { name: "M", .. })));
    assert!(matches!(analyze_quadratic(&i2, &one, &i2, &tol()), Err(StabilityError::ShapeMismatch(_))));
}

#[test]
fn random_quadratics() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for trial in 0..60 {
        let n = rng.gen_range(1..=6);
        let field = if trial % 2 == 0 { Field::Real } else { Field::Complex };
        let mut coeff = || {
            let rank = rng.gen_range(0..=n);
            random_psd(&mut rng, n, rank, field)
        };
        let (m, d, k) = (coeff(), coeff(), coeff());
        let r = analyze_quadratic(&m, &d, &k, &tol()).unwrap();
        assert!(r.all_ok(), "trial {trial}: {:?}", r);
    }
}

#[test]
fn lyapunov_examples() {
    let i = Matrix::identity(2);
    for v in [LyapunovVariant::General, LyapunovVariant::SquareInvertible] {
        let r = lyapunov_check(&i, &i.scale_real(-1.0), &i, &tol(), v).unwrap();
        assert!(r.conditions_hold() && r.guarantees_confirmed());
        let f = &r.stability.eigen_data.finite_eigenvalues;
        assert_eq!(f.len(), 1);
        assert!((f[0].value - re(-1.0)).norm() < 1e-12 && f[0].multiplicity() == 2);
    }

    let p = fixture("ex:rhp", &FixtureParams::new().scalar("a", 1.0)).unwrap();
    let r = lyapunov_check(p.e(), &p.a(), p.q(), &tol(), LyapunovVariant::General).unwrap();
    assert!(!r.eq_minimal_indices_zero && !r.conditions_hold());
    assert!(!r.stability.lhp_ok.observed && !r.stability.counterexample());

    let e = Matrix::diag_real(&[1.0, 0.0]);
    let r = lyapunov_check(&e, &i.scale_real(-1.0), &i, &tol(), LyapunovVariant::SquareInvertible).unwrap();
    assert!(r.conditions_hold() && r.guarantees_confirmed());
    assert!(r.stability.eigen_data.index <= 2);
}

#[test]
fn lyapunov_kernel_inclusion() {
    let e = Matrix::diag_real(&[1.0, 0.0]);
    let q = Matrix::diag_real(&[1.0, 0.0]);
    let a = rows(&[&[-1.0, 1.0], &[0.0, 0.0]]);
    let r = lyapunov_check(&e, &a, &q, &tol(), LyapunovVariant::General).unwrap();
    assert!(!r.kernel_inclusion.holds && !r.conditions_hold());
    let a = rows(&[&[-1.0, 0.0], &[0.0, 0.0]]);
    let r = lyapunov_check(&e, &a, &q, &tol(), LyapunovVariant::General).unwrap();
    assert!(r.kernel_inclusion.holds && r.conditions_hold() && r.guarantees_confirmed());
    assert!(lyapunov_check(&e, &Matrix::zeros(2, 3), &q, &tol(), LyapunovVariant::General).is_err());
}

#[test]
fn lyapunov_variants_agree_for_invertible_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let mut passing = 0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=6);
        let field = if trial % 2 == 0 { Field::Real } else { Field::Complex };
        let q = random_invertible(&mut rng, n, field);
        let rank = rng.gen_range(0..=n);
        let h = random_psd(&mut rng, n, rank, field);
        let mut e = &inverse(&q).unwrap().adjoint() * &h;
        if trial % 5 == 0 {
            e = e.scale_real(-1.0);
        }
        let rr = rng.gen_range(0..=n);
        let mut l = &random_skew(&mut rng, n, field) - &random_psd(&mut rng, n, rr, field);
        if trial % 4 == 0 {
            l = &l + &Matrix::identity(n).scale_real(0.5);
        }
        let a = &l * &q;
        let g = lyapunov_check(&e, &a, &q, &tol(), LyapunovVariant::General).unwrap();
        let s = lyapunov_check(&e, &a, &q, &tol(), LyapunovVariant::SquareInvertible).unwrap();
        assert_eq!(g.e_star_q_psd.holds, s.e_star_q_psd.holds, "trial {trial}");
        assert_eq!(g.dissipation.holds, s.dissipation.holds, "trial {trial}");
        assert_eq!(g.conditions_hold(), s.conditions_hold(), "trial {trial}");
        assert!(g.q_invertible && g.eq_minimal_indices_zero && g.kernel_inclusion.holds);
        if g.conditions_hold() {
            passing += 1;
            assert!(g.guarantees_confirmed() && s.guarantees_confirmed(), "trial {trial}: {:#?} {:#?}", g.stability, s.stability);
        }
    }
    assert!(passing > 20);
}

#[test]
fn rectangular_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for trial in 0..40u64 {
        let n = rng.gen_range(2..=7);
        let m = rng.gen_range(1..=7);
        let opts = RandomPencilOptions { zero_left_indices: true, ..Default::default() };
        let p = random_structured_pencil(n, m, 9000 + trial, opts).unwrap();
        let r = lyapunov_check(p.e(), &p.a(), p.q(), &tol(), LyapunovVariant::General).unwrap();
        assert!(r.kernel_inclusion.holds && r.e_star_q_psd.holds, "trial {trial}");
        if r.conditions_hold() {
            assert!(r.guarantees_confirmed(), "trial {trial}");
        }
    }
}
