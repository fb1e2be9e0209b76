//! Properties of spectra, forms, flags and curves.

use nalgebra::{DMatrix, Schur};
use proptest::prelude::*;
use totpos::bilinear::{canonical_basis, is_totally_positive_form, is_totally_positive_form_direct, BilinearForm};
use totpos::curves::{
    dihedral_partition, hyperplane_intersection_count, is_positive_numbered, is_positive_quadruple, osculating_flag,
    CirclePoint, MomentCurve,
};
use totpos::flag::{in_b_pos, in_b_pos_prime, opposed, Flag};
use totpos::matrix::Matrix;
use totpos::sample;
use totpos::scalar::{rat, Rational};
use totpos::spectra::{gk_spectrum, gk_spectrum_with, SpectralOptions};
use totpos::{Execution, Tolerance};

type Q = Matrix<Rational>;

fn oracle_eigenvalues(m: &Q) -> Vec<f64> {
    let n = m.rows();
    let f = m.to_f64();
    let d = DMatrix::from_fn(n, n, |r, c| f[(r, c)]);
    let schur = Schur::try_new(d, 1e-14, 10_000).expect("Schur converges");
    let mut ev: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn distinct_points(raw: &[(i64, i64)]) -> Vec<CirclePoint> {
    let mut out: Vec<CirclePoint> = Vec::new();
    for &(p, q) in raw {
        let c = CirclePoint::finite(p, q);
        if !out.iter().any(|d| d.same_point(&c)) {
            out.push(c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_matches_dense_oracle(seed in any::<u64>(), n in 1usize..=5) {
        let m = sample::tp_matrix(&mut sample::rng(seed), n);
        let s = gk_spectrum(&m).unwrap();
        for (got, want) in s.eigenvalues.iter().zip(oracle_eigenvalues(&m)) {
            prop_assert!((got - want).abs() <= 1e-7 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn spectrum_is_execution_independent(seed in any::<u64>(), n in 2usize..=4) {
        let m = sample::tp_matrix(&mut sample::rng(seed), n);
        let seq = gk_spectrum_with(&m, &SpectralOptions { exec: Execution::Sequential, ..SpectralOptions::default() }).unwrap();
        let par = gk_spectrum_with(&m, &SpectralOptions { exec: Execution::Parallel, ..SpectralOptions::default() }).unwrap();
        prop_assert_eq!(seq.eigenvalues, par.eigenvalues);
        prop_assert_eq!(seq.perron_roots, par.perron_roots);
    }

    #[test]
    fn chain_is_invariant_under_rescaling(seed in any::<u64>(), n in 2usize..=4, p in 1i64..=9, q in 1i64..=9) {
        let f = sample::tp_form(&mut sample::rng(seed), n);
        let scaled = BilinearForm::new(f.gram().scale(&rat(p, q))).unwrap();
        let a = canonical_basis(&f).unwrap();
        let b = canonical_basis(&scaled).unwrap();
        for (x, y) in a.chain.iter().zip(&b.chain) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn form_tests_agree(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = sample::rng(seed);
        let f = BilinearForm::new(sample::invertible_matrix(&mut r, n)).unwrap();
        prop_assert_eq!(is_totally_positive_form(&f), is_totally_positive_form_direct(&f, Execution::Sequential));
    }

    #[test]
    fn flags_are_right_coset_invariant(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = sample::rng(seed);
        let g = sample::invertible_matrix(&mut r, n);
        let b = sample::upper_triangular(&mut r, n);
        prop_assert_eq!(Flag::from_matrix(&g).unwrap(), Flag::from_matrix(&(&g * &b)).unwrap());
    }

    #[test]
    fn positive_flags_come_from_positive_unipotents(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = sample::rng(seed);
        let u = sample::lower_uni(&mut r, n).synthesize();
        let f = Flag::from_matrix(&u).unwrap();
        let f_prime = Flag::from_matrix(&u.inverse().unwrap()).unwrap();
        prop_assert!(in_b_pos(&f).is_some());
        prop_assert!(in_b_pos_prime(&f_prime).is_some());
        prop_assert!(in_b_pos(&f_prime).is_none());
        prop_assert!(opposed(&f, &f_prime));
    }

    #[test]
    fn osculating_quadruples_are_positive(
        m in 1usize..=3,
        raw in proptest::collection::vec((-20i64..20, 1i64..5), 4..8),
    ) {
        let pts = distinct_points(&raw);
        prop_assume!(pts.len() >= 4);
        let mc = MomentCurve::new(m).unwrap();
        let four = [pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone()];
        let q = dihedral_partition(four.clone()).unwrap();
        let flags: Vec<Flag<Rational>> = four.iter().map(|t| osculating_flag(&mc, t).unwrap()).collect();
        prop_assert!(is_positive_quadruple([&flags[0], &flags[1], &flags[2], &flags[3]], &q).unwrap());
    }

    #[test]
    fn quadruple_positivity_is_dihedral_and_gl_invariant(
        seed in any::<u64>(),
        m in 1usize..=3,
        raw in proptest::collection::vec((-20i64..20, 1i64..5), 4..8),
        shift in 0usize..4,
        flip in any::<bool>(),
    ) {
        let pts = distinct_points(&raw);
        prop_assume!(pts.len() >= 4);
        let mc = MomentCurve::new(m).unwrap();
        let mut four = [pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone()];
        four.sort_by(|a, b| a.cyclic_cmp(b));
        let flags: Vec<Flag<Rational>> = four.iter().map(|t| osculating_flag(&mc, t).unwrap()).collect();
        let mut idx: Vec<usize> = (0..4).map(|k| (k + shift) % 4).collect();
        if flip {
            idx.reverse();
        }
        let h = sample::invertible_matrix(&mut sample::rng(seed), m + 1);
        let moved: Vec<Flag<Rational>> = idx.iter().map(|&i| flags[i].transform(&h).unwrap()).collect();
        let tol = Tolerance::default();
        prop_assert!(is_positive_numbered([&moved[0], &moved[1], &moved[2], &moved[3]], &tol).unwrap());
        let crossed = [&moved[0], &moved[2], &moved[1], &moved[3]];
        prop_assert!(!is_positive_numbered(crossed, &tol).unwrap());
    }

    #[test]
    fn hyperplane_counts_are_scale_invariant_and_bounded(
        m in 1usize..=4,
        coeffs in proptest::collection::vec(-6i64..=6, 5),
        p in 1i64..=7,
        q in 1i64..=7,
        negate in any::<bool>(),
    ) {
        let h: Vec<Rational> = coeffs[..=m].iter().map(|c| rat(*c, 1)).collect();
        prop_assume!(h.iter().any(|c| *c != rat(0, 1)));
        let s = rat(if negate { -p } else { p }, q);
        let scaled: Vec<Rational> = h.iter().map(|c| c * &s).collect();
        let mc = MomentCurve::new(m).unwrap();
        let a = hyperplane_intersection_count(&mc, &h).unwrap();
        prop_assert_eq!(a, hyperplane_intersection_count(&mc, &scaled).unwrap());
        prop_assert!(a <= m);
    }
}
