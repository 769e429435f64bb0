use proptest::prelude::*;

use trotterlab::bounds::{
    eigenstate_bound, eigenstate_bound_optimized, ho_analytic_bound, AlphaSearchConfig, EigenpairCertificate,
};
use trotterlab::diagnostics::detect_plateau;
use trotterlab::fock::{builtin, fock_state, truncate_polynomial, Ladder, LadderPolynomial, TruncationScheme};
use trotterlab::linalg::{
    decomposition_residuals, eig_hermitian, spectral_norm, ComplexMatrix, HermitianMatrix, StateVector, C64,
};
use trotterlab::trotter::{ErrorSeries, TrotterProblem};

fn hermitian(dim: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), dim * dim).prop_map(move |v| {
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = v[i * dim + j];
            C64::new(re, im)
        });
        HermitianMatrix::new(m).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (HermitianMatrix, HermitianMatrix)> {
    (1usize..=6).prop_flat_map(|d| (hermitian(d), hermitian(d)))
}

fn unit_state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim).prop_filter_map("nonzero", |v| {
        StateVector::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok()
    })
}

fn pair_and_state() -> impl Strategy<Value = (HermitianMatrix, HermitianMatrix, StateVector)> {
    (1usize..=6).prop_flat_map(|d| (hermitian(d), hermitian(d), unit_state(d)))
}

fn word() -> impl Strategy<Value = Vec<Ladder>> {
    prop::collection::vec(prop_oneof![Just(Ladder::Lower), Just(Ladder::Raise)], 0..=4)
}

fn polynomial() -> impl Strategy<Value = LadderPolynomial> {
    prop::collection::vec(((-2.0..2.0f64, -2.0..2.0f64), word()), 1..5).prop_map(|terms| {
        let p = LadderPolynomial::from_terms(terms.into_iter().map(|((re, im), w)| (C64::new(re, im), w)).collect());
        // hermitian part
        p.add(&p.adjoint()).scale(C64::new(0.5, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_residuals((h, _) in pair()) {
        let s = eig_hermitian(&h).unwrap();
        let (rec, orth) = decomposition_residuals(&h, &s).unwrap();
        prop_assert!(rec <= 1e-10 && orth <= 1e-10, "{rec:e} {orth:e}");
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_group_law_and_unitarity(
        (h, _, psi) in pair_and_state(),
        t in -3.0..3.0f64,
        s in -3.0..3.0f64,
    ) {
        let spectrum = eig_hermitian(&h).unwrap();
        let two_steps = spectrum.evolve_state(s, &spectrum.evolve_state(t, &psi).unwrap()).unwrap();
        let one_step = spectrum.evolve_state(t + s, &psi).unwrap();
        prop_assert!(two_steps.distance(&one_step).unwrap() <= 1e-9);
        prop_assert!((one_step.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn unitaries_are_at_most_two_apart((h1, h2) in pair(), t in -3.0..3.0f64) {
        let u = eig_hermitian(&h1).unwrap().propagator(t);
        let w = eig_hermitian(&h2).unwrap().propagator(-t);
        prop_assert!(spectral_norm(&u.try_sub(&w).unwrap()).unwrap() <= 2.0 + 1e-9);
    }

    #[test]
    fn state_error_below_uniform_error(
        (h1, h2, psi) in pair_and_state(),
        t in 0.0..2.5f64,
        n in 1usize..20,
    ) {
        let p = TrotterProblem::new(h1, h2).unwrap();
        let b = p.state_error(t, n, &psi).unwrap();
        let beta = p.uniform_error(t, n).unwrap();
        prop_assert!(0.0 <= b && b <= beta + 1e-10 && beta <= 2.0 + 1e-9, "{b} {beta}");
        prop_assert!((p.trotter_state(t, n, &psi).unwrap().norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn state_error_is_shift_invariant(
        (h1, h2, psi) in pair_and_state(),
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
        t in 0.0..2.0f64,
        n in 1usize..50,
    ) {
        let base = TrotterProblem::new(h1.clone(), h2.clone()).unwrap().state_error(t, n, &psi).unwrap();
        let shifted = TrotterProblem::new(h1.shifted(a), h2.shifted(b)).unwrap().state_error(t, n, &psi).unwrap();
        prop_assert!((base - shifted).abs() <= 1e-9, "{base} {shifted}");
    }

    #[test]
    fn eigenstate_bound_dominates_and_optimum_is_lower(
        (h1, h2) in pair(),
        k in 0usize..6,
        t in 0.0..2.0f64,
        n in 1usize..200,
    ) {
        let p = TrotterProblem::new(h1.clone(), h2.clone()).unwrap();
        let spectrum = p.sum_spectrum();
        let k = k % spectrum.dim();
        let cert = EigenpairCertificate::new(&h1, &h2, spectrum.eigenvector(k), spectrum.eigenvalues()[k]).unwrap();
        let bound = eigenstate_bound(&h1, &h2, &cert, t, n).unwrap();
        let err = p.state_error(t, n, cert.phi()).unwrap();
        prop_assert!(err <= bound + 1e-10, "{err} > {bound}");
        let (opt, _) = eigenstate_bound_optimized(&h1, &h2, &cert, t, n, &AlphaSearchConfig::default()).unwrap();
        prop_assert!(opt <= bound + 1e-12);
    }

    #[test]
    fn optimized_bound_is_shift_covariant(
        (h1, h2) in pair(),
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
    ) {
        let search = AlphaSearchConfig::default();
        let spectrum = eig_hermitian(&h1.try_add(&h2).unwrap()).unwrap();
        let (phi, h) = (spectrum.eigenvector(0), spectrum.eigenvalues()[0]);
        let cert = EigenpairCertificate::new(&h1, &h2, phi.clone(), h).unwrap();
        let (g1, g2) = (h1.shifted(a), h2.shifted(b));
        let moved = EigenpairCertificate::new(&g1, &g2, phi, h + a + b).unwrap();
        let (x, alpha) = eigenstate_bound_optimized(&h1, &h2, &cert, 1.0, 1, &search).unwrap();
        let (y, beta) = eigenstate_bound_optimized(&g1, &g2, &moved, 1.0, 1, &search).unwrap();
        // the optimum may sit outside the search interval in one frame only
        let inside = |al: f64| al > -2.0 + 1e-6 && al < 3.0 - 1e-6;
        prop_assume!(inside(alpha) && inside(beta));
        prop_assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
    }

    #[test]
    fn truncation_is_a_block_of_larger_truncations(p in polynomial(), d in 1usize..12, extra in 1usize..6) {
        let small = p.compress(d);
        let large = p.compress(d + extra);
        prop_assert_eq!(large.block(d, d), small);
    }

    #[test]
    fn analytic_oscillator_bound_dominates_every_truncation(m in 0usize..5, extra in 1usize..12, n in 1usize..300) {
        let d = m + extra;
        let s = TruncationScheme::fock(d).unwrap();
        let h1 = truncate_polynomial(&builtin("half_q2").unwrap(), s).unwrap();
        let h2 = truncate_polynomial(&builtin("half_p2").unwrap(), s).unwrap();
        let err = TrotterProblem::new(h1, h2).unwrap().state_error(1.0, n, &fock_state(m, d).unwrap()).unwrap();
        prop_assert!(err <= ho_analytic_bound(m as u64, 1.0, n) + 1e-10);
    }
}

fn series_of(values: &[f64]) -> ErrorSeries {
    ErrorSeries::new("s", 1, 1.0, values.iter().enumerate().map(|(k, &v)| (k + 1, v)).collect()).unwrap()
}

fn near_flat(window: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.01..1.0f64, prop::collection::vec(-0.05..0.05f64, 2 * window..4 * window))
        .prop_map(|(level, wiggle)| wiggle.into_iter().map(|w| level * (1.0 + w)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn plateau_is_scale_equivariant(values in near_flat(5), c in 1e-3..1.8f64, rtol in 0.01..0.2f64) {
        let base = detect_plateau(&series_of(&values), 5, rtol).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
        let other = detect_plateau(&series_of(&scaled), 5, rtol).unwrap();
        prop_assert_eq!(base.saturates, other.saturates);
        if let (Some(p), Some(q)) = (base.plateau_value, other.plateau_value) {
            prop_assert!((q - c * p).abs() <= 1e-12 * q.max(1.0));
        }
    }

    #[test]
    fn plateau_is_monotone_in_rtol(values in near_flat(4), r1 in 0.01..0.3f64, grow in 1.0..3.0f64) {
        let s = series_of(&values);
        if detect_plateau(&s, 4, r1).unwrap().saturates {
            prop_assert!(detect_plateau(&s, 4, r1 * grow).unwrap().saturates);
        }
    }

    #[test]
    fn appending_a_window_inside_the_band_keeps_saturation(
        values in near_flat(4),
        rtol in 0.05..0.3f64,
        extra in prop::collection::vec(-1.0..1.0f64, 4..10),
    ) {
        let s = series_of(&values);
        let v = detect_plateau(&s, 4, rtol).unwrap();
        prop_assume!(v.saturates);
        let pv = v.plateau_value.unwrap();
        let mut longer = values.clone();
        longer.extend(extra.iter().map(|e| pv * (1.0 + e * rtol / 3.0)));
        prop_assume!(longer.iter().all(|&x| x <= 2.0));
        prop_assert!(detect_plateau(&series_of(&longer), 4, rtol).unwrap().saturates);
    }
}
