use bergman_core::hardy::{
    bergman_kernel_closed, bergman_kernel_series, ladder_d, ladder_dstar, mult_monomial, mult_monomial_adj, BasisSpec,
    HardySection, OperatorSum,
};
use bergman_core::model_curvature::{curvature_bruteforce_operator, curvature_form_model, curvature_sandwich, CoefficientMutation};
use bergman_core::multiindex::{ball_moment, enumerate, split_multiindex, sup_norm, MultiIndex};
use bergman_core::perturbation::{APrimeEntry, CEntry, MetricJet};
use bergman_core::random::{random_section, random_tangent, rng, DEFAULT_DECAY};
use num_complex::Complex64;
use proptest::prelude::*;

fn multi_index(max_n: usize, max_part: u32) -> impl Strategy<Value = MultiIndex> {
    (1..=max_n).prop_flat_map(move |n| proptest::collection::vec(0..=max_part, n).prop_map(MultiIndex::new))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn position_indexes_enumeration(alpha in multi_index(3, 4)) {
        let all = enumerate(alpha.dim(), alpha.degree()).unwrap();
        prop_assert_eq!(&all[alpha.position()], &alpha);
    }

    #[test]
    fn moments_scale_exactly_under_doubling(alpha in multi_index(3, 4), k in -3i32..3) {
        let eps = 2f64.powi(k);
        let ratio = &ball_moment(&alpha, 2.0 * eps).unwrap() / &ball_moment(&alpha, eps).unwrap();
        let four = &ball_moment(&MultiIndex::zero(1), 2.0).unwrap() / &ball_moment(&MultiIndex::zero(1), 1.0).unwrap();
        prop_assert_eq!(ratio, four.powi((alpha.degree() as usize + alpha.dim()) as i32));
    }

    #[test]
    fn splits_partition_and_dominate(lambda in multi_index(3, 5), frac in 0.0f64..1.0) {
        prop_assume!(lambda.degree() >= 2);
        let p = ((lambda.degree() - 1) as f64 * frac) as u32;
        let s = split_multiindex(&lambda, p).unwrap();
        prop_assert_eq!(s.left.add(&s.right).add(&MultiIndex::unit(lambda.dim(), s.axis)), lambda.clone());
        prop_assert!(sup_norm(&s.left) * sup_norm(&s.right) >= sup_norm(&lambda) * (1.0 - 1e-12));
    }

    #[test]
    fn ladder_adjoints_pair_correctly(n in 1usize..=3, seed in any::<u64>(), axis in 0usize..3, eps in 0.2f64..2.0) {
        let axis = axis % n;
        let spec = BasisSpec::new(n, eps, 5).unwrap();
        let mut r = rng(seed);
        let xi = random_section(spec, DEFAULT_DECAY, &mut r);
        let eta = random_section(spec, DEFAULT_DECAY, &mut r);
        let mu = MultiIndex::unit(n, axis).add(&MultiIndex::unit(n, (axis + 1) % n));
        for (a, b) in [
            (OperatorSum::from(ladder_d(axis, &spec)), OperatorSum::from(ladder_dstar(axis, &spec))),
            (OperatorSum::from(mult_monomial(&mu, &spec)), OperatorSum::from(mult_monomial_adj(&mu, &spec))),
        ] {
            prop_assert!(close(a.sesquilinear(&xi, &eta), b.adjoint().sesquilinear(&xi, &eta), 1e-12));
            prop_assert!(close(a.apply(&xi, 7).inner(&eta.truncated(7)), xi.inner(&b.apply(&eta, 7).truncated(spec.degree)), 1e-12));
        }
    }

    #[test]
    fn model_curvature_is_sandwiched_and_matches_brute_force(n in 1usize..=3, seed in any::<u64>(), eps in 0.1f64..3.0) {
        let spec = BasisSpec::new(n, eps, 4).unwrap();
        let mut r = rng(seed);
        let xi = random_section(spec.with_degree(3), DEFAULT_DECAY, &mut r);
        let v = random_tangent(n, &mut r);
        let sw = curvature_sandwich(&xi, &v);
        prop_assert!(sw.holds(1e-12));
        let mut padded = HardySection::zero(spec);
        for (a, c) in xi.iter() {
            padded.add_to(&a, c);
        }
        let brute = curvature_bruteforce_operator(&spec, CoefficientMutation::None).quadratic_form(&padded, &v);
        let q = curvature_form_model(&xi, &v);
        prop_assert!((brute.re - q).abs() <= 1e-10 * q.abs());
        prop_assert!(brute.im.abs() <= 1e-10 * q.abs());
    }

    #[test]
    fn kernel_series_increases_to_closed_form(n in 1usize..=2, r in 0.0f64..0.5, degree in 0u32..30) {
        let w: Vec<Complex64> = (0..n).map(|_| Complex64::new(r / (n as f64).sqrt(), 0.0)).collect();
        let lo = bergman_kernel_series(n, &w, degree).unwrap();
        let hi = bergman_kernel_series(n, &w, degree + 1).unwrap();
        let closed = bergman_kernel_closed(n, &w).unwrap();
        prop_assert!(lo <= hi && hi <= closed * (1.0 + 1e-14));
    }

    #[test]
    fn rho_norm_is_log_convex(n in 1usize..=3, seed in any::<u64>(), a in 0.05f64..0.9, b in 0.05f64..0.9) {
        let xi = random_section(BasisSpec::new(n, 1.0, 4).unwrap(), DEFAULT_DECAY, &mut rng(seed));
        let mid = (a * b).sqrt();
        let f = |rho: f64| xi.rho_weighted_norm(rho).unwrap().ln();
        prop_assert!(f(mid) <= 0.5 * (f(a) + f(b)) + 1e-12);
    }

    #[test]
    fn section_json_round_trips(n in 1usize..=3, seed in any::<u64>(), eps in 0.1f64..2.0) {
        let xi = random_section(BasisSpec::new(n, eps, 3).unwrap(), DEFAULT_DECAY, &mut rng(seed));
        let back = HardySection::from_json(&xi.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.coeffs(), xi.coeffs());
        prop_assert_eq!(back.spec(), xi.spec());
    }

    #[test]
    fn jets_within_bounds_round_trip(
        coefs in proptest::collection::vec((0usize..2, 0usize..2, 0u32..3, 0u32..3, -1.0f64..1.0, -1.0f64..1.0), 0..6),
    ) {
        let c0 = 2.0;
        let mut jet = MetricJet::zero(2).unwrap();
        jet.order = 4;
        jet.c0 = c0;
        let mut seen = std::collections::BTreeSet::new();
        for (k, m, a, b, re, im) in coefs {
            let mu = MultiIndex::new(vec![a, b]);
            if mu.is_zero() || !seen.insert((k, m, mu.clone())) {
                continue;
            }
            let value = Complex64::new(re, im);
            jet.a_prime.push(APrimeEntry { k, m, mu: mu.clone(), value });
            jet.c.push(CEntry { j: m, k, m: k, mu, value: value * 0.5 });
        }
        jet.validate().unwrap();
        let back = MetricJet::from_json(&jet.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, jet);
    }
}
