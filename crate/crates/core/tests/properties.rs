use proptest::prelude::*;

use jacobi_bifurcation::continuation::{
    bifurcation_points, count_crossings, jacobian, lambda_prime_zero, residual, ProblemSpec,
    SpectralFunction,
};
use jacobi_bifurcation::geometry::{consistency_check, params_from_sphere, sphere_eigenvalue};
use jacobi_bifurcation::jacobi::params::ratio;
use jacobi_bifurcation::jacobi::{weighted_norm_sq, weighted_norm_sq_closed_form, JacobiParams};
use jacobi_bifurcation::linearization::{gasper_quartic_exact, sign_classification};

/// `(alpha, beta)` with `alpha >= beta`, `alpha + beta + 1 > 0`, `beta > -1`.
fn admissible() -> impl Strategy<Value = (i64, i64)> {
    // numerators over 4
    (-3i64..=12, -3i64..=12)
        .prop_filter("ordered, integrable", |&(a, b)| a >= b && a + b + 4 > 0)
}

fn params((a, b): (i64, i64)) -> JacobiParams {
    JacobiParams::from_ratios((a, 4), (b, 4)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_matches_closed_form(p in admissible(), k in 0usize..25) {
        let p = params(p);
        let h = weighted_norm_sq(k, &p).unwrap();
        let closed = weighted_norm_sq_closed_form(k, &p);
        prop_assert!((h - closed).abs() <= 1e-11 * closed, "{h} vs {closed}");
    }

    #[test]
    fn sphere_map_is_consistent(n in 3i64..40, d in prop::sample::select(vec![1i64, 2, 3, 4, 6]), c in -6i64..=0, i in 1u32..8) {
        if let Ok(ctx) = params_from_sphere(n, d, c) {
            let (a, b) = (ctx.alpha(), ctx.beta());
            prop_assert_eq!(b - a, ratio(c, 2));
            prop_assert_eq!(a + b + ratio(2, 1), ratio(n + d - 1, d));
            prop_assert!(sphere_eigenvalue(i, &ctx) < ratio(0, 1));
            prop_assert_eq!(consistency_check(i, &ctx, 3.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn quartic_forms_agree(k in 2usize..30, num in 1i64..60, den in 1i64..12, j in 0i64..200) {
        let q = gasper_quartic_exact(k, &ratio(num, den)).unwrap();
        let j = ratio(j, 3);
        prop_assert_eq!(q.eval_factored_exact(&j), q.eval_expanded_exact(&j));
    }

    #[test]
    fn linearization_signs_follow_pattern(p in admissible(), k in 1usize..9) {
        let report = sign_classification(k, &params(p)).unwrap();
        prop_assert!(report.agrees(), "{:?}", report.discrepancies);
    }

    #[test]
    fn slope_sign_contract(p in admissible(), k in 1usize..7, q in 1.1f64..6.0) {
        let p = params(p);
        let symmetric = p.is_symmetric();
        let spec = ProblemSpec::with_modes(p, q, 16).unwrap();
        let slope = lambda_prime_zero(k, &spec).unwrap();
        if symmetric && k % 2 == 1 {
            prop_assert_eq!(slope, 0.0);
        } else {
            prop_assert!(slope < 0.0, "slope {slope}");
        }
    }

    #[test]
    fn bifurcation_points_increase(p in admissible(), q in 1.1f64..6.0) {
        let spec = ProblemSpec::with_modes(params(p), q, 16).unwrap();
        let pts = bifurcation_points(&spec, 12);
        prop_assert!(pts[0].1 > 0.0);
        prop_assert!(pts.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn small_perturbation_crosses_k_times(p in admissible(), k in 1usize..10) {
        let p = params(p);
        let u = SpectralFunction::perturbed_one(k, 1e-3, 16, &p);
        prop_assert_eq!(count_crossings(&u).unwrap(), k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trivial_state_solves_for_every_lambda(p in admissible(), q in 1.1f64..6.0, lambda in 0.0f64..50.0) {
        let spec = ProblemSpec::with_modes(params(p), q, 16).unwrap();
        let r = residual(&spec.constant_one(), lambda, &spec).unwrap();
        prop_assert!(r.coeffs().iter().all(|c| c.abs() < 1e-12 * (1.0 + lambda)));
    }

    #[test]
    fn jacobian_is_symmetric_in_weighted_inner_product(
        p in admissible(),
        q in 1.5f64..4.0,
        lambda in 0.1f64..20.0,
        amp in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let p = params(p);
        let spec = ProblemSpec::with_modes(p.clone(), q, 16).unwrap();
        let mut c: Vec<f64> = amp.iter().enumerate().map(|(i, a)| 0.1 * a / (1.0 + i as f64).powi(3)).collect();
        c[0] = 1.0;
        let u = SpectralFunction::new(c, &p);
        let j = jacobian(&u, lambda, &spec).unwrap();
        let h = spec.norms();
        let scale = j.amax();
        for r in 0..16 {
            for s in 0..16 {
                let lhs = h[r] * j[(r, s)];
                let rhs = h[s] * j[(s, r)];
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * h[r].max(h[s]).max(1.0));
            }
        }
    }
}
