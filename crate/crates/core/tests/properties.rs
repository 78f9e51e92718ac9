//! Property tests for the structural invariants the modules promise.

mod common;

use common::*;
use harmint::constants::{coeff_c123, coeff_c456};
use harmint::convexity::check_harmonic_convexity;
use harmint::numerics::integrate_adaptive;
use harmint::{Interval, LambdaWeight};
use proptest::prelude::*;

#[test]
fn power_mean_bound_endpoints_reproduce_corollary_forms() {
    // The midpoint (lambda = 0) and trapezoid (lambda = 1) bounds evaluated
    // through the general closed forms must agree with the specialized
    // printed forms to 1e-10.
    use harmint::bounds::{bound_thm22, EvalOptions};
    use harmint::convexity::{catalog, CatalogName};

    let fs = catalog(&CatalogName::Square).unwrap();
    let opts = EvalOptions::default();
    let q = 2.0;
    for interval in [
        Interval::new(1.0, 2.0).unwrap(),
        Interval::new(0.8, 2.5).unwrap(),
    ] {
        let (a, b) = (interval.a(), interval.b());
        let (daq, dbq) = (
            fs.derivative(a).abs().powf(q),
            fs.derivative(b).abs().powf(q),
        );
        let scale = 0.5 * interval.product() * interval.width();
        type CFns = (fn(f64, f64) -> f64, fn(f64, f64) -> f64, fn(f64, f64) -> f64);
        let cases: [(f64, CFns); 2] = [
            (0.0, (c1_midpoint, c2_midpoint, c3_midpoint)),
            (1.0, (c1_trapezoid, c2_trapezoid, c3_trapezoid)),
        ];
        for (lam, (f1, f2, f3)) in cases {
            let lambda = LambdaWeight::new(lam).unwrap();
            let v = bound_thm22(&fs, &interval, lambda, q, &opts).unwrap();
            let outer = 1.0 - 1.0 / q;
            let corollary_rhs = scale
                * (f1(a, b).powf(outer) * (f2(a, b) * daq + f3(a, b) * dbq).powf(1.0 / q)
                    + f1(b, a).powf(outer) * (f3(b, a) * daq + f2(b, a) * dbq).powf(1.0 / q));
            assert!(
                (v.rhs - corollary_rhs).abs() <= 1e-10 * corollary_rhs.abs().max(1.0),
                "lambda = {lam} on {interval}: {} vs {corollary_rhs}",
                v.rhs
            );
        }
    }
}

fn interval_strategy() -> impl Strategy<Value = Interval> {
    (0.05f64..5.0, 1.05f64..20.0)
        .prop_map(|(a, ratio)| Interval::new(a, a * ratio).unwrap())
}

fn lambda_strategy() -> impl Strategy<Value = LambdaWeight> {
    (0.0f64..=1.0).prop_map(|l| LambdaWeight::new(l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_additive(iv in interval_strategy(), frac in 0.1f64..0.9) {
        let (a, b) = (iv.a(), iv.b());
        let c = a + frac * (b - a);
        let f = |x: f64| x.ln() + 1.0 / (x * x);
        let tol = 1e-11;
        let whole = integrate_adaptive(f, a, b, tol, tol).unwrap().value;
        let parts = integrate_adaptive(f, a, c, tol, tol).unwrap().value
            + integrate_adaptive(f, c, b, tol, tol).unwrap().value;
        prop_assert!((whole - parts).abs() <= 3.0 * tol.max(1e-11 * whole.abs()));
    }

    #[test]
    fn harmonic_mid_scales(iv in interval_strategy(), k in 0.01f64..100.0) {
        let scaled = Interval::new(k * iv.a(), k * iv.b()).unwrap();
        let expect = k * iv.harmonic_mid();
        prop_assert!((scaled.harmonic_mid() - expect).abs() <= 1e-12 * expect.abs());
    }

    #[test]
    fn kernel_coefficients_nonnegative_and_mirror(
        iv in interval_strategy(),
        lambda in lambda_strategy(),
    ) {
        let (a, b) = (iv.a(), iv.b());
        let (c1, c2, c3) = coeff_c123(lambda, a, b).unwrap();
        prop_assert!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0);

        // Swapped closed forms equal the brute-force upper-half integrals.
        let (c1s, c2s, c3s) = coeff_c123(lambda, b, a).unwrap();
        let lam = lambda.get();
        let upper = |w: fn(f64) -> f64| {
            let f = move |t: f64| {
                let at = t * b + (1.0 - t) * a;
                (2.0 - lam - 2.0 * t).abs() * w(t) / (at * at)
            };
            simpson_split(f, 0.5, 1.0 - lam / 2.0, 1.0, 2000)
        };
        prop_assert!((c1s - upper(w_one)).abs() <= 1e-8);
        prop_assert!((c2s - upper(w_1mt)).abs() <= 1e-8);
        prop_assert!((c3s - upper(w_t)).abs() <= 1e-8);
    }

    #[test]
    fn corollary_forms_match_general_closed_form(iv in interval_strategy()) {
        type CoeffFn = fn(f64, f64) -> f64;
        let (u, v) = (iv.a(), iv.b());
        let cases: [(f64, CoeffFn, CoeffFn, CoeffFn); 3] = [
            (0.0, c1_midpoint, c2_midpoint, c3_midpoint),
            (1.0, c1_trapezoid, c2_trapezoid, c3_trapezoid),
            (1.0 / 3.0, c1_simpson, c2_simpson, c3_simpson),
        ];
        for (lam, f1, f2, f3) in cases {
            let lambda = LambdaWeight::new(lam).unwrap();
            for (x, y) in [(u, v), (v, u)] {
                let (c1, c2, c3) = coeff_c123(lambda, x, y).unwrap();
                let scale = c1.abs().max(1.0);
                prop_assert!((c1 - f1(x, y)).abs() <= 1e-10 * scale,
                    "C1 at lambda={lam}: {c1} vs {}", f1(x, y));
                prop_assert!((c2 - f2(x, y)).abs() <= 1e-10 * scale);
                prop_assert!((c3 - f3(x, y)).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn c4_symmetric_and_minimized_at_half(
        lambda in lambda_strategy(),
        p in 1.1f64..6.0,
    ) {
        let q = p / (p - 1.0);
        let (c4, _, _) = coeff_c456(lambda, p, q, 1.0, 2.0).unwrap();
        let mirrored = LambdaWeight::new(1.0 - lambda.get()).unwrap();
        let (c4m, _, _) = coeff_c456(mirrored, p, q, 1.0, 2.0).unwrap();
        prop_assert!((c4 - c4m).abs() <= 1e-14 * c4.abs());

        let (c4_half, _, _) = coeff_c456(LambdaWeight::new(0.5).unwrap(), p, q, 1.0, 2.0).unwrap();
        prop_assert!(c4_half <= c4 + 1e-15);
    }

    #[test]
    fn convexity_grid_refinement_keeps_violations(iv in interval_strategy()) {
        // Harmonically concave, so every grid sees a violation.
        let coarse = check_harmonic_convexity(|x| -x, &iv, 9, 1e-12).unwrap();
        let fine = check_harmonic_convexity(|x| -x, &iv, 18, 1e-12).unwrap();
        prop_assert!(coarse.worst_violation > 0.0);
        prop_assert!(fine.worst_violation >= coarse.worst_violation - 1e-12);
    }
}
