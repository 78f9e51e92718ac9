//! Closed-form evaluation of the bound coefficients.
//!
//! Every coefficient here has an integral representation over `t in [0, 1]`
//! (see [`crate::numerics::t_kernel_integral`]); the closed forms below are
//! what the bound theorems consume, and the integral route is kept as the
//! independent oracle in the test suites. Differences `C3 = C1 - C2` and
//! `lambda3 = lambda1 - lambda2` are computed by subtraction so there is one
//! source of truth.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{Interval, LambdaWeight};
use crate::numerics::QuadError;
use crate::numerics::{t_kernel_integral, HalfRange, KernelKind, KernelWeight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("degenerate pair: u, v must be positive, finite and distinct (got u = {u}, v = {v})")]
    DegeneratePair { u: f64, v: f64 },
    #[error("invalid coefficient arguments: {0}")]
    InvalidArguments(String),
    #[error("mu coefficients require q > 1 (got q = {0})")]
    MuExponent(f64),
    #[error("degenerate exponent: the enclosing bound needs q > 1 (got q = {0})")]
    DegenerateExponent(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn check_pair(u: f64, v: f64) -> Result<(), CoeffError> {
    if u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite() && u != v {
        Ok(())
    } else {
        Err(CoeffError::DegeneratePair { u, v })
    }
}

// ln(x) that fails loudly instead of returning NaN on a domain bug.
fn checked_ln(x: f64) -> Result<f64, CoeffError> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(CoeffError::InvalidArguments(format!(
            "log argument must be positive and finite (got {x})"
        )))
    }
}

// x^e computed in log space; x must be positive.
fn powl(x: f64, e: f64) -> Result<f64, CoeffError> {
    Ok((e * checked_ln(x)?).exp())
}

/// `(C1, C2, C3)(lambda; u, v)`: the weighted-kernel integrals
/// `int_0^(1/2) |lambda - 2t| * {1, t, 1-t} / (t*v + (1-t)*u)^2 dt`
/// in closed form. Swapping `(u, v)` yields the mirrored upper-half values.
pub fn coeff_c123(
    lambda: LambdaWeight,
    u: f64,
    v: f64,
) -> Result<(f64, f64, f64), CoeffError> {
    check_pair(u, v)?;
    let lam = lambda.get();
    let d = v - u;
    let s = u + v;
    let big_p = lam * d + 2.0 * u; // lambda(v-u) + 2u, positive for u, v > 0
    let big_q = lam * d + 4.0 * u;

    // ln(P^2 / (2u(u+v))) evaluated as ln1p of the exact difference quotient,
    // which stays accurate as v -> u.
    let ratio_delta = d * (2.0 * u * (2.0 * lam - 1.0) + lam * lam * d) / (2.0 * u * s);
    let ratio_ok = ratio_delta.is_finite() && ratio_delta > -1.0;
    if !ratio_ok {
        return Err(CoeffError::InvalidArguments(format!(
            "log argument must be positive and finite (got 1 + {ratio_delta})"
        )));
    }
    let ln_p2 = ratio_delta.ln_1p();

    let c1 = (-4.0 + big_p * (3.0 * u + v) / (u * s) - 2.0 * ln_p2) / (d * d);
    let c2 = (big_q * ln_p2 - big_p * (5.0 * u + 3.0 * v) / s + 7.0 * u + v) / (d * d * d);
    let c3 = c1 - c2;
    Ok((c1, c2, c3))
}

/// The Holder-form kernel coefficient
/// `C1(lambda, p; u, v) = int_0^(1/2) |lambda - 2t|^p / (t*v + (1-t)*u)^(2p) dt`,
/// evaluated numerically (no closed form exists). Swapped arguments `u > v`
/// are served through the mirrored upper-half integral.
pub fn coeff_c1_holder(
    lambda: LambdaWeight,
    p: f64,
    u: f64,
    v: f64,
    abs_tol: f64,
) -> Result<f64, CoeffError> {
    check_pair(u, v)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(CoeffError::InvalidArguments(format!(
            "Holder kernel coefficient requires p > 1 (got p = {p})"
        )));
    }
    let result = if u < v {
        t_kernel_integral(
            KernelKind::AbsPowOverAtPow,
            lambda,
            p,
            &Interval::new(u, v).expect("checked above"),
            HalfRange::Lower,
            KernelWeight::None,
            abs_tol,
        )?
    } else {
        // s = 1 - t maps the swapped lower-half integrand onto the upper half
        // of the original interval.
        t_kernel_integral(
            KernelKind::AbsPowOverAtPow,
            lambda,
            p,
            &Interval::new(v, u).expect("checked above"),
            HalfRange::Upper,
            KernelWeight::None,
            abs_tol,
        )?
    };
    Ok(result.value)
}

/// `(C4, C5, C6)`: the plain-power kernel mass `C4(lambda, p)` together with
/// the endpoint-weight coefficients `C5(q; u, v)`, `C6(q; u, v)` of the
/// Holder-kernel bound.
pub fn coeff_c456(
    lambda: LambdaWeight,
    p: f64,
    q: f64,
    u: f64,
    v: f64,
) -> Result<(f64, f64, f64), CoeffError> {
    check_pair(u, v)?;
    if !(q > 1.0 && q.is_finite()) {
        return Err(CoeffError::DegenerateExponent(q));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(CoeffError::InvalidArguments(format!(
            "C4 requires p > 1 (got p = {p})"
        )));
    }
    let lam = lambda.get();
    let c4 = (lam.powf(p + 1.0) + (1.0 - lam).powf(p + 1.0)) / (p + 1.0);

    let s = 0.5 * (u + v);
    let s_pow = powl(s, 1.0 - 2.0 * q)?;
    let c5 = s_pow * (0.5 * (v - 3.0 * u) - q * (v - u)) + powl(u, 2.0 - 2.0 * q)?;
    let c6 = s_pow * (0.5 * (3.0 * v - u) - q * (v - u))
        + powl(u, 1.0 - 2.0 * q)? * (u - 2.0 * v + 2.0 * q * (v - u));
    Ok((c4, c5, c6))
}

/// The trapezoid-bound coefficients: `lambda1..lambda3` (power-mean form)
/// and `mu1, mu2` (Holder form, requiring `q > 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntroCoeffs {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// `lambda1, lambda2, lambda3` for the power-mean trapezoid bound; these are
/// the full-range kernel integrals `int_0^1 |1 - 2t| * {1, t, 1-t} / A_t^2 dt`
/// in closed form and do not depend on `q`.
pub fn lambda_coeffs(interval: &Interval) -> (f64, f64, f64) {
    let a = interval.a();
    let b = interval.b();
    let d = interval.width();
    // ln((a+b)^2 / (4ab)) = ln1p((b-a)^2 / (4ab))
    let lr = (d * d / (4.0 * a * b)).ln_1p();
    let l1 = 1.0 / (a * b) - 2.0 / (d * d) * lr;
    let l2 = -1.0 / (b * d) + (3.0 * a + b) / (d * d * d) * lr;
    let l3 = l1 - l2;
    (l1, l2, l3)
}

/// `mu1, mu2` for the Holder trapezoid bound: the full-range integrals
/// `int_0^1 {t, 1-t} / A_t^(2q) dt` in closed form.
pub fn mu_coeffs(q: f64, interval: &Interval) -> Result<(f64, f64), CoeffError> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(CoeffError::MuExponent(q));
    }
    let a = interval.a();
    let b = interval.b();
    let d = interval.width();
    let denom = 2.0 * d * d * (1.0 - q) * (1.0 - 2.0 * q);
    let mu1 = (powl(a, 2.0 - 2.0 * q)? + powl(b, 1.0 - 2.0 * q)? * (d * (1.0 - 2.0 * q) - a))
        / denom;
    let mu2 = (powl(b, 2.0 - 2.0 * q)? - powl(a, 1.0 - 2.0 * q)? * (d * (1.0 - 2.0 * q) + b))
        / denom;
    Ok((mu1, mu2))
}

/// All five trapezoid-bound coefficients at once. `q > 1` is required since
/// the `mu` pair is included.
pub fn coeff_intro(q: f64, interval: &Interval) -> Result<IntroCoeffs, CoeffError> {
    let (lambda1, lambda2, lambda3) = lambda_coeffs(interval);
    let (mu1, mu2) = mu_coeffs(q, interval)?;
    Ok(IntroCoeffs {
        lambda1,
        lambda2,
        lambda3,
        mu1,
        mu2,
    })
}

/// A named set of evaluated coefficients, for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientSet {
    pub origin: String,
    pub args: CoeffArgs,
    pub values: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CoeffArgs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(x: f64) -> LambdaWeight {
        LambdaWeight::new(x).unwrap()
    }

    #[test]
    fn midpoint_coefficient_matches_hand_arithmetic() {
        // C1(0; 1, 2) = 2 [ln(3/2) - 1/3]
        let (c1, _, _) = coeff_c123(lam(0.0), 1.0, 2.0).unwrap();
        assert!((c1 - 0.1442635495496621).abs() <= 1e-13, "c1 = {c1}");
    }

    #[test]
    fn trapezoid_coefficient_regression() {
        // C1(1; 1, 2) = 1 + 2 ln(2/3)
        let (c1, _, _) = coeff_c123(lam(1.0), 1.0, 2.0).unwrap();
        assert!((c1 - 0.18906978378367124).abs() <= 1e-14);
        // Swapped arguments give the upper-half value.
        let (c1s, _, _) = coeff_c123(lam(1.0), 2.0, 1.0).unwrap();
        assert!((c1s - 0.07536414490356174).abs() <= 1e-13);
    }

    #[test]
    fn difference_identity_is_exact() {
        let cases = [(0.0, 1.0, 2.0), (0.3, 0.5, 7.0), (1.0, 4.0, 0.2), (2.0 / 3.0, 1.3, 1.9)];
        for &(l, u, v) in &cases {
            let (c1, c2, c3) = coeff_c123(lam(l), u, v).unwrap();
            assert_eq!(c3, c1 - c2);
        }
    }

    #[test]
    fn simpson_weight_matches_kernel_oracle() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let l = lam(1.0 / 3.0);
        let (c1, c2, c3) = coeff_c123(l, 1.0, 2.0).unwrap();
        let k1 = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Lower,
            KernelWeight::None,
            1e-12,
        )
        .unwrap()
        .value;
        let k2 = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Lower,
            KernelWeight::T,
            1e-12,
        )
        .unwrap()
        .value;
        let k3 = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Lower,
            KernelWeight::OneMinusT,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((c1 - k1).abs() <= 1e-8, "c1 = {c1}, oracle = {k1}");
        assert!((c2 - k2).abs() <= 1e-8);
        assert!((c3 - k3).abs() <= 1e-8);
        // Frozen oracle values.
        assert!((c1 - 0.08321638579618444).abs() <= 1e-12);
        assert!((c2 - 0.023401534478637426).abs() <= 1e-12);
    }

    #[test]
    fn upper_half_equals_swapped_closed_form() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let l = lam(1.0 / 3.0);
        let (c1s, c2s, c3s) = coeff_c123(l, 2.0, 1.0).unwrap();
        let k1 = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Upper,
            KernelWeight::None,
            1e-12,
        )
        .unwrap()
        .value;
        let k_t = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Upper,
            KernelWeight::T,
            1e-12,
        )
        .unwrap()
        .value;
        let k_1mt = t_kernel_integral(
            KernelKind::AbsOverAtSquared,
            l,
            1.0,
            &iv,
            HalfRange::Upper,
            KernelWeight::OneMinusT,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((c1s - k1).abs() <= 1e-8);
        assert!((c1s - 0.0504591408327350).abs() <= 1e-10);
        // On the upper half the t-weight pairs with C3 and (1-t) with C2.
        assert!((c3s - k_t).abs() <= 1e-8);
        assert!((c2s - k_1mt).abs() <= 1e-8);
    }

    #[test]
    fn degenerate_pair_is_rejected() {
        assert!(matches!(
            coeff_c123(lam(0.0), 1.0, 1.0),
            Err(CoeffError::DegeneratePair { .. })
        ));
        assert!(matches!(
            coeff_c1_holder(lam(0.0), 2.0, 1.0, 1.0, 1e-10),
            Err(CoeffError::DegeneratePair { .. })
        ));
        assert!(matches!(
            coeff_c456(lam(0.0), 2.0, 2.0, 3.0, 3.0),
            Err(CoeffError::DegeneratePair { .. })
        ));
    }

    #[test]
    fn holder_kernel_pinned_values() {
        // int_0^(1/2) (1-2t)^2 / (1+t)^4 dt = 1/9 by partial fractions.
        let v = coeff_c1_holder(lam(1.0), 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((v - 1.0 / 9.0).abs() <= 1e-11, "v = {v}");
        // int_0^(1/2) (2t)^2 / (1+t)^4 dt = 4/81, and 2/81 with the swapped
        // denominator (2-t)^4.
        let v0 = coeff_c1_holder(lam(0.0), 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((v0 - 4.0 / 81.0).abs() <= 1e-11);
        let v0s = coeff_c1_holder(lam(0.0), 2.0, 2.0, 1.0, 1e-12).unwrap();
        assert!((v0s - 2.0 / 81.0).abs() <= 1e-11);
    }

    #[test]
    fn holder_kernel_is_asymmetric_in_general() {
        let fwd = coeff_c1_holder(lam(1.0), 2.0, 1.0, 2.0, 1e-12).unwrap();
        let bwd = coeff_c1_holder(lam(1.0), 2.0, 2.0, 1.0, 1e-12).unwrap();
        assert!((fwd - bwd).abs() > 1e-3);
    }

    #[test]
    fn c4_symmetry_and_values() {
        let p = 3.0;
        let (c4, _, _) = coeff_c456(lam(0.5), p, 1.5, 1.0, 2.0).unwrap();
        assert!((c4 - 1.0 / 32.0).abs() <= 1e-16);
        for &l in &[0.0, 0.125, 0.4, 0.75, 1.0] {
            let (c4l, _, _) = coeff_c456(lam(l), p, 1.5, 1.0, 2.0).unwrap();
            let (c4m, _, _) = coeff_c456(lam(1.0 - l), p, 1.5, 1.0, 2.0).unwrap();
            assert_eq!(c4l, c4m, "lambda = {l}");
        }
        let (c40, _, _) = coeff_c456(lam(0.0), 4.0, 4.0 / 3.0, 1.0, 2.0).unwrap();
        assert!((c40 - 1.0 / 5.0).abs() <= 1e-15);
        let (c41, _, _) = coeff_c456(lam(1.0), 4.0, 4.0 / 3.0, 1.0, 2.0).unwrap();
        assert!((c41 - 1.0 / 5.0).abs() <= 1e-15);
    }

    #[test]
    fn c4_simpson_weight_closed_form() {
        // C4(1/3, p) = (1 + 2^(p+1)) / (3^(p+1) (p+1)).
        for &p in &[1.5, 2.0, 3.0, 5.0] {
            let q = p / (p - 1.0);
            let (c4, _, _) = coeff_c456(lam(1.0 / 3.0), p, q, 1.0, 2.0).unwrap();
            let expect = (1.0 + 2f64.powf(p + 1.0)) / (3f64.powf(p + 1.0) * (p + 1.0));
            assert!((c4 - expect).abs() <= 1e-15 * expect, "p = {p}: {c4} vs {expect}");
        }
    }

    #[test]
    fn c5_c6_match_weighted_recip_kernel() {
        // C5, C6 recombine the integrals int {t, 1-t} / A_t^(2q) dt over the
        // lower half, scaled by 2(1-q)(1-2q)(b-a)^2.
        let iv = Interval::new(1.0, 2.0).unwrap();
        let q = 2.0;
        let scale = 2.0 * (1.0 - q) * (1.0 - 2.0 * q) * iv.width() * iv.width();
        let (_, c5, c6) = coeff_c456(lam(0.5), 2.0, q, 1.0, 2.0).unwrap();
        let it = t_kernel_integral(
            KernelKind::RecipAtPow,
            lam(0.0),
            q,
            &iv,
            HalfRange::Lower,
            KernelWeight::T,
            1e-13,
        )
        .unwrap()
        .value;
        let i1mt = t_kernel_integral(
            KernelKind::RecipAtPow,
            lam(0.0),
            q,
            &iv,
            HalfRange::Lower,
            KernelWeight::OneMinusT,
            1e-13,
        )
        .unwrap()
        .value;
        assert!((c5 - scale * it).abs() <= 1e-8, "c5 = {c5} vs {}", scale * it);
        assert!((c6 - scale * i1mt).abs() <= 1e-8);
    }

    #[test]
    fn intro_coefficients_pinned_and_consistent() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let (l1, l2, l3) = lambda_coeffs(&iv);
        assert!((l1 - 0.2644339286872331).abs() <= 1e-14);
        assert_eq!(l3, l1 - l2);
        // lambda1 equals the two half-range C1 values at lambda = 1 combined.
        let (c1ab, _, _) = coeff_c123(lam(1.0), 1.0, 2.0).unwrap();
        let (c1ba, _, _) = coeff_c123(lam(1.0), 2.0, 1.0).unwrap();
        assert!((l1 - (c1ab + c1ba)).abs() <= 1e-14);
    }

    #[test]
    fn mu_pinned_value_and_oracle() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let (mu1, mu2) = mu_coeffs(2.0, &iv).unwrap();
        // int_0^1 t/(1+t)^4 dt = 1/12 by direct antidifferentiation.
        assert!((mu1 - 1.0 / 12.0).abs() <= 1e-14, "mu1 = {mu1}");
        let lower = |w| {
            t_kernel_integral(
                KernelKind::RecipAtPow,
                lam(0.0),
                2.0,
                &iv,
                HalfRange::Lower,
                w,
                1e-13,
            )
            .unwrap()
            .value
        };
        let upper = |w| {
            t_kernel_integral(
                KernelKind::RecipAtPow,
                lam(0.0),
                2.0,
                &iv,
                HalfRange::Upper,
                w,
                1e-13,
            )
            .unwrap()
            .value
        };
        let o1 = lower(KernelWeight::T) + upper(KernelWeight::T);
        let o2 = lower(KernelWeight::OneMinusT) + upper(KernelWeight::OneMinusT);
        assert!((mu1 - o1).abs() <= 1e-8);
        assert!((mu2 - o2).abs() <= 1e-8);
    }

    #[test]
    fn mu_requires_q_above_one() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        assert!(matches!(
            mu_coeffs(1.0, &iv),
            Err(CoeffError::MuExponent(_))
        ));
        assert!(coeff_intro(0.5, &iv).is_err());
        assert!(coeff_intro(2.0, &iv).is_ok());
    }

    #[test]
    fn positivity_over_valid_domain() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let u: f64 = rng.gen_range(0.05..5.0);
            let v = u * rng.gen_range(1.05..8.0);
            let l = rng.gen_range(0.0..=1.0);
            let (c1, c2, c3) = coeff_c123(lam(l), u, v).unwrap();
            assert!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0, "({l}, {u}, {v})");
            let (c1s, c2s, c3s) = coeff_c123(lam(l), v, u).unwrap();
            assert!(c1s >= 0.0 && c2s >= 0.0 && c3s >= 0.0);
        }
    }
}
