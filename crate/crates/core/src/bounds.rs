//! The deviation functional, the integral identity behind it, and the
//! closed-form bounds on it.
//!
//! Every bound in this module estimates the same left side: the absolute
//! deviation of the lambda-weighted combination of midpoint and endpoint
//! values from the harmonic integral mean `(ab/(b-a)) int f(x)/x^2 dx`.
//! There is exactly one implementation of that left side, so every theorem
//! op reports identical `lhs` for identical inputs.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{coeff_c123, coeff_c1_holder, coeff_c456, lambda_coeffs, mu_coeffs, CoeffError};
use crate::convexity::{self, ConvexityError};
use crate::domain::{
    BoundVerdict, DomainError, ExponentPair, FunctionSpec, Interval, LambdaWeight, Tolerances,
    VerdictInputs,
};
use crate::numerics::{integrate_adaptive, QuadError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("{op} requires q >= 1 (got q = {q})")]
    BadExponent { op: String, q: f64 },
    #[error("{op} requires Holder exponents (q > 1 with conjugate p)")]
    WrongExponentMode { op: String },
    #[error("function '{0}' carries no fourth-derivative bound")]
    MissingFourthDerivative(String),
    #[error("invalid proposition request: {0}")]
    InvalidPropositionParams(String),
}

/// Evaluation knobs shared by the bound ops.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub tolerances: Tolerances,
    /// Grid size for empirical convexity certification.
    pub convexity_grid: usize,
    /// Skip convexity certification (the verdict is then on the caller).
    pub allow_uncertified: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            convexity_grid: convexity::DEFAULT_GRID,
            allow_uncertified: false,
        }
    }
}

/// The two sides of the deviation functional, kept separately so equality
/// and inequality checks can share them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationParts {
    /// `(1-lambda) f(2ab/(a+b)) + lambda (f(a)+f(b))/2`
    pub weighted_value: f64,
    /// `(ab/(b-a)) int_a^b f(x)/x^2 dx`
    pub mean_integral: f64,
    /// `|weighted_value - mean_integral|`
    pub deviation: f64,
}

fn deviation_parts_with(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    quad_abs: f64,
    quad_rel: f64,
) -> Result<DeviationParts, QuadError> {
    let (a, b) = (interval.a(), interval.b());
    let scale = (interval.product() / interval.width()).max(1.0);
    let integral = integrate_adaptive(
        |x| fs.eval(x) / (x * x),
        a,
        b,
        quad_abs / scale,
        quad_rel,
    )?;
    let mean_integral = interval.product() / interval.width() * integral.value;
    let lam = lambda.get();
    let weighted_value = (1.0 - lam) * fs.eval(interval.harmonic_mid())
        + lam * 0.5 * (fs.eval(a) + fs.eval(b));
    Ok(DeviationParts {
        weighted_value,
        mean_integral,
        deviation: (weighted_value - mean_integral).abs(),
    })
}

/// Evaluate the deviation functional by adaptive quadrature.
pub fn lhs_deviation(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    opts: &EvalOptions,
) -> Result<DeviationParts, BoundError> {
    let t = &opts.tolerances;
    Ok(deviation_parts_with(fs, interval, lambda, t.quad_abs, t.quad_rel)?)
}

/// Verify the integral identity the bounds rest on: the signed deviation
/// equals `(ab(b-a)/2)` times the two signed kernel integrals of `f'`.
///
/// Both sides are computed independently by quadrature (three digits tighter
/// than the default, since the check is two-sided); the verdict stores
/// `-|lhs - rhs|` as its slack.
pub fn verify_identity_lemma21(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    let t = &opts.tolerances;
    let (quad_abs, quad_rel) = (t.quad_abs * 1e-3, t.quad_rel * 1e-3);
    let parts = deviation_parts_with(fs, interval, lambda, quad_abs, quad_rel)?;
    let lhs = parts.weighted_value - parts.mean_integral;

    let (a, b) = (interval.a(), interval.b());
    let lam = lambda.get();
    let ab = interval.product();
    let half_mass = 0.5 * ab * interval.width();

    let at = |t: f64| t * b + (1.0 - t) * a;
    let lower = |t: f64| {
        let d = at(t);
        (lam - 2.0 * t) / (d * d) * fs.derivative(ab / d)
    };
    let upper = |t: f64| {
        let d = at(t);
        (2.0 - lam - 2.0 * t) / (d * d) * fs.derivative(ab / d)
    };

    // Split at the kernel sign changes lambda/2 and 1 - lambda/2.
    let mut pieces: Vec<(f64, f64, bool)> = Vec::new();
    let k_lo = lam / 2.0;
    if k_lo > 0.0 && k_lo < 0.5 {
        pieces.push((0.0, k_lo, true));
        pieces.push((k_lo, 0.5, true));
    } else {
        pieces.push((0.0, 0.5, true));
    }
    let k_hi = 1.0 - lam / 2.0;
    if k_hi > 0.5 && k_hi < 1.0 {
        pieces.push((0.5, k_hi, false));
        pieces.push((k_hi, 1.0, false));
    } else {
        pieces.push((0.5, 1.0, false));
    }

    let piece_abs = quad_abs / half_mass.max(1.0) / pieces.len() as f64;
    let mut kernel_sum = 0.0;
    for (lo, hi, is_lower) in pieces {
        let r = if is_lower {
            integrate_adaptive(lower, lo, hi, piece_abs, quad_rel)?
        } else {
            integrate_adaptive(upper, lo, hi, piece_abs, quad_rel)?
        };
        kernel_sum += r.value;
    }
    let rhs = half_mass * kernel_sum;

    let inputs = VerdictInputs::for_function(fs, interval).with_lambda(lambda);
    Ok(BoundVerdict::from_equality(
        "lemma21",
        lhs,
        rhs,
        t.identity,
        inputs,
    ))
}

fn require_deriv_power_certified(
    fs: &FunctionSpec,
    interval: &Interval,
    q: f64,
    opts: &EvalOptions,
) -> Result<(), BoundError> {
    if opts.allow_uncertified {
        return Ok(());
    }
    let report = convexity::certify_derivative_power(
        fs,
        interval,
        q,
        opts.convexity_grid,
        opts.tolerances.convexity,
    )?;
    if report.is_harmonically_convex {
        Ok(())
    } else {
        Err(BoundError::PreconditionUnmet(format!(
            "|f'|^q for '{}' not certified harmonically convex on {} at q = {q} \
             (worst violation {:.3e})",
            fs.name(),
            interval,
            report.worst_violation
        )))
    }
}

fn endpoint_derivative_pows(fs: &FunctionSpec, interval: &Interval, q: f64) -> (f64, f64) {
    (
        fs.derivative(interval.a()).abs().powf(q),
        fs.derivative(interval.b()).abs().powf(q),
    )
}

/// Power-mean bound on the lambda-weighted deviation, `q >= 1`.
pub fn bound_thm22(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    q: f64,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(BoundError::BadExponent {
            op: "thm22".into(),
            q,
        });
    }
    require_deriv_power_certified(fs, interval, q, opts)?;
    let parts = lhs_deviation(fs, interval, lambda, opts)?;

    let (a, b) = (interval.a(), interval.b());
    let (c1_ab, c2_ab, c3_ab) = coeff_c123(lambda, a, b)?;
    let (c1_ba, c2_ba, c3_ba) = coeff_c123(lambda, b, a)?;
    let (daq, dbq) = endpoint_derivative_pows(fs, interval, q);

    // At q = 1 the prefactor power is 0 and C1^0 = 1 by convention.
    let outer = 1.0 - 1.0 / q;
    let term_ab = c1_ab.powf(outer) * (c2_ab * daq + c3_ab * dbq).powf(1.0 / q);
    let term_ba = c1_ba.powf(outer) * (c3_ba * daq + c2_ba * dbq).powf(1.0 / q);
    let rhs = 0.5 * interval.product() * interval.width() * (term_ab + term_ba);

    let inputs = VerdictInputs::for_function(fs, interval)
        .with_lambda(lambda)
        .with_q(q);
    Ok(BoundVerdict::from_sides(
        "thm22",
        parts.deviation,
        rhs,
        opts.tolerances.ineq,
        inputs,
    ))
}

/// Holder-sandwich bound: kernel and derivative factors split by conjugate
/// exponents, with the derivative averaged between the harmonic midpoint and
/// one endpoint.
pub fn bound_thm23(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    exps: &ExponentPair,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    let ExponentPair::Holder { p, q } = *exps else {
        return Err(BoundError::WrongExponentMode { op: "thm23".into() });
    };
    require_deriv_power_certified(fs, interval, q, opts)?;
    let parts = lhs_deviation(fs, interval, lambda, opts)?;

    let (a, b) = (interval.a(), interval.b());
    let c1h_ab = coeff_c1_holder(lambda, p, a, b, opts.tolerances.quad_abs)?;
    let c1h_ba = coeff_c1_holder(lambda, p, b, a, opts.tolerances.quad_abs)?;
    let (daq, dbq) = endpoint_derivative_pows(fs, interval, q);
    let dmq = fs.derivative(interval.harmonic_mid()).abs().powf(q);

    let term_ab = c1h_ab.powf(1.0 / p) * (0.25 * (dmq + dbq)).powf(1.0 / q);
    let term_ba = c1h_ba.powf(1.0 / p) * (0.25 * (dmq + daq)).powf(1.0 / q);
    let rhs = 0.5 * interval.product() * interval.width() * (term_ab + term_ba);

    let inputs = VerdictInputs::for_function(fs, interval)
        .with_lambda(lambda)
        .with_exponents(exps);
    Ok(BoundVerdict::from_sides(
        "thm23",
        parts.deviation,
        rhs,
        opts.tolerances.ineq,
        inputs,
    ))
}

/// Holder-kernel bound with the plain `|lambda - 2t|^p` mass and the
/// endpoint-weight coefficients.
pub fn bound_thm24(
    fs: &FunctionSpec,
    interval: &Interval,
    lambda: LambdaWeight,
    exps: &ExponentPair,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    let ExponentPair::Holder { p, q } = *exps else {
        return Err(BoundError::WrongExponentMode { op: "thm24".into() });
    };
    require_deriv_power_certified(fs, interval, q, opts)?;
    let parts = lhs_deviation(fs, interval, lambda, opts)?;

    let (a, b) = (interval.a(), interval.b());
    let (c4, c5_ab, c6_ab) = coeff_c456(lambda, p, q, a, b)?;
    let (_, c5_ba, c6_ba) = coeff_c456(lambda, p, q, b, a)?;
    let (daq, dbq) = endpoint_derivative_pows(fs, interval, q);

    let d = interval.width();
    // (1-q)(1-2q) > 0 for q > 1, so the q-th root is real.
    let denom = ((1.0 - q) * (1.0 - 2.0 * q) * d * d).powf(1.0 / q);
    let term_ab = (c5_ab * daq + c6_ab * dbq).powf(1.0 / q);
    let term_ba = (c6_ba * daq + c5_ba * dbq).powf(1.0 / q);
    let rhs = 0.25 * interval.product() * d * c4.powf(1.0 / p) / denom * (term_ab + term_ba);

    let inputs = VerdictInputs::for_function(fs, interval)
        .with_lambda(lambda)
        .with_exponents(exps);
    Ok(BoundVerdict::from_sides(
        "thm24",
        parts.deviation,
        rhs,
        opts.tolerances.ineq,
        inputs,
    ))
}

/// Power-mean trapezoid bound (the whole-range kernel), `q >= 1`.
pub fn bound_thm14(
    fs: &FunctionSpec,
    interval: &Interval,
    q: f64,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(BoundError::BadExponent {
            op: "thm14".into(),
            q,
        });
    }
    require_deriv_power_certified(fs, interval, q, opts)?;
    let parts = lhs_deviation(fs, interval, LambdaWeight::TRAPEZOID, opts)?;

    let (l1, l2, l3) = lambda_coeffs(interval);
    let (daq, dbq) = endpoint_derivative_pows(fs, interval, q);
    let rhs = 0.5
        * interval.product()
        * interval.width()
        * l1.powf(1.0 - 1.0 / q)
        * (l2 * daq + l3 * dbq).powf(1.0 / q);

    let inputs = VerdictInputs::for_function(fs, interval).with_q(q);
    Ok(BoundVerdict::from_sides(
        "thm14",
        parts.deviation,
        rhs,
        opts.tolerances.ineq,
        inputs,
    ))
}

/// Holder trapezoid bound with the `mu` coefficients.
pub fn bound_thm15(
    fs: &FunctionSpec,
    interval: &Interval,
    exps: &ExponentPair,
    opts: &EvalOptions,
) -> Result<BoundVerdict, BoundError> {
    let ExponentPair::Holder { p, q } = *exps else {
        return Err(BoundError::WrongExponentMode { op: "thm15".into() });
    };
    require_deriv_power_certified(fs, interval, q, opts)?;
    let parts = lhs_deviation(fs, interval, LambdaWeight::TRAPEZOID, opts)?;

    let (mu1, mu2) = mu_coeffs(q, interval)?;
    let (daq, dbq) = endpoint_derivative_pows(fs, interval, q);
    let rhs = 0.5
        * interval.product()
        * interval.width()
        * (1.0 / (p + 1.0)).powf(1.0 / p)
        * (mu1 * daq + mu2 * dbq).powf(1.0 / q);

    let inputs = VerdictInputs::for_function(fs, interval).with_exponents(exps);
    Ok(BoundVerdict::from_sides(
        "thm15",
        parts.deviation,
        rhs,
        opts.tolerances.ineq,
        inputs,
    ))
}

/// The harmonic Hermite-Hadamard double inequality: midpoint value below the
/// harmonic integral mean below the endpoint average. Returns the (left,
/// right) verdicts; both are sharp at constants.
pub fn verify_hh_harmonic(
    fs: &FunctionSpec,
    interval: &Interval,
    opts: &EvalOptions,
) -> Result<(BoundVerdict, BoundVerdict), BoundError> {
    if !opts.allow_uncertified {
        let report = convexity::certify_function(
            fs,
            interval,
            opts.convexity_grid,
            opts.tolerances.convexity,
        )?;
        if !report.is_harmonically_convex {
            return Err(BoundError::PreconditionUnmet(format!(
                "'{}' not certified harmonically convex on {} (worst violation {:.3e})",
                fs.name(),
                interval,
                report.worst_violation
            )));
        }
    }
    let t = &opts.tolerances;
    let parts = deviation_parts_with(fs, interval, LambdaWeight::MIDPOINT, t.quad_abs, t.quad_rel)?;
    let mean = parts.mean_integral;
    let midpoint_value = fs.eval(interval.harmonic_mid());
    let endpoint_avg = 0.5 * (fs.eval(interval.a()) + fs.eval(interval.b()));

    let inputs = VerdictInputs::for_function(fs, interval);
    let left = BoundVerdict::from_sides("hh13.left", midpoint_value, mean, t.ineq, inputs.clone());
    let right = BoundVerdict::from_sides("hh13.right", mean, endpoint_avg, t.ineq, inputs);
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalKind {
    HermiteHadamard,
    Simpson,
}

/// Baseline checks with the plain average integral `(1/(b-a)) int f`:
/// the classical two-sided midpoint/endpoint estimate for convex `f`, and
/// the classical Simpson defect bound `||f''''|| (b-a)^4 / 2880`.
pub fn verify_classical(
    fs: &FunctionSpec,
    interval: &Interval,
    kind: ClassicalKind,
    opts: &EvalOptions,
) -> Result<Vec<BoundVerdict>, BoundError> {
    let t = &opts.tolerances;
    let (a, b) = (interval.a(), interval.b());
    let w = interval.width();
    let integral = integrate_adaptive(
        |x| fs.eval(x),
        a,
        b,
        t.quad_abs * w.min(1.0),
        t.quad_rel,
    )?;
    let mean = integral.value / w;
    let inputs = VerdictInputs::for_function(fs, interval);

    match kind {
        ClassicalKind::HermiteHadamard => {
            if !fs.ordinary_convex_on(interval) {
                return Err(BoundError::PreconditionUnmet(format!(
                    "'{}' is not asserted convex on {}",
                    fs.name(),
                    interval
                )));
            }
            let mid = fs.eval(interval.arithmetic_mid());
            let avg = 0.5 * (fs.eval(a) + fs.eval(b));
            Ok(vec![
                BoundVerdict::from_sides("classical_hh.left", mid, mean, t.ineq, inputs.clone()),
                BoundVerdict::from_sides("classical_hh.right", mean, avg, t.ineq, inputs),
            ])
        }
        ClassicalKind::Simpson => {
            let sup = fs
                .fourth_derivative_sup(interval)
                .ok_or_else(|| BoundError::MissingFourthDerivative(fs.name().to_string()))?;
            let simpson = ((fs.eval(a) + fs.eval(b)) / 2.0 + 2.0 * fs.eval(interval.arithmetic_mid())) / 3.0;
            let defect = (simpson - mean).abs();
            let bound = sup * w.powi(4) / 2880.0;
            Ok(vec![BoundVerdict::from_sides(
                "classical_simpson",
                defect,
                bound,
                t.ineq,
                inputs,
            )])
        }
    }
}
