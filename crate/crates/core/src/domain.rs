//! Validated core value types shared by every other module.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("a must be positive (got a = {0})")]
    NonPositiveLeft(f64),
    #[error("b must exceed a (got a = {a}, b = {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("interval endpoints must be finite (got a = {a}, b = {b})")]
    NonFiniteEndpoints { a: f64, b: f64 },
    #[error("lambda must lie in [0, 1] (got {0})")]
    LambdaOutOfRange(f64),
    #[error("Holder exponents require p, q > 1 with 1/p + 1/q = 1 (got p = {p}, q = {q})")]
    BadHolderPair { p: f64, q: f64 },
    #[error("power-mean exponent requires q >= 1 (got q = {0})")]
    BadPowerMeanExponent(f64),
    #[error(
        "declared derivative of '{name}' disagrees with finite differences at x = {x}: \
         central difference {fd}, declared {declared}"
    )]
    DerivativeMismatch {
        name: String,
        x: f64,
        fd: f64,
        declared: f64,
    },
}

/// A validated interval `0 < a < b` on the positive half-line.
///
/// Degenerate `a = b` is rejected outright: every bound coefficient divides
/// by `b - a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, DomainError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(DomainError::NonFiniteEndpoints { a, b });
        }
        if a <= 0.0 {
            return Err(DomainError::NonPositiveLeft(a));
        }
        if b <= a {
            return Err(DomainError::EmptyInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `b - a`, strictly positive.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// `a * b`, strictly positive.
    pub fn product(&self) -> f64 {
        self.a * self.b
    }

    /// Harmonic midpoint `2ab / (a + b)`, strictly inside `(a, b)`.
    pub fn harmonic_mid(&self) -> f64 {
        2.0 * self.a * self.b / (self.a + self.b)
    }

    /// Arithmetic midpoint `(a + b) / 2`.
    pub fn arithmetic_mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = DomainError;

    fn try_from((a, b): (f64, f64)) -> Result<Self, Self::Error> {
        Interval::new(a, b)
    }
}

impl From<Interval> for (f64, f64) {
    fn from(iv: Interval) -> Self {
        (iv.a, iv.b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Weight `lambda in [0, 1]` blending the harmonic-midpoint value against the
/// endpoint average: 0 is the midpoint rule, 1 the trapezoid rule, 1/3 the
/// Simpson combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LambdaWeight(f64);

impl LambdaWeight {
    pub fn new(lambda: f64) -> Result<Self, DomainError> {
        if lambda.is_finite() && (0.0..=1.0).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(DomainError::LambdaOutOfRange(lambda))
        }
    }

    pub const MIDPOINT: LambdaWeight = LambdaWeight(0.0);
    pub const TRAPEZOID: LambdaWeight = LambdaWeight(1.0);

    pub fn simpson() -> Self {
        Self(1.0 / 3.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for LambdaWeight {
    type Error = DomainError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        LambdaWeight::new(v)
    }
}

impl From<LambdaWeight> for f64 {
    fn from(l: LambdaWeight) -> f64 {
        l.0
    }
}

const CONJUGACY_TOL: f64 = 1e-12;

/// Exponent configuration for the bound theorems.
///
/// `Holder` carries a conjugate pair `1/p + 1/q = 1` with `p, q > 1`;
/// `PowerMean` carries a single `q >= 1` (the `C^(1-1/q) [..]^(1/q)` form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentPairRepr", into = "ExponentPairRepr")]
pub enum ExponentPair {
    Holder { p: f64, q: f64 },
    PowerMean { q: f64 },
}

impl ExponentPair {
    pub fn holder(p: f64, q: f64) -> Result<Self, DomainError> {
        if p > 1.0 && q > 1.0 && ((1.0 / p + 1.0 / q) - 1.0).abs() <= CONJUGACY_TOL {
            Ok(Self::Holder { p, q })
        } else {
            Err(DomainError::BadHolderPair { p, q })
        }
    }

    /// Holder pair from `q` alone, with `p = q / (q - 1)`.
    pub fn holder_from_q(q: f64) -> Result<Self, DomainError> {
        if q > 1.0 && q.is_finite() {
            Ok(Self::Holder { p: q / (q - 1.0), q })
        } else {
            Err(DomainError::BadHolderPair { p: f64::NAN, q })
        }
    }

    pub fn power_mean(q: f64) -> Result<Self, DomainError> {
        if q >= 1.0 && q.is_finite() {
            Ok(Self::PowerMean { q })
        } else {
            Err(DomainError::BadPowerMeanExponent(q))
        }
    }

    pub fn q(&self) -> f64 {
        match *self {
            Self::Holder { q, .. } | Self::PowerMean { q } => q,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            Self::Holder { p, .. } => Some(p),
            Self::PowerMean { .. } => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ExponentPairRepr {
    Holder { p: f64, q: f64 },
    PowerMean { q: f64 },
}

impl TryFrom<ExponentPairRepr> for ExponentPair {
    type Error = DomainError;

    fn try_from(r: ExponentPairRepr) -> Result<Self, Self::Error> {
        match r {
            ExponentPairRepr::Holder { p, q } => ExponentPair::holder(p, q),
            ExponentPairRepr::PowerMean { q } => ExponentPair::power_mean(q),
        }
    }
}

impl From<ExponentPair> for ExponentPairRepr {
    fn from(e: ExponentPair) -> Self {
        match e {
            ExponentPair::Holder { p, q } => ExponentPairRepr::Holder { p, q },
            ExponentPair::PowerMean { q } => ExponentPairRepr::PowerMean { q },
        }
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Supplier of `sup |f''''|` over an interval.
pub type FourthSupFn = Arc<dyn Fn(&Interval) -> f64 + Send + Sync>;

/// How strongly harmonic convexity of `|f'|^q` (resp. of `f` itself) is known
/// for a catalog function: either analytically for every admissible exponent,
/// or only by per-interval empirical certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertPolicy {
    AnalyticAllQ,
    Empirical,
}

/// A differentiable function on `(0, oo)` together with its derivative and
/// optional fourth-derivative sup bound (for the classical Simpson defect).
///
/// Construction validates `f_prime` against central finite differences on a
/// 17-point log-spaced grid, so transcription errors in the catalog surface
/// before they can poison a bound check.
#[derive(Clone)]
pub struct FunctionSpec {
    name: String,
    f: RealFn,
    f_prime: RealFn,
    fourth_sup: Option<FourthSupFn>,
    deriv_power_policy: CertPolicy,
    self_policy: CertPolicy,
    // Smallest left endpoint for which ordinary convexity on [a, b] is known;
    // None means convex on all of (0, oo).
    ordinary_convex_above: Option<f64>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl FunctionSpec {
    pub fn new(name: impl Into<String>, f: RealFn, f_prime: RealFn) -> Result<Self, DomainError> {
        let spec = Self {
            name: name.into(),
            f,
            f_prime,
            fourth_sup: None,
            deriv_power_policy: CertPolicy::Empirical,
            self_policy: CertPolicy::Empirical,
            ordinary_convex_above: None,
        };
        spec.validate_derivative()?;
        Ok(spec)
    }

    pub fn with_fourth_sup(mut self, fourth_sup: FourthSupFn) -> Self {
        self.fourth_sup = Some(fourth_sup);
        self
    }

    pub fn with_deriv_power_policy(mut self, policy: CertPolicy) -> Self {
        self.deriv_power_policy = policy;
        self
    }

    pub fn with_self_policy(mut self, policy: CertPolicy) -> Self {
        self.self_policy = policy;
        self
    }

    pub fn with_ordinary_convex_above(mut self, threshold: Option<f64>) -> Self {
        self.ordinary_convex_above = threshold;
        self
    }

    fn validate_derivative(&self) -> Result<(), DomainError> {
        // 17 log-spaced abscissae spanning [1/8, 8].
        for i in 0..17 {
            let x = (f64::ln(8.0) * (i as f64 / 8.0 - 1.0)).exp();
            let h = 1e-5 * x;
            let fd = ((self.f)(x + h) - (self.f)(x - h)) / (2.0 * h);
            let declared = (self.f_prime)(x);
            if (fd - declared).abs() > 1e-5 * declared.abs().max(1.0) {
                return Err(DomainError::DerivativeMismatch {
                    name: self.name.clone(),
                    x,
                    fd,
                    declared,
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.f_prime)(x)
    }

    /// Sup of `|f''''|` over the interval, when the catalog provides it.
    pub fn fourth_derivative_sup(&self, interval: &Interval) -> Option<f64> {
        self.fourth_sup.as_ref().map(|g| g(interval))
    }

    pub fn deriv_power_policy(&self) -> CertPolicy {
        self.deriv_power_policy
    }

    pub fn self_policy(&self) -> CertPolicy {
        self.self_policy
    }

    /// Whether ordinary (mid-point) convexity of `f` on the interval is
    /// asserted by the catalog.
    pub fn ordinary_convex_on(&self, interval: &Interval) -> bool {
        match self.ordinary_convex_above {
            None => true,
            Some(threshold) => interval.a() >= threshold,
        }
    }
}

/// Tolerances shared across the verification machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute quadrature tolerance.
    pub quad_abs: f64,
    /// Relative quadrature tolerance.
    pub quad_rel: f64,
    /// Inequality slack tolerance: a verdict passes iff `slack >= -ineq`.
    pub ineq: f64,
    /// Harmonic-convexity certification tolerance on the worst violation.
    pub convexity: f64,
    /// Two-sided residual tolerance for the integral-identity check.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_abs: 1e-10,
            quad_rel: 1e-10,
            ineq: 1e-9,
            convexity: 1e-12,
            identity: 1e-8,
        }
    }
}

/// The inputs a verdict was evaluated at, for reproduction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
}

impl VerdictInputs {
    pub fn for_function(fs: &FunctionSpec, interval: &Interval) -> Self {
        Self {
            function: Some(fs.name().to_string()),
            a: Some(interval.a()),
            b: Some(interval.b()),
            ..Self::default()
        }
    }

    pub fn with_lambda(mut self, lambda: LambdaWeight) -> Self {
        self.lambda = Some(lambda.get());
        self
    }

    pub fn with_exponents(mut self, exps: &ExponentPair) -> Self {
        self.q = Some(exps.q());
        self.p = exps.p();
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = Some(n);
        self
    }
}

/// One verified inequality: left side, right side, slack and pass/fail.
///
/// `slack = rhs - lhs`; the verdict passes iff `slack >= -tol`. Equality
/// checks store `-|lhs - rhs|` as the slack so the same pass rule applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub theorem_tag: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
    pub inputs: VerdictInputs,
}

impl BoundVerdict {
    pub fn from_sides(
        tag: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol_ineq: f64,
        inputs: VerdictInputs,
    ) -> Self {
        let slack = rhs - lhs;
        Self {
            theorem_tag: tag.into(),
            lhs,
            rhs,
            slack,
            passed: slack >= -tol_ineq,
            inputs,
        }
    }

    /// Two-sided equality verdict: passes iff `|lhs - rhs| <= tol`.
    pub fn from_equality(
        tag: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
        inputs: VerdictInputs,
    ) -> Self {
        let residual = (lhs - rhs).abs();
        Self {
            theorem_tag: tag.into(),
            lhs,
            rhs,
            slack: -residual,
            passed: residual <= tol,
            inputs,
        }
    }
}
