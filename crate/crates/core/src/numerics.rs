//! Adaptive quadrature engine.
//!
//! Every integrand in this crate is smooth away from the single kink the
//! `|lambda - 2t|` kernels carry, so a 7/15 Gauss-Kronrod pair with
//! worst-panel-first bisection is all the machinery needed. The kernel entry
//! point splits at the kink itself; callers never have to know where it is.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Interval, LambdaWeight};

/// Default absolute quadrature tolerance.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Default relative quadrature tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Hard cap on the number of panels before giving up.
pub const MAX_PANELS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, >= 0.
    pub error_estimate: f64,
    /// Number of panels in the final partition, >= 1.
    pub subdivisions: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid integration request: {0}")]
    BadRequest(String),
    #[error(
        "tolerance not reached after {subdivisions} panels \
         (best estimate {value}, error estimate {error_estimate})"
    )]
    ToleranceNotReached {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error("non-finite integrand value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

struct PanelEval {
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<PanelEval, QuadError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let mut fv1 = [0.0f64; 8];
    let mut fv2 = [0.0f64; 8];

    let eval = |x: f64| -> Result<f64, QuadError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFiniteIntegrand { x })
        }
    };

    let f_center = eval(center)?;
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let absc = half * XGK[j];
        let f1 = eval(center - absc)?;
        let f2 = eval(center + absc)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let raw_err = (res_kronrod - res_gauss) * half;
    Ok(PanelEval {
        value: res_kronrod * half,
        error: rescale_error(raw_err, res_abs * half.abs(), res_asc * half.abs()),
    })
}

struct Panel {
    error: f64,
    seq: u64,
    lo: f64,
    hi: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Max-heap on error with the insertion sequence as a deterministic
    // tie-break.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Integrate `f` over `[lo, hi]` to within `max(abs_tol, rel_tol * |value|)`.
///
/// Deterministic for fixed inputs. Smooth-piece competence only: kinks are
/// the caller's (or [`t_kernel_integral`]'s) job to split.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult, QuadError> {
    integrate_adaptive_capped(f, lo, hi, abs_tol, rel_tol, MAX_PANELS)
}

pub(crate) fn integrate_adaptive_capped<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult, QuadError> {
    let ordered = lo.is_finite() && hi.is_finite() && lo < hi;
    if !ordered {
        return Err(QuadError::BadRequest(format!(
            "need finite lo < hi (got lo = {lo}, hi = {hi})"
        )));
    }
    let tols_positive = abs_tol > 0.0 && rel_tol > 0.0;
    if !tols_positive {
        return Err(QuadError::BadRequest(format!(
            "tolerances must be positive (got abs_tol = {abs_tol}, rel_tol = {rel_tol})"
        )));
    }

    let first = gk15(&f, lo, hi)?;
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut panels = 1usize;
    let mut seq = 0u64;

    let mut live = BinaryHeap::new();
    live.push(Panel {
        error: first.error,
        seq,
        lo,
        hi,
        value: first.value,
    });

    // Panels too narrow to bisect park their error here.
    let mut frozen_error = 0.0f64;

    loop {
        if total_error <= abs_tol.max(rel_tol * total_value.abs()) {
            return Ok(QuadratureResult {
                value: total_value,
                error_estimate: total_error,
                subdivisions: panels,
            });
        }
        let Some(worst) = live.pop() else {
            return Err(QuadError::ToleranceNotReached {
                value: total_value,
                error_estimate: total_error,
                subdivisions: panels,
            });
        };
        if panels >= max_panels {
            return Err(QuadError::ToleranceNotReached {
                value: total_value,
                error_estimate: total_error,
                subdivisions: panels,
            });
        }

        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen_error += worst.error;
            // All remaining error is unreducible once the live heap drains.
            if live.is_empty() && frozen_error >= total_error - f64::EPSILON {
                return Err(QuadError::ToleranceNotReached {
                    value: total_value,
                    error_estimate: total_error,
                    subdivisions: panels,
                });
            }
            continue;
        }

        let left = gk15(&f, worst.lo, mid)?;
        let right = gk15(&f, mid, worst.hi)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels += 1;

        seq += 1;
        live.push(Panel {
            error: left.error,
            seq,
            lo: worst.lo,
            hi: mid,
            value: left.value,
        });
        seq += 1;
        live.push(Panel {
            error: right.error,
            seq,
            lo: mid,
            hi: worst.hi,
            value: right.value,
        });
    }
}

/// Which kernel the weighted `t`-integrals carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `|lambda - 2t| / A_t^2` (`p` unused).
    AbsOverAtSquared,
    /// `|lambda - 2t|^p / A_t^(2p)`.
    AbsPowOverAtPow,
    /// `|lambda - 2t|^p` with no `A_t` factor.
    AbsPow,
    /// `1 / A_t^(2p)` with no kernel factor (`lambda` unused).
    RecipAtPow,
}

impl KernelKind {
    fn uses_p(self) -> bool {
        !matches!(self, KernelKind::AbsOverAtSquared)
    }

    fn has_kink(self) -> bool {
        !matches!(self, KernelKind::RecipAtPow)
    }
}

/// Which half of `[0, 1]` to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfRange {
    /// `[0, 1/2]`, kernel factor `|lambda - 2t|`.
    Lower,
    /// `[1/2, 1]`, kernel factor `|2 - lambda - 2t|`.
    Upper,
}

/// Optional polynomial weight multiplying the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelWeight {
    None,
    T,
    OneMinusT,
}

impl KernelWeight {
    fn apply(self, t: f64) -> f64 {
        match self {
            KernelWeight::None => 1.0,
            KernelWeight::T => t,
            KernelWeight::OneMinusT => 1.0 - t,
        }
    }
}

/// Brute-force evaluation of the weighted kernel integrals over one half of
/// `[0, 1]`, with `A_t = t*b + (1-t)*a`.
///
/// The kernel's interior kink (at `t = lambda/2` on the lower half, at
/// `t = 1 - lambda/2` on the upper half) is split here so the adaptive
/// integrator only ever sees smooth pieces.
pub fn t_kernel_integral(
    kernel: KernelKind,
    lambda: LambdaWeight,
    p: f64,
    interval: &Interval,
    half: HalfRange,
    weight: KernelWeight,
    abs_tol: f64,
) -> Result<QuadratureResult, QuadError> {
    let p_ok = !kernel.uses_p() || (p >= 1.0 && p.is_finite());
    if !p_ok {
        return Err(QuadError::BadRequest(format!(
            "kernel {kernel:?} requires p >= 1 (got p = {p})"
        )));
    }
    if abs_tol <= 0.0 || abs_tol.is_nan() {
        return Err(QuadError::BadRequest(format!(
            "abs_tol must be positive (got {abs_tol})"
        )));
    }

    let a = interval.a();
    let b = interval.b();
    let lam = lambda.get();

    let at = move |t: f64| t * b + (1.0 - t) * a;
    let kernel_factor = move |t: f64| -> f64 {
        let base = match half {
            HalfRange::Lower => (lam - 2.0 * t).abs(),
            HalfRange::Upper => (2.0 - lam - 2.0 * t).abs(),
        };
        match kernel {
            KernelKind::AbsOverAtSquared => {
                let d = at(t);
                base / (d * d)
            }
            KernelKind::AbsPowOverAtPow => base.powf(p) / at(t).powf(2.0 * p),
            KernelKind::AbsPow => base.powf(p),
            KernelKind::RecipAtPow => at(t).powf(-2.0 * p),
        }
    };
    let integrand = move |t: f64| kernel_factor(t) * weight.apply(t);

    let (lo, hi) = match half {
        HalfRange::Lower => (0.0, 0.5),
        HalfRange::Upper => (0.5, 1.0),
    };
    let kink = match half {
        HalfRange::Lower => lam / 2.0,
        HalfRange::Upper => 1.0 - lam / 2.0,
    };

    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(2);
    if kernel.has_kink() && kink > lo && kink < hi {
        pieces.push((lo, kink));
        pieces.push((kink, hi));
    } else {
        pieces.push((lo, hi));
    }

    let piece_tol = abs_tol / pieces.len() as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut subdivisions = 0;
    for (plo, phi) in pieces {
        let r = integrate_adaptive(integrand, plo, phi, piece_tol, abs_tol)?;
        value += r.value;
        error += r.error_estimate;
        subdivisions += r.subdivisions;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        subdivisions,
    })
}
