//! Shared test oracles, independent of the library's own integrator.
#![allow(dead_code)] // each test target uses its own subset

use harmint::Interval;
use rand::Rng;

/// Fixed-step composite Simpson rule; the brute-force route every closed
/// form and adaptive result is checked against.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson with an explicit split point (for integrands with one kink).
pub fn simpson_split(
    f: impl Fn(f64) -> f64 + Copy,
    lo: f64,
    split: f64,
    hi: f64,
    panels: usize,
) -> f64 {
    if split > lo && split < hi {
        simpson(f, lo, split, panels) + simpson(f, split, hi, panels)
    } else {
        simpson(f, lo, hi, panels)
    }
}

/// Brute-force lower-half kernel integral
/// `int_0^(1/2) |lambda - 2t| w(t) / (t v + (1-t) u)^2 dt`.
pub fn kernel_lower(lambda: f64, u: f64, v: f64, weight: fn(f64) -> f64, panels: usize) -> f64 {
    let f = move |t: f64| {
        let at = t * v + (1.0 - t) * u;
        (lambda - 2.0 * t).abs() * weight(t) / (at * at)
    };
    simpson_split(f, 0.0, lambda / 2.0, 0.5, panels)
}

/// Brute-force full-range kernel integral
/// `int_0^1 |1 - 2t| w(t) / (t b + (1-t) a)^2 dt`.
pub fn kernel_full(interval: &Interval, weight: fn(f64) -> f64, panels: usize) -> f64 {
    let (a, b) = (interval.a(), interval.b());
    let f = move |t: f64| {
        let at = t * b + (1.0 - t) * a;
        (1.0 - 2.0 * t).abs() * weight(t) / (at * at)
    };
    simpson_split(f, 0.0, 0.5, 1.0, panels)
}

pub fn w_one(_t: f64) -> f64 {
    1.0
}
pub fn w_t(t: f64) -> f64 {
    t
}
pub fn w_1mt(t: f64) -> f64 {
    1.0 - t
}

/// Log-uniform interval draw.
pub fn draw_interval<R: Rng>(rng: &mut R, a_range: (f64, f64), ratio_range: (f64, f64)) -> Interval {
    let a = rng.gen_range(a_range.0.ln()..a_range.1.ln()).exp();
    let ratio = rng.gen_range(ratio_range.0.ln()..ratio_range.1.ln()).exp();
    Interval::new(a, a * ratio).unwrap()
}

// The specialized coefficient forms printed for the midpoint, trapezoid and
// Simpson weights. Kept here as independent assertions against the general
// closed forms.

pub fn c1_midpoint(u: f64, v: f64) -> f64 {
    let d = v - u;
    2.0 / (d * d) * (((u + v) / (2.0 * u)).ln() - d / (u + v))
}

pub fn c2_midpoint(u: f64, v: f64) -> f64 {
    let d = v - u;
    1.0 / (d * d * d) * ((3.0 * u + v) * d / (u + v) + 4.0 * u * (2.0 * u / (u + v)).ln())
}

pub fn c3_midpoint(u: f64, v: f64) -> f64 {
    let d = v - u;
    1.0 / (d * d)
        * (2.0 * (u + v) / d * (((u + v) / (2.0 * u)).ln()) - (u + 3.0 * v) / (u + v))
}

pub fn c1_trapezoid(u: f64, v: f64) -> f64 {
    let d = v - u;
    1.0 / (d * d) * (d / u + 2.0 * (2.0 * u / (u + v)).ln())
}

pub fn c2_trapezoid(u: f64, v: f64) -> f64 {
    let d = v - u;
    1.0 / (d * d * d) * ((3.0 * u + v) * (((u + v) / (2.0 * u)).ln()) - 2.0 * d)
}

pub fn c3_trapezoid(u: f64, v: f64) -> f64 {
    let d = v - u;
    1.0 / (d * d) * ((u + v) / u - (u + 3.0 * v) / d * (((u + v) / (2.0 * u)).ln()))
}

pub fn c1_simpson(u: f64, v: f64) -> f64 {
    let d = v - u;
    let s = 5.0 * u + v;
    1.0 / (d * d)
        * (d * (v - 3.0 * u) / (3.0 * u * (u + v))
            + 2.0 * (18.0 * u * (u + v) / (s * s)).ln())
}

pub fn c2_simpson(u: f64, v: f64) -> f64 {
    let d = v - u;
    let s = 5.0 * u + v;
    1.0 / (d * d * d)
        * ((11.0 * u + v) / 3.0 * ((s * s / (18.0 * u * (u + v))).ln())
            + 4.0 * u * d / (3.0 * (u + v)))
}

pub fn c3_simpson(u: f64, v: f64) -> f64 {
    let d = v - u;
    let s = 5.0 * u + v;
    1.0 / (d * d)
        * ((v * v - 4.0 * u * v - u * u) / (3.0 * u * (u + v))
            + (5.0 * u + 7.0 * v) / (3.0 * d) * ((18.0 * u * (u + v) / (s * s)).ln()))
}
