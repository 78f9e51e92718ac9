//! Empirical harmonic-convexity certification and the catalog of test
//! functions with known derivatives.
//!
//! The bound theorems assume `|f'|^q` is harmonically convex; the catalog
//! does not take that on trust. Certification samples the defining
//! inequality `g(xy / (t x + (1-t) y)) <= t g(y) + (1-t) g(x)` on a
//! log-spaced grid and caches the outcome per (function, interval, exponent).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{CertPolicy, DomainError, FunctionSpec, Interval};

pub const DEFAULT_GRID: usize = 33;
pub const DEFAULT_CONVEXITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexityError {
    #[error("grid must have at least 3 points (got {0})")]
    GridTooSmall(usize),
    #[error("non-finite function value at x = {x}")]
    NonFiniteValue { x: f64 },
    #[error("unknown catalog function '{0}'")]
    UnknownFunction(String),
    #[error("power exponent must lie in (-1, oo) excluding 0 (got n = {0})")]
    InvalidPowerExponent(f64),
    #[error(
        "harmonic convexity of '{name}' not certified on [{a}, {b}] \
         (worst violation {violation:.3e}); pass an override to proceed"
    )]
    NotCertified {
        name: String,
        a: f64,
        b: f64,
        violation: f64,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Outcome of sampling the harmonic-convexity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub is_harmonically_convex: bool,
    /// Max over sampled triples of lhs - rhs; <= 0 when convex.
    pub worst_violation: f64,
    pub samples: usize,
}

/// Sample the harmonic-convexity inequality for `g` over all grid pairs and
/// `t in {0, 1/16, ..., 1}`, reporting the worst violation.
pub fn check_harmonic_convexity<G: Fn(f64) -> f64>(
    g: G,
    interval: &Interval,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityReport, ConvexityError> {
    if grid_n < 3 {
        return Err(ConvexityError::GridTooSmall(grid_n));
    }
    let xs = log_spaced(interval.a(), interval.b(), grid_n);
    let mut gv = Vec::with_capacity(grid_n);
    for &x in &xs {
        let y = g(x);
        if !y.is_finite() {
            return Err(ConvexityError::NonFiniteValue { x });
        }
        gv.push(y);
    }

    let mut worst = f64::NEG_INFINITY;
    let mut samples = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let m = x * y / (t * x + (1.0 - t) * y);
                let lhs = g(m);
                if !lhs.is_finite() {
                    return Err(ConvexityError::NonFiniteValue { x: m });
                }
                let rhs = t * gv[j] + (1.0 - t) * gv[i];
                worst = worst.max(lhs - rhs);
                samples += 1;
            }
        }
    }
    Ok(ConvexityReport {
        is_harmonically_convex: worst <= tol,
        worst_violation: worst,
        samples,
    })
}

fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Names the catalog understands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CatalogName {
    /// `f(x) = c`
    Constant(f64),
    /// `f(x) = x`
    Linear,
    /// `f(x) = x^2`
    Square,
    /// `f(x) = x^(n+2)`, `n in (-1, oo) \ {0}`
    Power(f64),
    /// `f(x) = x^2 ln x`
    SquareLog,
}

impl FromStr for CatalogName {
    type Err = ConvexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let parse_arg = |default: Option<f64>| -> Result<f64, ConvexityError> {
            match (arg, default) {
                (Some(a), _) => a
                    .parse::<f64>()
                    .map_err(|_| ConvexityError::UnknownFunction(s.to_string())),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(ConvexityError::UnknownFunction(s.to_string())),
            }
        };
        match head {
            "constant" => Ok(CatalogName::Constant(parse_arg(Some(1.0))?)),
            "linear" => Ok(CatalogName::Linear),
            "square" => Ok(CatalogName::Square),
            "power" => Ok(CatalogName::Power(parse_arg(None)?)),
            "square_log" => Ok(CatalogName::SquareLog),
            _ => Err(ConvexityError::UnknownFunction(s.to_string())),
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogName::Constant(c) => write!(f, "constant:{c}"),
            CatalogName::Linear => write!(f, "linear"),
            CatalogName::Square => write!(f, "square"),
            CatalogName::Power(n) => write!(f, "power:{n}"),
            CatalogName::SquareLog => write!(f, "square_log"),
        }
    }
}

/// Build the requested catalog function.
pub fn catalog(name: &CatalogName) -> Result<FunctionSpec, ConvexityError> {
    let spec = match *name {
        CatalogName::Constant(c) => FunctionSpec::new(
            name.to_string(),
            Arc::new(move |_| c),
            Arc::new(|_| 0.0),
        )?
        .with_fourth_sup(Arc::new(|_| 0.0))
        .with_deriv_power_policy(CertPolicy::AnalyticAllQ)
        .with_self_policy(CertPolicy::AnalyticAllQ),
        CatalogName::Linear => FunctionSpec::new(
            "linear",
            Arc::new(|x| x),
            Arc::new(|_| 1.0),
        )?
        .with_fourth_sup(Arc::new(|_| 0.0))
        .with_deriv_power_policy(CertPolicy::AnalyticAllQ)
        .with_self_policy(CertPolicy::AnalyticAllQ),
        CatalogName::Square => FunctionSpec::new(
            "square",
            Arc::new(|x| x * x),
            Arc::new(|x| 2.0 * x),
        )?
        .with_fourth_sup(Arc::new(|_| 0.0)),
        CatalogName::Power(n) => {
            if !(n > -1.0 && n != 0.0 && n.is_finite()) {
                return Err(ConvexityError::InvalidPowerExponent(n));
            }
            let e = n + 2.0;
            let c4 = (e * (e - 1.0) * (e - 2.0) * (e - 3.0)).abs();
            FunctionSpec::new(
                name.to_string(),
                Arc::new(move |x: f64| x.powf(e)),
                Arc::new(move |x: f64| e * x.powf(e - 1.0)),
            )?
            .with_fourth_sup(Arc::new(move |iv: &Interval| {
                let fa = c4 * iv.a().powf(e - 4.0);
                let fb = c4 * iv.b().powf(e - 4.0);
                fa.max(fb)
            }))
        }
        CatalogName::SquareLog => FunctionSpec::new(
            "square_log",
            Arc::new(|x: f64| x * x * x.ln()),
            Arc::new(|x: f64| x * (2.0 * x.ln() + 1.0)),
        )?
        // |f''''| = 2/x^2, decreasing.
        .with_fourth_sup(Arc::new(|iv: &Interval| 2.0 / (iv.a() * iv.a())))
        // f'' = 2 ln x + 3 >= 0 iff x >= e^(-3/2).
        .with_ordinary_convex_above(Some((-1.5f64).exp())),
    };
    Ok(spec)
}

/// Catalog lookup that eagerly certifies `|f'|^q` harmonic convexity on the
/// interval, refusing to emit the function unless certified or overridden.
pub fn catalog_certified(
    name: &CatalogName,
    interval: &Interval,
    q: f64,
    allow_uncertified: bool,
) -> Result<FunctionSpec, ConvexityError> {
    let spec = catalog(name)?;
    let report = certify_derivative_power(
        &spec,
        interval,
        q,
        DEFAULT_GRID,
        DEFAULT_CONVEXITY_TOL,
    )?;
    if report.is_harmonically_convex || allow_uncertified {
        Ok(spec)
    } else {
        Err(ConvexityError::NotCertified {
            name: spec.name().to_string(),
            a: interval.a(),
            b: interval.b(),
            violation: report.worst_violation,
        })
    }
}

#[derive(PartialEq, Eq, Hash, Clone)]
struct CertKey {
    name: String,
    a: u64,
    b: u64,
    // Exponent bits for |f'|^q checks, None for f itself.
    q: Option<u64>,
    grid: usize,
    tol: u64,
}

type CertCache = RwLock<HashMap<CertKey, ConvexityReport>>;

fn cache() -> &'static CertCache {
    static CACHE: OnceLock<CertCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached_check(
    key: CertKey,
    run: impl FnOnce() -> Result<ConvexityReport, ConvexityError>,
) -> Result<ConvexityReport, ConvexityError> {
    if let Some(hit) = cache().read().expect("cert cache poisoned").get(&key) {
        return Ok(*hit);
    }
    let report = run()?;
    // Write-once: a racing insert computed the same pure value.
    cache()
        .write()
        .expect("cert cache poisoned")
        .entry(key)
        .or_insert(report);
    Ok(report)
}

/// Certify harmonic convexity of `|f'|^q` on the interval (cached).
///
/// The sampled function is normalized by its grid maximum first; harmonic
/// convexity is invariant under positive scaling, and the absolute violation
/// tolerance is only meaningful near unit scale.
pub fn certify_derivative_power(
    fs: &FunctionSpec,
    interval: &Interval,
    q: f64,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityReport, ConvexityError> {
    if fs.deriv_power_policy() == CertPolicy::AnalyticAllQ {
        return Ok(ConvexityReport {
            is_harmonically_convex: true,
            worst_violation: 0.0,
            samples: 0,
        });
    }
    let key = CertKey {
        name: fs.name().to_string(),
        a: interval.a().to_bits(),
        b: interval.b().to_bits(),
        q: Some(q.to_bits()),
        grid: grid_n,
        tol: tol.to_bits(),
    };
    let fs = fs.clone();
    let interval = *interval;
    cached_check(key, move || {
        let scale = grid_scale(&|x| fs.derivative(x).abs().powf(q), &interval, grid_n);
        check_harmonic_convexity(
            |x| fs.derivative(x).abs().powf(q) / scale,
            &interval,
            grid_n,
            tol,
        )
    })
}

/// Certify harmonic convexity of `f` itself on the interval (cached).
pub fn certify_function(
    fs: &FunctionSpec,
    interval: &Interval,
    grid_n: usize,
    tol: f64,
) -> Result<ConvexityReport, ConvexityError> {
    if fs.self_policy() == CertPolicy::AnalyticAllQ {
        return Ok(ConvexityReport {
            is_harmonically_convex: true,
            worst_violation: 0.0,
            samples: 0,
        });
    }
    let key = CertKey {
        name: fs.name().to_string(),
        a: interval.a().to_bits(),
        b: interval.b().to_bits(),
        q: None,
        grid: grid_n,
        tol: tol.to_bits(),
    };
    let fs = fs.clone();
    let interval = *interval;
    cached_check(key, move || {
        let scale = grid_scale(&|x| fs.eval(x).abs(), &interval, grid_n);
        check_harmonic_convexity(|x| fs.eval(x) / scale, &interval, grid_n, tol)
    })
}

fn grid_scale(g: &dyn Fn(f64) -> f64, interval: &Interval, grid_n: usize) -> f64 {
    log_spaced(interval.a(), interval.b(), grid_n)
        .into_iter()
        .map(|x| g(x).abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
}
