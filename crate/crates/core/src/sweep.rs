//! Batch experiment runner: seeded randomized campaigns and deterministic
//! grid sweeps over (function, interval, lambda, exponent) cases.
//!
//! A sweep never aborts on a per-case problem. Cases whose convexity
//! hypothesis cannot be certified (or which fail to evaluate at all) land in
//! the `unmet` bucket with the reason recorded; only a genuinely violated
//! inequality counts as `fail`. The report also carries the worst identity
//! residual and the worst closed-form-versus-quadrature coefficient error
//! seen across the campaign, so each run re-certifies its own machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundError, ClassicalKind, EvalOptions};
use crate::constants::{coeff_c123, coeff_c456, lambda_coeffs};
use crate::convexity::{catalog, CatalogName};
use crate::domain::{
    BoundVerdict, ExponentPair, FunctionSpec, Interval, LambdaWeight, Tolerances,
};
use crate::numerics::{t_kernel_integral, HalfRange, KernelKind, KernelWeight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
}

/// Which bound families a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremKind {
    Thm14,
    Thm15,
    Thm22,
    Thm23,
    Thm24,
    Hh13,
    Classical,
}

impl TheoremKind {
    pub fn tag(self) -> &'static str {
        match self {
            TheoremKind::Thm14 => "thm14",
            TheoremKind::Thm15 => "thm15",
            TheoremKind::Thm22 => "thm22",
            TheoremKind::Thm23 => "thm23",
            TheoremKind::Thm24 => "thm24",
            TheoremKind::Hh13 => "hh13",
            TheoremKind::Classical => "classical",
        }
    }
}

/// Interval source: an explicit list, or a seeded log-uniform sampler over
/// the left endpoint and the ratio `b/a`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum IntervalSpec {
    Explicit(Vec<(f64, f64)>),
    Sampler {
        count: usize,
        a_range: (f64, f64),
        ratio_range: (f64, f64),
    },
}

impl Default for IntervalSpec {
    fn default() -> Self {
        IntervalSpec::Sampler {
            count: 32,
            a_range: (0.1, 10.0),
            ratio_range: (1.0 + 1e-3, 100.0),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ExponentGrid {
    /// Conjugate `(p, q)` pairs for the Holder-form bounds.
    #[serde(default)]
    pub holder: Vec<(f64, f64)>,
    /// `q >= 1` values for the power-mean bounds.
    #[serde(default)]
    pub power_q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SweepTolerances {
    pub quad: f64,
    pub ineq: f64,
    pub convexity: f64,
}

impl Default for SweepTolerances {
    fn default() -> Self {
        Self {
            quad: 1e-10,
            ineq: 1e-9,
            convexity: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub functions: Vec<String>,
    #[serde(default)]
    pub intervals: IntervalSpec,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub exponents: ExponentGrid,
    pub theorems: Vec<TheoremKind>,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: SweepTolerances,
    /// Default report path; a front end's explicit output flag wins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Fail,
    Unmet,
}

/// One evaluated case, carrying everything needed to reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CaseRecord {
    pub index: usize,
    pub theorem: String,
    pub tag: String,
    pub function: String,
    pub a: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TheoremSummary {
    pub theorem: String,
    pub pass: usize,
    pub fail: usize,
    pub unmet: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepReport {
    pub seed: u64,
    pub verdicts: Vec<CaseRecord>,
    pub summary: Vec<TheoremSummary>,
    pub identity_max_err: f64,
    pub oracle_max_err: f64,
}

struct Case {
    index: usize,
    theorem: TheoremKind,
    fn_idx: usize,
    interval: Interval,
    lambda: Option<LambdaWeight>,
    exps: Option<ExponentPair>,
    q: Option<f64>,
}

/// Run the sweep. Deterministic for a fixed config (including the seed);
/// cases are evaluated in parallel and re-assembled in case order, so the
/// report is identical to a serial run.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    run_sweep_impl(config, true)
}

#[cfg(test)]
pub(crate) fn run_sweep_serial(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    run_sweep_impl(config, false)
}

fn run_sweep_impl(config: &SweepConfig, parallel: bool) -> Result<SweepReport, SweepError> {
    let specs = resolve_functions(&config.functions)?;
    let intervals = resolve_intervals(&config.intervals, config.seed)?;
    let lambdas = config
        .lambdas
        .iter()
        .map(|&l| LambdaWeight::new(l).map_err(|e| SweepError::Config(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let holder = config
        .exponents
        .holder
        .iter()
        .map(|&(p, q)| {
            if ((1.0 / p + 1.0 / q) - 1.0).abs() > 1e-12 {
                return Err(SweepError::Config(format!(
                    "exponent pair ({p}, {q}) is not conjugate to 1e-12"
                )));
            }
            ExponentPair::holder(p, q).map_err(|e| SweepError::Config(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let power_q = config
        .exponents
        .power_q
        .iter()
        .map(|&q| {
            if q >= 1.0 && q.is_finite() {
                Ok(q)
            } else {
                Err(SweepError::Config(format!("power-mean q must be >= 1 (got {q})")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let opts = EvalOptions {
        tolerances: Tolerances {
            quad_abs: config.tolerances.quad,
            quad_rel: config.tolerances.quad,
            ineq: config.tolerances.ineq,
            convexity: config.tolerances.convexity,
            ..Tolerances::default()
        },
        ..EvalOptions::default()
    };

    let mut cases = Vec::new();
    for &theorem in &config.theorems {
        for fn_idx in 0..specs.len() {
            for &interval in &intervals {
                let base = |lambda, exps, q| Case {
                    index: 0,
                    theorem,
                    fn_idx,
                    interval,
                    lambda,
                    exps,
                    q,
                };
                match theorem {
                    TheoremKind::Thm22 => {
                        for &l in &lambdas {
                            for &q in &power_q {
                                cases.push(base(Some(l), None, Some(q)));
                            }
                        }
                    }
                    TheoremKind::Thm23 | TheoremKind::Thm24 => {
                        for &l in &lambdas {
                            for &e in &holder {
                                cases.push(base(Some(l), Some(e), None));
                            }
                        }
                    }
                    TheoremKind::Thm14 => {
                        for &q in &power_q {
                            cases.push(base(None, None, Some(q)));
                        }
                    }
                    TheoremKind::Thm15 => {
                        for &e in &holder {
                            cases.push(base(None, Some(e), None));
                        }
                    }
                    TheoremKind::Hh13 | TheoremKind::Classical => {
                        cases.push(base(None, None, None));
                    }
                }
            }
        }
    }
    for (i, case) in cases.iter_mut().enumerate() {
        case.index = i;
    }

    let evaluate = |case: &Case| -> Vec<CaseRecord> { evaluate_case(case, &specs, &opts) };
    let mut grouped: Vec<(usize, Vec<CaseRecord>)> = if parallel {
        cases
            .par_iter()
            .map(|c| (c.index, evaluate(c)))
            .collect()
    } else {
        cases.iter().map(|c| (c.index, evaluate(c))).collect()
    };
    grouped.sort_by_key(|(i, _)| *i);

    let mut verdicts = Vec::new();
    for (_, records) in grouped {
        for mut r in records {
            r.index = verdicts.len();
            verdicts.push(r);
        }
    }

    let mut summary_map: std::collections::BTreeMap<String, TheoremSummary> = Default::default();
    for r in &verdicts {
        let entry = summary_map
            .entry(r.theorem.clone())
            .or_insert_with(|| TheoremSummary {
                theorem: r.theorem.clone(),
                pass: 0,
                fail: 0,
                unmet: 0,
                min_slack: None,
            });
        match r.status {
            CaseStatus::Pass => entry.pass += 1,
            CaseStatus::Fail => entry.fail += 1,
            CaseStatus::Unmet => entry.unmet += 1,
        }
        if let Some(s) = r.slack {
            entry.min_slack = Some(entry.min_slack.map_or(s, |m: f64| m.min(s)));
        }
    }

    let identity_max_err = identity_scan(&specs, &intervals, &lambdas, &opts);
    let oracle_max_err = oracle_scan(&intervals, &lambdas, &holder);

    Ok(SweepReport {
        seed: config.seed,
        verdicts,
        summary: summary_map.into_values().collect(),
        identity_max_err,
        oracle_max_err,
    })
}

fn resolve_functions(names: &[String]) -> Result<Vec<(String, FunctionSpec)>, SweepError> {
    if names.is_empty() {
        return Err(SweepError::Config("no functions requested".into()));
    }
    names
        .iter()
        .map(|n| {
            let parsed: CatalogName = n
                .parse()
                .map_err(|e: crate::convexity::ConvexityError| SweepError::Config(e.to_string()))?;
            let spec =
                catalog(&parsed).map_err(|e| SweepError::Config(e.to_string()))?;
            Ok((parsed.to_string(), spec))
        })
        .collect()
}

fn resolve_intervals(spec: &IntervalSpec, seed: u64) -> Result<Vec<Interval>, SweepError> {
    match spec {
        IntervalSpec::Explicit(list) => {
            if list.is_empty() {
                return Err(SweepError::Config("no intervals given".into()));
            }
            list.iter()
                .map(|&(a, b)| Interval::new(a, b).map_err(|e| SweepError::Config(e.to_string())))
                .collect()
        }
        IntervalSpec::Sampler {
            count,
            a_range,
            ratio_range,
        } => {
            if *count == 0 {
                return Err(SweepError::Config("sampler count must be positive".into()));
            }
            if !(a_range.0 > 0.0 && a_range.1 >= a_range.0) {
                return Err(SweepError::Config(format!(
                    "a-range must satisfy 0 < lo <= hi (got {a_range:?})"
                )));
            }
            if !(ratio_range.0 > 1.0 && ratio_range.1 >= ratio_range.0) {
                return Err(SweepError::Config(format!(
                    "ratio-range must satisfy 1 < lo <= hi (got {ratio_range:?})"
                )));
            }
            // Log-uniform draws over both the left endpoint and the ratio.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (la0, la1) = (a_range.0.ln(), a_range.1.ln());
            let (lr0, lr1) = (ratio_range.0.ln(), ratio_range.1.ln());
            (0..*count)
                .map(|_| {
                    let a = if la0 == la1 { a_range.0 } else { rng.gen_range(la0..la1).exp() };
                    let ratio = if lr0 == lr1 {
                        ratio_range.0
                    } else {
                        rng.gen_range(lr0..lr1).exp()
                    };
                    Interval::new(a, a * ratio).map_err(|e| SweepError::Config(e.to_string()))
                })
                .collect()
        }
    }
}

fn record_from_verdict(case: &Case, name: &str, v: &BoundVerdict) -> CaseRecord {
    CaseRecord {
        index: case.index,
        theorem: case.theorem.tag().to_string(),
        tag: v.theorem_tag.clone(),
        function: name.to_string(),
        a: case.interval.a(),
        b: case.interval.b(),
        lambda: case.lambda.map(LambdaWeight::get),
        p: case.exps.and_then(|e| e.p()),
        q: case.q.or(case.exps.map(|e| e.q())),
        status: if v.passed { CaseStatus::Pass } else { CaseStatus::Fail },
        lhs: Some(v.lhs),
        rhs: Some(v.rhs),
        slack: Some(v.slack),
        detail: None,
    }
}

fn record_unmet(case: &Case, name: &str, tag: &str, err: &BoundError) -> CaseRecord {
    CaseRecord {
        index: case.index,
        theorem: case.theorem.tag().to_string(),
        tag: tag.to_string(),
        function: name.to_string(),
        a: case.interval.a(),
        b: case.interval.b(),
        lambda: case.lambda.map(LambdaWeight::get),
        p: case.exps.and_then(|e| e.p()),
        q: case.q.or(case.exps.map(|e| e.q())),
        status: CaseStatus::Unmet,
        lhs: None,
        rhs: None,
        slack: None,
        detail: Some(err.to_string()),
    }
}

fn evaluate_case(
    case: &Case,
    specs: &[(String, FunctionSpec)],
    opts: &EvalOptions,
) -> Vec<CaseRecord> {
    let (name, fs) = &specs[case.fn_idx];
    if case.theorem == TheoremKind::Classical {
        // The two classical checks have independent hypotheses; an
        // uncertified convexity assertion must not swallow the Simpson check.
        let mut records = Vec::new();
        for (kind, tag) in [
            (ClassicalKind::HermiteHadamard, "classical_hh"),
            (ClassicalKind::Simpson, "classical_simpson"),
        ] {
            match bounds::verify_classical(fs, &case.interval, kind, opts) {
                Ok(vs) => records.extend(vs.iter().map(|v| record_from_verdict(case, name, v))),
                Err(err) => records.push(record_unmet(case, name, tag, &err)),
            }
        }
        return records;
    }
    let result: Result<Vec<BoundVerdict>, BoundError> = match case.theorem {
        TheoremKind::Thm22 => bounds::bound_thm22(
            fs,
            &case.interval,
            case.lambda.expect("thm22 case carries lambda"),
            case.q.expect("thm22 case carries q"),
            opts,
        )
        .map(|v| vec![v]),
        TheoremKind::Thm23 => bounds::bound_thm23(
            fs,
            &case.interval,
            case.lambda.expect("thm23 case carries lambda"),
            &case.exps.expect("thm23 case carries exponents"),
            opts,
        )
        .map(|v| vec![v]),
        TheoremKind::Thm24 => bounds::bound_thm24(
            fs,
            &case.interval,
            case.lambda.expect("thm24 case carries lambda"),
            &case.exps.expect("thm24 case carries exponents"),
            opts,
        )
        .map(|v| vec![v]),
        TheoremKind::Thm14 => {
            bounds::bound_thm14(fs, &case.interval, case.q.expect("thm14 case carries q"), opts)
                .map(|v| vec![v])
        }
        TheoremKind::Thm15 => bounds::bound_thm15(
            fs,
            &case.interval,
            &case.exps.expect("thm15 case carries exponents"),
            opts,
        )
        .map(|v| vec![v]),
        TheoremKind::Hh13 => {
            bounds::verify_hh_harmonic(fs, &case.interval, opts).map(|(l, r)| vec![l, r])
        }
        TheoremKind::Classical => unreachable!("handled above"),
    };
    match result {
        Ok(verdicts) => verdicts
            .iter()
            .map(|v| record_from_verdict(case, name, v))
            .collect(),
        Err(err) => vec![record_unmet(case, name, case.theorem.tag(), &err)],
    }
}

fn identity_scan(
    specs: &[(String, FunctionSpec)],
    intervals: &[Interval],
    lambdas: &[LambdaWeight],
    opts: &EvalOptions,
) -> f64 {
    let mut worst = 0.0f64;
    for (_, fs) in specs {
        for interval in intervals {
            for &lambda in lambdas {
                if let Ok(v) = bounds::verify_identity_lemma21(fs, interval, lambda, opts) {
                    worst = worst.max(-v.slack);
                }
            }
        }
    }
    worst
}

const ORACLE_TOL: f64 = 1e-11;

fn kernel(
    kind: KernelKind,
    lambda: LambdaWeight,
    p: f64,
    interval: &Interval,
    half: HalfRange,
    weight: KernelWeight,
) -> Option<f64> {
    t_kernel_integral(kind, lambda, p, interval, half, weight, ORACLE_TOL)
        .ok()
        .map(|r| r.value)
}

/// Worst closed-form-versus-quadrature error over the campaign's coefficient
/// instances.
fn oracle_scan(
    intervals: &[Interval],
    lambdas: &[LambdaWeight],
    holder: &[ExponentPair],
) -> f64 {
    let mut worst = 0.0f64;
    let mut track = |closed: f64, oracle: Option<f64>| {
        if let Some(o) = oracle {
            worst = worst.max((closed - o).abs());
        }
    };
    for interval in intervals {
        let (a, b) = (interval.a(), interval.b());
        for &lambda in lambdas {
            if let Ok((c1, c2, c3)) = coeff_c123(lambda, a, b) {
                use KernelWeight::{None as WNone, OneMinusT, T};
                let kind = KernelKind::AbsOverAtSquared;
                track(c1, kernel(kind, lambda, 1.0, interval, HalfRange::Lower, WNone));
                track(c2, kernel(kind, lambda, 1.0, interval, HalfRange::Lower, T));
                track(c3, kernel(kind, lambda, 1.0, interval, HalfRange::Lower, OneMinusT));
                // Swapped arguments are the upper half, with t pairing to C3.
                if let Ok((c1s, c2s, c3s)) = coeff_c123(lambda, b, a) {
                    track(c1s, kernel(kind, lambda, 1.0, interval, HalfRange::Upper, WNone));
                    track(c3s, kernel(kind, lambda, 1.0, interval, HalfRange::Upper, T));
                    track(c2s, kernel(kind, lambda, 1.0, interval, HalfRange::Upper, OneMinusT));
                }
            }
            for &exps in holder {
                let ExponentPair::Holder { p, q } = exps else { continue };
                if let Ok((c4, c5, c6)) = coeff_c456(lambda, p, q, a, b) {
                    let lower = kernel(
                        KernelKind::AbsPow,
                        lambda,
                        p,
                        interval,
                        HalfRange::Lower,
                        KernelWeight::None,
                    );
                    let upper = kernel(
                        KernelKind::AbsPow,
                        lambda,
                        p,
                        interval,
                        HalfRange::Upper,
                        KernelWeight::None,
                    );
                    track(c4, lower.zip(upper).map(|(l, u)| l + u));
                    let scale = 2.0 * (1.0 - q) * (1.0 - 2.0 * q) * interval.width().powi(2);
                    let it = kernel(
                        KernelKind::RecipAtPow,
                        lambda,
                        q,
                        interval,
                        HalfRange::Lower,
                        KernelWeight::T,
                    );
                    let i1mt = kernel(
                        KernelKind::RecipAtPow,
                        lambda,
                        q,
                        interval,
                        HalfRange::Lower,
                        KernelWeight::OneMinusT,
                    );
                    track(c5, it.map(|v| scale * v));
                    track(c6, i1mt.map(|v| scale * v));
                }
            }
        }
        // Whole-range trapezoid coefficients at lambda = 1.
        let (l1, l2, l3) = lambda_coeffs(interval);
        let one = LambdaWeight::TRAPEZOID;
        let kind = KernelKind::AbsOverAtSquared;
        let full = |w| {
            kernel(kind, one, 1.0, interval, HalfRange::Lower, w)
                .zip(kernel(kind, one, 1.0, interval, HalfRange::Upper, w))
                .map(|(l, u)| l + u)
        };
        track(l1, full(KernelWeight::None));
        track(l2, full(KernelWeight::T));
        track(l3, full(KernelWeight::OneMinusT));
    }
    worst
}
