//! Command-line front end: single evaluations, proposition checks and sweep
//! campaigns, with human tables on stdout and machine-readable JSON reports
//! behind `--out`.
//!
//! Exit codes: 0 when every verdict passed (or an evaluation-only command
//! succeeded), 1 when any verdict failed or a precondition was not
//! certified, 2 on usage/config errors, 3 on numeric errors.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmint::bounds::{self, EvalOptions};
use harmint::constants::{self, CoeffArgs as CoeffPoint, CoefficientSet};
use harmint::convexity::CatalogName;
use harmint::means;
use harmint::sweep::{run_sweep, SweepConfig};
use harmint::{
    BoundError, BoundVerdict, CoeffError, ConvexityError, ExponentPair, FunctionSpec, Interval,
    LambdaWeight, QuadError,
};
use output::{Format, MachineReport};

#[derive(Parser)]
#[command(name = "harmint", version, about = "Deviation bounds and special means for harmonically convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write a machine-readable JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stdout rendering for result tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form coefficient set.
    Coeff(CoeffCmd),
    /// Check one deviation bound and report lhs/rhs/slack.
    Bound(BoundCmd),
    /// Verify the integral identity and report the residual.
    Identity(IdentityCmd),
    /// Compute the special means and their ordering chain.
    Means(MeansCmd),
    /// Check one special-means proposition (printed form vs theorem).
    Prop(PropCmd),
    /// Run a sweep campaign from a JSON config file.
    Sweep(SweepCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffSetName {
    /// C1, C2, C3 at (lambda; u, v)
    C123,
    /// C4, C5, C6 at (lambda, p, q; u, v)
    C456,
    /// The Holder kernel coefficient C1(lambda, p; u, v)
    C1Holder,
    /// lambda1..lambda3 (and mu1, mu2 when --q is given) on [a, b]
    Intro,
}

#[derive(Args)]
struct CoeffCmd {
    #[arg(long, value_enum)]
    set: CoeffSetName,
    #[arg(long, value_parser = parse_real)]
    lambda: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    q: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    u: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    v: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    a: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    b: Option<f64>,
}

#[derive(Args)]
struct BoundCmd {
    /// Which bound: 14, 15, 22, 23, 24, hh, classical-hh, classical-simpson.
    #[arg(long)]
    thm: String,
    /// Catalog function: constant[:c], linear, square, power:n, square_log.
    #[arg(long = "fn")]
    function: String,
    #[arg(long, value_parser = parse_real)]
    a: f64,
    #[arg(long, value_parser = parse_real)]
    b: f64,
    #[arg(long, value_parser = parse_real)]
    lambda: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    q: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    p: Option<f64>,
    /// Evaluate even when the convexity hypothesis is not certified.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct IdentityCmd {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, value_parser = parse_real)]
    a: f64,
    #[arg(long, value_parser = parse_real)]
    b: f64,
    #[arg(long, value_parser = parse_real)]
    lambda: f64,
    /// Two-sided residual tolerance.
    #[arg(long, value_parser = parse_real, default_value = "1e-8")]
    tol: f64,
}

#[derive(Args)]
struct MeansCmd {
    #[arg(long, value_parser = parse_real)]
    a: f64,
    #[arg(long, value_parser = parse_real)]
    b: f64,
    /// Comma-separated p-logarithmic exponents (-1 and 0 splice in L and I).
    #[arg(long, value_delimiter = ',', value_parser = parse_real, allow_hyphen_values = true)]
    p: Vec<f64>,
}

#[derive(Args)]
struct PropCmd {
    /// Proposition id, 1..=12.
    #[arg(long)]
    id: u8,
    #[arg(long, value_parser = parse_real)]
    a: f64,
    #[arg(long, value_parser = parse_real)]
    b: f64,
    #[arg(long, value_parser = parse_real, default_value = "1/3")]
    lambda: f64,
    #[arg(long, value_parser = parse_real, default_value = "2")]
    q: f64,
    #[arg(long, value_parser = parse_real)]
    p: Option<f64>,
    /// Power exponent for propositions 7-9.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    n: Option<f64>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SweepCmd {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
}

/// Reals parse as decimals or as `num/den` fractions, so lambda = 1/3 keeps
/// full double precision.
fn parse_real(s: &str) -> Result<f64, String> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
        let d: f64 = den.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(n / d);
    }
    s.trim().parse().map_err(|_| format!("bad number '{s}'"))
}

enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<BoundError> for CliError {
    fn from(err: BoundError) -> Self {
        match &err {
            BoundError::Quad(_) => CliError::Numeric(err.to_string()),
            BoundError::Coeff(CoeffError::Quad(_)) => CliError::Numeric(err.to_string()),
            BoundError::Convexity(ConvexityError::NonFiniteValue { .. }) => {
                CliError::Numeric(err.to_string())
            }
            _ => CliError::Usage(err.to_string()),
        }
    }
}

impl From<CoeffError> for CliError {
    fn from(err: CoeffError) -> Self {
        match &err {
            CoeffError::Quad(_) => CliError::Numeric(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(err: QuadError) -> Self {
        match &err {
            QuadError::BadRequest(_) => CliError::Usage(err.to_string()),
            _ => CliError::Numeric(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Coeff(args) => cmd_coeff(args, cli.format, cli.out.as_deref()),
        Command::Bound(args) => cmd_bound(args, cli.format, cli.out.as_deref()),
        Command::Identity(args) => cmd_identity(args, cli.format, cli.out.as_deref()),
        Command::Means(args) => cmd_means(args, cli.format, cli.out.as_deref()),
        Command::Prop(args) => cmd_prop(args, cli.format, cli.out.as_deref()),
        Command::Sweep(args) => cmd_sweep(args, cli.format, cli.out.as_deref()),
    }
}

fn require(name: &str, value: Option<f64>) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{name} is required for this coefficient set")))
}

fn lambda_of(value: f64) -> Result<LambdaWeight, CliError> {
    LambdaWeight::new(value).map_err(|e| CliError::Usage(e.to_string()))
}

fn interval_of(a: f64, b: f64) -> Result<Interval, CliError> {
    Interval::new(a, b).map_err(|e| CliError::Usage(e.to_string()))
}

fn function_of(name: &str) -> Result<FunctionSpec, CliError> {
    let parsed: CatalogName = name
        .parse()
        .map_err(|e: ConvexityError| CliError::Usage(e.to_string()))?;
    harmint::convexity::catalog(&parsed).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_coeff(
    args: CoeffCmd,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let set = match args.set {
        CoeffSetName::C123 => {
            let lambda = lambda_of(require("lambda", args.lambda)?)?;
            let (u, v) = (require("u", args.u)?, require("v", args.v)?);
            let (c1, c2, c3) = constants::coeff_c123(lambda, u, v)?;
            CoefficientSet {
                origin: "thm22".into(),
                args: CoeffPoint {
                    lambda: Some(lambda.get()),
                    u: Some(u),
                    v: Some(v),
                    ..CoeffPoint::default()
                },
                values: vec![("C1".into(), c1), ("C2".into(), c2), ("C3".into(), c3)],
            }
        }
        CoeffSetName::C456 => {
            let lambda = lambda_of(require("lambda", args.lambda)?)?;
            let (p, q) = (require("p", args.p)?, require("q", args.q)?);
            let (u, v) = (require("u", args.u)?, require("v", args.v)?);
            let (c4, c5, c6) = constants::coeff_c456(lambda, p, q, u, v)?;
            CoefficientSet {
                origin: "thm24".into(),
                args: CoeffPoint {
                    lambda: Some(lambda.get()),
                    p: Some(p),
                    q: Some(q),
                    u: Some(u),
                    v: Some(v),
                },
                values: vec![("C4".into(), c4), ("C5".into(), c5), ("C6".into(), c6)],
            }
        }
        CoeffSetName::C1Holder => {
            let lambda = lambda_of(require("lambda", args.lambda)?)?;
            let p = require("p", args.p)?;
            let (u, v) = (require("u", args.u)?, require("v", args.v)?);
            let c1h = constants::coeff_c1_holder(lambda, p, u, v, 1e-10)?;
            CoefficientSet {
                origin: "thm23".into(),
                args: CoeffPoint {
                    lambda: Some(lambda.get()),
                    p: Some(p),
                    u: Some(u),
                    v: Some(v),
                    ..CoeffPoint::default()
                },
                values: vec![("C1_holder".into(), c1h)],
            }
        }
        CoeffSetName::Intro => {
            let interval = interval_of(require("a", args.a)?, require("b", args.b)?)?;
            let (l1, l2, l3) = constants::lambda_coeffs(&interval);
            let mut values = vec![
                ("lambda1".into(), l1),
                ("lambda2".into(), l2),
                ("lambda3".into(), l3),
            ];
            if let Some(q) = args.q {
                let (mu1, mu2) = constants::mu_coeffs(q, &interval)?;
                values.push(("mu1".into(), mu1));
                values.push(("mu2".into(), mu2));
            }
            CoefficientSet {
                origin: "thm14/thm15".into(),
                args: CoeffPoint {
                    q: args.q,
                    u: Some(interval.a()),
                    v: Some(interval.b()),
                    ..CoeffPoint::default()
                },
                values,
            }
        }
    };

    output::print_coefficients(&set, format);
    if let Some(path) = out {
        MachineReport::for_coefficients(&set).write(path)?;
    }
    Ok(0)
}

fn eval_options(force: bool) -> EvalOptions {
    EvalOptions {
        allow_uncertified: force,
        ..EvalOptions::default()
    }
}

fn cmd_bound(
    args: BoundCmd,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let fs = function_of(&args.function)?;
    let interval = interval_of(args.a, args.b)?;
    let opts = eval_options(args.force);
    let lambda = lambda_of(args.lambda.unwrap_or(1.0 / 3.0))?;
    let q = args.q.unwrap_or(1.0);
    let holder = |q: f64| -> Result<ExponentPair, CliError> {
        match args.p {
            Some(p) => ExponentPair::holder(p, q).map_err(|e| CliError::Usage(e.to_string())),
            None => ExponentPair::holder_from_q(q).map_err(|e| CliError::Usage(e.to_string())),
        }
    };

    let evaluated: Result<Vec<BoundVerdict>, BoundError> = match args.thm.as_str() {
        "14" | "thm14" => bounds::bound_thm14(&fs, &interval, q, &opts).map(|v| vec![v]),
        "15" | "thm15" => bounds::bound_thm15(&fs, &interval, &holder(q)?, &opts).map(|v| vec![v]),
        "22" | "thm22" => bounds::bound_thm22(&fs, &interval, lambda, q, &opts).map(|v| vec![v]),
        "23" | "thm23" => {
            bounds::bound_thm23(&fs, &interval, lambda, &holder(q)?, &opts).map(|v| vec![v])
        }
        "24" | "thm24" => {
            bounds::bound_thm24(&fs, &interval, lambda, &holder(q)?, &opts).map(|v| vec![v])
        }
        "hh" | "hh13" => bounds::verify_hh_harmonic(&fs, &interval, &opts).map(|(l, r)| vec![l, r]),
        "classical-hh" => {
            bounds::verify_classical(&fs, &interval, bounds::ClassicalKind::HermiteHadamard, &opts)
        }
        "classical-simpson" => {
            bounds::verify_classical(&fs, &interval, bounds::ClassicalKind::Simpson, &opts)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --thm '{other}' (expected 14, 15, 22, 23, 24, hh, \
                 classical-hh or classical-simpson)"
            )))
        }
    };

    match evaluated {
        Ok(verdicts) => {
            output::print_verdicts(&verdicts, format);
            if let Some(path) = out {
                MachineReport::for_verdicts(&verdicts).write(path)?;
            }
            Ok(if verdicts.iter().all(|v| v.passed) { 0 } else { 1 })
        }
        Err(BoundError::PreconditionUnmet(reason)) => {
            println!("UNMET: {reason}");
            if let Some(path) = out {
                MachineReport::for_unmet(&reason).write(path)?;
            }
            Ok(1)
        }
        Err(err) => Err(err.into()),
    }
}

fn cmd_identity(
    args: IdentityCmd,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let fs = function_of(&args.function)?;
    let interval = interval_of(args.a, args.b)?;
    let lambda = lambda_of(args.lambda)?;
    if args.tol <= 0.0 || args.tol.is_nan() {
        return Err(CliError::Usage(format!(
            "--tol must be positive (got {})",
            args.tol
        )));
    }
    let mut opts = EvalOptions::default();
    opts.tolerances.identity = args.tol;
    let verdict = bounds::verify_identity_lemma21(&fs, &interval, lambda, &opts)?;

    println!(
        "identity residual |lhs - rhs| = {:e} (tolerance {:e})",
        -verdict.slack,
        args.tol
    );
    output::print_verdicts(std::slice::from_ref(&verdict), format);
    if let Some(path) = out {
        MachineReport::for_verdicts(std::slice::from_ref(&verdict)).write(path)?;
    }
    Ok(if verdict.passed { 0 } else { 1 })
}

fn cmd_means(
    args: MeansCmd,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let interval = interval_of(args.a, args.b)?;
    let plain: Vec<f64> = args
        .p
        .iter()
        .copied()
        .filter(|&p| p != -1.0 && p != 0.0)
        .collect();
    let set =
        means::compute_means(&interval, &plain).map_err(|e| CliError::Usage(e.to_string()))?;
    let verdicts = means::check_mean_relations(&interval, &args.p, 1e-9)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    output::print_means(&set, format);
    output::print_verdicts(&verdicts, format);
    if let Some(path) = out {
        MachineReport::for_means(&set, &verdicts).write(path)?;
    }
    Ok(if verdicts.iter().all(|v| v.passed) { 0 } else { 1 })
}

fn cmd_prop(args: PropCmd, format: Format, out: Option<&std::path::Path>) -> Result<u8, CliError> {
    let interval = interval_of(args.a, args.b)?;
    let lambda = lambda_of(args.lambda)?;
    let opts = eval_options(args.force);
    let exps = if args.id.wrapping_sub(1).is_multiple_of(3) {
        ExponentPair::power_mean(args.q).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        match args.p {
            Some(p) => ExponentPair::holder(p, args.q).map_err(|e| CliError::Usage(e.to_string()))?,
            None => {
                ExponentPair::holder_from_q(args.q).map_err(|e| CliError::Usage(e.to_string()))?
            }
        }
    };

    match means::check_proposition(args.id, &interval, lambda, &exps, args.n, &opts) {
        Ok(report) => {
            output::print_proposition(&report, format);
            if let Some(path) = out {
                MachineReport::for_proposition(&report).write(path)?;
            }
            Ok(if report.printed.passed && report.theorem.passed {
                0
            } else {
                1
            })
        }
        Err(BoundError::PreconditionUnmet(reason)) => {
            println!("UNMET: {reason}");
            if let Some(path) = out {
                MachineReport::for_unmet(&reason).write(path)?;
            }
            Ok(1)
        }
        Err(err) => Err(err.into()),
    }
}

fn cmd_sweep(
    args: SweepCmd,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed sweep config: {e}")))?;
    let report = run_sweep(&config).map_err(|e| CliError::Usage(e.to_string()))?;

    output::print_sweep(&report, format);
    // The --out flag wins over the config's own report path.
    let config_out = config.out.as_ref().map(PathBuf::from);
    if let Some(path) = out.map(PathBuf::from).or(config_out) {
        MachineReport::for_sweep(&report).write(&path)?;
    }
    let failed: usize = report.summary.iter().map(|s| s.fail).sum();
    Ok(if failed == 0 { 0 } else { 1 })
}
