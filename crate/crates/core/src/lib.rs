//! Verification machinery for the Hermite-Hadamard and Simpson-type
//! inequalities satisfied by harmonically convex functions.
//!
//! The crate evaluates the lambda-weighted deviation functional
//! `|(1-lambda) f(2ab/(a+b)) + lambda (f(a)+f(b))/2 - (ab/(b-a)) int f/x^2|`,
//! the closed-form coefficient families bounding it, and the special-means
//! corollaries, and certifies each of them empirically against brute-force
//! quadrature oracles:
//!
//! - [`numerics`]: adaptive Gauss-Kronrod quadrature and the weighted kernel
//!   integrals every closed form is checked against.
//! - [`domain`]: validated value types (intervals, weights, exponent pairs,
//!   function specs, verdicts).
//! - [`constants`]: the closed-form bound coefficients.
//! - [`convexity`]: empirical harmonic-convexity certification and the
//!   function catalog.
//! - [`bounds`]: the deviation functional, its integral identity, and the
//!   bound theorems.
//! - [`means`]: special means, their ordering chain, and the proposition
//!   checkers.
//! - [`sweep`]: seeded batch campaigns with machine-readable reports.
//!
//! ```
//! use harmint::bounds::{bound_thm22, EvalOptions};
//! use harmint::convexity::{catalog, CatalogName};
//! use harmint::{Interval, LambdaWeight};
//!
//! let f = catalog(&CatalogName::Square)?;
//! let interval = Interval::new(1.0, 2.0)?;
//! let verdict = bound_thm22(
//!     &f,
//!     &interval,
//!     LambdaWeight::simpson(),
//!     2.0,
//!     &EvalOptions::default(),
//! )?;
//! assert!(verdict.passed && verdict.slack > 0.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bounds;
pub mod constants;
pub mod convexity;
pub mod domain;
pub mod means;
pub mod numerics;
pub mod sweep;

pub use bounds::{BoundError, ClassicalKind, DeviationParts, EvalOptions};
pub use constants::{CoeffError, CoefficientSet, IntroCoeffs};
pub use convexity::{CatalogName, ConvexityError, ConvexityReport};
pub use domain::{
    BoundVerdict, DomainError, ExponentPair, FunctionSpec, Interval, LambdaWeight, Tolerances,
    VerdictInputs,
};
pub use means::{MeanError, MeanSet, PropositionReport};
pub use numerics::{QuadError, QuadratureResult};
pub use sweep::{SweepConfig, SweepError, SweepReport, TheoremKind};
