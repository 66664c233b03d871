//! Selective sign-determining confidence intervals with false coverage rate
//! (FCR) control.
//!
//! The library builds marginal confidence-interval families that can determine
//! the sign of a location parameter early (quasi-conventional and modified
//! quasi-conventional intervals, plus symmetric, one-sided, Pratt-style, and a
//! large-effect variant), and runs the FCR-adjusted step-up procedure that
//! selects a maximal set of units whose adjusted intervals determine the sign.
//! A two-dimensional extension handles dominance/recessiveness effects from
//! 2×3 case-control tables, and a Monte Carlo module estimates realized error
//! rates. Brute-force oracles (grid acceptance-region inversion, coverage
//! quadrature, naive step-up) back the fast paths in tests.

// Guards written as !(x > 0.0) are NaN-rejecting on purpose, and frozen
// reference constants keep their full published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod bivariate;
pub mod dist;
pub mod error;
pub mod interval;
pub mod marginal;
pub mod oracle;
pub mod selection;
pub mod sim;

pub use error::{Error, Result};
pub use interval::{classify, classify_outside, BandSide, Interval, SignDecision};
pub use marginal::{FamilyKind, LevelRule, MarginalFamily};
