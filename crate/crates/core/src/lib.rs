//! Minimax estimation of additive functionals `θ(P) = Σ φ(p_i)` over large
//! discrete alphabets.
//!
//! The crate is organised around the pieces of the estimation problem:
//!
//! * [`functional`]: the functional `φ`, its derivatives, the truncation
//!   operator and the bias-corrected surrogates used by plugin estimators.
//! * [`poly`]: finite differences, moduli of smoothness, Bernstein operators
//!   and a Remez exchange solver for best uniform polynomial approximation.
//! * [`estimators`]: sampling models, sample splitting, the best-polynomial
//!   and bias-corrected plugin estimators, and the composite estimator that
//!   switches between them per symbol.
//! * [`lower_bounds`]: two-point and fuzzy-hypothesis lower-bound
//!   constructions, evaluated numerically.
//! * [`risk`]: a Monte Carlo risk lab with distribution families, rate
//!   oracles and log-log slope fitting.

pub mod error;
pub mod estimators;
pub mod functional;
pub mod lower_bounds;
pub mod numeric;
pub mod poly;
pub mod risk;

pub use error::{Error, Result};
pub use functional::{Functional, FunctionalSpec, ProbabilityVector};
pub use poly::{ApproxResult, Interval, Polynomial};
