//! Probabilistic root bounds for random polynomials with independent
//! standard normal coefficients.
//!
//! * [`specfun`]: `erf`, `erfinv` and the CDFs of `|N(0,1)|` and `|X₁/X₂|`.
//! * [`polynomial`]: deterministic Cauchy bounds and an Aberth–Ehrlich root finder.
//! * [`bounds`]: closed-form lower/upper probabilities for a radius, and the
//!   radius achieving a requested probability.
//! * [`kac`]: expected number of real zeros (integral, asymptotic, Monte Carlo).
//! * [`montecarlo`]: reproducible ensemble sampling and empirical estimators.
//! * [`cli`]: the command implementations behind the `polybound` binary.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod kac;
pub mod montecarlo;
pub mod polynomial;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
