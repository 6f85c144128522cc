//! Generalized elliptically symmetric logistic (GML) distributions.
//!
//! The family has density `d_n |Σ|^{-1/2} g((x-μ)ᵀΣ⁻¹(x-μ))` with density
//! generator `g(u) = exp(-b u) / (1 + exp(-a u))^r`. The classic elliptically
//! symmetric logistic law is `a = b = 1, r = 2`; the multivariate normal is
//! `b = 1/2, r = 0`.
//!
//! Module map:
//!
//! - [`numerics`]: double-exponential quadrature, accelerated alternating
//!   series, bracketed root finding, Bernoulli numbers and polynomials.
//! - [`specfun`]: Riemann zeta and the generalized Hurwitz-Lerch zeta `Φ*_μ`.
//! - [`generator`]: the density generator, normalizing constants, derived
//!   generators and the radial law of `R`.
//! - [`distribution`]: [`GmlDistribution`] with density, sampling, moments
//!   and characteristic functions.
//! - [`transforms`]: affine maps, projections, marginals and conditionals.
//! - [`validation`]: Monte Carlo and quadrature cross-checks.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod error;
pub mod generator;
pub mod linalg;
pub mod numerics;
pub mod parallel;
pub mod specfun;
pub mod transforms;
pub mod validation;

pub use distribution::{GmlDistribution, SampleBatch};
pub use error::{GmlError, Result};
pub use generator::{GeneratorParams, RadialLaw};
pub use numerics::{Method, NumericValue, QuadratureSpec};
pub use parallel::Execution;
pub use transforms::EllipticalLaw;
pub use validation::ValidationReport;
