//! Shared numerical kernels.

mod bernoulli;
mod quadrature;
mod roots;
mod series;

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GmlError, Result};

pub use bernoulli::{bernoulli_number_exact, bernoulli_numbers, bernoulli_polynomial, MAX_BERNOULLI_INDEX};
pub use quadrature::{integrate_finite, integrate_semi_infinite, try_integrate_finite, try_integrate_semi_infinite};
pub use roots::{find_root_increasing, try_find_root_increasing};
pub use series::{alternating_series_sum, try_alternating_series_sum, SeriesSpec};

/// Environment variable that overrides the default relative quadrature tolerance.
pub const QUAD_TOL_ENV: &str = "GML_QUAD_TOL";

const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Parses a tolerance the way the `GML_QUAD_TOL` override is parsed.
pub fn parse_tolerance(raw: &str) -> Option<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|t| t.is_finite() && *t > 0.0 && *t < 1.0)
}

fn default_relative_tolerance() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var(QUAD_TOL_ENV)
            .ok()
            .and_then(|raw| parse_tolerance(&raw))
            .unwrap_or(DEFAULT_RELATIVE_TOLERANCE)
    })
}

/// Stopping rule for the double-exponential quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Number of step halvings after the initial unit step.
    pub max_refinement_levels: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: default_relative_tolerance(),
            absolute_tolerance: 1e-300,
            max_refinement_levels: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_refinement_levels: u32) -> Result<Self> {
        let spec = QuadratureSpec {
            relative_tolerance,
            absolute_tolerance,
            max_refinement_levels,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_relative_tolerance(mut self, relative_tolerance: f64) -> Self {
        self.relative_tolerance = relative_tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(GmlError::domain("relative tolerance must be positive"));
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return Err(GmlError::domain("absolute tolerance must be positive"));
        }
        if self.max_refinement_levels < 1 {
            return Err(GmlError::domain("at least one refinement level is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Quadrature,
    ClosedForm,
}

/// A computed scalar together with a heuristic error estimate and the
/// method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericValue<T = f64> {
    pub value: T,
    pub error_estimate: f64,
    pub method: Method,
}

impl<T> NumericValue<T> {
    pub fn closed_form(value: T) -> Self {
        NumericValue {
            value,
            error_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> NumericValue<U> {
        NumericValue {
            value: f(self.value),
            error_estimate: self.error_estimate,
            method: self.method,
        }
    }
}

/// Values the quadrature and series kernels can accumulate.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    const ZERO: Self;

    fn magnitude(&self) -> f64;

    fn is_finite_value(&self) -> bool;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
