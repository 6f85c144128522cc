//! Summation of alternating series with Euler acceleration.

use super::{CompensatedSum, Method, NumericValue};
use crate::error::{GmlError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    /// Relative tolerance for both the tail-magnitude stop and the
    /// accelerated estimate.
    pub tolerance: f64,
    /// Partial sums fed to the Euler averaging table.
    pub euler_terms: usize,
    /// Index after which a non-decreasing run of terms counts as divergence.
    pub divergence_check_start: usize,
    /// Length of that run.
    pub divergence_window: usize,
    pub max_terms: usize,
    /// Rounding floor for the accelerated estimate, relative to the largest
    /// partial sum seen.
    pub noise_floor: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec {
            tolerance: 1e-14,
            euler_terms: 64,
            divergence_check_start: 64,
            divergence_window: 32,
            max_terms: 2_000_000,
            noise_floor: 64.0 * f64::EPSILON,
        }
    }
}

struct Monitor<'a> {
    spec: &'a SeriesSpec,
    prev_magnitude: f64,
    run: usize,
}

impl Monitor<'_> {
    /// Records `|a_j|`; returns whether it decreased.
    fn observe(&mut self, j: usize, magnitude: f64) -> Result<bool> {
        let decreasing = magnitude < self.prev_magnitude;
        if decreasing {
            self.run = 0;
        } else {
            self.run += 1;
        }
        self.prev_magnitude = magnitude;
        if j > self.spec.divergence_check_start && self.run >= self.spec.divergence_window {
            return Err(GmlError::Divergence(format!(
                "term magnitudes did not decrease over {} consecutive indices up to index {j}",
                self.run
            )));
        }
        Ok(decreasing)
    }
}

/// Sum of `Σ_{j≥1} term(j)` for a series whose terms eventually alternate in
/// sign with decreasing magnitude.
///
/// Terms are summed directly until they start to decrease. If they are not
/// negligible by then, the next `euler_terms` partial sums are averaged
/// pairwise repeatedly (the Euler transform of the partial-sum sequence).
pub fn try_alternating_series_sum<F>(term: F, spec: &SeriesSpec) -> Result<NumericValue>
where
    F: Fn(usize) -> Result<f64>,
{
    if spec.euler_terms < 2 || !(spec.tolerance > 0.0) {
        return Err(GmlError::domain(
            "series spec needs tolerance > 0 and at least two Euler terms",
        ));
    }
    let mut monitor = Monitor {
        spec,
        prev_magnitude: f64::INFINITY,
        run: 0,
    };
    let mut sum = CompensatedSum::new();
    let next = |j: usize, sum: &mut CompensatedSum| -> Result<f64> {
        let a = term(j)?;
        if !a.is_finite() {
            return Err(GmlError::Domain(format!("series term {j} is not finite")));
        }
        sum.add(a);
        Ok(a.abs())
    };

    let mut j = 1;
    loop {
        let magnitude = next(j, &mut sum)?;
        if magnitude <= spec.tolerance * sum.value().abs() {
            return Ok(NumericValue {
                value: sum.value(),
                error_estimate: magnitude,
                method: Method::Series,
            });
        }
        let decreasing = monitor.observe(j, magnitude)?;
        if decreasing && j >= 2 {
            break;
        }
        j += 1;
        if j > spec.max_terms {
            return Err(GmlError::Convergence {
                what: "alternating series",
                estimate: sum.value(),
                error_estimate: magnitude,
            });
        }
    }

    let mut partials = Vec::with_capacity(spec.euler_terms);
    partials.push(sum.value());
    let mut largest = sum.value().abs();
    while partials.len() < spec.euler_terms {
        j += 1;
        let magnitude = next(j, &mut sum)?;
        let s = sum.value();
        if magnitude <= spec.tolerance * s.abs() {
            return Ok(NumericValue {
                value: s,
                error_estimate: magnitude,
                method: Method::Series,
            });
        }
        monitor.observe(j, magnitude)?;
        largest = largest.max(s.abs());
        partials.push(s);
    }

    // Repeated pairwise averaging; `row[0]` after k passes is the k-fold
    // binomial mean of the first k+1 partial sums.
    let n = partials.len();
    let mut row = partials;
    let mut previous_top = row[0];
    let mut previous_second = row[1];
    for pass in 1..n {
        if pass == n - 1 {
            previous_top = row[0];
            previous_second = row[1];
        }
        for i in 0..n - pass {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
    }
    let value = row[0];
    let error_estimate = (value - previous_top).abs().max((value - previous_second).abs());
    let floor = spec.noise_floor * largest;
    if error_estimate <= (spec.tolerance * value.abs()).max(floor) {
        Ok(NumericValue {
            value,
            error_estimate,
            method: Method::Series,
        })
    } else {
        Err(GmlError::Convergence {
            what: "Euler-accelerated series",
            estimate: value,
            error_estimate,
        })
    }
}

/// Infallible-term form of [`try_alternating_series_sum`].
pub fn alternating_series_sum<F>(term: F, spec: &SeriesSpec) -> Result<NumericValue>
where
    F: Fn(usize) -> f64,
{
    try_alternating_series_sum(|j| Ok(term(j)), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    fn sign(j: usize) -> f64 {
        if j % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn alternating_harmonic_is_ln2() {
        let v = alternating_series_sum(|j| sign(j) / j as f64, &SeriesSpec::default()).unwrap();
        assert_relative_eq!(v.value, LN_2, max_relative = 1e-13);
        assert_eq!(v.method, Method::Series);
    }

    #[test]
    fn alternating_inverse_squares() {
        let v = alternating_series_sum(|j| sign(j) / (j * j) as f64, &SeriesSpec::default()).unwrap();
        assert_relative_eq!(v.value, PI * PI / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn growing_terms_diverge() {
        let err = alternating_series_sum(|j| sign(j) * (j as f64).sqrt(), &SeriesSpec::default()).unwrap_err();
        assert!(matches!(err, GmlError::Divergence(_)));
        let err = alternating_series_sum(sign, &SeriesSpec::default()).unwrap_err();
        assert!(matches!(err, GmlError::Divergence(_)));
    }

    #[test]
    fn geometric_series_stops_on_tail() {
        let v = alternating_series_sum(|j| sign(j) * 0.5f64.powi(j as i32), &SeriesSpec::default()).unwrap();
        assert_relative_eq!(v.value, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn late_peak_with_raised_divergence_start() {
        // j^2 e^{-0.01 j} peaks at j = 200.
        let spec = SeriesSpec {
            divergence_check_start: 400,
            ..SeriesSpec::default()
        };
        let x: f64 = 0.01;
        let v = alternating_series_sum(|j| sign(j) * (j * j) as f64 * (-x * j as f64).exp(), &spec).unwrap();
        // Σ (-1)^{j-1} j² q^j = q(1-q)/(1+q)^3 with q = e^{-x}
        let q = (-x).exp();
        let exact = q * (1.0 - q) / (1.0 + q).powi(3);
        assert!((v.value - exact).abs() < 1e-9);
        // The default rule treats the long rise as divergence.
        assert!(alternating_series_sum(
            |j| sign(j) * (j * j) as f64 * (-x * j as f64).exp(),
            &SeriesSpec::default()
        )
        .is_err());
    }
}
