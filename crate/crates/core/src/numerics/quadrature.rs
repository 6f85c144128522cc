//! Double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh map `x = mid + half·tanh(π/2·sinh t)`.
//! The half line `(0, ∞)` is split at 1: tanh-sinh on `(0, 1)` and the
//! exp-sinh map `x = 1 + exp(π/2·sinh t)` on `(1, ∞)`. Both maps decay
//! doubly exponentially towards the endpoints, which absorbs algebraic
//! endpoint singularities. Each refinement level halves the step and only
//! evaluates the new (odd) nodes.

use std::f64::consts::FRAC_PI_2;

use super::{Method, NumericValue, QuadratureSpec, Scalar};
use crate::error::{GmlError, Result};

/// Truncation of the transformed variable. Beyond |t| = 4 the tanh-sinh
/// weights are below 1e-35 and the exp-sinh abscissae exceed 1e18.
const T_MAX: f64 = 4.0;
const MIN_LEVELS: u32 = 3;

/// Sum of `h · Σ c(t_k)` over all rules, refined until two successive levels agree.
fn double_exponential<T, R>(rules: &[R], spec: &QuadratureSpec, what: &'static str) -> Result<NumericValue<T>>
where
    T: Scalar,
    R: Fn(f64) -> Result<T>,
{
    spec.validate()?;
    let mut sum = T::ZERO;
    let mut l1 = 0.0;
    let eval = |t: f64, sum: &mut T, l1: &mut f64| -> Result<()> {
        for rule in rules {
            let c = rule(t)?;
            *sum = *sum + c;
            *l1 += c.magnitude();
        }
        Ok(())
    };

    let n0 = T_MAX as i64;
    for k in -n0..=n0 {
        eval(k as f64, &mut sum, &mut l1)?;
    }
    let mut h = 1.0;
    let mut estimate = sum * h;
    let mut diff = f64::INFINITY;

    for level in 1..=spec.max_refinement_levels {
        h *= 0.5;
        let steps = (T_MAX / h) as i64;
        let mut k = 1;
        while k <= steps {
            let t = k as f64 * h;
            eval(t, &mut sum, &mut l1)?;
            eval(-t, &mut sum, &mut l1)?;
            k += 2;
        }
        let next = sum * h;
        diff = (next - estimate).magnitude();
        estimate = next;

        let noise = 64.0 * f64::EPSILON * h * l1;
        let target = (spec.relative_tolerance * estimate.magnitude())
            .max(spec.absolute_tolerance)
            .max(noise);
        if level >= MIN_LEVELS && diff <= target {
            return Ok(NumericValue {
                value: estimate,
                error_estimate: diff,
                method: Method::Quadrature,
            });
        }
    }

    Err(GmlError::Convergence {
        what,
        estimate: estimate.magnitude(),
        error_estimate: diff,
    })
}

fn checked<T: Scalar>(v: T, x: f64) -> Result<T> {
    if v.is_finite_value() {
        Ok(v)
    } else {
        Err(GmlError::Domain(format!("integrand is not finite at x = {x:e}")))
    }
}

/// Tanh-sinh contribution `w(t)·f(x(t))` on `(lo, hi)`.
fn tanh_sinh_node<T, F>(f: &F, lo: f64, hi: f64, t: f64) -> Result<T>
where
    T: Scalar,
    F: Fn(f64) -> Result<T>,
{
    let half = 0.5 * (hi - lo);
    let s = FRAC_PI_2 * t.sinh();
    let ch = s.cosh();
    if !ch.is_finite() {
        return Ok(T::ZERO);
    }
    let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
    if w == 0.0 {
        return Ok(T::ZERO);
    }
    // Distance to the nearer endpoint, computed without cancellation.
    let x = if s < 0.0 {
        lo + 2.0 * half / (1.0 + (-2.0 * s).exp())
    } else {
        hi - 2.0 * half / (1.0 + (2.0 * s).exp())
    };
    if !(x > lo && x < hi) {
        return Ok(T::ZERO);
    }
    Ok(checked(f(x)?, x)? * w)
}

/// Exp-sinh contribution on `(origin, ∞)`.
fn exp_sinh_node<T, F>(f: &F, origin: f64, t: f64) -> Result<T>
where
    T: Scalar,
    F: Fn(f64) -> Result<T>,
{
    let s = FRAC_PI_2 * t.sinh();
    let e = s.exp();
    if !e.is_finite() {
        return Ok(T::ZERO);
    }
    let x = origin + e;
    if x == origin {
        return Ok(T::ZERO);
    }
    let v = checked(f(x)?, x)?;
    if v.magnitude() == 0.0 {
        return Ok(T::ZERO);
    }
    Ok(v * (FRAC_PI_2 * t.cosh() * e))
}

/// Integral of a fallible integrand over `(lo, hi)`.
pub fn try_integrate_finite<T, F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<NumericValue<T>>
where
    T: Scalar,
    F: Fn(f64) -> Result<T>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(GmlError::Domain(format!("invalid interval ({lo}, {hi})")));
    }
    let rule = |t: f64| tanh_sinh_node(&f, lo, hi, t);
    double_exponential(&[rule], spec, "finite-interval quadrature")
}

/// Integral of `f` over `(lo, hi)`; `f` may have integrable endpoint singularities.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<NumericValue>
where
    F: Fn(f64) -> f64,
{
    try_integrate_finite(|x| Ok(f(x)), lo, hi, spec)
}

/// Integral of a fallible integrand over `(0, ∞)`.
///
/// `endpoint_exponent` describes the behaviour `f(t) ~ t^e` at the origin.
/// For `e ∈ (-1, 0)` the piece on `(0, 1)` is rewritten with `t = u^{1/(1+e)}`,
/// which turns the singular integrand into a bounded one.
pub fn try_integrate_semi_infinite<T, F>(f: F, endpoint_exponent: f64, spec: &QuadratureSpec) -> Result<NumericValue<T>>
where
    T: Scalar,
    F: Fn(f64) -> Result<T>,
{
    if !(endpoint_exponent > -1.0) || !endpoint_exponent.is_finite() {
        return Err(GmlError::Domain(format!(
            "endpoint exponent must exceed -1, got {endpoint_exponent}"
        )));
    }
    let power = if endpoint_exponent < 0.0 {
        1.0 / (1.0 + endpoint_exponent)
    } else {
        1.0
    };
    let head = |u: f64| -> Result<T> {
        if power == 1.0 {
            return f(u);
        }
        let t = u.powf(power);
        if t == 0.0 {
            return Ok(T::ZERO);
        }
        Ok(f(t)? * (power * t / u))
    };
    let near = |t: f64| tanh_sinh_node(&head, 0.0, 1.0, t);
    let far = |t: f64| exp_sinh_node(&f, 1.0, t);
    let rules: [&dyn Fn(f64) -> Result<T>; 2] = [&near, &far];
    double_exponential(&rules, spec, "semi-infinite quadrature")
}

/// Integral of `f` over `(0, ∞)`. See [`try_integrate_semi_infinite`].
pub fn integrate_semi_infinite<F>(f: F, endpoint_exponent: f64, spec: &QuadratureSpec) -> Result<NumericValue>
where
    F: Fn(f64) -> f64,
{
    try_integrate_semi_infinite(|x| Ok(f(x)), endpoint_exponent, spec)
}
