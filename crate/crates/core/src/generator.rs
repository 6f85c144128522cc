//! The density generator `g(u) = exp(-b u) / (1 + exp(-a u))^r`, its
//! normalizing constants, the generators of marginal and conditional laws, and
//! the law of the squared radius `R` in `X = μ + √R A u`.

use std::cell::Cell;
use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{GmlError, Result};
use crate::numerics::{
    integrate_finite, integrate_semi_infinite, try_alternating_series_sum, try_find_root_increasing, Method,
    NumericValue, QuadratureSpec, SeriesSpec,
};
use crate::specfun::{phi_star, phi_star_quadrature, riemann_zeta, zeta_even, zeta_odd_integral, PhiStarArgs};

/// Proposals drawn by the radial rejection sampler before it gives up.
pub const MAX_REJECTION_PROPOSALS: usize = 1_000_000;

/// Parameters `(a, b, r)` of the generator.
///
/// `r = 0` is admitted: with `b = 1/2` it gives the multivariate normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorParams {
    a: f64,
    b: f64,
    r: f64,
}

impl GeneratorParams {
    pub fn new(a: f64, b: f64, r: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(GmlError::Domain(format!("a must be positive, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(GmlError::Domain(format!("b must be positive, got {b}")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(GmlError::Domain(format!("r must be nonnegative, got {r}")));
        }
        Ok(GeneratorParams { a, b, r })
    }

    /// The classic elliptically symmetric logistic generator, `a = b = 1, r = 2`.
    pub fn logistic() -> Self {
        GeneratorParams { a: 1.0, b: 1.0, r: 2.0 }
    }

    /// `b = 1/2, r = 0`: the multivariate normal.
    pub fn normal() -> Self {
        GeneratorParams { a: 1.0, b: 0.5, r: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_normal(&self) -> bool {
        self.r == 0.0 && self.b == 0.5
    }

    /// `ln g(u)` for `u ≥ 0`, without range checks.
    #[inline]
    pub fn ln_g(&self, u: f64) -> f64 {
        let tail = if self.r == 0.0 {
            0.0
        } else {
            self.r * (-self.a * u).exp().ln_1p()
        };
        -self.b * u - tail
    }

    /// `g(u)` for `u ≥ 0`, without range checks. Evaluated from `ln g`, so
    /// it underflows to zero only when `g` itself is below the smallest
    /// subnormal.
    #[inline]
    pub fn g(&self, u: f64) -> f64 {
        self.ln_g(u).exp()
    }

    /// `Φ*_r(-1, s, b/a)`.
    pub fn phi_star_minus_one(&self, s: f64) -> Result<f64> {
        phi_star(&PhiStarArgs::new(-1.0, s, self.b / self.a, self.r)?).map(|v| v.value.re)
    }

    /// `Φ*_r(-1, s, b/a)` with an explicit quadrature rule.
    pub fn phi_star_minus_one_with(&self, s: f64, spec: &QuadratureSpec) -> Result<f64> {
        let args = PhiStarArgs::new(-1.0, s, self.b / self.a, self.r)?;
        if self.r == 0.0 {
            return Ok((self.a / self.b).powf(s));
        }
        phi_star_quadrature(&args, spec).map(|v| v.value.re)
    }
}

fn check_nonnegative(name: &str, u: f64) -> Result<()> {
    if !(u >= 0.0) || u.is_infinite() {
        return Err(GmlError::Domain(format!(
            "{name} must be a finite nonnegative number, got {u}"
        )));
    }
    Ok(())
}

pub fn generator_g(u: f64, params: &GeneratorParams) -> Result<f64> {
    check_nonnegative("u", u)?;
    Ok(params.g(u))
}

pub fn log_generator_g(u: f64, params: &GeneratorParams) -> Result<f64> {
    check_nonnegative("u", u)?;
    Ok(params.ln_g(u))
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GmlError::domain("dimension must be at least 1"));
    }
    Ok(())
}

/// `∫_0^∞ t^{n/2-1} g(t) dt = a^{-n/2} Γ(n/2) Φ*_r(-1, n/2, b/a)`.
pub fn radial_integral(n: usize, params: &GeneratorParams) -> Result<f64> {
    check_dim(n)?;
    let s = n as f64 / 2.0;
    Ok((ln_gamma(s) - s * params.a.ln()).exp() * params.phi_star_minus_one(s)?)
}

/// The same integral by direct quadrature.
pub fn radial_integral_quadrature(n: usize, params: &GeneratorParams) -> Result<NumericValue> {
    check_dim(n)?;
    let e = n as f64 / 2.0 - 1.0;
    let p = *params;
    integrate_semi_infinite(move |t| (e * t.ln() + p.ln_g(t)).exp(), e, &QuadratureSpec::default())
}

/// `d_n = (a/π)^{n/2} / Φ*_r(-1, n/2, b/a)`.
pub fn norm_const_d(n: usize, params: &GeneratorParams) -> Result<f64> {
    check_dim(n)?;
    let s = n as f64 / 2.0;
    Ok((s * (params.a / PI).ln()).exp() / params.phi_star_minus_one(s)?)
}

/// `d_n = Γ(n/2) π^{-n/2} / ∫ t^{n/2-1} g(t) dt` with the integral by quadrature.
pub fn norm_const_d_quadrature(n: usize, params: &GeneratorParams) -> Result<f64> {
    let s = n as f64 / 2.0;
    let integral = radial_integral_quadrature(n, params)?.value;
    Ok((ln_gamma(s) - s * PI.ln()).exp() / integral)
}

/// `c_n` of the classic logistic law written with `exp(-q/2)` in the
/// generator, from the closed forms where they exist.
pub fn norm_const_c(n: usize) -> Result<NumericValue> {
    check_dim(n)?;
    let nf = n as f64;
    match n {
        1 => {
            let phi = phi_star(&PhiStarArgs::new(-1.0, 0.5, 1.0, 2.0)?)?;
            Ok(NumericValue {
                value: (2.0 * PI).powf(-0.5) / phi.value.re,
                error_estimate: phi.error_estimate,
                method: phi.method,
            })
        }
        2 => Ok(NumericValue::closed_form(1.0 / PI)),
        4 => Ok(NumericValue::closed_form(1.0 / (4.0 * PI * PI * LN_2))),
        _ => {
            let k = nf / 2.0 - 1.0;
            let (zeta, method) = if n % 4 == 2 {
                (zeta_even((n / 2 - 1) as u32)?, Method::ClosedForm)
            } else {
                (riemann_zeta(k)?, Method::Series)
            };
            Ok(NumericValue {
                value: PI.powf(-nf / 2.0) / (((nf / 2.0) * LN_2).exp() - 4.0) / zeta,
                error_estimate: 0.0,
                method,
            })
        }
    }
}

/// `c_n` for `n = 4m+2` from the Bernoulli-number value of `ζ(2m)` and for
/// `n = 4m+4` from the Bernoulli-polynomial integral for `ζ(2m+1)`, `m ≥ 1`.
pub fn norm_const_c_bernoulli(n: usize) -> Result<NumericValue> {
    if n < 6 || !n.is_multiple_of(2) {
        return Err(GmlError::Domain(format!(
            "the Bernoulli route needs an even n ≥ 6, got {n}"
        )));
    }
    let nf = n as f64;
    let zeta_arg = (n / 2 - 1) as u32;
    let (zeta, error, method) = if n % 4 == 2 {
        (zeta_even(zeta_arg)?, 0.0, Method::ClosedForm)
    } else {
        let z = zeta_odd_integral(zeta_arg)?;
        (z.value, z.error_estimate, Method::Quadrature)
    };
    let scale = (2f64.powf(nf / 2.0) - 4.0) * PI.powf(nf / 2.0);
    Ok(NumericValue {
        value: 1.0 / (scale * zeta),
        error_estimate: error / (scale * zeta * zeta),
        method,
    })
}

/// `c_n = (2π)^{-n/2} / Σ_{j≥1} (-1)^{j-1} j^{1-n/2}`, the older series form
/// of the classic constant. The series diverges for `n = 1, 2`.
pub fn norm_const_c_landsman(n: usize) -> Result<f64> {
    check_dim(n)?;
    let exponent = 1.0 - n as f64 / 2.0;
    let sum = try_alternating_series_sum(
        |j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            Ok(sign * (j as f64).powf(exponent))
        },
        &SeriesSpec::default(),
    )?;
    Ok((2.0 * PI).powf(-(n as f64) / 2.0) / sum.value)
}

/// `g_(k)(t) = e^{-bt} a^{-s} Γ(s) Φ*_r(-e^{-at}, s, b/a)` with `s = (n-k)/2`:
/// the generator of any `k`-dimensional marginal of an `n`-dimensional law.
/// Equal to `∫_0^∞ y^{s-1} g(t+y) dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalGenerator {
    k: usize,
    n: usize,
    params: GeneratorParams,
    ln_prefactor: f64,
}

pub fn marginal_generator(k: usize, n: usize, params: &GeneratorParams) -> Result<MarginalGenerator> {
    if k == 0 || k >= n {
        return Err(GmlError::Domain(format!(
            "marginal generator needs 1 ≤ k < n, got k = {k}, n = {n}"
        )));
    }
    let s = (n - k) as f64 / 2.0;
    Ok(MarginalGenerator {
        k,
        n,
        params: *params,
        ln_prefactor: ln_gamma(s) - s * params.a.ln(),
    })
}

impl MarginalGenerator {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half the codimension, `(n-k)/2`.
    pub fn s(&self) -> f64 {
        (self.n - self.k) as f64 / 2.0
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        let p = &self.params;
        let z = -(-p.a * t).exp();
        let phi = phi_star(&PhiStarArgs::new(z, self.s(), p.b / p.a, p.r)?)?.value.re;
        Ok((self.ln_prefactor - p.b * t).exp() * phi)
    }

    /// `∫_0^∞ t^{k/2-1} g_(k)(t) dt = Γ(k/2) Γ(s) / Γ(n/2) · ∫_0^∞ t^{n/2-1} g(t) dt`.
    pub fn radial_integral(&self) -> Result<f64> {
        let (k, n) = (self.k as f64 / 2.0, self.n as f64 / 2.0);
        Ok((ln_gamma(k) + ln_gamma(self.s()) - ln_gamma(n)).exp() * radial_integral(self.n, &self.params)?)
    }
}

/// Closed form of `g_(n-2)` when `a = b`:
/// `(1/(a(r-1))) (1 - (1+e^{-at})^{1-r})`, or `(1/a) ln(1+e^{-at})` at `r = 1`.
pub fn codim_two_closed_form(t: f64, params: &GeneratorParams) -> Result<f64> {
    check_nonnegative("t", t)?;
    if params.a != params.b {
        return Err(GmlError::domain("the codimension-two closed form needs a = b"));
    }
    let a = params.a;
    let x = (-a * t).exp().ln_1p();
    if params.r == 1.0 {
        Ok(x / a)
    } else {
        let r1 = params.r - 1.0;
        Ok(-(-r1 * x).exp_m1() / (a * r1))
    }
}

/// Generator of `X2 | X1 = x1` when `(x1-μ1)ᵀ Σ11⁻¹ (x1-μ1) = q1`: the shifted
/// generator `t ↦ g(t + q1)`.
pub fn conditional_generator(t: f64, q1: f64, params: &GeneratorParams) -> Result<f64> {
    check_nonnegative("t", t)?;
    check_nonnegative("q1", q1)?;
    Ok(params.g(t + q1))
}

/// Largest deviation between `g` and the best multiple of `g_(k)` on a grid,
/// with the multiple fitted by least squares. Zero exactly when the marginal
/// generator is proportional to `g`.
pub fn consistency_distance(n: usize, k: usize, params: &GeneratorParams, t_grid: &[f64]) -> Result<f64> {
    let marginal = marginal_generator(k, n, params)?;
    let pairs = t_grid
        .iter()
        .map(|&t| Ok((marginal.value(t)?, generator_g(t, params)?)))
        .collect::<Result<Vec<_>>>()?;
    let num: f64 = pairs.iter().map(|(m, g)| m * g).sum();
    let den: f64 = pairs.iter().map(|(m, _)| m * m).sum();
    if den == 0.0 {
        return Err(GmlError::domain("marginal generator vanishes on the grid"));
    }
    let c = num / den;
    Ok(pairs.iter().map(|(m, g)| (c * m - g).abs()).fold(0.0, f64::max))
}

/// `((-1)^m/π^m) ∂^m/∂t^m g(t)` for `n = 2m+1`: a generator whose
/// `n`-dimensional law has the one-dimensional law with generator `g` as its
/// marginal.
///
/// Uses the binomial expansion `g(t) = Σ_j (-1)^j Γ(r+j)/(Γ(r) j!) e^{-(b+aj)t}`
/// differentiated term by term, so `t` must be positive.
pub fn consistent_generator_odd(n: usize, t: f64, params: &GeneratorParams) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(GmlError::Domain(format!("n must be odd and at least 3, got {n}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(GmlError::Domain(format!("t must be positive, got {t}")));
    }
    let m = ((n - 1) / 2) as i32;
    let GeneratorParams { a, b, r } = *params;

    // Γ(r+j)/(Γ(r) j!) by its ratio recurrence; the series asks for j in order
    let cached = Cell::new((0usize, 1.0f64));
    let coefficient = |j: usize| -> f64 {
        let (mut at, mut c) = cached.get();
        if j < at {
            (at, c) = (0, 1.0);
        }
        while at < j {
            c *= (r + at as f64) / (at + 1) as f64;
            at += 1;
        }
        cached.set((at, c));
        c
    };
    // the terms peak near j ≈ (r - 1 + m)/(a t)
    let peak = ((r - 1.0 + m as f64).max(0.0) / (a * t)).ceil() as usize;
    // Small t makes the terms large next to their sum; the attainable
    // accuracy is then relative to the largest partial sum.
    let spec = SeriesSpec {
        divergence_check_start: 64 + 2 * peak,
        noise_floor: 1e-12,
        ..SeriesSpec::default()
    };
    let sum = try_alternating_series_sum(
        |i| {
            let j = i - 1;
            let rate = b + a * j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * coefficient(j) * rate.powi(m) * (-rate * t).exp())
        },
        &spec,
    )?;
    Ok(sum.value / PI.powi(m))
}

/// Law of `R`, with density `f_R(v) = v^{n/2-1} g(v) / ∫ t^{n/2-1} g(t) dt`.
#[derive(Debug, Clone)]
pub struct RadialLaw {
    dim: usize,
    params: GeneratorParams,
    normalizer: f64,
    phi_base: f64,
    proposal: Gamma<f64>,
}

impl RadialLaw {
    pub fn new(dim: usize, params: GeneratorParams) -> Result<Self> {
        check_dim(dim)?;
        let s = dim as f64 / 2.0;
        let phi_base = params.phi_star_minus_one(s)?;
        let normalizer = (ln_gamma(s) - s * params.a.ln()).exp() * phi_base;
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(GmlError::Internal(format!("radial normalizer is {normalizer}")));
        }
        let proposal = Gamma::new(s, 1.0 / params.b).map_err(|e| GmlError::Internal(e.to_string()))?;
        Ok(RadialLaw {
            dim,
            params,
            normalizer,
            phi_base,
            proposal,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &GeneratorParams {
        &self.params
    }

    /// `∫_0^∞ t^{n/2-1} g(t) dt`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `Φ*_r(-1, n/2, b/a)`.
    pub fn phi_base(&self) -> f64 {
        self.phi_base
    }

    fn half_dim(&self) -> f64 {
        self.dim as f64 / 2.0
    }

    fn ln_density_unchecked(&self, v: f64) -> f64 {
        (self.half_dim() - 1.0) * v.ln() + self.params.ln_g(v) - self.normalizer.ln()
    }

    /// `f_R(v)`. Infinite at `v = 0` when `n = 1`.
    pub fn density(&self, v: f64) -> Result<f64> {
        check_nonnegative("v", v)?;
        if v == 0.0 {
            return Ok(match self.dim {
                1 => f64::INFINITY,
                2 => self.params.g(0.0) / self.normalizer,
                _ => 0.0,
            });
        }
        Ok(self.ln_density_unchecked(v).exp())
    }

    /// Mode of `v^{n/2-1} e^{-bv}`, a cheap split point for the CDF.
    fn split_point(&self) -> f64 {
        ((self.half_dim() - 1.0) / self.params.b).max(1.0)
    }

    pub fn cdf(&self, v: f64) -> Result<f64> {
        check_nonnegative("v", v)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        let spec = QuadratureSpec::default();
        let f = |x: f64| self.ln_density_unchecked(x).exp();
        if v <= self.split_point() {
            Ok(integrate_finite(f, 0.0, v, &spec)?.value.min(1.0))
        } else {
            let tail = integrate_semi_infinite(|y| f(v + y), 0.0, &spec)?.value;
            Ok((1.0 - tail).max(0.0))
        }
    }

    /// Quantile function by bisection on the CDF.
    pub fn inverse_cdf(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(GmlError::Domain(format!("probability must lie in [0, 1), got {p}")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let mut hi = self.split_point();
        while self.cdf(hi)? < p {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(GmlError::Internal("quantile bracket overflowed".into()));
            }
        }
        try_find_root_increasing(|v| Ok(self.cdf(v)? - p), 0.0, hi, 1e-12 * hi)
    }

    /// `E(R^l) = a^{-l} Γ(n/2+l) Φ*_r(-1, n/2+l, b/a) / (Γ(n/2) Φ*_r(-1, n/2, b/a))`.
    pub fn moment(&self, l: f64) -> Result<f64> {
        let s = self.half_dim();
        if !(l > -s) || !l.is_finite() {
            return Err(GmlError::Domain(format!("moment order must exceed -n/2, got {l}")));
        }
        if l == 0.0 {
            return Ok(1.0);
        }
        let phi = self.params.phi_star_minus_one(s + l)?;
        Ok((ln_gamma(s + l) - ln_gamma(s) - l * self.params.a.ln()).exp() * phi / self.phi_base)
    }

    /// `E(R^l)` by quadrature of `v^l f_R(v)`.
    pub fn moment_quadrature(&self, l: f64) -> Result<NumericValue> {
        let s = self.half_dim();
        if !(l > -s) || !l.is_finite() {
            return Err(GmlError::Domain(format!("moment order must exceed -n/2, got {l}")));
        }
        let e = s - 1.0 + l;
        integrate_semi_infinite(
            |v| (l * v.ln() + self.ln_density_unchecked(v)).exp(),
            e,
            &QuadratureSpec::default(),
        )
    }

    /// Exact draw by rejection from the `Gamma(n/2, rate b)` law, accepting
    /// `V` with probability `(1 + e^{-aV})^{-r} ≥ 2^{-r}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let GeneratorParams { a, r, .. } = self.params;
        for _ in 0..MAX_REJECTION_PROPOSALS {
            let v = self.proposal.sample(rng);
            if r == 0.0 {
                return Ok(v);
            }
            let accept = (-r * (-a * v).exp().ln_1p()).exp();
            if rng.random::<f64>() < accept {
                return Ok(v);
            }
        }
        Err(GmlError::Internal(format!(
            "radial sampler rejected {MAX_REJECTION_PROPOSALS} proposals"
        )))
    }

    /// Draw by inverting the CDF. Much slower than [`RadialLaw::sample`].
    pub fn sample_inverse_cdf<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.inverse_cdf(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::gamma::gamma;

    fn logistic() -> GeneratorParams {
        GeneratorParams::logistic()
    }

    #[test]
    fn params_validation() {
        assert!(GeneratorParams::new(0.0, 1.0, 1.0).is_err());
        assert!(GeneratorParams::new(1.0, 0.0, 1.0).is_err());
        assert!(GeneratorParams::new(1.0, 1.0, -0.1).is_err());
        assert!(GeneratorParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(GeneratorParams::new(1.0, 0.5, 0.0).unwrap().is_normal());
    }

    #[test]
    fn generator_examples() {
        for r in [0.0, 0.5, 2.0, 7.0] {
            let p = GeneratorParams::new(1.3, 0.7, r).unwrap();
            assert_relative_eq!(generator_g(0.0, &p).unwrap(), 2f64.powf(-r), max_relative = 1e-15);
        }
        assert_relative_eq!(generator_g(LN_2, &logistic()).unwrap(), 2.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(
            generator_g(3.0, &GeneratorParams::normal()).unwrap(),
            (-1.5f64).exp(),
            max_relative = 1e-15
        );
        assert!(generator_g(-1.0, &logistic()).is_err());
        // the tail stays positive well past where e^{-bu} alone would be tiny
        let far = log_generator_g(1e4, &logistic()).unwrap();
        assert_relative_eq!(far, -1e4, max_relative = 1e-15);
    }

    #[test]
    fn normal_normalizer() {
        let d3 = norm_const_d(3, &GeneratorParams::normal()).unwrap();
        assert_relative_eq!(d3, (2.0 * PI).powf(-1.5), max_relative = 1e-13);
    }

    #[test]
    fn logistic_d2() {
        assert_relative_eq!(norm_const_d(2, &logistic()).unwrap(), 2.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn d1_integrates_density_to_one() {
        let p = logistic();
        let d1 = norm_const_d(1, &p).unwrap();
        let half = integrate_semi_infinite(|x| p.g(x * x), 0.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(2.0 * d1 * half.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn d_two_routes() {
        for &(a, b, r) in &[(1.0, 1.0, 2.0), (0.4, 2.0, 0.5), (3.0, 0.3, 5.0), (1.0, 0.5, 0.0)] {
            let p = GeneratorParams::new(a, b, r).unwrap();
            for n in 1..=10 {
                let closed = norm_const_d(n, &p).unwrap();
                let quad = norm_const_d_quadrature(n, &p).unwrap();
                assert_relative_eq!(closed, quad, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn c_matches_scaled_d() {
        for n in 1..=18 {
            let c = norm_const_c(n).unwrap().value;
            let d = norm_const_d(n, &logistic()).unwrap();
            assert_relative_eq!(c, 2f64.powf(-(n as f64) / 2.0) * d, max_relative = 1e-10);
        }
    }

    #[test]
    fn c_closed_forms() {
        assert_relative_eq!(norm_const_c(2).unwrap().value, 1.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(
            norm_const_c(4).unwrap().value,
            0.036_543_892_294_450_17,
            max_relative = 1e-12
        );
        assert_relative_eq!(norm_const_c(6).unwrap().value, 1.5 / PI.powi(5), max_relative = 1e-13);
        assert_relative_eq!(
            norm_const_c(10).unwrap().value,
            45.0 / 14.0 / PI.powi(9),
            max_relative = 1e-13
        );
        // mpmath reference values
        assert_relative_eq!(
            norm_const_c(1).unwrap().value,
            1.049_558_614_273_827_1,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            norm_const_c(3).unwrap().value,
            0.104_965_743_641_094_97,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            norm_const_c(8).unwrap().value,
            7.116_955_270_378_844e-4,
            max_relative = 1e-11
        );
        assert!(norm_const_c(0).is_err());
    }

    #[test]
    fn c_bernoulli_route() {
        assert_relative_eq!(
            norm_const_c_bernoulli(6).unwrap().value,
            1.5 / PI.powi(5),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            norm_const_c_bernoulli(14).unwrap().value,
            945.0 / 124.0 / PI.powi(13),
            max_relative = 1e-12
        );
        for n in (6..=30).step_by(2) {
            let via_bernoulli = norm_const_c_bernoulli(n).unwrap().value;
            let direct = norm_const_c(n).unwrap().value;
            assert_relative_eq!(via_bernoulli, direct, max_relative = 1e-8);
        }
        assert!(norm_const_c_bernoulli(4).is_err());
        assert!(norm_const_c_bernoulli(7).is_err());
    }

    #[test]
    fn landsman_series() {
        for n in [1, 2] {
            assert!(matches!(norm_const_c_landsman(n), Err(GmlError::Divergence(_))));
        }
        for n in [3, 4, 5, 6, 8, 10] {
            let series = norm_const_c_landsman(n).unwrap();
            assert_relative_eq!(series, norm_const_c(n).unwrap().value, max_relative = 1e-10);
        }
    }

    #[test]
    fn logistic_expansion_converges_pointwise() {
        for x in [0.5f64, 1.0, 2.0] {
            let target = (-x).exp() / (1.0 + (-x).exp()).powi(2);
            let partial = |terms: usize| -> f64 {
                (1..=terms)
                    .map(|j| {
                        let s = if j % 2 == 1 { 1.0 } else { -1.0 };
                        s * j as f64 * (-(j as f64) * x).exp()
                    })
                    .sum()
            };
            let errors: Vec<f64> = [2, 5, 80].iter().map(|&j| (partial(j) - target).abs()).collect();
            assert!(errors[0] > errors[1] && errors[1] > errors[2]);
            assert!(errors[2] < 1e-12);
        }
    }

    #[test]
    fn marginal_generator_is_the_marginalization_integral() {
        for &(a, b, r) in &[(1.0, 1.0, 2.0), (2.0, 0.7, 0.5), (0.5, 1.5, 4.0)] {
            let p = GeneratorParams::new(a, b, r).unwrap();
            for (k, n) in [(1, 3), (2, 5), (1, 2), (3, 4)] {
                let mg = marginal_generator(k, n, &p).unwrap();
                let s = mg.s();
                for t in [0.0, 0.3, 1.0, 4.0] {
                    let direct = integrate_semi_infinite(
                        |y| ((s - 1.0) * y.ln() + p.ln_g(t + y)).exp(),
                        s - 1.0,
                        &QuadratureSpec::default(),
                    )
                    .unwrap()
                    .value;
                    assert_relative_eq!(mg.value(t).unwrap(), direct, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn marginal_inversion_relation() {
        // ∫_t^∞ (w-t)^{s-1} g(w) dw equals g_(k)(t); after the shift w = t + y
        // this is the same integral, so check instead the unshifted form with
        // a finite-interval split.
        let p = logistic();
        let mg = marginal_generator(1, 4, &p).unwrap();
        let s = mg.s();
        for t in [0.2, 1.0, 3.0] {
            let near = integrate_finite(
                |w| (w - t).powf(s - 1.0) * p.g(w),
                t,
                t + 1.0,
                &QuadratureSpec::default(),
            )
            .unwrap()
            .value;
            let far = integrate_semi_infinite(
                |y| (1.0 + y).powf(s - 1.0) * p.g(t + 1.0 + y),
                0.0,
                &QuadratureSpec::default(),
            )
            .unwrap()
            .value;
            assert_relative_eq!(near + far, mg.value(t).unwrap(), max_relative = 1e-10);
        }
    }

    #[test]
    fn marginal_generator_domain() {
        assert!(marginal_generator(3, 3, &logistic()).is_err());
        assert!(marginal_generator(0, 3, &logistic()).is_err());
        assert!(marginal_generator(1, 3, &logistic()).unwrap().value(-1.0).is_err());
    }

    #[test]
    fn codim_two_closed_forms() {
        let r1 = GeneratorParams::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(codim_two_closed_form(0.0, &r1).unwrap(), LN_2, max_relative = 1e-15);
        assert_relative_eq!(
            codim_two_closed_form(0.0, &logistic()).unwrap(),
            0.5,
            max_relative = 1e-15
        );
        for &(a, r) in &[(1.0, 1.0), (1.0, 2.0), (2.5, 3.5), (0.7, 0.4)] {
            let p = GeneratorParams::new(a, a, r).unwrap();
            let mg = marginal_generator(3, 5, &p).unwrap();
            for t in [0.0, 0.5, 2.0, 6.0] {
                assert_relative_eq!(
                    mg.value(t).unwrap(),
                    codim_two_closed_form(t, &p).unwrap(),
                    max_relative = 1e-11
                );
            }
        }
        assert!(codim_two_closed_form(0.0, &GeneratorParams::new(1.0, 2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn normal_marginal_generator_is_proportional() {
        let p = GeneratorParams::normal();
        let mg = marginal_generator(2, 5, &p).unwrap();
        let base = mg.value(0.0).unwrap();
        for t in [0.5, 1.0, 3.0, 10.0] {
            assert_relative_eq!(mg.value(t).unwrap() / p.g(t), base, max_relative = 1e-12);
        }
    }

    #[test]
    fn marginal_radial_integral() {
        let p = GeneratorParams::new(1.5, 0.8, 3.0).unwrap();
        let mg = marginal_generator(2, 5, &p).unwrap();
        let quad = integrate_semi_infinite(
            |t| mg.value(t).unwrap(),
            0.0,
            &QuadratureSpec::default().with_relative_tolerance(1e-10),
        )
        .unwrap()
        .value;
        assert_relative_eq!(mg.radial_integral().unwrap(), quad, max_relative = 1e-9);
    }

    #[test]
    fn conditional_generator_examples() {
        let p = logistic();
        assert_eq!(conditional_generator(1.3, 0.0, &p).unwrap(), p.g(1.3));
        assert_eq!(conditional_generator(0.0, 2.2, &p).unwrap(), p.g(2.2));
        let expected = (-2.0f64).exp() / (1.0 + (-2.0f64).exp()).powi(2);
        assert_relative_eq!(
            conditional_generator(1.0, 1.0, &p).unwrap(),
            expected,
            max_relative = 1e-15
        );
        assert!(conditional_generator(-1.0, 0.0, &p).is_err());
        assert!(conditional_generator(1.0, -1.0, &p).is_err());
    }

    #[test]
    fn consistency_separates_families() {
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        assert!(consistency_distance(3, 1, &logistic(), &grid).unwrap() > 0.01);
        assert!(consistency_distance(3, 1, &GeneratorParams::normal(), &grid).unwrap() < 1e-9);
    }

    #[test]
    fn consistent_generator_examples() {
        let p = logistic();
        let t: f64 = 1.0;
        let expected = ((-t).exp() - (-2.0 * t).exp()) / (1.0 + (-t).exp()).powi(3) / PI;
        assert_relative_eq!(
            consistent_generator_odd(3, t, &p).unwrap(),
            expected,
            max_relative = 1e-10
        );
        let normal = GeneratorParams::normal();
        assert_relative_eq!(
            consistent_generator_odd(3, 2.0, &normal).unwrap(),
            0.5 * (-1.0f64).exp() / PI,
            max_relative = 1e-14
        );
        assert!(consistent_generator_odd(3, 0.0, &p).is_err());
        assert!(consistent_generator_odd(4, 1.0, &p).is_err());
        // m = 2 against a numerical second derivative
        let h = 1e-3;
        let t = 0.8;
        let fd = (p.g(t + h) - 2.0 * p.g(t) + p.g(t - h)) / (h * h) / (PI * PI);
        assert_relative_eq!(consistent_generator_odd(5, t, &p).unwrap(), fd, max_relative = 1e-5);
    }

    #[test]
    fn consistent_generator_is_nonnegative() {
        let p = logistic();
        let mut t = 0.01;
        while t <= 20.0 {
            assert!(consistent_generator_odd(3, t, &p).unwrap() >= 0.0, "t = {t}");
            t += 0.01;
        }
    }

    #[test]
    fn consistent_generator_small_t() {
        let p = logistic();
        let t: f64 = 0.01;
        let expected = ((-t).exp() - (-2.0 * t).exp()) / (1.0 + (-t).exp()).powi(3) / PI;
        assert_relative_eq!(
            consistent_generator_odd(3, t, &p).unwrap(),
            expected,
            max_relative = 1e-6
        );
        for t in [0.25f64, 0.5, 1.0, 2.0, 5.0] {
            let expected = ((-t).exp() - (-2.0 * t).exp()) / (1.0 + (-t).exp()).powi(3) / PI;
            assert_relative_eq!(
                consistent_generator_odd(3, t, &p).unwrap(),
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn radial_density_examples() {
        let law = RadialLaw::new(2, logistic()).unwrap();
        for v in [0.0f64, 0.5, 2.0, 9.0] {
            let half_logistic = 2.0 * (-v).exp() / (1.0 + (-v).exp()).powi(2);
            assert_relative_eq!(law.density(v).unwrap(), half_logistic, max_relative = 1e-12);
        }
        let law = RadialLaw::new(2, GeneratorParams::normal()).unwrap();
        assert_relative_eq!(law.density(3.0).unwrap(), 0.5 * (-1.5f64).exp(), max_relative = 1e-12);
        assert!(law.density(-0.1).is_err());
    }

    #[test]
    fn radial_density_integrates_to_one() {
        for &(n, a, b, r) in &[(1, 1.0, 1.0, 2.0), (3, 2.0, 0.5, 0.5), (7, 0.3, 1.0, 6.0)] {
            let law = RadialLaw::new(n, GeneratorParams::new(a, b, r).unwrap()).unwrap();
            let total = integrate_semi_infinite(
                |v| law.density(v).unwrap(),
                n as f64 / 2.0 - 1.0,
                &QuadratureSpec::default(),
            )
            .unwrap()
            .value;
            assert_relative_eq!(total, 1.0, max_relative = 1e-11);
            assert_relative_eq!(law.cdf(1e4).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn normalizer_two_routes() {
        let p = GeneratorParams::new(0.6, 1.7, 2.5).unwrap();
        for n in 1..=8 {
            let law = RadialLaw::new(n, p).unwrap();
            let quad = radial_integral_quadrature(n, &p).unwrap().value;
            assert_relative_eq!(law.normalizer(), quad, max_relative = 1e-10);
        }
    }

    #[test]
    fn radial_moments() {
        let law = RadialLaw::new(2, logistic()).unwrap();
        assert_eq!(law.moment(0.0).unwrap(), 1.0);
        assert_relative_eq!(law.moment(1.0).unwrap(), 2.0 * LN_2, max_relative = 1e-12);
        assert_relative_eq!(
            law.moment_quadrature(1.0).unwrap().value,
            2.0 * LN_2,
            max_relative = 1e-12
        );
        let normal = RadialLaw::new(3, GeneratorParams::normal()).unwrap();
        assert_relative_eq!(normal.moment(2.0).unwrap(), 15.0, max_relative = 1e-12);
        assert_relative_eq!(
            normal.moment(2.0).unwrap(),
            4.0 * gamma(3.5) / gamma(1.5),
            max_relative = 1e-12
        );
        assert!(law.moment(-1.0).is_err());
    }

    #[test]
    fn radial_moment_two_routes() {
        let law = RadialLaw::new(5, GeneratorParams::new(2.0, 0.4, 3.0).unwrap()).unwrap();
        for l in [-1.5, 0.5, 1.0, 2.0, 3.7] {
            assert_relative_eq!(
                law.moment(l).unwrap(),
                law.moment_quadrature(l).unwrap().value,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn inverse_cdf_round_trip() {
        let law = RadialLaw::new(3, logistic()).unwrap();
        for p in [0.001, 0.2, 0.5, 0.9, 0.999] {
            let v = law.inverse_cdf(p).unwrap();
            assert!((law.cdf(v).unwrap() - p).abs() < 1e-10);
        }
        assert!(law.inverse_cdf(1.0).is_err());
    }

    #[test]
    fn rejection_sampler_is_deterministic() {
        let law = RadialLaw::new(2, logistic()).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| law.sample(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn rejection_sampler_mean() {
        let law = RadialLaw::new(2, logistic()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| law.sample(&mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 2.0 * LN_2).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn inverse_cdf_sampler_agrees_in_mean() {
        let law = RadialLaw::new(3, GeneratorParams::new(1.0, 1.0, 5.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 2000;
        let draws: Vec<f64> = (0..n).map(|_| law.sample_inverse_cdf(&mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected = law.moment(1.0).unwrap();
        assert!((mean - expected).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
