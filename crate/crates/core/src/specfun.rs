//! Riemann zeta for real `s > 0` and the generalized Hurwitz-Lerch zeta
//! function
//!
//! ```text
//! Φ*_μ(z, s, a) = Σ_{n≥0} Γ(μ+n)/(Γ(μ) n!) · zⁿ/(n+a)^s
//!              = (1/Γ(s)) ∫_0^∞ t^{s-1} e^{-a t} (1 - z e^{-t})^{-μ} dt.
//! ```

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use statrs::function::factorial::factorial;
use statrs::function::gamma::ln_gamma;

use crate::error::{GmlError, Result};
use crate::numerics::{
    alternating_series_sum, bernoulli_numbers, bernoulli_polynomial, integrate_finite, try_integrate_semi_infinite,
    CompensatedSum, Method, NumericValue, QuadratureSpec, SeriesSpec,
};

/// Below this `z` the defining series converges too slowly to be useful.
pub const SERIES_Z_LIMIT: f64 = 0.95;

const ZETA_POLE_GUARD: f64 = 1e-6;

fn sign_alternating(j: usize) -> f64 {
    if j % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `1 - 2^{1-s}` without cancellation near `s = 1`.
fn eta_factor(s: f64) -> f64 {
    -((1.0 - s) * LN_2).exp_m1()
}

/// `ζ(s)` from the Euler-accelerated Dirichlet eta series.
pub fn riemann_zeta_value(s: f64) -> Result<NumericValue> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(GmlError::Domain(format!("zeta needs s > 0, got {s}")));
    }
    if (s - 1.0).abs() < ZETA_POLE_GUARD {
        return Err(GmlError::Domain(format!("zeta has a pole at s = 1, got {s}")));
    }
    let eta = alternating_series_sum(|j| sign_alternating(j) * (j as f64).powf(-s), &SeriesSpec::default())?;
    let factor = eta_factor(s);
    Ok(NumericValue {
        value: eta.value / factor,
        error_estimate: eta.error_estimate / factor.abs(),
        method: Method::Series,
    })
}

pub fn riemann_zeta(s: f64) -> Result<f64> {
    riemann_zeta_value(s).map(|v| v.value)
}

/// `ζ(2n)` from the Bernoulli-number closed form.
pub fn zeta_even(two_n: u32) -> Result<f64> {
    if two_n == 0 || !two_n.is_multiple_of(2) || two_n > 40 {
        return Err(GmlError::Domain(format!(
            "zeta_even takes an even integer in 2..=40, got {two_n}"
        )));
    }
    let n = two_n / 2;
    let b = bernoulli_numbers(two_n as usize)?[two_n as usize];
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let magnitude = 2f64.powi(two_n as i32 - 1) * PI.powi(two_n as i32) / factorial(two_n as u64);
    Ok(sign * magnitude * b)
}

/// `ζ(2n+1)` from the integral of `B_{2n+1}(u) cot(πu)` over `(0, 1)`.
///
/// The integrand is symmetric about `u = 1/2`, so the integral is taken as
/// twice the integral over `(0, 1/2)`.
pub fn zeta_odd_integral(two_n_plus_1: u32) -> Result<NumericValue> {
    let k = two_n_plus_1;
    if k.is_multiple_of(2) || !(3..=21).contains(&k) {
        return Err(GmlError::Domain(format!(
            "zeta_odd_integral takes an odd integer in 3..=21, got {k}"
        )));
    }
    let n = (k - 1) / 2;
    let order = k as usize;
    let integrand = |u: f64| bernoulli_polynomial(order, u).unwrap_or(f64::NAN) / (PI * u).tan();
    let half = integrate_finite(
        integrand,
        0.0,
        0.5,
        &QuadratureSpec::default().with_relative_tolerance(1e-14),
    )?;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let kf = k as f64;
    let prefactor = sign * (kf * (2.0 * PI).ln() - LN_2 - ln_gamma(kf + 1.0)).exp();
    Ok(NumericValue {
        value: prefactor * 2.0 * half.value,
        error_estimate: prefactor.abs() * 2.0 * half.error_estimate,
        method: Method::Quadrature,
    })
}

/// Arguments of `Φ*_μ(z, s, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiStarArgs {
    pub z: f64,
    pub s: f64,
    pub a: Complex64,
    pub mu_order: f64,
}

impl PhiStarArgs {
    pub fn new(z: f64, s: f64, a: f64, mu_order: f64) -> Result<Self> {
        Self::complex(z, s, Complex64::new(a, 0.0), mu_order)
    }

    pub fn complex(z: f64, s: f64, a: Complex64, mu_order: f64) -> Result<Self> {
        let args = PhiStarArgs { z, s, a, mu_order };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        let PhiStarArgs { z, s, a, mu_order } = *self;
        if !(-1.0..1.0).contains(&z) {
            return Err(GmlError::Domain(format!("Φ* needs z in [-1, 1), got {z}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(GmlError::Domain(format!("Φ* needs s > 0, got {s}")));
        }
        if !(a.re > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
            return Err(GmlError::Domain(format!("Φ* needs Re(a) > 0, got {a}")));
        }
        if !(mu_order >= 0.0) || !mu_order.is_finite() {
            return Err(GmlError::Domain(format!("Φ* needs μ ≥ 0, got {mu_order}")));
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.a.im == 0.0
    }
}

/// `ln(x^{s-1} e^{-x} / Γ(s))`, the log density of a unit-rate Gamma law,
/// evaluated through the saddle-point form for `s > 1` so that large shapes do
/// not lose digits to cancellation between `s ln x`, `x` and `ln Γ(s)`.
pub(crate) fn ln_gamma_density(x: f64, shape: f64) -> f64 {
    if shape <= 1.0 {
        return (shape - 1.0) * x.ln() - x - ln_gamma(shape);
    }
    let k = shape - 1.0;
    -stirling_error(k) - deviance(k, x) - 0.5 * (2.0 * PI * k).ln()
}

/// `ln Γ(k+1) - (k + 1/2) ln k + k - ln √(2π)` at `k = 1/2, 1, …, 15`.
const STIRLING_ERROR_HALVES: [f64; 30] = [
    0.153_426_409_720_027_35,
    0.081_061_466_795_327_26,
    0.054_814_121_051_917_65,
    0.041_340_695_955_409_3,
    0.033_162_873_519_936_287,
    0.027_677_925_684_998_34,
    0.023_746_163_656_297_496,
    0.020_790_672_103_765_093,
    0.018_488_450_532_673_185,
    0.016_644_691_189_821_192,
    0.015_134_973_221_917_38,
    0.013_876_128_823_070_748,
    0.012_810_465_242_920_227,
    0.011_896_709_945_891_77,
    0.011_104_559_758_206_917,
    0.010_411_265_261_972_096,
    0.009_799_416_126_158_803,
    0.009_255_462_182_712_733,
    0.008_768_700_134_139_385,
    0.008_330_563_433_362_87,
    0.007_934_114_564_314_021,
    0.007_573_675_487_951_841,
    0.007_244_554_301_320_383,
    0.006_942_840_107_209_53,
    0.006_665_247_032_707_682,
    0.006_408_994_188_004_207,
    0.006_171_712_263_039_458,
    0.005_951_370_112_758_848,
    0.005_746_216_513_010_116,
    0.005_554_733_551_962_801,
];

/// `ln Γ(k+1) - (k + 1/2) ln k + k - ln √(2π)`.
fn stirling_error(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k <= 15.0 {
        let twice = 2.0 * k;
        if twice == twice.round() && twice >= 1.0 {
            return STIRLING_ERROR_HALVES[twice as usize - 1];
        }
        return ln_gamma(k + 1.0) - (k + 0.5) * k.ln() + k - 0.5 * (2.0 * PI).ln();
    }
    let k2 = k * k;
    if k > 500.0 {
        (S0 - S1 / k2) / k
    } else if k > 80.0 {
        (S0 - (S1 - S2 / k2) / k2) / k
    } else if k > 35.0 {
        (S0 - (S1 - (S2 - S3 / k2) / k2) / k2) / k
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / k2) / k2) / k2) / k2) / k
    }
}

/// `k ln(k/x) + x - k`, accurate when `k ≈ x`.
fn deviance(k: f64, x: f64) -> f64 {
    if (k - x).abs() < 0.1 * (k + x) {
        let v = (k - x) / (k + x);
        let mut s = (k - x) * v;
        let mut ej = 2.0 * k * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        k * (k / x).ln() + x - k
    }
}

/// `Φ*_μ(z, s, a)` by quadrature of the integral representation. Works for
/// complex `a`.
///
/// With `α = Re(a)` and `x = α t` the integral becomes
/// `α^{-s} ∫ γ_s(x) e^{-i Im(a) x/α} (1 - z e^{-x/α})^{-μ} dx` where `γ_s` is
/// the unit Gamma density; `x` is further rescaled so its mode sits at 1.
pub fn phi_star_quadrature(args: &PhiStarArgs, spec: &QuadratureSpec) -> Result<NumericValue<Complex64>> {
    args.validate()?;
    let PhiStarArgs { z, s, a, mu_order } = *args;
    let alpha = a.re;
    let omega = a.im / alpha;
    let scale = (s - 1.0).max(1.0);
    let ln_scale = scale.ln();
    let log_kernel = move |u: f64| -> f64 {
        let x = scale * u;
        let mut log = ln_scale + ln_gamma_density(x, s);
        if mu_order != 0.0 {
            log -= mu_order * (-z * (-x / alpha).exp()).ln_1p();
        }
        log
    };
    let prefactor = (-s * alpha.ln()).exp();
    if omega == 0.0 {
        let v = try_integrate_semi_infinite(|u| Ok(log_kernel(u).exp()), s - 1.0, spec)?;
        Ok(NumericValue {
            value: Complex64::new(prefactor * v.value, 0.0),
            error_estimate: prefactor * v.error_estimate,
            method: Method::Quadrature,
        })
    } else {
        let f = |u: f64| -> Result<Complex64> {
            let m = log_kernel(u).exp();
            if m == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let phase = -omega * scale * u;
            Ok(Complex64::new(m * phase.cos(), m * phase.sin()))
        };
        let v = try_integrate_semi_infinite(f, s - 1.0, spec)?;
        Ok(NumericValue {
            value: v.value * prefactor,
            error_estimate: prefactor * v.error_estimate,
            method: Method::Quadrature,
        })
    }
}

/// `Φ*_μ(z, s, a)` from the defining series; real `a` and `|z| < 0.95` only.
pub fn phi_star_series(args: &PhiStarArgs) -> Result<NumericValue> {
    args.validate()?;
    if !args.is_real() {
        return Err(GmlError::domain("the Φ* series path takes real a only"));
    }
    if args.z.abs() >= SERIES_Z_LIMIT {
        return Err(GmlError::Domain(format!(
            "the Φ* series path needs |z| < {SERIES_Z_LIMIT}, got {}",
            args.z
        )));
    }
    let PhiStarArgs { z, s, a, mu_order } = *args;
    let a = a.re;
    let mut sum = CompensatedSum::new();
    let mut coeff = 1.0;
    let mut zn = 1.0;
    let mut last = f64::INFINITY;
    for n in 0..1_000_000usize {
        let term = coeff * zn * (n as f64 + a).powf(-s);
        sum.add(term);
        last = term.abs();
        if (n as f64) > mu_order && last <= 1e-17 * sum.value().abs() {
            return Ok(NumericValue {
                value: sum.value(),
                error_estimate: last,
                method: Method::Series,
            });
        }
        if coeff == 0.0 || zn == 0.0 {
            return Ok(NumericValue {
                value: sum.value(),
                error_estimate: 0.0,
                method: Method::Series,
            });
        }
        coeff *= (mu_order + n as f64) / (n as f64 + 1.0);
        zn *= z;
    }
    Err(GmlError::Convergence {
        what: "Φ* series",
        estimate: sum.value(),
        error_estimate: last,
    })
}

/// `Φ*_μ(z, s, a)`.
///
/// `μ = 0` and `z = 0` give the closed form `a^{-s}`; every other argument goes
/// through the integral representation.
pub fn phi_star(args: &PhiStarArgs) -> Result<NumericValue<Complex64>> {
    args.validate()?;
    if args.mu_order == 0.0 || args.z == 0.0 {
        return Ok(NumericValue::closed_form((-args.s * args.a.ln()).exp()));
    }
    phi_star_quadrature(args, &QuadratureSpec::default())
}

/// Real-valued `Φ*_μ(z, s, a)` for real `a`.
pub fn phi_star_real(z: f64, s: f64, a: f64, mu_order: f64) -> Result<f64> {
    phi_star(&PhiStarArgs::new(z, s, a, mu_order)?).map(|v| v.value.re)
}
