//! The GML distribution: density, exact sampling, moments and characteristic
//! functions.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{GmlError, Result};
use crate::generator::{GeneratorParams, RadialLaw};
use crate::linalg::SpdFactor;
use crate::numerics::{
    integrate_finite, try_integrate_semi_infinite, CompensatedSum, Method, NumericValue, QuadratureSpec,
};
use crate::parallel::{fill_chunks, Execution, CHUNK_ROWS};

/// Largest `y` for which `Ω_n(y)` is summed as a series; beyond it the
/// alternating terms cancel too much and the angular integral is used.
pub const OMEGA_SERIES_LIMIT: f64 = 64.0;

/// The series form of the characteristic function is used while its largest
/// term is bounded by this; past it cancellation costs more than `1e-10`.
pub const CF_SERIES_TERM_BUDGET: f64 = 1e6;

/// `|t| σ` beyond which the one-dimensional CF integral is refused.
pub const CF_1D_MAX_FREQUENCY: f64 = 1e3;

fn shape_check(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(GmlError::Shape { expected, got });
    }
    Ok(())
}

/// `X ~ GML_n(μ, Σ, g)`.
#[derive(Debug, Clone)]
pub struct GmlDistribution {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    factor: SpdFactor,
    lower: DMatrix<f64>,
    params: GeneratorParams,
    radial: RadialLaw,
    ln_d_n: f64,
}

impl GmlDistribution {
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>, params: GeneratorParams) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(GmlError::domain("dimension must be at least 1"));
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(GmlError::domain("location has non-finite entries"));
        }
        shape_check(n, sigma.nrows())?;
        shape_check(n, sigma.ncols())?;
        let factor = SpdFactor::new(&sigma)?;
        let lower = factor.lower();
        let radial = RadialLaw::new(n, params)?;
        let half = n as f64 / 2.0;
        let ln_d_n = half * (params.a() / PI).ln() - radial.phi_base().ln();
        Ok(GmlDistribution {
            mu,
            sigma,
            factor,
            lower,
            params,
            radial,
            ln_d_n,
        })
    }

    /// Spherical law: `μ = 0`, `Σ = I`.
    pub fn standard(n: usize, params: GeneratorParams) -> Result<Self> {
        Self::new(DVector::zeros(n), DMatrix::identity(n, n), params)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Lower-triangular `A` with `A Aᵀ = Σ`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub(crate) fn spd_factor(&self) -> &SpdFactor {
        &self.factor
    }

    pub fn params(&self) -> &GeneratorParams {
        &self.params
    }

    pub fn radial(&self) -> &RadialLaw {
        &self.radial
    }

    pub fn d_n(&self) -> f64 {
        self.ln_d_n.exp()
    }

    pub fn ln_d_n(&self) -> f64 {
        self.ln_d_n
    }

    pub fn log_det_sigma(&self) -> f64 {
        self.factor.log_det()
    }

    /// `(x-μ)ᵀ Σ⁻¹ (x-μ)`.
    pub fn mahalanobis(&self, x: &[f64]) -> Result<f64> {
        shape_check(self.dim(), x.len())?;
        let v = DVector::from_iterator(x.len(), x.iter().zip(self.mu.iter()).map(|(a, b)| a - b));
        Ok(self.factor.quadratic_form(&v))
    }

    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        let q = self.mahalanobis(x)?;
        Ok(self.ln_d_n - 0.5 * self.factor.log_det() + self.params.ln_g(q))
    }

    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        self.log_pdf(x).map(f64::exp)
    }

    /// Density at each row of a row-major `count × n` array.
    pub fn pdf_batch(&self, points: &[f64], exec: Execution) -> Result<Vec<f64>> {
        let n = self.dim();
        if !points.len().is_multiple_of(n) {
            return Err(GmlError::Shape {
                expected: n * (points.len() / n + 1),
                got: points.len(),
            });
        }
        let mut out = vec![0.0; points.len() / n];
        fill_chunks(&mut out, 1, exec, |chunk, values| {
            let start = chunk * CHUNK_ROWS;
            for (k, v) in values.iter_mut().enumerate() {
                let row = start + k;
                *v = self.pdf(&points[row * n..(row + 1) * n])?;
            }
            Ok(())
        })?;
        Ok(out)
    }

    pub fn mean(&self) -> DVector<f64> {
        self.mu.clone()
    }

    /// `Φ*_r(-1, n/2+1, b/a) / (2a Φ*_r(-1, n/2, b/a))`, the factor in `Cov(X) = c Σ`.
    pub fn cov_scale(&self) -> Result<f64> {
        let s = self.dim() as f64 / 2.0;
        let upper = self.params.phi_star_minus_one(s + 1.0)?;
        Ok(upper / (2.0 * self.params.a() * self.radial.phi_base()))
    }

    pub fn cov(&self) -> Result<DMatrix<f64>> {
        Ok(&self.sigma * self.cov_scale()?)
    }

    /// `E(Π Y_i^{2 m_i})` for the standardized vector `Y = A⁻¹(X-μ)`.
    pub fn product_moment(&self, orders: &[u32]) -> Result<f64> {
        shape_check(self.dim(), orders.len())?;
        let m: u32 = orders.iter().sum();
        if m == 0 {
            return Ok(1.0);
        }
        let half = self.dim() as f64 / 2.0;
        let mf = m as f64;
        // E(R^m) / (n/2)^{[m]}
        let radial = self.radial.moment(mf)? / (ln_gamma(half + mf) - ln_gamma(half)).exp();
        let sphere: f64 = orders
            .iter()
            .map(|&mi| {
                let mi = mi as f64;
                (ln_gamma(2.0 * mi + 1.0) - mi * 4f64.ln() - ln_gamma(mi + 1.0)).exp()
            })
            .product();
        Ok(radial * sphere)
    }

    /// `count` draws from `X = μ + √R A u`. The same seed gives the same draws
    /// under every [`Execution`] mode and thread count.
    pub fn sample(&self, count: usize, seed: u64) -> Result<SampleBatch> {
        self.sample_with(count, seed, Execution::default())
    }

    pub fn sample_with(&self, count: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
        let n = self.dim();
        let mut draws = vec![0.0; count * n];
        fill_chunks(&mut draws, n, exec, |chunk, rows| {
            let mut rng = chunk_rng(seed, chunk);
            let mut u = DVector::zeros(n);
            for row in rows.chunks_mut(n) {
                let radius = self.radial.sample(&mut rng)?.sqrt();
                sphere_point(&mut rng, &mut u);
                let x = &self.mu + &self.lower * &u * radius;
                row.copy_from_slice(x.as_slice());
            }
            Ok(())
        })?;
        Ok(SampleBatch { dim: n, seed, draws })
    }

    fn check_t(&self, t: &[f64]) -> Result<(f64, f64)> {
        shape_check(self.dim(), t.len())?;
        if t.iter().any(|v| !v.is_finite()) {
            return Err(GmlError::domain("t has non-finite entries"));
        }
        let tv = DVector::from_column_slice(t);
        let q = (self.lower.transpose() * &tv).norm_squared();
        Ok((q, tv.dot(&self.mu)))
    }

    /// Characteristic function `E exp(i tᵀX)`.
    ///
    /// Uses the moment series while its largest term stays within
    /// [`CF_SERIES_TERM_BUDGET`], otherwise the radial integral of `Ω_n`.
    pub fn cf(&self, t: &[f64]) -> Result<Complex64> {
        let (q, _) = self.check_t(t)?;
        if self.cf_series_term_bound(q) <= CF_SERIES_TERM_BUDGET {
            if let Ok(v) = self.cf_series(t) {
                return Ok(v.value);
            }
        }
        self.cf_quadrature(t).map(|v| v.value)
    }

    /// `2^r exp(q/(4b))`, a bound on the sum of the absolute series terms.
    fn cf_series_term_bound(&self, q: f64) -> f64 {
        (self.params.r() * std::f64::consts::LN_2 + q / (4.0 * self.params.b())).exp()
    }

    /// The characteristic function from
    /// `e^{itᵀμ} Σ_k (-tᵀΣt/(4a))^k / k! · Φ*_r(-1, n/2+k, b/a) / Φ*_r(-1, n/2, b/a)`.
    pub fn cf_series(&self, t: &[f64]) -> Result<NumericValue<Complex64>> {
        self.cf_series_with(t, SeriesSign::Alternating)
    }

    /// [`GmlDistribution::cf_series`] with a choice of term signs.
    /// [`SeriesSign::Dropped`] is wrong on purpose and exists to check that
    /// the validation suite notices.
    pub fn cf_series_with(&self, t: &[f64], sign: SeriesSign) -> Result<NumericValue<Complex64>> {
        let (q, phase) = self.check_t(t)?;
        let rotation = Complex64::from_polar(1.0, phase);
        if q == 0.0 {
            return Ok(NumericValue::closed_form(rotation));
        }
        let bound = self.cf_series_term_bound(q);
        if bound > 1e12 {
            return Err(GmlError::Range(format!(
                "characteristic-function series at tᵀΣt = {q} would cancel below double precision"
            )));
        }
        let a = self.params.a();
        let step = match sign {
            SeriesSign::Alternating => -q / (4.0 * a),
            SeriesSign::Dropped => q / (4.0 * a),
        };
        let x = q / (4.0 * self.params.b());
        let two_r = 2f64.powf(self.params.r());
        let half = self.dim() as f64 / 2.0;

        let mut sum = CompensatedSum::new();
        let mut abs_sum = 1.0;
        let mut power = 1.0; // step^k / k!
        let mut bound_term = two_r; // 2^r x^k / k!
                                    // Every term's relative error is multiplied by up to CF_SERIES_TERM_BUDGET,
                                    // so the Φ* values are computed to full precision.
        let precise = QuadratureSpec::default().with_relative_tolerance(1e-15);
        let base = self.params.phi_star_minus_one_with(half, &precise)?;
        sum.add(1.0);
        for k in 1..2000usize {
            let kf = k as f64;
            power *= step / kf;
            bound_term *= x / kf;
            let ratio = self.params.phi_star_minus_one_with(half + kf, &precise)? / base;
            let term = power * ratio;
            sum.add(term);
            abs_sum += term.abs();
            if kf + 2.0 > x {
                let tail = bound_term * x / (kf + 1.0) / (1.0 - x / (kf + 2.0));
                if tail < 1e-14 {
                    return Ok(NumericValue {
                        value: rotation * sum.value(),
                        error_estimate: tail + 4.0 * f64::EPSILON * abs_sum,
                        method: Method::Series,
                    });
                }
            }
        }
        Err(GmlError::Convergence {
            what: "characteristic-function series",
            estimate: sum.value(),
            error_estimate: f64::NAN,
        })
    }

    /// The characteristic function as `e^{itᵀμ} ∫_0^∞ Ω_n(v tᵀΣt) f_R(v) dv`.
    pub fn cf_quadrature(&self, t: &[f64]) -> Result<NumericValue<Complex64>> {
        let (q, phase) = self.check_t(t)?;
        let rotation = Complex64::from_polar(1.0, phase);
        if q == 0.0 {
            return Ok(NumericValue::closed_form(rotation));
        }
        let n = self.dim();
        let spec = QuadratureSpec {
            absolute_tolerance: 1e-14,
            ..QuadratureSpec::default()
        };
        let integrand = |v: f64| -> Result<f64> {
            let density = self.radial.density(v)?;
            if density == 0.0 {
                return Ok(0.0);
            }
            Ok(omega_n(n, v * q)? * density)
        };
        let v = try_integrate_semi_infinite(integrand, n as f64 / 2.0 - 1.0, &spec).map_err(|e| match e {
            GmlError::Convergence { .. } => {
                GmlError::Range(format!("characteristic-function quadrature failed at tᵀΣt = {q}: {e}"))
            }
            other => other,
        })?;
        Ok(NumericValue {
            value: rotation * v.value,
            error_estimate: v.error_estimate,
            method: Method::Quadrature,
        })
    }
}

/// Term signs for [`GmlDistribution::cf_series_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSign {
    Alternating,
    Dropped,
}

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform point on the unit sphere in `u.len()` dimensions.
pub(crate) fn sphere_point<R: rand::Rng + ?Sized>(rng: &mut R, u: &mut DVector<f64>) {
    loop {
        for v in u.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let norm = u.norm();
        if norm > 0.0 {
            *u /= norm;
            return;
        }
    }
}

/// Draws stored row-major, one row per draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    dim: usize,
    seed: u64,
    draws: Vec<f64>,
}

impl SampleBatch {
    /// Wraps externally produced draws, e.g. read back from a file.
    pub fn from_rows(dim: usize, seed: u64, draws: Vec<f64>) -> Result<Self> {
        if dim == 0 || !draws.len().is_multiple_of(dim) {
            return Err(GmlError::Shape {
                expected: dim,
                got: draws.len(),
            });
        }
        if draws.iter().any(|v| !v.is_finite()) {
            return Err(GmlError::domain("draws contain non-finite values"));
        }
        Ok(SampleBatch { dim, seed, draws })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.draws.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.draws[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.chunks(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.draws
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.count(), self.dim, &self.draws)
    }
}

/// `Ω_n(y)`, the characteristic function of the uniform law on the unit
/// sphere in `n` dimensions evaluated at `‖t‖² = y`.
pub fn omega_n(n: usize, y: f64) -> Result<f64> {
    if n == 0 {
        return Err(GmlError::domain("dimension must be at least 1"));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(GmlError::Domain(format!("Ω_n needs y ≥ 0, got {y}")));
    }
    if n == 1 {
        return Ok(y.sqrt().cos());
    }
    if y <= OMEGA_SERIES_LIMIT {
        Ok(omega_series(n, y))
    } else {
        omega_angular(n, y)
    }
}

/// `Σ_k (-y/4)^k / ((n/2)^{[k]} k!)`.
fn omega_series(n: usize, y: f64) -> f64 {
    let half = n as f64 / 2.0;
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..500 {
        let kf = k as f64;
        term *= -y / 4.0 / ((half + kf) * (kf + 1.0));
        sum.add(term);
        if term.abs() < 1e-18 && kf > y / 4.0 {
            break;
        }
    }
    sum.value()
}

/// `(2/B((n-1)/2, 1/2)) ∫_0^{π/2} cos(√y cos θ) sin^{n-2} θ dθ`.
fn omega_angular(n: usize, y: f64) -> Result<f64> {
    let x = y.sqrt();
    let half = n as f64 / 2.0;
    let inv_beta = (ln_gamma(half) - ln_gamma(half - 0.5) - 0.5 * PI.ln()).exp();
    let power = n as i32 - 2;
    let spec = QuadratureSpec {
        absolute_tolerance: 1e-15,
        max_refinement_levels: 16,
        ..QuadratureSpec::default()
    };
    let v = integrate_finite(
        |theta| (x * theta.cos()).cos() * theta.sin().powi(power),
        0.0,
        FRAC_PI_2,
        &spec,
    )?;
    Ok(2.0 * inv_beta * v.value)
}

/// Characteristic function of the one-dimensional law `GML_1(μ, σ², g)`:
/// `d_1 e^{itμ} ∫_0^∞ cos(tσ√y) g(y) / √y dy`.
pub fn cf_1d(t: f64, mu: f64, sigma: f64, params: &GeneratorParams) -> Result<Complex64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(GmlError::Domain(format!("σ must be positive, got {sigma}")));
    }
    if !t.is_finite() || !mu.is_finite() {
        return Err(GmlError::domain("t and μ must be finite"));
    }
    let w = t * sigma;
    if w.abs() > CF_1D_MAX_FREQUENCY {
        return Err(GmlError::Range(format!(
            "|t|σ = {} exceeds {CF_1D_MAX_FREQUENCY}",
            w.abs()
        )));
    }
    let d1 = crate::generator::norm_const_d(1, params)?;
    let spec = QuadratureSpec {
        absolute_tolerance: 1e-15,
        max_refinement_levels: 16,
        ..QuadratureSpec::default()
    };
    let p = *params;
    let integral = try_integrate_semi_infinite(|y| Ok((w * y.sqrt()).cos() * p.g(y) / y.sqrt()), -0.5, &spec).map_err(
        |e| match e {
            GmlError::Convergence { .. } => GmlError::Range(format!("one-dimensional CF quadrature failed: {e}")),
            other => other,
        },
    )?;
    Ok(Complex64::from_polar(1.0, t * mu) * (d1 * integral.value))
}
