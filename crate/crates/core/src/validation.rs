//! Independent oracles for the closed forms: Monte-Carlo moment and
//! characteristic-function estimates, direct pdf integration and a
//! Kolmogorov-distance test of the marginal sampler.
//!
//! Every Monte-Carlo check passes when `|expected - observed| ≤ max(tolerance,
//! 3·SE)`. Checks are judged one at a time with no multiplicity correction.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::distribution::{GmlDistribution, SampleBatch, SeriesSign};
use crate::error::{GmlError, Result};
use crate::generator::{consistency_distance, norm_const_c, GeneratorParams};
use crate::numerics::{try_integrate_finite, QuadratureSpec};
use crate::specfun::{phi_star_real, phi_star_series, riemann_zeta, PhiStarArgs};
use crate::transforms::{marginalize, EllipticalLaw};

/// Minimum sample size for [`mc_moment_check`].
pub const MIN_MOMENT_COUNT: usize = 10_000;
/// Minimum sample size for [`cf_mc_check`] and [`marginal_sampler_check`].
pub const MIN_CF_COUNT: usize = 100_000;
/// Width of the Monte-Carlo acceptance band in standard errors.
pub const SE_BAND: f64 = 3.0;
/// Asymptotic 1% critical value of the Kolmogorov statistic times `√N`.
pub const KOLMOGOROV_CRITICAL: f64 = 1.63;
/// Slack applied to the Kolmogorov bound for numeric CDF error.
pub const KOLMOGOROV_SLACK: f64 = 1.5;
/// Target accuracy of [`pdf_normalization_check`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Tolerance used by Monte-Carlo checks where only the SE band matters.
const MC_TOLERANCE: f64 = 1e-12;
/// Cells of the cumulative table behind the numeric marginal CDF.
const CDF_TABLE_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CheckValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl CheckValue {
    fn distance(&self, other: &CheckValue) -> f64 {
        let as_complex = |v: &CheckValue| match *v {
            CheckValue::Real(x) => Complex64::new(x, 0.0),
            CheckValue::Complex { re, im } => Complex64::new(re, im),
        };
        (as_complex(self) - as_complex(other)).norm()
    }
}

impl From<f64> for CheckValue {
    fn from(x: f64) -> Self {
        CheckValue::Real(x)
    }
}

impl From<Complex64> for CheckValue {
    fn from(z: Complex64) -> Self {
        CheckValue::Complex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: CheckValue,
    pub observed: CheckValue,
    pub tolerance: f64,
    pub standard_error: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        expected: impl Into<CheckValue>,
        observed: impl Into<CheckValue>,
        tolerance: f64,
        standard_error: Option<f64>,
    ) -> Self {
        let expected = expected.into();
        let observed = observed.into();
        let band = tolerance.max(standard_error.map_or(0.0, |se| SE_BAND * se));
        let passed = expected.distance(&observed) <= band;
        Check {
            name: name.into(),
            expected,
            observed,
            tolerance,
            standard_error,
            passed,
        }
    }

    /// Check with a tolerance relative to `|expected|`.
    pub fn relative(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self::new(name, expected, observed, tolerance * expected.abs(), None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

impl ValidationReport {
    pub fn new(seed: u64) -> Self {
        ValidationReport {
            passed: true,
            checks: Vec::new(),
            seed,
            elapsed_seconds: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        for c in other.checks {
            self.push(c);
        }
        self.elapsed_seconds += other.elapsed_seconds;
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn timed(mut self, start: Instant) -> Self {
        self.elapsed_seconds = start.elapsed().as_secs_f64();
        self
    }
}

/// Sample mean and standard error of the mean.
fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        count += 1;
        let delta = v - mean;
        mean += delta / count as f64;
        m2 += delta * (v - mean);
    }
    if count < 2 {
        return (mean, f64::INFINITY);
    }
    let var = m2 / (count - 1) as f64;
    (mean, (var / count as f64).sqrt())
}

/// Mean, covariance and product-moment checks on `count` fresh draws.
pub fn mc_moment_check(dist: &GmlDistribution, count: usize, seed: u64) -> Result<ValidationReport> {
    if count < MIN_MOMENT_COUNT {
        return Err(GmlError::Precondition(format!(
            "moment check needs at least {MIN_MOMENT_COUNT} draws, got {count}"
        )));
    }
    let start = Instant::now();
    let batch = dist.sample(count, seed)?;
    Ok(mc_moment_check_batch(dist, &batch)?.timed(start))
}

/// [`mc_moment_check`] on an existing batch, e.g. one read back from a file.
pub fn mc_moment_check_batch(dist: &GmlDistribution, batch: &SampleBatch) -> Result<ValidationReport> {
    let n = dist.dim();
    if batch.dim() != n {
        return Err(GmlError::Shape {
            expected: n,
            got: batch.dim(),
        });
    }
    let mut report = ValidationReport::new(batch.seed());
    let mu = dist.mu();
    let cov = dist.cov()?;
    let means: Vec<f64> = (0..n)
        .map(|j| batch.column(j).sum::<f64>() / batch.count() as f64)
        .collect();
    for j in 0..n {
        let (m, se) = mean_and_se(batch.column(j));
        report.push(Check::new(format!("mean[{j}]"), mu[j], m, MC_TOLERANCE, Some(se)));
    }
    for i in 0..n {
        for j in i..n {
            let (c, se) = mean_and_se(batch.rows().map(|x| (x[i] - means[i]) * (x[j] - means[j])));
            report.push(Check::new(
                format!("cov[{i},{j}]"),
                cov[(i, j)],
                c,
                MC_TOLERANCE,
                Some(se),
            ));
        }
    }

    let factor = dist.spd_factor();
    let whitened: Vec<DVector<f64>> = batch
        .rows()
        .map(|x| factor.whiten(&(DVector::from_column_slice(x) - mu)))
        .collect();
    let mut selections: Vec<Vec<u32>> = vec![];
    let mut fourth = vec![0; n];
    fourth[0] = 2;
    selections.push(fourth);
    if n >= 2 {
        let mut mixed = vec![0; n];
        mixed[0] = 1;
        mixed[1] = 1;
        selections.push(mixed);
    }
    for orders in selections {
        let expected = dist.product_moment(&orders)?;
        let (m, se) = mean_and_se(whitened.iter().map(|y| {
            orders
                .iter()
                .enumerate()
                .map(|(i, &k)| y[i].powi(2 * k as i32))
                .product::<f64>()
        }));
        report.push(Check::new(
            format!("product_moment{orders:?}"),
            expected,
            m,
            MC_TOLERANCE,
            Some(se),
        ));
    }
    Ok(report)
}

/// Means and covariances of two independent batches of the same law, compared
/// with the combined standard error.
pub fn two_sample_moment_check(first: &SampleBatch, second: &SampleBatch) -> Result<ValidationReport> {
    let n = first.dim();
    if second.dim() != n {
        return Err(GmlError::Shape {
            expected: n,
            got: second.dim(),
        });
    }
    let mut report = ValidationReport::new(first.seed());
    let column_means = |batch: &SampleBatch| -> Vec<f64> {
        (0..n)
            .map(|j| batch.column(j).sum::<f64>() / batch.count() as f64)
            .collect()
    };
    let (m1, m2) = (column_means(first), column_means(second));
    for j in 0..n {
        let (a, se_a) = mean_and_se(first.column(j));
        let (b, se_b) = mean_and_se(second.column(j));
        report.push(Check::new(
            format!("mean[{j}]"),
            a,
            b,
            MC_TOLERANCE,
            Some(se_a.hypot(se_b)),
        ));
    }
    for i in 0..n {
        for j in i..n {
            let (a, se_a) = mean_and_se(first.rows().map(|x| (x[i] - m1[i]) * (x[j] - m1[j])));
            let (b, se_b) = mean_and_se(second.rows().map(|x| (x[i] - m2[i]) * (x[j] - m2[j])));
            report.push(Check::new(
                format!("cov[{i},{j}]"),
                a,
                b,
                MC_TOLERANCE,
                Some(se_a.hypot(se_b)),
            ));
        }
    }
    Ok(report)
}

/// Half-width of the integration cube in standardized coordinates: at least
/// 10 and large enough that the radial tail beyond it is below `1e-12`.
fn normalization_box_width(dist: &GmlDistribution) -> Result<f64> {
    let q = dist.radial().inverse_cdf(1.0 - 1e-12)?;
    Ok(q.sqrt().max(10.0))
}

/// `∫ pdf` by nested tanh-sinh quadrature over a cube in standardized
/// coordinates `x = μ + A z`, folded onto the positive orthant.
pub fn pdf_normalization_check(dist: &GmlDistribution) -> Result<ValidationReport> {
    let n = dist.dim();
    if n > 3 {
        return Err(GmlError::UnsupportedDimension(n));
    }
    let start = Instant::now();
    let width = normalization_box_width(dist)?;
    let lower = dist.factor().clone();
    let jacobian = (0.5 * dist.log_det_sigma()).exp() * 2f64.powi(n as i32);
    let spec = QuadratureSpec::default().with_relative_tolerance(1e-10);
    let density = |z: &[f64]| -> Result<f64> {
        let x = dist.mu() + &lower * DVector::from_column_slice(z);
        dist.pdf(x.as_slice())
    };
    let integral = match n {
        1 => try_integrate_finite(|z| density(&[z]), 0.0, width, &spec)?.value,
        2 => {
            try_integrate_finite(
                |z1| Ok(try_integrate_finite(|z2| density(&[z1, z2]), 0.0, width, &spec)?.value),
                0.0,
                width,
                &spec,
            )?
            .value
        }
        _ => {
            try_integrate_finite(
                |z1| {
                    Ok(try_integrate_finite(
                        |z2| Ok(try_integrate_finite(|z3| density(&[z1, z2, z3]), 0.0, width, &spec)?.value),
                        0.0,
                        width,
                        &spec,
                    )?
                    .value)
                },
                0.0,
                width,
                &spec,
            )?
            .value
        }
    };
    let mut report = ValidationReport::new(0);
    report.push(Check::new(
        format!("pdf_integral[n={n}]"),
        1.0,
        integral * jacobian,
        NORMALIZATION_TOLERANCE,
        None,
    ));
    Ok(report.timed(start))
}

/// Empirical `E exp(i t'X)` against [`GmlDistribution::cf`] at every grid point.
pub fn cf_mc_check(dist: &GmlDistribution, t_grid: &[Vec<f64>], count: usize, seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let batch = cf_batch(dist, count, seed)?;
    let expected = t_grid.iter().map(|t| dist.cf(t)).collect::<Result<Vec<_>>>()?;
    Ok(cf_mc_check_against(&batch, t_grid, &expected)?.timed(start))
}

/// [`cf_mc_check`] against the series with the chosen sign convention; with
/// [`SeriesSign::Dropped`] this is a negative control.
pub fn cf_mc_check_series(
    dist: &GmlDistribution,
    t_grid: &[Vec<f64>],
    count: usize,
    seed: u64,
    sign: SeriesSign,
) -> Result<ValidationReport> {
    let start = Instant::now();
    let batch = cf_batch(dist, count, seed)?;
    let expected = t_grid
        .iter()
        .map(|t| Ok(dist.cf_series_with(t, sign)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(cf_mc_check_against(&batch, t_grid, &expected)?.timed(start))
}

fn cf_batch(dist: &GmlDistribution, count: usize, seed: u64) -> Result<SampleBatch> {
    if count < MIN_CF_COUNT {
        return Err(GmlError::Precondition(format!(
            "characteristic-function check needs at least {MIN_CF_COUNT} draws, got {count}"
        )));
    }
    dist.sample(count, seed)
}

/// Empirical characteristic function of `batch` against given values.
pub fn cf_mc_check_against(
    batch: &SampleBatch,
    t_grid: &[Vec<f64>],
    expected: &[Complex64],
) -> Result<ValidationReport> {
    if t_grid.len() != expected.len() {
        return Err(GmlError::Shape {
            expected: t_grid.len(),
            got: expected.len(),
        });
    }
    let mut report = ValidationReport::new(batch.seed());
    for (t, &want) in t_grid.iter().zip(expected) {
        if t.len() != batch.dim() {
            return Err(GmlError::Shape {
                expected: batch.dim(),
                got: t.len(),
            });
        }
        let phase = |x: &[f64]| t.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let (re, se_re) = mean_and_se(batch.rows().map(|x| phase(x).cos()));
        let (im, se_im) = mean_and_se(batch.rows().map(|x| phase(x).sin()));
        let se = se_re.hypot(se_im);
        report.push(Check::new(
            format!("cf{t:?}"),
            want,
            Complex64::new(re, im),
            MC_TOLERANCE,
            Some(se),
        ));
    }
    Ok(report)
}

/// Numeric CDF of a one-dimensional elliptical law, tabulated on `[0, z_max]`
/// in standardized units and interpolated with cubic Hermite pieces.
#[derive(Debug, Clone)]
pub struct MarginalCdf {
    mu: f64,
    scale: f64,
    step: f64,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MarginalCdf {
    pub fn new(law: &EllipticalLaw, z_max: f64) -> Result<Self> {
        if law.dim() != 1 {
            return Err(GmlError::Shape {
                expected: 1,
                got: law.dim(),
            });
        }
        if !(z_max > 0.0 && z_max.is_finite()) {
            return Err(GmlError::Domain(format!("table range must be positive, got {z_max}")));
        }
        let constant = law.density_constant();
        let f = |z: f64| Ok::<_, GmlError>(constant * law.generator_value(z * z)?);
        let step = z_max / CDF_TABLE_CELLS as f64;
        let mut density = Vec::with_capacity(CDF_TABLE_CELLS + 1);
        let mut cumulative = Vec::with_capacity(CDF_TABLE_CELLS + 1);
        density.push(f(0.0)?);
        cumulative.push(0.0);
        for i in 0..CDF_TABLE_CELLS {
            let z0 = i as f64 * step;
            let mid = f(z0 + 0.5 * step)?;
            let right = f(z0 + step)?;
            let cell = step / 6.0 * (density[i] + 4.0 * mid + right);
            cumulative.push(cumulative[i] + cell);
            density.push(right);
        }
        Ok(MarginalCdf {
            mu: law.mu()[0],
            scale: law.sigma()[(0, 0)].sqrt(),
            step,
            density,
            cumulative,
        })
    }

    fn half(&self, z: f64) -> f64 {
        let pos = z / self.step;
        let i = pos.floor() as usize;
        if i >= CDF_TABLE_CELLS {
            return self.cumulative[CDF_TABLE_CELLS];
        }
        let u = pos - i as f64;
        let (c0, c1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (d0, d1) = (self.density[i] * self.step, self.density[i + 1] * self.step);
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * c0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * c1 + (u3 - u2) * d1
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.scale;
        let h = self.half(z.abs());
        if z >= 0.0 {
            0.5 + h
        } else {
            0.5 - h
        }
    }
}

/// Kolmogorov distance between `values` and `cdf`.
pub fn kolmogorov_distance(mut values: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov test of one sampled coordinate against its marginal law.
pub fn marginal_sampler_check(
    dist: &GmlDistribution,
    component: usize,
    count: usize,
    seed: u64,
) -> Result<ValidationReport> {
    let law = if dist.dim() == 1 {
        EllipticalLaw::from_gml(dist)?
    } else {
        marginalize(dist, &[component])?
    };
    marginal_sampler_check_with(dist, component, count, seed, &law)
}

/// [`marginal_sampler_check`] against an arbitrary one-dimensional law.
pub fn marginal_sampler_check_with(
    dist: &GmlDistribution,
    component: usize,
    count: usize,
    seed: u64,
    law: &EllipticalLaw,
) -> Result<ValidationReport> {
    if count < MIN_CF_COUNT {
        return Err(GmlError::Precondition(format!(
            "marginal sampler check needs at least {MIN_CF_COUNT} draws, got {count}"
        )));
    }
    if component >= dist.dim() {
        return Err(GmlError::Index(format!(
            "component {component} out of range for dimension {}",
            dist.dim()
        )));
    }
    let start = Instant::now();
    let batch = dist.sample(count, seed)?;
    let values: Vec<f64> = batch.column(component).collect();
    let scale = law.sigma()[(0, 0)].sqrt();
    let z_max = values
        .iter()
        .map(|x| ((x - law.mu()[0]) / scale).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let cdf = MarginalCdf::new(law, z_max)?;
    let distance = kolmogorov_distance(values, |x| cdf.cdf(x));
    let bound = KOLMOGOROV_SLACK * KOLMOGOROV_CRITICAL / (count as f64).sqrt();
    let mut report = ValidationReport::new(seed);
    report.push(Check::new(
        format!("kolmogorov[{component}]"),
        0.0,
        distance,
        bound,
        None,
    ));
    Ok(report.timed(start))
}

/// Named groups of checks run by the command-line `validate` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Constants,
    Moments,
    Cf,
    Marginals,
    All,
}

impl std::str::FromStr for Suite {
    type Err = GmlError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constants" => Ok(Suite::Constants),
            "moments" => Ok(Suite::Moments),
            "cf" => Ok(Suite::Cf),
            "marginals" => Ok(Suite::Marginals),
            "all" => Ok(Suite::All),
            other => Err(GmlError::Domain(format!("unknown suite '{other}'"))),
        }
    }
}

/// `c_n` values from Example 2.1 of the classic logistic family.
pub fn classic_constant_table() -> Vec<(usize, f64)> {
    vec![
        (2, 1.0 / PI),
        (4, 1.0 / (4.0 * PI * PI * LN_2)),
        (6, 3.0 / (2.0 * PI.powi(5))),
        (10, 45.0 / (14.0 * PI.powi(9))),
        (14, 945.0 / (124.0 * PI.powi(13))),
        (18, 4725.0 / (254.0 * PI.powi(17))),
    ]
}

fn constants_suite(seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut report = ValidationReport::new(seed);
    for (n, want) in classic_constant_table() {
        report.push(Check::relative(format!("c_{n}"), want, norm_const_c(n)?.value, 1e-10));
    }
    report.push(Check::relative(
        "phi*_2(-1,1,1)",
        0.5,
        phi_star_real(-1.0, 1.0, 1.0, 2.0)?,
        1e-10,
    ));
    report.push(Check::relative(
        "phi*_2(-1,2,1)",
        LN_2,
        phi_star_real(-1.0, 2.0, 1.0, 2.0)?,
        1e-10,
    ));
    for n in [6u32, 8, 10, 12] {
        let half = n as f64 / 2.0;
        let want = (2f64.powf(half) - 4.0) * riemann_zeta(half - 1.0)? / 2f64.powf(half);
        report.push(Check::relative(
            format!("phi*_2(-1,{half},1)"),
            want,
            phi_star_real(-1.0, half, 1.0, 2.0)?,
            1e-9,
        ));
    }
    for &(z, s, a, mu) in &[(0.5, 1.5, 1.0, 2.0), (-0.7, 2.5, 0.5, 3.0), (0.9, 3.0, 2.0, 0.5)] {
        let args = PhiStarArgs::new(z, s, a, mu)?;
        let series = phi_star_series(&args)?.value;
        report.push(Check::relative(
            format!("phi*_{mu}({z},{s},{a}) series vs quadrature"),
            series,
            phi_star_real(z, s, a, mu)?,
            1e-9,
        ));
    }
    Ok(report.timed(start))
}

fn moments_suite(seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut report = ValidationReport::new(seed);
    let logistic2 = GmlDistribution::standard(2, GeneratorParams::logistic())?;
    report.push(Check::relative(
        "E(R)[n=2,a=b=1,r=2]",
        2.0 * LN_2,
        logistic2.radial().moment(1.0)?,
        1e-10,
    ));
    report.push(Check::relative(
        "E(R) quadrature[n=2,a=b=1,r=2]",
        2.0 * LN_2,
        logistic2.radial().moment_quadrature(1.0)?.value,
        1e-10,
    ));
    report.push(Check::relative(
        "cov_scale[n=2,a=b=1,r=2]",
        LN_2,
        logistic2.cov_scale()?,
        1e-10,
    ));
    report.extend(mc_moment_check(&logistic2, 1_000_000, seed)?);

    let sigma = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, -0.2, 0.4, 2.0, 0.3, -0.2, 0.3, 0.5]);
    let normal3 = GmlDistribution::new(
        DVector::from_vec(vec![0.5, -1.0, 2.0]),
        sigma,
        GeneratorParams::normal(),
    )?;
    report.extend(mc_moment_check(&normal3, 1_000_000, seed.wrapping_add(1))?);
    report.extend(pdf_normalization_check(&GmlDistribution::standard(
        1,
        GeneratorParams::logistic(),
    )?)?);
    report.extend(pdf_normalization_check(&GmlDistribution::standard(
        2,
        GeneratorParams::new(1.0, 1.0, 0.5)?,
    )?)?);
    Ok(report.timed(start))
}

/// Grid points `t = (√(v/2), √(v/2))` with `t't = v` for a standard law in two dimensions.
fn diagonal_grid(values: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|v| vec![(v / 2.0).sqrt(); 2]).collect()
}

fn cf_suite(seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut report = ValidationReport::new(seed);
    let logistic2 = GmlDistribution::standard(2, GeneratorParams::logistic())?;
    for t in diagonal_grid(&[0.25, 1.0, 4.0, 16.0, 50.0]) {
        let series = logistic2.cf_series(&t)?.value;
        let quad = logistic2.cf_quadrature(&t)?.value;
        report.push(Check::new(
            format!("cf series vs quadrature {t:?}"),
            series,
            quad,
            1e-8,
            None,
        ));
    }
    report.extend(cf_mc_check(
        &logistic2,
        &diagonal_grid(&[0.0, 0.25, 1.0, 4.0]),
        1_000_000,
        seed,
    )?);

    let normal = GmlDistribution::new(
        DVector::from_vec(vec![1.0, -0.5]),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]),
        GeneratorParams::normal(),
    )?;
    let grid = vec![vec![0.5, 0.0], vec![0.3, -0.7], vec![1.0, 1.0]];
    for t in &grid {
        let tv = DVector::from_column_slice(t);
        let want = Complex64::new(
            -0.5 * (tv.transpose() * normal.sigma() * &tv)[(0, 0)],
            tv.dot(normal.mu()),
        )
        .exp();
        report.push(Check::new(format!("normal cf {t:?}"), want, normal.cf(t)?, 1e-8, None));
    }
    report.extend(cf_mc_check(&normal, &grid, 1_000_000, seed.wrapping_add(1))?);
    Ok(report.timed(start))
}

fn marginals_suite(seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut report = ValidationReport::new(seed);
    let logistic3 = GmlDistribution::standard(3, GeneratorParams::logistic())?;
    report.extend(marginal_sampler_check(&logistic3, 0, 1_000_000, seed)?);
    let normal2 = GmlDistribution::new(
        DVector::from_vec(vec![0.0, 1.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
        GeneratorParams::normal(),
    )?;
    report.extend(marginal_sampler_check(&normal2, 1, 1_000_000, seed.wrapping_add(1))?);
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
    let gml = consistency_distance(3, 1, &GeneratorParams::logistic(), &grid)?;
    report.push(Check::new(
        "consistency distance > 0.01 [logistic]",
        1.0,
        f64::from(u8::from(gml > 0.01)),
        0.0,
        None,
    ));
    let normal = consistency_distance(3, 1, &GeneratorParams::normal(), &grid)?;
    report.push(Check::new("consistency distance [normal]", 0.0, normal, 1e-9, None));
    Ok(report.timed(start))
}

/// Runs the named group of checks.
pub fn run_suite(suite: Suite, seed: u64) -> Result<ValidationReport> {
    let start = Instant::now();
    let report = match suite {
        Suite::Constants => constants_suite(seed)?,
        Suite::Moments => moments_suite(seed)?,
        Suite::Cf => cf_suite(seed)?,
        Suite::Marginals => marginals_suite(seed)?,
        Suite::All => {
            let mut all = constants_suite(seed)?;
            all.extend(moments_suite(seed)?);
            all.extend(cf_suite(seed)?);
            all.extend(marginals_suite(seed)?);
            all
        }
    };
    Ok(report.timed(start))
}
