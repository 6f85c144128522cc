//! Affine maps, projections, marginals and conditionals of GML laws.
//!
//! Full-rank affine images stay in the GML family. Projections to fewer
//! coordinates and conditionals are elliptical with a different generator and
//! are returned as [`EllipticalLaw`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Beta, Distribution};
use statrs::function::gamma::ln_gamma;

use crate::distribution::{chunk_rng, sphere_point, GmlDistribution, SampleBatch};
use crate::error::{GmlError, Result};
use crate::generator::{marginal_generator, MarginalGenerator};
use crate::linalg::{pivoted_rank, SpdFactor};
use crate::numerics::{try_integrate_semi_infinite, NumericValue, QuadratureSpec};
use crate::parallel::{fill_chunks, Execution};

/// A density generator `t ↦ h(t)`, `t ≥ 0`.
pub type GeneratorFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Points at which a generator is checked for being nonnegative and nonincreasing.
const GENERATOR_CHECK_GRID: [f64; 9] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// `Ell_m(μ, Σ, h)`, with density `Γ(m/2) π^{-m/2} / N · |Σ|^{-1/2} h(q)` where
/// `N = ∫_0^∞ t^{m/2-1} h(t) dt`.
#[derive(Clone)]
pub struct EllipticalLaw {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    factor: SpdFactor,
    generator: GeneratorFn,
    normalizer: f64,
    in_family: bool,
}

impl fmt::Debug for EllipticalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticalLaw")
            .field("mu", &self.mu)
            .field("sigma", &self.sigma)
            .field("normalizer", &self.normalizer)
            .field("in_family", &self.in_family)
            .finish_non_exhaustive()
    }
}

/// `∫_0^∞ t^{m/2-1} h(t) dt` by quadrature.
pub fn generator_normalizer(m: usize, generator: &GeneratorFn) -> Result<NumericValue> {
    let e = m as f64 / 2.0 - 1.0;
    try_integrate_semi_infinite(
        |t| {
            let h = generator(t)?;
            Ok(if h == 0.0 { 0.0 } else { (e * t.ln()).exp() * h })
        },
        e,
        &QuadratureSpec::default(),
    )
}

impl EllipticalLaw {
    /// Law with the normalizer computed by quadrature.
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>, generator: GeneratorFn) -> Result<Self> {
        let normalizer = generator_normalizer(mu.len(), &generator)?.value;
        Self::with_normalizer(mu, sigma, generator, normalizer)
    }

    /// Law with a known normalizer `∫_0^∞ t^{m/2-1} h(t) dt`.
    pub fn with_normalizer(
        mu: DVector<f64>,
        sigma: DMatrix<f64>,
        generator: GeneratorFn,
        normalizer: f64,
    ) -> Result<Self> {
        Self::build(mu, sigma, generator, normalizer, true)
    }

    /// GML generators rise near zero when `r a > 2 b`, so laws derived from a
    /// GML parent are only checked for nonnegativity.
    fn derived(mu: DVector<f64>, sigma: DMatrix<f64>, generator: GeneratorFn, normalizer: f64) -> Result<Self> {
        Self::build(mu, sigma, generator, normalizer, false)
    }

    fn build(
        mu: DVector<f64>,
        sigma: DMatrix<f64>,
        generator: GeneratorFn,
        normalizer: f64,
        decreasing: bool,
    ) -> Result<Self> {
        let m = mu.len();
        if m == 0 {
            return Err(GmlError::domain("dimension must be at least 1"));
        }
        if sigma.nrows() != m {
            return Err(GmlError::Shape {
                expected: m,
                got: sigma.nrows(),
            });
        }
        let factor = SpdFactor::new(&sigma)?;
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(GmlError::Domain(format!(
                "generator normalizer must be positive, got {normalizer}"
            )));
        }
        let mut previous = f64::INFINITY;
        for &t in &GENERATOR_CHECK_GRID {
            let h = generator(t)?;
            if !(h >= 0.0 && h.is_finite()) || (decreasing && h > previous * (1.0 + 1e-12)) {
                return Err(GmlError::Domain(format!(
                    "generator must be nonnegative and nonincreasing; h({t}) = {h}"
                )));
            }
            previous = h;
        }
        Ok(EllipticalLaw {
            mu,
            sigma,
            factor,
            generator,
            normalizer,
            in_family: false,
        })
    }

    /// The GML law itself, as an elliptical law.
    pub fn from_gml(dist: &GmlDistribution) -> Result<Self> {
        let p = *dist.params();
        let mut law = Self::derived(
            dist.mu().clone(),
            dist.sigma().clone(),
            Arc::new(move |t| Ok(p.g(t))),
            dist.radial().normalizer(),
        )?;
        law.in_family = true;
        Ok(law)
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

    pub fn factor(&self) -> DMatrix<f64> {
        self.factor.lower()
    }

    pub fn log_det_sigma(&self) -> f64 {
        self.factor.log_det()
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Whether the law is known to be GML with the parent generator.
    pub fn is_in_family(&self) -> bool {
        self.in_family
    }

    pub fn generator(&self) -> &GeneratorFn {
        &self.generator
    }

    pub fn generator_value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(GmlError::Domain(format!(
                "generator argument must be nonnegative, got {t}"
            )));
        }
        (self.generator)(t)
    }

    /// `Γ(m/2) π^{-m/2} / N`, the counterpart of `d_n`.
    pub fn density_constant(&self) -> f64 {
        let half = self.dim() as f64 / 2.0;
        (ln_gamma(half) - half * PI.ln()).exp() / self.normalizer
    }

    pub fn mahalanobis(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(GmlError::Shape {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let v = DVector::from_iterator(x.len(), x.iter().zip(self.mu.iter()).map(|(a, b)| a - b));
        Ok(self.factor.quadratic_form(&v))
    }

    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        let q = self.mahalanobis(x)?;
        Ok(self.density_constant() * (-0.5 * self.factor.log_det()).exp() * (self.generator)(q)?)
    }

    /// `E(R^l)` for the radial variable of this law, by quadrature.
    pub fn radial_moment_quadrature(&self, l: f64) -> Result<NumericValue> {
        let e = self.dim() as f64 / 2.0 - 1.0 + l;
        let v = try_integrate_semi_infinite(
            |t| {
                let h = (self.generator)(t)?;
                Ok(if h == 0.0 { 0.0 } else { (e * t.ln()).exp() * h })
            },
            e,
            &QuadratureSpec::default(),
        )?;
        Ok(v.map(|x| x / self.normalizer))
    }
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// `Y = B X + b` for a nonsingular `n × n` matrix `B`: `GML_n(Bμ + b, BΣBᵀ, g)`.
pub fn affine_full_rank(dist: &GmlDistribution, b_mat: &DMatrix<f64>, shift: &DVector<f64>) -> Result<GmlDistribution> {
    let n = dist.dim();
    if b_mat.nrows() != n || b_mat.ncols() != n {
        return Err(GmlError::Shape {
            expected: n,
            got: if b_mat.nrows() != n {
                b_mat.nrows()
            } else {
                b_mat.ncols()
            },
        });
    }
    if shift.len() != n {
        return Err(GmlError::Shape {
            expected: n,
            got: shift.len(),
        });
    }
    if pivoted_rank(&symmetrized(b_mat * b_mat.transpose()))? < n {
        return Err(GmlError::Rank("affine map is singular".into()));
    }
    let mu = b_mat * dist.mu() + shift;
    let sigma = symmetrized(b_mat * dist.sigma() * b_mat.transpose());
    GmlDistribution::new(mu, sigma, *dist.params())
}

/// `Y = B X + b` for an `m × n` matrix `B` of rank `m < n`, together with two
/// samplers for `Y`.
#[derive(Debug, Clone)]
pub struct Projection {
    law: EllipticalLaw,
    source: GmlDistribution,
    b_mat: DMatrix<f64>,
    shift: DVector<f64>,
    generator: MarginalGenerator,
}

pub fn project(dist: &GmlDistribution, b_mat: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Projection> {
    let n = dist.dim();
    let m = b_mat.nrows();
    if b_mat.ncols() != n {
        return Err(GmlError::Shape {
            expected: n,
            got: b_mat.ncols(),
        });
    }
    if shift.len() != m {
        return Err(GmlError::Shape {
            expected: m,
            got: shift.len(),
        });
    }
    if m == 0 || m >= n {
        return Err(GmlError::Precondition(format!(
            "projection needs 1 ≤ m < n rows, got m = {m}, n = {n}"
        )));
    }
    let sigma = symmetrized(b_mat * dist.sigma() * b_mat.transpose());
    let rank = pivoted_rank(&sigma)?;
    if rank < m {
        return Err(GmlError::Rank(format!("projection matrix has rank {rank} < {m}")));
    }
    let generator = marginal_generator(m, n, dist.params())?;
    let normalizer = generator.radial_integral()?;
    let mu = b_mat * dist.mu() + shift;
    let law = EllipticalLaw::derived(mu, sigma, Arc::new(move |t| generator.value(t)), normalizer)?;
    Ok(Projection {
        law,
        source: dist.clone(),
        b_mat: b_mat.clone(),
        shift: shift.clone(),
        generator,
    })
}

impl Projection {
    pub fn law(&self) -> &EllipticalLaw {
        &self.law
    }

    pub fn into_law(self) -> EllipticalLaw {
        self.law
    }

    pub fn marginal_generator(&self) -> &MarginalGenerator {
        &self.generator
    }

    /// Draws of `X` mapped through `B` and `b`.
    pub fn sample_pushforward(&self, count: usize, seed: u64) -> Result<SampleBatch> {
        let x = self.source.sample(count, seed)?;
        let m = self.b_mat.nrows();
        let mut draws = Vec::with_capacity(count * m);
        for row in x.rows() {
            let y = &self.b_mat * DVector::from_column_slice(row) + &self.shift;
            draws.extend_from_slice(y.as_slice());
        }
        SampleBatch::from_rows(m, seed, draws)
    }

    /// Draws from `Y = Bμ + b + √(R W) A_Y u` where `R` is the radial
    /// variable of `X`, `W ~ Beta(m/2, (n-m)/2)`, `A_Y A_Yᵀ = BΣBᵀ` and `u` is
    /// uniform on the unit sphere in `m` dimensions.
    pub fn sample_representation(&self, count: usize, seed: u64) -> Result<SampleBatch> {
        self.sample_representation_with(count, seed, Execution::default())
    }

    pub fn sample_representation_with(&self, count: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
        let m = self.law.dim();
        let n = self.source.dim();
        let beta = Beta::new(m as f64 / 2.0, (n - m) as f64 / 2.0).map_err(|e| GmlError::Internal(e.to_string()))?;
        let lower = self.law.factor();
        let radial = self.source.radial();
        let mu = self.law.mu();
        let mut draws = vec![0.0; count * m];
        fill_chunks(&mut draws, m, exec, |chunk, rows| {
            let mut rng = chunk_rng(seed, chunk);
            let mut u = DVector::zeros(m);
            for row in rows.chunks_mut(m) {
                let r = radial.sample(&mut rng)?;
                let w: f64 = beta.sample(&mut rng);
                sphere_point(&mut rng, &mut u);
                let y = mu + &lower * &u * (r * w).sqrt();
                row.copy_from_slice(y.as_slice());
            }
            Ok(())
        })?;
        SampleBatch::from_rows(m, seed, draws)
    }
}

fn check_indices(n: usize, indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(GmlError::Index("index set is empty".into()));
    }
    if indices.len() >= n {
        return Err(GmlError::Index(format!(
            "index set must be a proper subset of 0..{n}, got {} indices",
            indices.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(GmlError::Index(format!("index {i} out of range for dimension {n}")));
        }
        if seen[i] {
            return Err(GmlError::Index(format!("index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `m × n` matrix picking the coordinates `indices` (zero-based) in order.
pub fn selection_matrix(n: usize, indices: &[usize]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(indices.len(), n);
    for (row, &i) in indices.iter().enumerate() {
        s[(row, i)] = 1.0;
    }
    s
}

/// Law of the coordinates `indices` (zero-based, in the given order):
/// `Ell_m(μ⁽¹⁾, Σ₁₁, g_(m))`.
pub fn marginalize(dist: &GmlDistribution, indices: &[usize]) -> Result<EllipticalLaw> {
    check_indices(dist.dim(), indices)?;
    let s = selection_matrix(dist.dim(), indices);
    Ok(project(dist, &s, &DVector::zeros(indices.len()))?.into_law())
}

/// Law of the remaining coordinates given `X[indices] = x1`:
/// `Ell(μ₂ + Σ₂₁Σ₁₁⁻¹(x1 - μ₁), Σ₂₂ - Σ₂₁Σ₁₁⁻¹Σ₁₂, t ↦ g(t + q1))` with
/// `q1 = (x1-μ₁)ᵀ Σ₁₁⁻¹ (x1-μ₁)`. The remaining coordinates keep ascending order.
pub fn condition(dist: &GmlDistribution, indices: &[usize], x1: &[f64]) -> Result<EllipticalLaw> {
    let n = dist.dim();
    check_indices(n, indices)?;
    let m = indices.len();
    if x1.len() != m {
        return Err(GmlError::Shape {
            expected: m,
            got: x1.len(),
        });
    }
    let rest: Vec<usize> = (0..n).filter(|i| !indices.contains(i)).collect();
    let sigma = dist.sigma();
    let mu = dist.mu();
    let block =
        |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| sigma[(rows[i], cols[j])]);
    let s11 = block(indices, indices);
    let s12 = block(indices, &rest);
    let s22 = block(&rest, &rest);
    let f11 = SpdFactor::new(&s11)?;
    let diff = DVector::from_iterator(m, indices.iter().zip(x1).map(|(&i, &x)| x - mu[i]));
    let q1 = f11.quadratic_form(&diff);
    let weights = f11.solve(&s12); // Σ₁₁⁻¹ Σ₁₂
    let mu2 = DVector::from_iterator(rest.len(), rest.iter().map(|&i| mu[i])) + weights.transpose() * &diff;
    let sigma221 = symmetrized(s22 - s12.transpose() * &weights);

    let params = *dist.params();
    let normalizer = marginal_generator(m, n, &params)?.value(q1)?;
    if !(normalizer > 0.0) {
        return Err(GmlError::Range(format!(
            "conditioning point is too far out (q1 = {q1}); the conditional normalizer underflows"
        )));
    }
    let mut law = EllipticalLaw::derived(mu2, sigma221, Arc::new(move |t| Ok(params.g(t + q1))), normalizer)?;
    law.in_family = q1 < 1e-14;
    Ok(law)
}
