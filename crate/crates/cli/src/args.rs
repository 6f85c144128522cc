use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gml_core::{GeneratorParams, GmlDistribution};
use nalgebra::{DMatrix, DVector};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "gml",
    version,
    about = "Generalized elliptically symmetric logistic distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of c_n and d_n(a=b=1, r=2) for n = 1..n-max.
    Constants {
        #[arg(long, default_value_t = 18, value_parser = clap::value_parser!(u32).range(1..=18))]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Density over a square grid in the first two coordinates.
    PdfGrid {
        #[command(flatten)]
        dist: DistArgs,
        /// Half-width of the grid around the location.
        #[arg(long, default_value_t = 8.0)]
        range: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Emit the r = 0.5, 1, 2, 5, 10 densities with n = 2, a = b = 1.
        #[arg(long)]
        figures: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random draws, one row per draw.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean, covariance and radial moments in closed form.
    Moments {
        #[command(flatten)]
        dist: DistArgs,
        /// Radial moment orders E(R^l).
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0])]
        radial: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Characteristic function at one or more points.
    Cf {
        #[command(flatten)]
        dist: DistArgs,
        /// Comma-separated point; repeat for several points.
        #[arg(long = "t", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        #[arg(long, value_enum, default_value_t = CfMethod::Auto)]
        method: CfMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a validation suite, or check a sample file written by `sample`.
    Validate {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample file to check against the closed-form moments.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CfMethod {
    Auto,
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Comma-separated location; zeros when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Row-major comma-separated dispersion matrix, or `identity`.
    #[arg(long, default_value = "identity", allow_hyphen_values = true)]
    pub sigma: String,
}

pub fn parse_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse '{s}' in {what}")))
        })
        .collect()
}

/// The parameter set as given on the command line, echoed in output headers.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistSpec {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl DistSpec {
    pub fn build(&self) -> Result<GmlDistribution, CliError> {
        let params = GeneratorParams::new(self.a, self.b, self.r).map_err(CliError::invalid)?;
        if self.mu.len() != self.n {
            return Err(CliError::Usage(format!(
                "mu has {} entries, expected {}",
                self.mu.len(),
                self.n
            )));
        }
        if self.sigma.len() != self.n * self.n {
            return Err(CliError::Usage(format!(
                "sigma has {} entries, expected {}",
                self.sigma.len(),
                self.n * self.n
            )));
        }
        GmlDistribution::new(
            DVector::from_column_slice(&self.mu),
            DMatrix::from_row_slice(self.n, self.n, &self.sigma),
            params,
        )
        .map_err(CliError::invalid)
    }
}

impl DistArgs {
    pub fn spec(&self) -> Result<DistSpec, CliError> {
        let n = self.n;
        if n == 0 {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        let mu = match &self.mu {
            Some(raw) => parse_list(raw, "--mu")?,
            None => vec![0.0; n],
        };
        let sigma = if self.sigma.trim() == "identity" {
            DMatrix::<f64>::identity(n, n).transpose().as_slice().to_vec()
        } else {
            parse_list(&self.sigma, "--sigma")?
        };
        let spec = DistSpec {
            n,
            a: self.a,
            b: self.b,
            r: self.r,
            mu,
            sigma,
        };
        spec.build()?;
        Ok(spec)
    }
}
