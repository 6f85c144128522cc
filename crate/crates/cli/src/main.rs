mod args;
mod output;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use gml_core::generator::{norm_const_c, norm_const_d};
use gml_core::numerics::{parse_tolerance, QUAD_TOL_ENV};
use gml_core::validation::{mc_moment_check_batch, run_suite, Suite};
use gml_core::{Execution, GeneratorParams, GmlDistribution, GmlError, SampleBatch, ValidationReport};
use serde_json::{json, Value};

use args::{parse_list, CfMethod, Cli, Command, DistSpec};
use output::{metadata, Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    /// Errors from validating user input.
    fn invalid(e: GmlError) -> Self {
        CliError::Usage(e.to_string())
    }

    fn io(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<GmlError> for CliError {
    fn from(e: GmlError) -> Self {
        match e {
            GmlError::Convergence { .. } | GmlError::Divergence(_) | GmlError::Range(_) | GmlError::Internal(_) => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gml: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn check_environment() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var(QUAD_TOL_ENV) {
        if parse_tolerance(&raw).is_none() {
            return Err(CliError::Usage(format!(
                "{QUAD_TOL_ENV} must be a number in (0, 1), got '{raw}'"
            )));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    check_environment()?;
    match cli.command {
        Command::Constants { n_max, output } => {
            constants(n_max as usize)?.write(output.format, output.out.as_deref())?;
        }
        Command::PdfGrid {
            dist,
            range,
            resolution,
            figures,
            output,
        } => {
            let spec = if figures { None } else { Some(dist.spec()?) };
            pdf_grid(spec, range, resolution)?.write(output.format, output.out.as_deref())?;
        }
        Command::Sample {
            dist,
            count,
            seed,
            output,
        } => {
            let spec = dist.spec()?;
            let batch = spec.build()?.sample(count, seed)?;
            sample_table(&spec, &batch).write(output.format, output.out.as_deref())?;
        }
        Command::Moments { dist, radial, output } => {
            moments(&dist.spec()?, &radial)?.write(output.format, output.out.as_deref())?;
        }
        Command::Cf {
            dist,
            points,
            method,
            output,
        } => {
            cf(&dist.spec()?, &points, method)?.write(output.format, output.out.as_deref())?;
        }
        Command::Validate {
            suite,
            seed,
            input,
            out,
        } => {
            let report = match input {
                Some(path) => validate_file(&path)?,
                None => {
                    let suite: Suite = suite.parse().map_err(CliError::invalid)?;
                    run_suite(suite, seed)?
                }
            };
            write_report(&report, out.as_deref())?;
            return Ok(if report.passed { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn method_name(m: gml_core::Method) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn constants(n_max: usize) -> Result<Table, CliError> {
    let logistic = GeneratorParams::logistic();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c = norm_const_c(n)?;
        let d = norm_const_d(n, &logistic)?;
        rows.push(vec![
            Cell::from(n),
            c.value.into(),
            d.into(),
            method_name(c.method).into(),
        ]);
    }
    Ok(Table {
        metadata: metadata("constants", json!({ "n_max": n_max, "a": 1.0, "b": 1.0, "r": 2.0 })),
        columns: ["n", "c_n", "d_n", "method"].map(String::from).to_vec(),
        rows,
    })
}

/// `range · (2i - (res-1)) / (res-1)`: symmetric about zero to the last bit.
fn grid_axis(range: f64, resolution: usize) -> Vec<f64> {
    let last = (resolution - 1) as f64;
    (0..resolution)
        .map(|i| range * (2.0 * i as f64 - last) / last)
        .collect()
}

fn pdf_grid(spec: Option<DistSpec>, range: f64, resolution: usize) -> Result<Table, CliError> {
    if resolution < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    if !(range > 0.0 && range.is_finite()) {
        return Err(CliError::Usage(format!("range must be positive, got {range}")));
    }
    let axis = grid_axis(range, resolution);
    let figure_rs = [0.5, 1.0, 2.0, 5.0, 10.0];
    let specs: Vec<DistSpec> = match spec {
        Some(s) => vec![s],
        None => figure_rs
            .iter()
            .map(|&r| DistSpec {
                n: 2,
                a: 1.0,
                b: 1.0,
                r,
                mu: vec![0.0; 2],
                sigma: vec![1.0, 0.0, 0.0, 1.0],
            })
            .collect(),
    };
    let figures = specs.len() > 1;
    let mut rows = Vec::new();
    for spec in &specs {
        let dist = spec.build()?;
        let n = dist.dim();
        let plane = n.min(2);
        let mut points = Vec::new();
        let mut coords = Vec::new();
        let cells: Vec<(f64, Option<f64>)> = if plane == 1 {
            axis.iter().map(|&x| (x, None)).collect()
        } else {
            axis.iter()
                .flat_map(|&x| axis.iter().map(move |&y| (x, Some(y))))
                .collect()
        };
        for (x, y) in cells {
            let mut p = spec.mu.clone();
            p[0] += x;
            if let Some(y) = y {
                p[1] += y;
            }
            coords.push(p[..plane].to_vec());
            points.extend_from_slice(&p);
        }
        let values = dist.pdf_batch(&points, Execution::Parallel)?;
        for (c, v) in coords.into_iter().zip(values) {
            let mut row: Vec<Cell> = Vec::with_capacity(4);
            if figures {
                row.push(spec.r.into());
            }
            row.extend(c.into_iter().map(Cell::from));
            row.push(v.into());
            rows.push(row);
        }
    }
    let mut columns: Vec<String> = Vec::new();
    if figures {
        columns.push("r".into());
    }
    let plane = specs[0].n.min(2);
    columns.extend((1..=plane).map(|i| format!("x{i}")));
    columns.push("pdf".into());
    let fields = if figures {
        json!({ "n": 2, "a": 1.0, "b": 1.0, "r": figure_rs, "range": range, "resolution": resolution })
    } else {
        let mut v = serde_json::to_value(&specs[0]).map_err(|e| CliError::Io(e.to_string()))?;
        v["range"] = json!(range);
        v["resolution"] = json!(resolution);
        v
    };
    Ok(Table {
        metadata: metadata("pdf-grid", fields),
        columns,
        rows,
    })
}

fn spec_fields(spec: &DistSpec, extra: Value) -> Value {
    let mut v = serde_json::to_value(spec).unwrap_or(Value::Null);
    if let (Some(m), Value::Object(e)) = (v.as_object_mut(), extra) {
        m.extend(e);
    }
    v
}

fn sample_table(spec: &DistSpec, batch: &SampleBatch) -> Table {
    Table {
        metadata: metadata(
            "sample",
            spec_fields(spec, json!({ "seed": batch.seed(), "count": batch.count() })),
        ),
        columns: (1..=batch.dim()).map(|i| format!("x{i}")).collect(),
        rows: batch
            .rows()
            .map(|r| r.iter().map(|&x| Cell::from(x)).collect())
            .collect(),
    }
}

fn moments(spec: &DistSpec, radial: &[f64]) -> Result<Table, CliError> {
    let dist = spec.build()?;
    let n = dist.dim();
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mean = dist.mean();
    for i in 0..n {
        rows.push(vec![format!("mean[{i}]").into(), mean[i].into()]);
    }
    let cov = dist.cov()?;
    for i in 0..n {
        for j in 0..n {
            rows.push(vec![format!("cov[{i}][{j}]").into(), cov[(i, j)].into()]);
        }
    }
    rows.push(vec!["cov_scale".into(), dist.cov_scale()?.into()]);
    for &l in radial {
        rows.push(vec![format!("E(R^{l})").into(), dist.radial().moment(l)?.into()]);
    }
    Ok(Table {
        metadata: metadata("moments", spec_fields(spec, json!({}))),
        columns: vec!["quantity".into(), "value".into()],
        rows,
    })
}

fn cf(spec: &DistSpec, points: &[String], method: CfMethod) -> Result<Table, CliError> {
    let dist = spec.build()?;
    let mut rows = Vec::new();
    for raw in points {
        let t = parse_list(raw, "--t")?;
        if t.len() != dist.dim() {
            return Err(CliError::Usage(format!(
                "point '{raw}' has {} entries, expected {}",
                t.len(),
                dist.dim()
            )));
        }
        let value = match method {
            CfMethod::Auto => dist.cf(&t)?,
            CfMethod::Series => dist.cf_series(&t)?.value,
            CfMethod::Quadrature => dist.cf_quadrature(&t)?.value,
        };
        let mut row: Vec<Cell> = t.iter().map(|&x| Cell::from(x)).collect();
        row.push(value.re.into());
        row.push(value.im.into());
        rows.push(row);
    }
    let mut columns: Vec<String> = (1..=dist.dim()).map(|i| format!("t{i}")).collect();
    columns.push("re".into());
    columns.push("im".into());
    let method = format!("{method:?}").to_lowercase();
    Ok(Table {
        metadata: metadata("cf", spec_fields(spec, json!({ "method": method }))),
        columns,
        rows,
    })
}

fn validate_file(path: &Path) -> Result<ValidationReport, CliError> {
    let (meta, rows) = output::read_csv(path)?;
    let spec: DistSpec = serde_json::from_value(meta.clone())
        .map_err(|e| CliError::Usage(format!("metadata does not describe a distribution: {e}")))?;
    let seed = meta["seed"].as_u64().unwrap_or(0);
    let dist: GmlDistribution = spec.build()?;
    let draws: Vec<f64> = rows.into_iter().flatten().collect();
    let batch = SampleBatch::from_rows(spec.n, seed, draws).map_err(CliError::invalid)?;
    Ok(mc_moment_check_batch(&dist, &batch)?)
}

fn write_report(report: &ValidationReport, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = output::open(out)?;
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w).map_err(CliError::io)?;
    w.flush().map_err(CliError::io)
}
