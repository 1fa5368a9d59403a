//! Command implementations behind the `gridspline` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gridspline::convergence::{ConvergenceRow, ConvergenceStudy, TestFunction};
use gridspline::rational::{parse_rational, to_f64};
use gridspline::validation::{run_suite, SuiteOptions, SuiteReport};
use gridspline::{BetaFamily, Boundary, CoefficientRecord, GridField, GridSpline, KernelPath, SplineKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => bail!("unknown format {other:?}, expected json or csv"),
        }
    }
}

/// Parses `n:q`.
pub fn parse_kind(text: &str) -> Result<SplineKind> {
    let (n, q) = text
        .split_once(':')
        .with_context(|| format!("kind {text:?} must look like n:q"))?;
    Ok(SplineKind::grid(n.trim().parse()?, q.trim().parse()?)?)
}

/// Parses a spacing given as a float or an exact fraction such as `1/64`.
pub fn parse_spacing(text: &str) -> Result<f64> {
    if text.contains('/') {
        return Ok(to_f64(&parse_rational(text)?));
    }
    Ok(text.trim().parse()?)
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn render_export(records: &[CoefficientRecord], format: ExportFormat) -> Result<String> {
    Ok(match format {
        ExportFormat::Json => serde_json::to_string_pretty(records)? + "\n",
        ExportFormat::Csv => {
            let mut out = String::from("n,q,i,coeffs_exact,coeffs_horner\n");
            for r in records {
                let horner: Vec<String> = r.coeffs_horner.iter().map(|v| format!("{v:e}")).collect();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n,
                    r.q,
                    r.i,
                    r.coeffs_exact.join(" "),
                    horner.join(" ")
                )?;
            }
            out
        }
    })
}

/// Writes the exact and float coefficients of the `(n, q)` basis.
pub fn cmd_export(n: usize, q: usize, out: &Path, format: ExportFormat) -> Result<Vec<CoefficientRecord>> {
    let family = BetaFamily::derive(SplineKind::grid(n, q)?)?;
    let records = family.export_records();
    write_output(out, &render_export(&records, format)?)?;
    Ok(records)
}

pub fn render_validation(report: &SuiteReport, verbose: bool) -> String {
    let mut out = String::new();
    for r in &report.reports {
        for c in &r.checks {
            if verbose || !c.passed {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = write!(out, "{status} {:<10} {}", r.kind, c.name);
                if !c.detail.is_empty() {
                    let _ = write!(out, ": {}", c.detail);
                }
                out.push('\n');
            }
        }
    }
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "{} families, {} checks, {} failed",
        report.reports.len(),
        report.check_count(),
        failed
    );
    out
}

pub fn cmd_validate(max_n: usize, max_q: usize, inject_defect: bool) -> Result<SuiteReport> {
    Ok(run_suite(max_n, max_q, &SuiteOptions { inject_defect })?)
}

pub fn render_convergence(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("kind,h,max_error,observed_order\n");
    for r in rows {
        let order = r.observed_order.map(|o| format!("{o:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{}:{},{:e},{:e},{}",
            r.kind.n(),
            r.kind.q().unwrap_or(0),
            r.h,
            r.max_error,
            order
        );
    }
    out
}

pub fn cmd_converge(study: &ConvergenceStudy, out: Option<&Path>) -> Result<Vec<ConvergenceRow>> {
    if study.samples < 1000 {
        bail!("at least 1000 sample points are required, got {}", study.samples);
    }
    let rows = study.run()?;
    if let Some(path) = out {
        write_output(path, &render_convergence(&rows))?;
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ndim: usize,
    pub kind: SplineKind,
    pub grid: usize,
    pub points: usize,
    pub seed: u64,
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub path: String,
    pub evaluations: usize,
    pub seconds: f64,
    pub checksum: f64,
}

impl BenchRow {
    pub fn evals_per_second(&self) -> f64 {
        self.evaluations as f64 / self.seconds
    }

    pub fn ns_per_eval(&self) -> f64 {
        self.seconds * 1e9 / self.evaluations as f64
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Whether the unrolled and generic kernels agree bitwise; `None` when
    /// no unrolled kernel applies.
    pub identical: Option<bool>,
}

fn bench_inputs(cfg: &BenchConfig) -> Result<(GridField, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = cfg.grid.checked_pow(cfg.ndim as u32).context("grid too large")?;
    let data = (0..total).map(|_| rng.random_range(-1.0..1.0)).collect();
    let h = 1.0 / cfg.grid as f64;
    let field = GridField::new(vec![cfg.grid; cfg.ndim], vec![h; cfg.ndim], data, Boundary::Periodic)?;
    let points = (0..cfg.points * cfg.ndim).map(|_| rng.random_range(0.0..1.0)).collect();
    Ok((field, points))
}

fn timed(
    label: &str,
    spline: &GridSpline,
    field: &GridField,
    points: &[f64],
    ndim: usize,
    path: KernelPath,
) -> Result<(BenchRow, Vec<f64>)> {
    // Warm-up pass over a slice of the workload.
    for p in points.chunks_exact(ndim).take(1000) {
        std::hint::black_box(spline.evaluate_with(field, p, path)?);
    }
    let start = Instant::now();
    let mut values = Vec::with_capacity(points.len() / ndim);
    for p in points.chunks_exact(ndim) {
        values.push(std::hint::black_box(spline.evaluate_with(field, p, path)?));
    }
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    Ok((
        BenchRow {
            path: label.to_string(),
            evaluations: values.len(),
            seconds,
            checksum: values.iter().sum(),
        },
        values,
    ))
}

pub fn cmd_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.points == 0 || cfg.ndim == 0 {
        bail!("need at least one point and one axis");
    }
    let (field, points) = bench_inputs(cfg)?;
    let spline = GridSpline::new(cfg.kind)?;
    let mut rows = Vec::new();
    let (generic, generic_values) = timed("generic", &spline, &field, &points, cfg.ndim, KernelPath::Generic)?;
    rows.push(generic);
    let mut identical = None;
    if cfg.kind.q() == Some(4) && cfg.ndim <= 3 {
        let (unrolled, values) = timed("unrolled-q4", &spline, &field, &points, cfg.ndim, KernelPath::Auto)?;
        identical = Some(
            values
                .iter()
                .zip(&generic_values)
                .all(|(a, b)| a.to_bits() == b.to_bits()),
        );
        rows.push(unrolled);
    }
    if cfg.threads > 1 {
        let chunk = points.len().div_ceil(cfg.threads * cfg.ndim) * cfg.ndim;
        let start = Instant::now();
        let sums: Vec<f64> = std::thread::scope(|scope| {
            let handles: Vec<_> = points
                .chunks(chunk)
                .map(|part| {
                    let (spline, field) = (&spline, &field);
                    scope.spawn(move || {
                        part.chunks_exact(cfg.ndim)
                            .map(|p| spline.evaluate(field, p).unwrap_or(f64::NAN))
                            .sum::<f64>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap_or(f64::NAN)).collect()
        });
        rows.push(BenchRow {
            path: format!("auto x{} threads", cfg.threads),
            evaluations: cfg.points,
            seconds: start.elapsed().as_secs_f64().max(1e-9),
            checksum: sums.iter().sum(),
        });
    }
    Ok(BenchReport { rows, identical })
}

pub fn render_bench(cfg: &BenchConfig, report: &BenchReport) -> String {
    let mut out = format!(
        "kind {} D={} grid {}^{} points {} seed {}\n",
        cfg.kind, cfg.ndim, cfg.grid, cfg.ndim, cfg.points, cfg.seed
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<18} {:>14.0} evals/s {:>10.1} ns/eval  checksum {:.12e}",
            r.path,
            r.evals_per_second(),
            r.ns_per_eval(),
            r.checksum
        );
    }
    if let Some(same) = report.identical {
        let _ = writeln!(out, "unrolled and generic results bitwise identical: {same}");
    }
    out
}

/// Re-expands exported records into exact polynomials, ordered by `i`.
pub fn parse_export_json(text: &str) -> Result<Vec<gridspline::RationalPolynomial>> {
    let mut records: Vec<CoefficientRecord> = serde_json::from_str(text)?;
    records.sort_by_key(|r| r.i);
    records
        .iter()
        .map(|r| {
            let coeffs = r
                .coeffs_exact
                .iter()
                .map(|c| parse_rational(c))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(gridspline::RationalPolynomial::new(coeffs))
        })
        .collect()
}

pub fn parse_function(id: &str) -> Result<TestFunction> {
    Ok(TestFunction::from_id(id)?)
}
