use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use gridspline::convergence::ConvergenceStudy;
use gridspline::SplineKind;
use gridspline_cli::*;

#[derive(Parser)]
#[command(name = "gridspline", version, about = "Derive, validate and evaluate high-order grid splines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the exact and float basis coefficients of one (n, q) kind.
    Export {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
    },
    /// Run every exact check over all kinds up to the given bounds.
    Validate {
        #[arg(long = "max-n", alias = "n", default_value_t = 19)]
        max_n: usize,
        #[arg(long = "max-q", alias = "q", default_value_t = 12)]
        max_q: usize,
        /// Print passing checks too.
        #[arg(long)]
        verbose: bool,
        /// Corrupt one basis polynomial before checking (exercises the failure path).
        #[arg(long, hide = true)]
        inject_defect: bool,
    },
    /// Measure interpolation error and observed order on refined periodic grids.
    Converge {
        /// Test function: const, sin or fourier.
        #[arg(long, default_value = "sin")]
        function: String,
        #[arg(long, default_value_t = 1)]
        dims: usize,
        /// Comma-separated n:q pairs.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["n", "q"])]
        kinds: Vec<String>,
        #[arg(long, requires = "q")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        q: Option<usize>,
        /// Comma-separated grid spacings, e.g. 1/16,1/32.
        #[arg(long, value_delimiter = ',', default_value = "1/16,1/32,1/64,1/128,1/256")]
        h: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 24301)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the evaluation kernel on a seeded workload.
    Bench {
        #[arg(long, default_value_t = 3)]
        dims: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        q: usize,
        /// Nodes per axis.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 200_000)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Export { n, q, out, format } => {
            let records = cmd_export(n, q, &out, format)?;
            println!("wrote {} polynomials of ({n},{q}) to {}", records.len(), out.display());
        }
        Command::Validate {
            max_n,
            max_q,
            verbose,
            inject_defect,
        } => {
            let report = cmd_validate(max_n, max_q, inject_defect)?;
            print!("{}", render_validation(&report, verbose));
            if !report.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Converge {
            function,
            dims,
            kinds,
            n,
            q,
            h,
            samples,
            seed,
            out,
        } => {
            let mut parsed: Vec<SplineKind> = kinds.iter().map(|k| parse_kind(k)).collect::<Result<_>>()?;
            if let (Some(n), Some(q)) = (n, q) {
                parsed.push(SplineKind::grid(n, q)?);
            }
            if parsed.is_empty() {
                parsed.push(SplineKind::grid(5, 4)?);
            }
            let study = ConvergenceStudy {
                function: parse_function(&function)?,
                ndim: dims,
                kinds: parsed,
                h: h.iter().map(|s| parse_spacing(s)).collect::<Result<_>>()?,
                samples,
                seed,
            };
            let rows = cmd_converge(&study, out.as_deref())?;
            print!("{}", render_convergence(&rows));
        }
        Command::Bench {
            dims,
            n,
            q,
            grid,
            points,
            seed,
            threads,
        } => {
            let cfg = BenchConfig {
                ndim: dims,
                kind: SplineKind::grid(n, q)?,
                grid,
                points,
                seed,
                threads,
            };
            let report = cmd_bench(&cfg)?;
            print!("{}", render_bench(&cfg, &report));
            if report.identical == Some(false) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
