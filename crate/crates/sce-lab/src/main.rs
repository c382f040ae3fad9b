//! Thin command-line front end over the library: table building, identity
//! verification, one-shot sums, grid sweeps, and the decomposition pipeline.
//!
//! Exit codes: 0 success, 2 verification failure, 3 configuration error,
//! 4 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sce_lab::coeffs::{build_gl2_table, read_coeff_cache, write_coeff_cache};
use sce_lab::harness::{
    munshi_decomposition_experiment, records_to_csv, required_gl2_bound, shifted_sum_direct,
    shifted_sum_majorant, shifts_for, sweep_experiment, ExperimentConfig,
};
use sce_lab::verify;
use sce_lab::Error;

#[derive(Parser)]
#[command(
    name = "sce-lab",
    about = "Desk-scale lab for shifted convolution sums",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient table management.
    Coeffs {
        #[command(subcommand)]
        action: CoeffsAction,
    },
    /// Run a family of identity checks.
    Verify {
        #[arg(value_parser = ["delta", "charsum", "voronoi", "hyperbola", "ssplit", "all"])]
        which: String,
        /// Widen the check ranges.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Evaluate the weighted shifted sum at every grid point of a config.
    Sum {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the sweep of a config and write its CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Optional binary coefficient cache to reuse or create.
        #[arg(long)]
        coeff_cache: Option<PathBuf>,
    },
    /// Fixed-shift decomposition pipeline report (JSON to stdout).
    Munshi {
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        ell: i64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum CoeffsAction {
    /// Build the weight-12 eigenvalue table (optionally cached to disk).
    Build {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        coeff_cache: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NumericalInconsistency { .. } | Error::QuadratureFailure { .. } => 4,
        Error::InvalidConfig(_) | Error::Io(_) | Error::Json(_) => 3,
        _ => 3,
    }
}

fn load_or_build_gl2(
    bound: u64,
    cache: Option<&PathBuf>,
) -> sce_lab::Result<sce_lab::coeffs::FourierCoefficientTable> {
    if let Some(path) = cache {
        if path.exists() {
            let table = read_coeff_cache(path)?;
            if table.bound >= bound {
                eprintln!(
                    "using cached table from {} (bound {})",
                    path.display(),
                    table.bound
                );
                return Ok(table);
            }
            eprintln!("cache bound {} too small, rebuilding", table.bound);
        }
    }
    let table = build_gl2_table(bound)?;
    if let Some(path) = cache {
        write_coeff_cache(path, &table)?;
        eprintln!("wrote coefficient cache to {}", path.display());
    }
    Ok(table)
}

fn run() -> sce_lab::Result<u8> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are ordinary exits; anything else is a config error
            if e.use_stderr() {
                eprint!("{e}");
                return Ok(3);
            }
            print!("{e}");
            return Ok(0);
        }
    };
    match cli.command {
        Command::Coeffs {
            action: CoeffsAction::Build { bound, coeff_cache },
        } => {
            let t = load_or_build_gl2(bound, coeff_cache.as_ref())?;
            println!(
                "built weight-{} table to bound {}; lambda(2) = {:.15}",
                t.weight,
                t.bound,
                t.lambda(2)
            );
            Ok(0)
        }
        Command::Verify { which, exhaustive } => {
            let outcomes = match which.as_str() {
                "delta" => verify::verify_delta(exhaustive)?,
                "charsum" => verify::verify_charsum(exhaustive)?,
                "voronoi" => verify::verify_voronoi()?,
                "hyperbola" => verify::verify_hyperbola()?,
                "ssplit" => verify::verify_ssplit(exhaustive)?,
                _ => verify::verify_all(exhaustive)?,
            };
            let mut all_ok = true;
            for o in &outcomes {
                println!("{}", o.line());
                all_ok &= o.passed;
            }
            Ok(if all_ok { 0 } else { 2 })
        }
        Command::Sum { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let m_bound = (2.0 * cfg.x_grid.last().unwrap()).ceil() as u64 + 1;
            let gl2 = build_gl2_table(required_gl2_bound(&cfg).max(m_bound))?;
            let gl3 = sce_lab::coeffs::build_sym2_table(&gl2, 1, m_bound)?;
            let v = sce_lab::bump::direct_window();
            for &x in &cfg.x_grid {
                let spec = shifts_for(&cfg, x)?;
                let d = shifted_sum_direct(&gl2, &gl3, &spec, cfg.r, x, &v)?;
                let maj = shifted_sum_majorant(&gl2, &gl3, &spec, cfg.r, x, &v)?;
                println!(
                    "{}",
                    serde_json::json!({
                        "x": x,
                        "h_size": spec.h_size(),
                        "re": d.re,
                        "im": d.im,
                        "abs": d.norm(),
                        "abs_majorant": maj,
                    })
                );
            }
            Ok(0)
        }
        Command::Sweep {
            config,
            coeff_cache,
        } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let m_bound = (2.0 * cfg.x_grid.last().unwrap()).ceil() as u64 + 1;
            let gl2 =
                load_or_build_gl2(required_gl2_bound(&cfg).max(m_bound), coeff_cache.as_ref())?;
            let gl3 = sce_lab::coeffs::build_sym2_table(&gl2, 1, m_bound)?;
            let (records, flags) = sweep_experiment(&cfg, &gl2, &gl3)?;
            let csv = records_to_csv(&records);
            std::fs::write(&cfg.output_path, &csv)?;
            println!("wrote {} records to {}", records.len(), cfg.output_path);
            for f in &flags {
                println!(
                    "X = {}: Q1*Q2 >= X^(1/2+eps): {}, D+Q1 >= X^(1/2+eps): {}",
                    f.x, f.q1q2_large, f.dq1_large
                );
            }
            if records.len() >= 4 && records.iter().all(|r| r.d_ah.norm() > 0.0) {
                let (slope, se) = sce_lab::harness::fit_exponent(&records)?;
                println!("log-log slope of |D|: {slope:.4} (stderr {se:.4})");
            }
            Ok(0)
        }
        Command::Munshi { x, ell, delta, eps } => {
            let q1q2 = x.powf(0.5 + delta);
            let reach = (2.5 * x + 2.0 * x.powf(1.0 - eps) * 4.0).ceil() as u64 + ell.unsigned_abs();
            let gl2 = build_gl2_table(reach.max((3.0 * q1q2) as u64))?;
            let gl3 = sce_lab::coeffs::build_sym2_table(&gl2, 1, (2.5 * x).ceil() as u64)?;
            let report = munshi_decomposition_experiment(ell, x, delta, eps, &gl2, &gl3)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
