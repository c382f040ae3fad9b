//! Fixed-shift decomposition pipeline at desk scale: product moduli with
//! Q1·Q2 = X^{1/2+δ}, the exact main-term/shifted-sum split, and the dyadic
//! audit of the averaged pieces.
//!
//!     cargo run --release --example munshi_pipeline

use sce_lab::coeffs::{build_gl2_table, build_sym2_table};
use sce_lab::harness::munshi_decomposition_experiment;

fn main() {
    let gl2 = build_gl2_table(4_000).unwrap();
    let gl3 = build_sym2_table(&gl2, 1, 800).unwrap();
    let report = munshi_decomposition_experiment(5, 300.0, 0.05, 0.1, &gl2, &gl3).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    println!(
        "\nidentity residual {:.3e}; averaged pieces carry {:.2}% / {:.2}% of the direct sum",
        report.residual_rel,
        100.0 * report.ratio_as_plus,
        100.0 * report.ratio_as_minus
    );
}
