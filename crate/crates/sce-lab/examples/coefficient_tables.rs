//! Hecke eigenvalue tables: exact q-expansion coefficients, the normalized
//! eigenvalues, the symmetric-square lift, and its mean-square growth.
//!
//!     cargo run --release --example coefficient_tables

use sce_lab::coeffs::{
    build_gl2_table, build_sym2_table, gl2_coeff, rankin_selberg_ratio, sym2_coeff,
    tau_qexpansion,
};
use sce_lab::harness::fit_loglog;

fn main() {
    let tau = tau_qexpansion(30).unwrap();
    println!("exact q-expansion: tau(n) for n = 1..10");
    for n in 1..=10 {
        println!("  tau({n}) = {}", tau[n]);
    }

    let gl2 = build_gl2_table(100_000).unwrap();
    println!("\nnormalized eigenvalues lambda(n) = tau(n)/n^(11/2):");
    for n in [1u64, 2, 3, 4, 12, 1000] {
        println!("  lambda({n}) = {:+.10}", gl2_coeff(&gl2, n).unwrap());
    }

    let gl3 = build_sym2_table(&gl2, 8, 100_000).unwrap();
    println!("\nsymmetric-square coefficients A(m,n):");
    for (m, n) in [(1u64, 1u64), (1, 2), (2, 2), (1, 8), (4, 6)] {
        println!("  A({m},{n}) = {:+.10}", sym2_coeff(&gl3, m, n).unwrap());
    }
    println!("  archimedean parameters: {:?}", gl3.langlands);

    println!("\nnormalized mean square of A(1,n) up to N:");
    let mut pts = Vec::new();
    for exp in [3.0f64, 3.5, 4.0, 4.5, 5.0] {
        let n = 10f64.powf(exp) as u64;
        let ratio = rankin_selberg_ratio(&gl3, n).unwrap();
        println!("  N = 10^{exp:.1}: {ratio:.5}");
        pts.push((n as f64, ratio * n as f64));
    }
    let (slope, se) = fit_loglog(&pts).unwrap();
    println!("log-log slope of the partial sums: {slope:.4} (stderr {se:.4}); linear growth is slope 1");
}
