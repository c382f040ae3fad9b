//! The two-sum delta decomposition detects zero exactly: s1 − s2 = δ(n = 0).
//!
//!     cargo run --release --example delta_identity

use sce_lab::delta::{delta_cor_kernel, delta_decompose, DeltaConfig};

fn main() {
    let cfg = DeltaConfig::new(16.0, 16.0, 3).unwrap();
    println!("C = D = 16, q = {}, normalizer = {:.6}", cfg.q, cfg.normalizer);
    println!("{:>6} {:>14} {:>14} {:>12}", "n", "s1", "s2", "s1-s2");
    for n in [-360i64, -48, -1, 0, 1, 7, 48, 96, 384, 1920] {
        let (s1, s2) = delta_decompose(n, &cfg);
        println!("{n:>6} {s1:>14.10} {s2:>14.10} {:>12.2e}", s1 - s2);
    }

    // worst deviation from the indicator over a dense scan
    let mut worst: f64 = 0.0;
    for q in [1u64, 2, 3, 5] {
        let cfg = DeltaConfig::new(16.0, 16.0, q).unwrap();
        for n in -2000i64..=2000 {
            let (s1, s2) = delta_decompose(n, &cfg);
            let expect = if n == 0 { 1.0 } else { 0.0 };
            worst = worst.max((s1 - s2 - expect).abs());
        }
    }
    println!("\nmax |s1 - s2 - [n=0]| over q in {{1,2,3,5}}, |n| <= 2000: {worst:.3e}");

    // the kernel h(x, y) realizes the same decomposition through additive
    // characters; show its shape along a slice
    let cfg = DeltaConfig::new(16.0, 16.0, 1).unwrap();
    println!("\nkernel slice h(x, 0.1):");
    for i in 0..=10 {
        let x = 0.3 * i as f64;
        println!("  h({x:.1}, 0.1) = {:+.6}", delta_cor_kernel(x, 0.1, &cfg));
    }
}
