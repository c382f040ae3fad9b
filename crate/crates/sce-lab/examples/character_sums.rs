//! Complete character sums: Kloosterman and Ramanujan sums, the Weil bound,
//! and the closed form of the congruence-constrained double sum.
//!
//!     cargo run --release --example character_sums

use sce_lab::charsum::{
    c_sum_brute, c_sum_closed, kloosterman, ramanujan_sum, weil_majorant,
};
use sce_lab::Sign;

fn main() {
    println!("Kloosterman sums S(a,b;c) against the Weil majorant:");
    for (a, b, c) in [(1i64, 1i64, 5u64), (2, 3, 35), (1, 4, 121), (7, -3, 480)] {
        let s = kloosterman(a, b, c).unwrap();
        let w = weil_majorant(a, b, c);
        println!("  S({a},{b};{c}) = {s:>12.6}   |S| / majorant = {:.3}", s.abs() / w);
    }

    println!("\nRamanujan sums c_q(n):");
    for (n, q) in [(0i64, 12u64), (1, 6), (2, 4), (17, 30)] {
        println!("  c_{q}({n}) = {:+.6}", ramanujan_sum(n, q).unwrap());
    }

    println!("\ncongruence-constrained double sum vs its closed form:");
    for (n, d, q1, q2, c, sign) in [
        (1i64, 1i64, 3u64, 1i64, 5u64, Sign::Plus),
        (2, 5, 7, 3, 20, Sign::Minus),
        (0, 1, 1, 4, 9, Sign::Plus),
    ] {
        let brute = c_sum_brute(n, d, q1, q2, c, sign);
        let closed = c_sum_closed(n, d, q1, q2, c, sign).unwrap();
        println!(
            "  (n={n}, d={d}, q1={q1}, q2={q2}, c={c}, {sign:?}): brute {:+.8}, closed {:+.8}, diff {:.1e}",
            brute.re,
            closed.re,
            (brute - closed).norm()
        );
    }
    // the closed form refuses shared factors rather than guessing
    let refused = c_sum_closed(1, 1, 5, 1, 10, Sign::Plus);
    println!("  (q1=5, c=10): {:?}", refused.err().map(|e| e.to_string()));
}
