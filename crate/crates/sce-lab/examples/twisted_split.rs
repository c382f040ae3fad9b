//! The twisted two-range split of smooth shift counts: the exact split
//! reproduces the brute-force representation count, and the above-threshold
//! piece matches its Poisson-dual form (Kloosterman factors against
//! oscillatory window transforms).
//!
//!     cargo run --release --example twisted_split

use sce_lab::bump::Window;
use sce_lab::delta::DeltaConfig;
use sce_lab::split::{
    s_split_exact, shift_count_brute, S1Engine, S1Params, SplitShape,
};
use sce_lab::Sign;

fn main() {
    let shape = SplitShape {
        big_d: 4.0,
        big_q2: 8.0,
        t: 0.1,
        c_threshold: 16.0,
        v1: Window::plateau(1.0, 1.25, 1.75, 2.0),
        v2: Window::plateau(1.0, 1.25, 1.75, 2.0),
    };
    let cfg = DeltaConfig::new(256.0, 256.0, 1).unwrap();

    println!("exact split vs. brute representation count (sign +):");
    println!(
        "{:>5} {:>3} {:>22} {:>22} {:>10}",
        "n", "q1", "s0+s1", "count", "|diff|"
    );
    for (n, q1) in [(-72i64, 1u64), (-66, 1), (-30, 1), (-126, 3), (40, 1)] {
        let (s0, s1) = s_split_exact(n, q1, Sign::Plus, &shape, &cfg).unwrap();
        let count = shift_count_brute(n, q1, Sign::Plus, &shape);
        let total = s0 + s1;
        println!(
            "{n:>5} {q1:>3} {:>10.6}{:+.6}i {:>10.6}{:+.6}i {:>10.2e}",
            total.re,
            total.im,
            count.re,
            count.im,
            (total - count).norm()
        );
    }

    println!("\ndual form of the above-threshold piece:");
    let t0 = std::time::Instant::now();
    let params = S1Params {
        freq_cut: 18.0,
        ..Default::default()
    };
    let mut engine = S1Engine::new(&cfg, &shape, params).unwrap();
    println!("engine tables built in {:.1}s", t0.elapsed().as_secs_f64());
    println!(
        "{:>5} {:>3} {:>22} {:>22} {:>10} {:>10}",
        "n", "q1", "exact s1", "dual", "rel diff", "est"
    );
    for (n, q1) in [(-72i64, 1u64), (-64, 3), (-13, 1), (40, 3)] {
        let (_, s1) = s_split_exact(n, q1, Sign::Plus, &shape, &cfg).unwrap();
        let dual = engine.eval(n, q1, Sign::Plus).unwrap();
        println!(
            "{n:>5} {q1:>3} {:>10.6}{:+.6}i {:>10.6}{:+.6}i {:>10.2e} {:>10.1e}",
            s1.re,
            s1.im,
            dual.value.re,
            dual.value.im,
            (dual.value - s1).norm() / s1.norm().max(1e-12),
            dual.error_estimate
        );
    }
}
