//! Interval-mode sweep driven through the library API: the weighted shifted
//! sum, its absolute majorant, the congruence-count right side, and the
//! fitted growth exponents.
//!
//!     cargo run --release --example sweep_interval

use sce_lab::coeffs::{build_gl2_table, build_sym2_table};
use sce_lab::harness::{
    fit_exponent, fit_loglog, records_to_csv, required_gl2_bound, sweep_experiment,
    ExperimentConfig, ShiftMode,
};

fn main() {
    let cfg = ExperimentConfig {
        x_grid: (8..=13).map(|k| (1u64 << k) as f64).collect(),
        r: 1,
        ell: 0,
        shift_mode: ShiftMode::Interval,
        interval_length_exponent: Some(0.6),
        factorable: None,
        explicit_shifts: None,
        eps: 0.1,
        seed: 42,
        output_path: "interval_sweep.csv".into(),
    };
    let m_bound = (2.0 * 8192.0) as u64;
    let gl2 = build_gl2_table(required_gl2_bound(&cfg).max(m_bound)).unwrap();
    let gl3 = build_sym2_table(&gl2, 1, m_bound).unwrap();
    let (records, _) = sweep_experiment(&cfg, &gl2, &gl3).unwrap();
    print!("{}", records_to_csv(&records));

    let (slope, se) = fit_exponent(&records).unwrap();
    let maj: Vec<(f64, f64)> = records.iter().map(|r| (r.x, r.abs_majorant)).collect();
    let (mslope, _) = fit_loglog(&maj).unwrap();
    println!("\nlog-log slope of |D|: {slope:.4} (stderr {se:.4})");
    println!("log-log slope of the absolute majorant: {mslope:.4}");
    println!("cancellation sanity (|D| slope <= majorant slope): {}", slope <= mslope);
}
