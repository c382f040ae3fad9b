//! Split a fixed-shift sum into a congruence main term and two averaged
//! shifted sums, and confirm the decomposition is an identity.
//!
//!     cargo run --release --example hyperbola_split

use num_complex::Complex64;
use sce_lab::bump::{direct_window, phi_window, Bump};
use sce_lab::coeffs::{build_gl2_table, build_sym2_table};
use sce_lab::delta::hyperbola_split;

fn main() {
    let gl2 = build_gl2_table(4_000).unwrap();
    let gl3 = build_sym2_table(&gl2, 1, 800).unwrap();

    let q_weights: Vec<(u64, Complex64)> = vec![
        (3, Complex64::new(1.0, 0.0)),
        (7, Complex64::new(0.5, 0.25)),
    ];
    for (x, ell, r) in [(300.0, 5i64, 1u64), (100.0, 17, 2), (300.0, 0, 1)] {
        let res = hyperbola_split(
            ell,
            x,
            r,
            &q_weights,
            8.0,
            Bump::PlateauU,
            &gl2,
            &gl3,
            &direct_window(),
            &phi_window(),
        )
        .unwrap();
        println!("X = {x}, ell = {ell}, r = {r}");
        println!("  direct      = {:+.12}", res.direct);
        println!("  main term   = {:+.12}", res.main_term);
        println!("  shifted +   = {:+.12}", res.as_plus);
        println!("  shifted -   = {:+.12}", res.as_minus);
        println!(
            "  M.T. - A.S.+ - A.S.- = {:+.12}",
            res.main_term - res.as_plus - res.as_minus
        );
        println!("  relative residual    = {:.3e}\n", res.residual_rel());
    }
}
