//! GL(2) Voronoi summation at weight 12: the twisted coefficient sum equals
//! its Bessel-kernel dual side. Also shows why the test window must be
//! supported strictly inside the positive axis.
//!
//!     cargo run --release --example voronoi_identity

use sce_lab::bump::{voronoi_window, Window};
use sce_lab::coeffs::build_gl2_table;
use sce_lab::numeric::rel_err_c;
use sce_lab::quad::QuadratureBudget;
use sce_lab::voronoi::{truncation_radius, voronoi_lhs, voronoi_rhs};

fn main() {
    let gl2 = build_gl2_table(20_000).unwrap();
    let f = voronoi_window();
    let z = f.z_scale();
    let budget = QuadratureBudget {
        rel_tol: 1e-9,
        max_panels: 16384,
    };
    println!("window inertness scale Z = {z:.2}");
    println!(
        "{:>3} {:>3} {:>6} {:>8} {:>12}",
        "a", "c", "X", "dual len", "rel err"
    );
    for (a, c, x) in [
        (1i64, 2u64, 40.0f64),
        (1, 3, 40.0),
        (2, 3, 80.0),
        (1, 4, 20.0),
        (3, 4, 80.0),
    ] {
        let lhs = voronoi_lhs(&gl2, a, c, x, &f).unwrap();
        let rhs = voronoi_rhs(&gl2, a, c, x, &f, &budget, 10.0).unwrap();
        let nmax = (10.0 * truncation_radius(c, z, x, 0.1)).floor();
        println!(
            "{a:>3} {c:>3} {x:>6} {nmax:>8} {:>12.3e}",
            rel_err_c(lhs, rhs)
        );
    }

    // A window whose support touches zero breaks the hypothesis of the
    // summation formula: the dual sum converges only like a power of the
    // truncation length. Ten times the radius is nowhere near enough.
    let touching = Window::PlateauURight;
    let lhs = voronoi_lhs(&gl2, 1, 3, 40.0, &touching).unwrap();
    let rhs = voronoi_rhs(&gl2, 1, 3, 40.0, &touching, &budget, 10.0).unwrap();
    println!(
        "\nsupport touching 0 (same (1,3,40)): rel err {:.3e} — the boundary term stalls the dual sum",
        rel_err_c(lhs, rhs)
    );
}
