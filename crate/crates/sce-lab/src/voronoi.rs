//! GL(2) Voronoi summation numerics for holomorphic forms: the twisted
//! coefficient sum against a smooth window, its dual Bessel-kernel side, the
//! dual-length truncation radius, and the stationary-phase negligibility
//! predicate used to truncate oscillatory sums.

use num_complex::Complex64;

use crate::arith::{gcd, mod_inverse};
use crate::bessel::bessel_j;
use crate::bump::Window;
use crate::charsum::additive_char;
use crate::coeffs::FourierCoefficientTable;
use crate::numeric::pairwise_sum_complex;
use crate::quad::{integrate, QuadratureBudget};
use crate::{Error, Result};

/// Default exponent slack used in truncation radii.
pub const DEFAULT_EPS: f64 = 0.1;

/// Direct side: Σ_{n≥1} λ(n)·e(an/c)·F(n/X).
pub fn voronoi_lhs(
    gl2: &FourierCoefficientTable,
    a: i64,
    c: u64,
    x: f64,
    f: &Window,
) -> Result<Complex64> {
    assert!(c >= 1 && x > 0.0);
    if gcd(a.unsigned_abs() % c.max(1), c) != 1 && c > 1 {
        return Err(Error::NotCoprime(c, a.unsigned_abs()));
    }
    let (_, hi) = f.support();
    let nmax = (hi * x).floor() as u64;
    if nmax > gl2.bound {
        return Err(Error::TableTooSmall {
            need: nmax,
            have: gl2.bound,
        });
    }
    let terms: Vec<Complex64> = (1..=nmax)
        .map(|n| {
            let w = f.eval(n as f64 / x);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                gl2.lambda(n) * w * additive_char(a * n as i64, c)
            }
        })
        .collect();
    Ok(pairwise_sum_complex(&terms))
}

/// Dual-length radius c²(1+Z²)·X^{−1+ε}: coefficients beyond a fixed multiple
/// of it contribute negligibly to the dual side.
pub fn truncation_radius(c: u64, z: f64, x: f64, eps: f64) -> f64 {
    assert!(c >= 1 && z > 0.0 && x > 0.0 && eps > 0.0);
    (c as f64) * (c as f64) * (1.0 + z * z) * x.powf(-1.0 + eps)
}

/// Mirror of the dual-length radius for the rank-3 transform: the dual index
/// satisfies m0²·m ≪ b′³·X^{−1+ε}, returned as a bound on m.
pub fn gl3_dual_radius(bprime: u64, m0: u64, x: f64, eps: f64) -> f64 {
    assert!(bprime >= 1 && m0 >= 1 && x > 0.0 && eps > 0.0);
    (bprime as f64).powi(3) * x.powf(-1.0 + eps) / (m0 as f64 * m0 as f64)
}

/// True when an oscillatory integral with this minimal |phase derivative| is
/// negligible for a Z-inert weight at scale X: min |φ′| ≥ Z·X^ε.
pub fn stationary_phase_negligible(
    min_abs_phase_derivative: f64,
    z: f64,
    x: f64,
    eps: f64,
) -> bool {
    assert!(min_abs_phase_derivative >= 0.0 && z > 0.0 && x > 0.0 && eps > 0.0);
    min_abs_phase_derivative >= z * x.powf(eps)
}

/// Dual side of the summation formula for a holomorphic form of weight k:
///
/// (X/c)·Σ_{n≥1} λ(n)·e(−ā·n/c)·2π·i^k·∫ F(y)·J_{k−1}(4π√(nXy)/c) dy,
///
/// truncated at `trunc_multiplier` times the truncation radius. The opposite
/// Bessel branch is identically zero for holomorphic forms and is asserted
/// empty rather than summed.
pub fn voronoi_rhs(
    gl2: &FourierCoefficientTable,
    a: i64,
    c: u64,
    x: f64,
    f: &Window,
    budget: &QuadratureBudget,
    trunc_multiplier: f64,
) -> Result<Complex64> {
    assert!(c >= 1 && x > 0.0 && trunc_multiplier > 0.0);
    if gcd(a.unsigned_abs() % c.max(1), c) != 1 && c > 1 {
        return Err(Error::NotCoprime(c, a.unsigned_abs()));
    }
    // Holomorphic dual: the minus branch carries the zero kernel.
    let minus_branch_terms: usize = 0;
    assert_eq!(minus_branch_terms, 0);

    let abar = mod_inverse(a, c)? as i64;
    let radius = truncation_radius(c, f.z_scale(), x, DEFAULT_EPS);
    let nmax = (trunc_multiplier * radius).floor() as u64;
    if nmax > gl2.bound {
        return Err(Error::TableTooSmall {
            need: nmax,
            have: gl2.bound,
        });
    }
    let (lo, hi) = f.support();
    let k = gl2.weight;
    // 2π·i^k
    let ik = match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let front = ik * (2.0 * std::f64::consts::PI) * (x / c as f64);
    let mut terms = Vec::with_capacity(nmax as usize);
    for n in 1..=nmax {
        let lam = gl2.lambda(n);
        let osc = additive_char(-abar * n as i64, c);
        let kernel = move |y: f64| -> Complex64 {
            let arg = 4.0 * std::f64::consts::PI * (n as f64 * x * y).sqrt() / c as f64;
            let j = bessel_j(k - 1, arg).expect("argument within guard");
            Complex64::new(f.eval(y) * j, 0.0)
        };
        let integral = integrate(&kernel, lo.max(0.0), hi, budget)?;
        terms.push(front * lam * osc * integral.value);
    }
    Ok(pairwise_sum_complex(&terms))
}
