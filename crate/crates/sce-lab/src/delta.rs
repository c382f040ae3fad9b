//! The reformulated delta method and the decompositions built on it: the
//! exact two-sum expansion of δ(n = 0), its additive-character kernel form,
//! the hyperbola splitting of a fixed-shift sum into a congruence main term
//! and averaged shifted sums, and the unimodular twist.

use num_complex::Complex64;

use crate::bump::{Bump, Window};
use crate::coeffs::{FourierCoefficientTable, GL3CoefficientTable};
use crate::numeric::pairwise_sum_complex;
use crate::{Error, Result};

/// Kernels and scales of the delta decomposition; the normalizer is fixed at
/// construction.
#[derive(Debug, Clone)]
pub struct DeltaConfig {
    /// Modulus scale C (> 1).
    pub c_scale: f64,
    /// Complementary divisor scale D.
    pub d_scale: f64,
    /// Congruence stride q.
    pub q: u64,
    pub u: Bump,
    pub w: Bump,
    /// 𝒞 = Σ_{c≥1} W(c/C)·U(c/C), strictly positive.
    pub normalizer: f64,
}

impl DeltaConfig {
    pub fn new(c_scale: f64, d_scale: f64, q: u64) -> Result<DeltaConfig> {
        if !(c_scale > 1.0) || !(d_scale > 0.0) || q == 0 {
            return Err(Error::InvalidConfig(
                "delta decomposition needs C > 1, D > 0, q >= 1".into(),
            ));
        }
        let mut normalizer = 0.0;
        let mut c = 1u64;
        while (c as f64) < 2.0 * c_scale {
            normalizer +=
                Bump::AnnulusW.eval(c as f64 / c_scale) * Bump::PlateauU.eval(c as f64 / c_scale);
            c += 1;
        }
        if normalizer <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "normalizer vanished for C = {c_scale}"
            )));
        }
        Ok(DeltaConfig {
            c_scale,
            d_scale,
            q,
            u: Bump::PlateauU,
            w: Bump::AnnulusW,
            normalizer,
        })
    }
}

/// Guard for the decomposition argument.
pub const DELTA_N_GUARD: i64 = 1_000_000;

/// The two sums whose difference is exactly δ(n = 0):
///
/// s1 = (1/𝒞)·Σ_{c≥1, cq|n} W(c/C)·U(n/(cDq))·U(c/C)
/// s2 = (1/𝒞)·Σ_{d≥1, dq|n} W(n/(dqC))·U(n/(Cdq))·U(d/D)
pub fn delta_decompose(n: i64, cfg: &DeltaConfig) -> (f64, f64) {
    assert!(n.abs() <= DELTA_N_GUARD, "desk guard: |n| <= 1e6");
    let cc = cfg.c_scale;
    let dd = cfg.d_scale;
    let q = cfg.q;
    let na = n.unsigned_abs();
    let mut s1 = 0.0;
    // W(c/C) vanishes outside C < c < 2C.
    let c_hi = (2.0 * cc).ceil() as u64;
    for c in 1..=c_hi {
        if n != 0 && na % (c * q) != 0 {
            continue;
        }
        let w = cfg.w.eval(c as f64 / cc);
        if w == 0.0 {
            continue;
        }
        s1 += w
            * cfg.u.eval(n as f64 / (c as f64 * dd * q as f64))
            * cfg.u.eval(c as f64 / cc);
    }
    let mut s2 = 0.0;
    if n != 0 {
        // U(d/D) vanishes beyond 3D.
        let d_hi = (3.0 * dd).ceil() as u64;
        for d in 1..=d_hi {
            if na % (d * q) != 0 {
                continue;
            }
            let arg = n as f64 / (d as f64 * q as f64);
            let w = cfg.w.eval(arg / cc);
            if w == 0.0 {
                continue;
            }
            s2 += w * cfg.u.eval(arg / cc) * cfg.u.eval(d as f64 / dd);
        }
    }
    (s1 / cfg.normalizer, s2 / cfg.normalizer)
}

/// Kernel of the character form of the decomposition:
/// h(x, y) = W(x)U(x)U(y) − W(y)U(x)U(y).
pub fn delta_cor_kernel(x: f64, y: f64, cfg: &DeltaConfig) -> f64 {
    let ux = cfg.u.eval(x);
    if ux == 0.0 {
        return 0.0;
    }
    let uy = cfg.u.eval(y);
    if uy == 0.0 {
        return 0.0;
    }
    (cfg.w.eval(x) - cfg.w.eval(y)) * ux * uy
}

/// Unimodular twist (a²/b²)^{it} through the principal logarithm.
pub fn twist(a: f64, b: f64, t: f64) -> Result<Complex64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::NonpositiveBase);
    }
    let phase = 2.0 * t * (a.ln() - b.ln());
    Ok(Complex64::new(phase.cos(), phase.sin()))
}

/// A finite shift set with complex weights.
#[derive(Debug, Clone)]
pub struct ShiftSpec {
    pub shifts: Vec<(i64, Complex64)>,
    pub ell: i64,
    pub description: String,
}

impl ShiftSpec {
    /// Number of distinct shifts carrying a nonzero weight.
    pub fn h_size(&self) -> u64 {
        self.shifts.iter().filter(|(_, a)| a.norm() > 0.0).count() as u64
    }

    pub fn norm2(&self) -> f64 {
        self.shifts
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.shifts.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max)
    }
}

/// Result of the hyperbola splitting. `direct` carries the mean weight of
/// the modulus set, so the identity `direct = main_term − as_plus − as_minus`
/// is exact for arbitrary weights (including identically zero ones).
#[derive(Debug, Clone, Copy)]
pub struct HyperbolaSplitResult {
    pub main_term: Complex64,
    pub as_plus: Complex64,
    pub as_minus: Complex64,
    pub direct: Complex64,
}

impl HyperbolaSplitResult {
    /// |direct − (main − as⁺ − as⁻)| / |direct|.
    pub fn residual_rel(&self) -> f64 {
        let combo = self.main_term - self.as_plus - self.as_minus;
        (self.direct - combo).norm() / self.direct.norm().max(1e-300)
    }
}

/// Split the fixed-shift sum Σ_m A(1,m)·λ(rm+ℓ)·V(m/X) into a congruence
/// main term and two averaged shifted sums over the weighted modulus set.
///
/// The dual window φ must be exactly 1 at (rm+ℓ)/Y for every m in the
/// support of V(·/X), with Y = rX + ℓ; otherwise the decomposition would
/// not be an identity and the call fails with `WindowMismatch`.
#[allow(clippy::too_many_arguments)]
pub fn hyperbola_split(
    ell: i64,
    x: f64,
    r: u64,
    q_weights: &[(u64, Complex64)],
    d_scale: f64,
    f: Bump,
    gl2: &FourierCoefficientTable,
    gl3: &GL3CoefficientTable,
    v: &Window,
    phi: &Window,
) -> Result<HyperbolaSplitResult> {
    assert!(x > 0.0 && r >= 1 && d_scale > 0.0);
    assert!(
        f.eval(0.0) == 1.0,
        "the divisor-exchange window must satisfy F(0) = 1"
    );
    if q_weights.is_empty() {
        return Err(Error::EmptyShiftSet);
    }
    let y = r as f64 * x + ell as f64;
    let (v_lo, v_hi) = v.support();
    let m_lo = (v_lo * x).floor().max(1.0) as u64;
    let m_hi = (v_hi * x).ceil() as u64;
    if m_hi > gl3.bound2 {
        return Err(Error::TableTooSmall {
            need: m_hi,
            have: gl3.bound2,
        });
    }
    // λ is consumed at every index inside the support of φ(·/Y).
    let (_, phi_hi) = phi.support();
    let n_cap = (phi_hi * y).ceil() as u64;
    if n_cap > gl2.bound {
        return Err(Error::TableTooSmall {
            need: n_cap,
            have: gl2.bound,
        });
    }
    // Transparency of φ over the support of the direct sum.
    for m in m_lo..=m_hi {
        if v.eval(m as f64 / x) == 0.0 {
            continue;
        }
        let shifted = r as i64 * m as i64 + ell;
        if shifted < 1 || phi.eval(shifted as f64 / y) != 1.0 {
            return Err(Error::WindowMismatch(format!(
                "phi((r*{m}+{ell})/Y) != 1 at Y = {y}"
            )));
        }
    }
    let row = gl3.row1();
    let a1 = |m: u64| row[(m - 1) as usize];

    // Direct sum (independent route) and mean weight.
    let direct_terms: Vec<Complex64> = (m_lo..=m_hi)
        .map(|m| {
            let wv = v.eval(m as f64 / x);
            if wv == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let shifted = (r as i64 * m as i64 + ell) as u64;
            Complex64::new(a1(m) * wv * gl2.lambda(shifted), 0.0)
        })
        .collect();
    let direct_raw = pairwise_sum_complex(&direct_terms);
    let mean_weight =
        q_weights.iter().map(|&(_, b)| b).sum::<Complex64>() / q_weights.len() as f64;

    let k_hi = (3.0 * d_scale).ceil() as i64;
    let mut mt_terms: Vec<Complex64> = Vec::new();
    let mut asp_terms: Vec<Complex64> = Vec::new();
    let mut asm_terms: Vec<Complex64> = Vec::new();
    for &(q, bq) in q_weights {
        assert!(q >= 1, "moduli must be positive");
        if bq.norm() == 0.0 {
            continue;
        }
        for m in m_lo..=m_hi {
            let wv = v.eval(m as f64 / x);
            if wv == 0.0 {
                continue;
            }
            let base = r as i64 * m as i64 + ell;
            let am = a1(m) * wv;
            // congruence main term: n = base − k·q over the F-window
            for k in -k_hi..=k_hi {
                let fk = f.eval(k as f64 / d_scale);
                if fk == 0.0 {
                    continue;
                }
                let n = base - k * q as i64;
                if n < 1 {
                    continue;
                }
                let ph = phi.eval(n as f64 / y);
                if ph == 0.0 {
                    continue;
                }
                mt_terms.push(bq * (am * gl2.lambda(n as u64) * ph * fk));
            }
            // shifted sums: n = base ± d·q, d ≥ 1
            for d in 1..=k_hi {
                let fp = f.eval(d as f64 / d_scale);
                let fm = f.eval(-(d as f64) / d_scale);
                if fp == 0.0 && fm == 0.0 {
                    continue;
                }
                let np = base + d * q as i64;
                if np >= 1 && fp != 0.0 {
                    let ph = phi.eval(np as f64 / y);
                    if ph != 0.0 {
                        asp_terms.push(bq * (am * gl2.lambda(np as u64) * ph * fp));
                    }
                }
                let nm = base - d * q as i64;
                if nm >= 1 && fm != 0.0 {
                    let ph = phi.eval(nm as f64 / y);
                    if ph != 0.0 {
                        asm_terms.push(bq * (am * gl2.lambda(nm as u64) * ph * fm));
                    }
                }
            }
        }
    }
    let inv_q = 1.0 / q_weights.len() as f64;
    Ok(HyperbolaSplitResult {
        main_term: pairwise_sum_complex(&mt_terms) * inv_q,
        as_plus: pairwise_sum_complex(&asp_terms) * inv_q,
        as_minus: pairwise_sum_complex(&asm_terms) * inv_q,
        direct: direct_raw * mean_weight,
    })
}
