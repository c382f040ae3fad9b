//! Two-range split of twisted smooth shift counts.
//!
//! For a shift n, windows V1, V2 and a modulus q1, the weighted count of
//! representations n ± d·q1·q2 = 0 carries a unimodular twist
//! (n²)^{it}/(dq1q2)^{2it} (identically 1 on the count's support). Expanding
//! the delta symbol through the kernel form of the delta method and cutting
//! the modulus sum at a threshold yields two pieces:
//!
//! * `s_split_exact` evaluates both pieces by the exact definition (sums
//!   over c0, c, d, q2 and a Ramanujan factor for the unit-character sum);
//! * [`S1Engine`] evaluates the above-threshold piece in its dual form:
//!   truncated Poisson-dual d, q2 sums, a Kloosterman factor through the
//!   closed form of the congruence character sum, and oscillatory window
//!   transforms.
//!
//! The dual evaluation groups terms by the residue of the dual frequency
//! product; the grouped sum is term-for-term the truncated dual sum, and a
//! per-term mode (`CsumMode::ClosedPerTerm` / `BrutePerTerm`) is kept for
//! cross-checks.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{gcd, mod_inverse, reduce};
use crate::bump::Window;
use crate::charsum::{self, kloosterman_row, modulus_data};
use crate::delta::{delta_cor_kernel, DeltaConfig};
use crate::numeric::pairwise_sum_complex;
use crate::quad::{integrate, QuadratureBudget};
use crate::voronoi::stationary_phase_negligible;
use crate::{Error, Result, Sign};

/// Window and scale data shared by both routes.
#[derive(Debug, Clone)]
pub struct SplitShape {
    pub big_d: f64,
    pub big_q2: f64,
    /// Twist parameter t.
    pub t: f64,
    /// Moduli with c ≤ threshold go to the first piece.
    pub c_threshold: f64,
    pub v1: Window,
    pub v2: Window,
}

impl SplitShape {
    /// Integers in the support of V1(·/D) with their weights.
    pub fn d_support(&self) -> Vec<(u64, f64)> {
        lattice_support(&self.v1, self.big_d)
    }

    /// Integers in the support of V2(·/Q2) with their weights.
    pub fn q2_support(&self) -> Vec<(u64, f64)> {
        lattice_support(&self.v2, self.big_q2)
    }
}

fn lattice_support(v: &Window, scale: f64) -> Vec<(u64, f64)> {
    let (lo, hi) = v.support();
    let a = (lo * scale).floor().max(1.0) as u64;
    let b = (hi * scale).ceil() as u64;
    (a..=b)
        .filter_map(|d| {
            let w = v.eval(d as f64 / scale);
            (w > 0.0).then_some((d, w))
        })
        .collect()
}

/// (n²)^{it} with the convention that the factor is 1 at n = 0 (there it
/// only ever multiplies an empty count).
fn twist_n(n: i64, t: f64) -> Complex64 {
    if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let phase = 2.0 * t * (n.unsigned_abs() as f64).ln();
        Complex64::new(phase.cos(), phase.sin())
    }
}

/// m^{-2it} for positive m.
fn twist_inv(m: f64, t: f64) -> Complex64 {
    let phase = -2.0 * t * m.ln();
    Complex64::new(phase.cos(), phase.sin())
}

/// Brute-force twisted representation count:
/// Σ_{d,q2 ≥ 1, n ± d·q1·q2 = 0} V1(d/D)·V2(q2/Q2)·(n²)^{it}/(dq1q2)^{2it}.
pub fn shift_count_brute(n: i64, q1: u64, sign: Sign, shape: &SplitShape) -> Complex64 {
    assert!(q1 >= 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for (d, w1) in shape.d_support() {
        // n + sign·d·q1·q2 = 0 needs q2 = -sign·n/(d·q1) to be a positive integer
        let target = -sign.to_i64() * n;
        if target <= 0 {
            continue;
        }
        let dq1 = (d * q1) as i64;
        if target % dq1 != 0 {
            continue;
        }
        let q2 = (target / dq1) as u64;
        let w2 = shape.v2.eval(q2 as f64 / shape.big_q2);
        if w2 == 0.0 {
            continue;
        }
        let m = (d * q1 * q2) as f64;
        acc += twist_n(n, shape.t) * twist_inv(m, shape.t) * (w1 * w2);
    }
    acc
}

/// Both pieces of the split, by the exact definition. The sum of the two
/// equals the brute-force twisted count to floating-point accuracy.
pub fn s_split_exact(
    n: i64,
    q1: u64,
    sign: Sign,
    shape: &SplitShape,
    cfg: &DeltaConfig,
) -> Result<(Complex64, Complex64)> {
    assert!(q1 >= 1);
    if cfg.c_scale < shape.c_threshold {
        return Err(Error::InvalidConfig(
            "modulus scale must reach the split threshold".into(),
        ));
    }
    let ds = shape.d_support();
    let qs = shape.q2_support();
    if ds.is_empty() || qs.is_empty() {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let cc_hi = (3.0 * cfg.c_scale).ceil() as u64;
    let tw_n = twist_n(n, shape.t);
    let mut lo_terms: Vec<Complex64> = Vec::new();
    let mut hi_terms: Vec<Complex64> = Vec::new();
    for &(d, w1) in &ds {
        for &(q2, w2) in &qs {
            let k = n + sign.to_i64() * (d * q1 * q2) as i64;
            let tw = tw_n * twist_inv((d * q1 * q2) as f64, shape.t) * (w1 * w2);
            for cc in 1..=cc_hi {
                let x = cc as f64 / cfg.c_scale;
                let y = k as f64 / (cc as f64 * cfg.c_scale);
                let h = delta_cor_kernel(x, y, cfg);
                if h == 0.0 {
                    continue;
                }
                for c in crate::arith::divisors(cc) {
                    let c0 = cc / c;
                    let ram = modulus_data(c).ramanujan_row()[reduce(k, c) as usize];
                    if ram == 0.0 {
                        continue;
                    }
                    let contrib = tw * (h * ram / (cfg.normalizer * c0 as f64 * c as f64));
                    if (c as f64) <= shape.c_threshold {
                        lo_terms.push(contrib);
                    } else {
                        hi_terms.push(contrib);
                    }
                }
            }
        }
    }
    Ok((
        pairwise_sum_complex(&lo_terms),
        pairwise_sum_complex(&hi_terms),
    ))
}

/// How the congruence character sum is evaluated on the dual side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsumMode {
    /// Kloosterman rows + residue-grouped dual frequencies (fast default).
    ClosedTable,
    /// The closed form per dual term.
    ClosedPerTerm,
    /// The literal double-loop character sum per dual term.
    BrutePerTerm,
}

/// Tunables for the dual evaluation.
#[derive(Debug, Clone, Copy)]
pub struct S1Params {
    /// Frequency cutoff (in cycles per unit window argument) handed to the
    /// stationary-phase predicate that truncates the dual sums.
    pub freq_cut: f64,
    /// Exponent slack of the negligibility predicate.
    pub eps: f64,
    pub budget: QuadratureBudget,
    pub mode: CsumMode,
    /// Oversampling of the window-transform rows (samples per unit).
    pub samples_per_unit: usize,
}

impl Default for S1Params {
    fn default() -> Self {
        S1Params {
            freq_cut: 36.0,
            eps: 0.1,
            budget: QuadratureBudget {
                rel_tol: 1e-8,
                max_panels: 4096,
            },
            mode: CsumMode::ClosedTable,
            samples_per_unit: 2048,
        }
    }
}

/// Dual-side value with its reported accuracy budget.
#[derive(Debug, Clone, Copy)]
pub struct S1Value {
    pub value: Complex64,
    /// Quadrature + truncation estimate, relative to the reported value.
    pub error_estimate: f64,
}

/// Oscillatory window transform row: J(k) = ∫ V(x)·x^{-2it}·e(k·S·x/c) dx
/// for k = -kmax..kmax, evaluated on a uniform oversampled grid with running
/// phase products (spectrally accurate for these C^∞ windows; spot-checked
/// against the adaptive integrator at construction).
fn transform_row(
    v: &Window,
    t: f64,
    scale: f64,
    c: u64,
    kmax: i64,
    samples_per_unit: usize,
) -> Vec<Complex64> {
    let (lo, hi) = v.support();
    let span = hi - lo;
    let max_cycles = (kmax as f64 * scale / c as f64) * span;
    let ns = ((samples_per_unit as f64 * span) as usize)
        .max(8 * max_cycles.ceil() as usize + 512);
    let h = span / ns as f64;
    let dtheta = 2.0 * std::f64::consts::PI * scale / c as f64;
    // per-sample state at frequency k = -kmax
    let mut cur: Vec<Complex64> = Vec::with_capacity(ns);
    let mut step: Vec<Complex64> = Vec::with_capacity(ns);
    for j in 0..ns {
        let x = lo + (j as f64 + 0.5) * h;
        let w = v.eval(x);
        let g = twist_inv(x, t) * (w * h);
        let th0 = -(kmax as f64) * dtheta * x;
        cur.push(g * Complex64::new(th0.cos(), th0.sin()));
        let th = dtheta * x;
        step.push(Complex64::new(th.cos(), th.sin()));
    }
    let mut row = Vec::with_capacity(2 * kmax as usize + 1);
    for _k in 0..=2 * kmax as usize {
        row.push(pairwise_sum_complex(&cur));
        for j in 0..ns {
            cur[j] *= step[j];
        }
    }
    row
}

/// Adaptive-quadrature reference for one row entry.
fn transform_entry_quad(
    v: &Window,
    t: f64,
    scale: f64,
    c: u64,
    k: i64,
    budget: &QuadratureBudget,
) -> Result<Complex64> {
    let (lo, hi) = v.support();
    let om = 2.0 * std::f64::consts::PI * k as f64 * scale / c as f64;
    let r = integrate(
        &|x| {
            let ph = om * x;
            v.eval(x) * twist_inv(x, t) * Complex64::new(ph.cos(), ph.sin())
        },
        lo,
        hi,
        budget,
    )?;
    Ok(r.value)
}

/// Dual frequency cutoff for a window of scale S at modulus c: the smallest
/// k beyond which the stationary-phase predicate declares the transform
/// negligible for both signs of the frequency.
fn dual_cutoff(
    v: &Window,
    t: f64,
    scale: f64,
    c: u64,
    cfg: &DeltaConfig,
    params: &S1Params,
) -> i64 {
    let (lo, _) = v.support();
    let z = 2.0 * std::f64::consts::PI * params.freq_cut;
    let y_scale = cfg.c_scale * cfg.c_scale;
    let mut k = 1i64;
    loop {
        // phase derivative of e(k·S·x/c)·x^{-2it}: 2πkS/c − 2t/x on the support
        let osc = 2.0 * std::f64::consts::PI * k as f64 * scale / c as f64;
        let min_deriv = (osc - 2.0 * t / lo).max(0.0);
        if stationary_phase_negligible(min_deriv, z, y_scale, params.eps) {
            return k;
        }
        k += 1;
    }
}

struct CTables {
    /// Σ_{c0 : pair} W(c0c/C)U(c0c/C)/c0
    weight: f64,
    dmax: i64,
    qmax: i64,
    jx: Vec<Complex64>,
    jy: Vec<Complex64>,
    /// residue-grouped dual tables keyed by g = gcd(q1, c)
    b_tables: HashMap<u64, Vec<Complex64>>,
}

/// Reusable dual-side evaluator for a fixed configuration; `eval` serves any
/// (n, q1, sign) on the grid.
pub struct S1Engine {
    cfg: DeltaConfig,
    shape: SplitShape,
    params: S1Params,
    tables: HashMap<u64, CTables>,
    cs: Vec<u64>,
    /// max observed row-vs-adaptive discrepancy (relative)
    row_check: f64,
}

impl S1Engine {
    pub fn new(cfg: &DeltaConfig, shape: &SplitShape, params: S1Params) -> Result<S1Engine> {
        if cfg.c_scale < shape.c_threshold {
            return Err(Error::InvalidConfig(
                "modulus scale must reach the split threshold".into(),
            ));
        }
        // (c0, c) pairs with the annulus factor alive and c above threshold.
        let mut weights: HashMap<u64, f64> = HashMap::new();
        let cc_lo = cfg.c_scale.floor() as u64;
        let cc_hi = (2.0 * cfg.c_scale).ceil() as u64;
        for cc in cc_lo.max(1)..=cc_hi {
            let x = cc as f64 / cfg.c_scale;
            let w = crate::bump::Bump::AnnulusW.eval(x) * crate::bump::Bump::PlateauU.eval(x);
            if w == 0.0 {
                continue;
            }
            for c in crate::arith::divisors(cc) {
                if (c as f64) > shape.c_threshold {
                    let c0 = cc / c;
                    *weights.entry(c).or_insert(0.0) += w / c0 as f64;
                }
            }
        }
        let mut cs: Vec<u64> = weights.keys().copied().collect();
        cs.sort_unstable();
        // window-transform rows, in parallel over moduli
        let rows: Vec<(u64, CTables)> = cs
            .par_iter()
            .map(|&c| {
                let dmax = dual_cutoff(&shape.v1, shape.t, shape.big_d, c, cfg, &params);
                let qmax = dual_cutoff(&shape.v2, shape.t, shape.big_q2, c, cfg, &params);
                let jx = transform_row(
                    &shape.v1,
                    shape.t,
                    shape.big_d,
                    c,
                    dmax,
                    params.samples_per_unit,
                );
                let jy = transform_row(
                    &shape.v2,
                    shape.t,
                    shape.big_q2,
                    c,
                    qmax,
                    params.samples_per_unit,
                );
                (
                    c,
                    CTables {
                        weight: weights[&c],
                        dmax,
                        qmax,
                        jx,
                        jy,
                        b_tables: HashMap::new(),
                    },
                )
            })
            .collect();
        let mut tables = HashMap::new();
        for (c, t) in rows {
            tables.insert(c, t);
        }
        // spot-check rows against the adaptive integrator
        let mut row_check = 0.0f64;
        for (i, &c) in cs.iter().enumerate() {
            if i % (cs.len() / 6 + 1) != 0 {
                continue;
            }
            let tab = &tables[&c];
            for k in [0i64, tab.dmax / 3, tab.dmax] {
                let direct = transform_entry_quad(
                    &shape.v1,
                    shape.t,
                    shape.big_d,
                    c,
                    k,
                    &params.budget,
                )?;
                let row = tab.jx[(k + tab.dmax) as usize];
                let scale = tab.jx[tab.dmax as usize].norm().max(1e-30);
                row_check = row_check.max((direct - row).norm() / scale);
            }
        }
        Ok(S1Engine {
            cfg: cfg.clone(),
            shape: shape.clone(),
            params,
            tables,
            cs,
            row_check,
        })
    }

    /// Largest |n| for which the kernel's second slot stays inside the flat
    /// part of the plateau over every retained pair and the whole window
    /// box. The dual form is evaluated only in that regime.
    fn flat_margin(&self, q1: u64) -> f64 {
        let (_, x_hi) = self.shape.v1.support();
        let (_, y_hi) = self.shape.v2.support();
        let cc_min = self.cfg.c_scale.floor().max(1.0) + 1.0;
        cc_min * self.cfg.c_scale
            - self.shape.big_d * q1 as f64 * self.shape.big_q2 * x_hi * y_hi
    }

    fn ensure_b_table(&mut self, c: u64, g: u64) {
        let tab = self.tables.get_mut(&c).expect("known modulus");
        if tab.b_tables.contains_key(&g) {
            return;
        }
        let cu = c as usize;
        // fold the rows over residues of the dual index divided by g
        let mut ax = vec![Complex64::new(0.0, 0.0); cu];
        let amax = tab.dmax / g as i64;
        for a in -amax..=amax {
            ax[reduce(a, c) as usize] += tab.jx[(a * g as i64 + tab.dmax) as usize];
        }
        let mut ay = vec![Complex64::new(0.0, 0.0); cu];
        let bmax = tab.qmax / g as i64;
        for b in -bmax..=bmax {
            ay[reduce(b, c) as usize] += tab.jy[(b * g as i64 + tab.qmax) as usize];
        }
        // multiplicative convolution: B[w] = Σ_{u·v ≡ w} Ax[u]·Ay[v]
        let mut bt = vec![Complex64::new(0.0, 0.0); cu];
        for (u, &axu) in ax.iter().enumerate() {
            if axu.norm_sqr() == 0.0 {
                continue;
            }
            let mut w = 0usize;
            for &ayv in ay.iter() {
                bt[w] += axu * ayv;
                w += u;
                if w >= cu {
                    w -= cu;
                }
            }
        }
        tab.b_tables.insert(g, bt);
    }

    /// Dual-side value of the above-threshold piece for one (n, q1, sign).
    pub fn eval(&mut self, n: i64, q1: u64, sign: Sign) -> Result<S1Value> {
        assert!(q1 >= 1);
        let ds = self.shape.d_support();
        let qs = self.shape.q2_support();
        if ds.is_empty() || qs.is_empty() {
            return Ok(S1Value {
                value: Complex64::new(0.0, 0.0),
                error_estimate: 0.0,
            });
        }
        if (n.unsigned_abs() as f64) >= self.flat_margin(q1) {
            return Err(Error::InvalidConfig(format!(
                "|n| = {} is too large for the dual evaluator at modulus scale {}: \
                 the kernel is no longer flat on the window box; evaluate the exact split",
                n.unsigned_abs(),
                self.cfg.c_scale
            )));
        }
        let mut planner = rustfft::FftPlanner::new();
        let dq = self.shape.big_d * q1 as f64 * self.shape.big_q2;
        let tw0 = twist_n(n, self.shape.t) * twist_inv(dq, self.shape.t);
        let front = self.shape.big_d * self.shape.big_q2 / self.cfg.normalizer;
        let cs = self.cs.clone();
        let mut terms: Vec<Complex64> = Vec::with_capacity(cs.len());
        let mut trunc_probe = 0.0f64;
        for &c in &cs {
            let g = gcd(q1, c);
            if self.params.mode == CsumMode::ClosedTable {
                self.ensure_b_table(c, g);
            }
            let tab = &self.tables[&c];
            let inner = match self.params.mode {
                CsumMode::ClosedTable => {
                    let w1 = if c / g == 1 {
                        0
                    } else {
                        mod_inverse((q1 / g) as i64, c / g)?
                    };
                    let sigma = reduce(-(sign.to_i64()) * (g as i64) * (w1 as i64), c);
                    let krow = kloosterman_row(n, c, &mut planner)?;
                    let bt = &tab.b_tables[&g];
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut idx = 0u64;
                    for &bw in bt.iter() {
                        acc += bw * krow[idx as usize];
                        idx += sigma;
                        if idx >= c {
                            idx -= c;
                        }
                    }
                    acc * g as f64
                }
                CsumMode::ClosedPerTerm | CsumMode::BrutePerTerm => {
                    self.inner_per_term(n, q1, sign, c, tab)?
                }
            };
            let pref = tab.weight / (c as f64 * c as f64);
            terms.push(inner * pref);
            // truncation probe: boundary row values against a Weil-size factor
            let bx = tab.jx[0].norm().max(tab.jx[tab.jx.len() - 1].norm());
            let by = tab.jy[0].norm().max(tab.jy[tab.jy.len() - 1].norm());
            let l1x: f64 = tab.jx.iter().map(|z| z.norm()).sum();
            let l1y: f64 = tab.jy.iter().map(|z| z.norm()).sum();
            let weil = crate::arith::divisor_count(c) as f64 * (c as f64).sqrt();
            trunc_probe += pref * weil * 2.0 * (bx * l1y + by * l1x);
        }
        let value = pairwise_sum_complex(&terms) * tw0 * front;
        let scale = value.norm().max(1e-300);
        let error_estimate =
            (front * trunc_probe + self.row_check * value.norm()) / scale;
        Ok(S1Value {
            value,
            error_estimate,
        })
    }

    /// Truncated dual double sum with a per-term character-sum evaluation.
    fn inner_per_term(
        &self,
        n: i64,
        q1: u64,
        sign: Sign,
        c: u64,
        tab: &CTables,
    ) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for dh in -tab.dmax..=tab.dmax {
            let jx = tab.jx[(dh + tab.dmax) as usize];
            for qh in -tab.qmax..=tab.qmax {
                let jy = tab.jy[(qh + tab.qmax) as usize];
                let cs = match self.params.mode {
                    CsumMode::BrutePerTerm => charsum::c_sum_brute(n, dh, q1, qh, c, sign),
                    _ => {
                        if gcd(q1, c) == 1 {
                            charsum::c_sum_closed(n, dh, q1, qh, c, sign)?
                        } else {
                            charsum::c_sum_closed_any(n, dh, q1, qh, c, sign)?
                        }
                    }
                };
                acc += cs * jx * jy;
            }
        }
        Ok(acc)
    }

}

/// Full two-dimensional dual integrand for one (c0, c) pair and one dual
/// frequency pair, with the kernel inside the integral; used to validate
/// that the flat-regime evaluation factors exactly into the row transforms.
#[allow(clippy::too_many_arguments)]
pub fn dual_integral_2d(
    n: i64,
    q1: u64,
    sign: Sign,
    c0: u64,
    c: u64,
    dhat: i64,
    qhat: i64,
    shape: &SplitShape,
    cfg: &DeltaConfig,
    budget: &QuadratureBudget,
) -> Result<Complex64> {
    let (x_lo, x_hi) = shape.v1.support();
    let (y_lo, y_hi) = shape.v2.support();
    let cc = c0 * c;
    let om_x = 2.0 * std::f64::consts::PI * dhat as f64 * shape.big_d / c as f64;
    let om_y = 2.0 * std::f64::consts::PI * qhat as f64 * shape.big_q2 / c as f64;
    let outer = integrate(
        &|y| {
            let inner = integrate(
                &|x| {
                    let harg = (n as f64
                        + sign.to_i64() as f64
                            * shape.big_d
                            * q1 as f64
                            * shape.big_q2
                            * x
                            * y)
                        / (cc as f64 * cfg.c_scale);
                    let h = delta_cor_kernel(cc as f64 / cfg.c_scale, harg, cfg);
                    let ph = om_x * x;
                    shape.v1.eval(x) * twist_inv(x, shape.t) * h * Complex64::new(ph.cos(), ph.sin())
                },
                x_lo,
                x_hi,
                budget,
            )
            .map(|r| r.value)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
            let ph = om_y * y;
            shape.v2.eval(y) * twist_inv(y, shape.t) * inner * Complex64::new(ph.cos(), ph.sin())
        },
        y_lo,
        y_hi,
        budget,
    )?;
    if !outer.value.re.is_finite() || !outer.value.im.is_finite() {
        return Err(Error::QuadratureFailure {
            estimate: f64::INFINITY,
            budget: budget.rel_tol,
        });
    }
    Ok(outer.value)
}

/// One-shot dual evaluation of the above-threshold piece.
pub fn s1_simplified(
    n: i64,
    q1: u64,
    sign: Sign,
    shape: &SplitShape,
    cfg: &DeltaConfig,
    params: S1Params,
) -> Result<S1Value> {
    let mut engine = S1Engine::new(cfg, shape, params)?;
    engine.eval(n, q1, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::Window;

    fn desk_shape(threshold: f64) -> SplitShape {
        SplitShape {
            big_d: 4.0,
            big_q2: 8.0,
            t: 0.1,
            c_threshold: threshold,
            v1: Window::plateau(1.0, 1.25, 1.75, 2.0),
            v2: Window::plateau(1.0, 1.25, 1.75, 2.0),
        }
    }

    #[test]
    fn brute_count_examples() {
        let shape = desk_shape(16.0);
        // unique representation: n = -6*12 = -72, d=6, q2=12 on the plateau
        let v = shift_count_brute(-72, 1, Sign::Plus, &shape);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // no representation
        let v0 = shift_count_brute(-30, 1, Sign::Plus, &shape);
        assert_eq!(v0, Complex64::new(0.0, 0.0));
        // sign flip matches negated n
        let a = shift_count_brute(66, 1, Sign::Minus, &shape);
        let b = shift_count_brute(-66, 1, Sign::Plus, &shape);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn exact_split_totals_match_brute_count() {
        let cfg = DeltaConfig::new(256.0, 256.0, 1).unwrap();
        let shape = desk_shape(16.0);
        for q1 in [1u64, 3] {
            for n in [-72i64, -66, -64, -30, -13, 0, 7, 40, 64] {
                for sign in [Sign::Plus, Sign::Minus] {
                    let (s0, s1) = s_split_exact(n, q1, sign, &shape, &cfg).unwrap();
                    let brute = shift_count_brute(n, q1, sign, &shape);
                    assert!(
                        (s0 + s1 - brute).norm() < 1e-9,
                        "n={n} q1={q1} sign={sign:?}: {} vs {}",
                        s0 + s1,
                        brute
                    );
                }
            }
        }
    }

    #[test]
    fn untwisted_split_matches_t_zero() {
        let cfg = DeltaConfig::new(64.0, 64.0, 1).unwrap();
        let mut shape = desk_shape(8.0);
        shape.t = 0.0;
        // untwisted oracle: same split with the twist factors literally 1
        for n in [-72i64, -20, 5] {
            let (s0, s1) = s_split_exact(n, 1, Sign::Plus, &shape, &cfg).unwrap();
            let brute = shift_count_brute(n, 1, Sign::Plus, &shape);
            assert!((s0 + s1 - brute).norm() < 1e-10);
            assert!(s0.im.abs() < 1e-12 && s1.im.abs() < 1e-12);
        }
    }

    #[test]
    fn empty_support_returns_zero() {
        let cfg = DeltaConfig::new(64.0, 64.0, 1).unwrap();
        let mut shape = desk_shape(8.0);
        // a window whose scaled support contains no integers
        shape.v1 = Window::plateau(0.1, 0.2, 0.3, 0.4);
        shape.big_d = 1.0;
        let (s0, s1) = s_split_exact(5, 1, Sign::Plus, &shape, &cfg).unwrap();
        assert_eq!(s0, Complex64::new(0.0, 0.0));
        assert_eq!(s1, Complex64::new(0.0, 0.0));
        let v = s1_simplified(5, 1, Sign::Plus, &shape, &cfg, S1Params::default()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dual_modes_agree_at_tiny_scale() {
        let cfg = DeltaConfig::new(24.0, 24.0, 1).unwrap();
        let shape = SplitShape {
            big_d: 2.0,
            big_q2: 3.0,
            t: 0.1,
            c_threshold: 4.0,
            v1: Window::plateau(1.0, 1.25, 1.75, 2.0),
            v2: Window::plateau(1.0, 1.25, 1.75, 2.0),
        };
        let params = S1Params {
            freq_cut: 4.0,
            ..Default::default()
        };
        for q1 in [1u64, 3] {
            for n in [-12i64, -5, 2] {
                let table = {
                    let mut e = S1Engine::new(&cfg, &shape, params).unwrap();
                    e.eval(n, q1, Sign::Plus).unwrap().value
                };
                let per_term = {
                    let mut p = params;
                    p.mode = CsumMode::ClosedPerTerm;
                    let mut e = S1Engine::new(&cfg, &shape, p).unwrap();
                    e.eval(n, q1, Sign::Plus).unwrap().value
                };
                let brute = {
                    let mut p = params;
                    p.mode = CsumMode::BrutePerTerm;
                    let mut e = S1Engine::new(&cfg, &shape, p).unwrap();
                    e.eval(n, q1, Sign::Plus).unwrap().value
                };
                assert!(
                    (table - per_term).norm() <= 1e-12 * table.norm().max(1.0),
                    "grouping: n={n} q1={q1} {table} vs {per_term}"
                );
                assert!(
                    (per_term - brute).norm() <= 1e-12 * table.norm().max(1.0),
                    "closed vs brute: n={n} q1={q1}"
                );
            }
        }
    }

    #[test]
    fn dual_matches_exact_at_desk_scale() {
        let cfg = DeltaConfig::new(64.0, 64.0, 1).unwrap();
        let shape = desk_shape(8.0);
        let mut engine = S1Engine::new(&cfg, &shape, S1Params::default()).unwrap();
        for q1 in [1u64, 3] {
            for n in [-72i64, -64, -30, 1, 40] {
                let (_, s1) = s_split_exact(n, q1, Sign::Plus, &shape, &cfg).unwrap();
                let dual = engine.eval(n, q1, Sign::Plus).unwrap();
                let scale = s1.norm().max(1e-6);
                assert!(
                    (dual.value - s1).norm() / scale < 1e-4,
                    "n={n} q1={q1}: exact {s1}, dual {} (rel {:.2e})",
                    dual.value,
                    (dual.value - s1).norm() / scale
                );
            }
        }
    }

    /// The nested 2D oscillatory integral factors into the row transforms
    /// (times the flat kernel value) in the regime the engine serves.
    #[test]
    fn two_dim_kernel_integral_factors() {
        let cfg = DeltaConfig::new(24.0, 24.0, 1).unwrap();
        let shape = SplitShape {
            big_d: 2.0,
            big_q2: 3.0,
            t: 0.1,
            c_threshold: 4.0,
            v1: Window::plateau(1.0, 1.25, 1.75, 2.0),
            v2: Window::plateau(1.0, 1.25, 1.75, 2.0),
        };
        let budget = QuadratureBudget {
            rel_tol: 1e-10,
            max_panels: 4096,
        };
        let (n, q1, sign) = (-5i64, 1u64, Sign::Plus);
        for (c0, c, dh, qh) in [(1u64, 29u64, 0i64, 1i64), (2, 13, 3, -2), (1, 31, -7, 4)] {
            let full = dual_integral_2d(n, q1, sign, c0, c, dh, qh, &shape, &cfg, &budget)
                .unwrap();
            let cc = c0 * c;
            let wh = delta_cor_kernel(
                cc as f64 / cfg.c_scale,
                n as f64 / (cc as f64 * cfg.c_scale),
                &cfg,
            );
            let jx = transform_entry_quad(&shape.v1, shape.t, shape.big_d, c, dh, &budget)
                .unwrap();
            let jy = transform_entry_quad(&shape.v2, shape.t, shape.big_q2, c, qh, &budget)
                .unwrap();
            let factored = jx * jy * wh;
            assert!(
                (full - factored).norm() < 1e-9 * full.norm().max(1e-3),
                "(c0,c,dh,qh)=({c0},{c},{dh},{qh}): {full} vs {factored}"
            );
        }
    }

    #[test]
    fn engine_refuses_oversized_shift() {
        let cfg = DeltaConfig::new(24.0, 24.0, 1).unwrap();
        let shape = desk_shape(4.0);
        let mut engine = S1Engine::new(&cfg, &shape, S1Params::default()).unwrap();
        assert!(engine.eval(4000, 1, Sign::Plus).is_err());
    }

    #[test]
    fn doubling_cutoff_is_stable() {
        let cfg = DeltaConfig::new(64.0, 64.0, 1).unwrap();
        let shape = desk_shape(8.0);
        let params = S1Params::default();
        let base = s1_simplified(-72, 1, Sign::Plus, &shape, &cfg, params)
            .unwrap()
            .value;
        let doubled = s1_simplified(
            -72,
            1,
            Sign::Plus,
            &shape,
            &cfg,
            S1Params {
                freq_cut: 2.0 * params.freq_cut,
                ..params
            },
        )
        .unwrap()
        .value;
        assert!(
            (base - doubled).norm() / base.norm().max(1e-12) < 1e-6,
            "{base} vs {doubled}"
        );
    }
}
