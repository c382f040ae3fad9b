//! Experiment harness: configuration, shifted-sum evaluation, factorable
//! shift sets, theorem right sides with implied constant 1, grid sweeps with
//! CSV output, exponent fits, and the desk-scale decomposition pipeline that
//! splits a fixed-shift sum and audits the averaged pieces.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bump::{direct_window, phi_window, Bump, Window};
use crate::coeffs::{FourierCoefficientTable, GL3CoefficientTable};
use crate::delta::{hyperbola_split, ShiftSpec};
use crate::numeric::{ols_slope, pairwise_sum, pairwise_sum_complex};
use crate::{Error, Result, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    Interval,
    Factorable,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Q1Mode {
    One,
    PrimesInRange,
}

/// Weight rule a′(q1): identically one, or an explicit table of
/// (q1, re, im) entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    One,
    Table(Vec<(u64, f64, f64)>),
}

impl WeightRule {
    fn weight(&self, q1: u64) -> Complex64 {
        match self {
            WeightRule::One => Complex64::new(1.0, 0.0),
            WeightRule::Table(entries) => entries
                .iter()
                .find(|(q, _, _)| *q == q1)
                .map(|&(_, re, im)| Complex64::new(re, im))
                .unwrap_or(Complex64::new(0.0, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorableSpec {
    pub d: f64,
    pub q1: u64,
    pub q2: f64,
    pub q1_mode: Q1Mode,
    pub aprime: WeightRule,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitShift {
    pub h: i64,
    pub re: f64,
    pub im: f64,
}

/// One experiment: a grid of X values plus the shift-set recipe.
/// Unknown keys in a config file are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x_grid: Vec<f64>,
    pub r: u64,
    pub ell: i64,
    pub shift_mode: ShiftMode,
    #[serde(default)]
    pub interval_length_exponent: Option<f64>,
    #[serde(default)]
    pub factorable: Option<FactorableSpec>,
    #[serde(default)]
    pub explicit_shifts: Option<Vec<ExplicitShift>>,
    pub eps: f64,
    /// Recorded for reproducibility; every experiment is fully deterministic.
    pub seed: u64,
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.x_grid.is_empty() || self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "x_grid must be nonempty and strictly increasing".into(),
            ));
        }
        if self.r == 0 || !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("need r >= 1 and eps > 0".into()));
        }
        match self.shift_mode {
            ShiftMode::Interval if self.interval_length_exponent.is_none() => Err(
                Error::InvalidConfig("interval mode needs interval_length_exponent".into()),
            ),
            ShiftMode::Factorable if self.factorable.is_none() => Err(Error::InvalidConfig(
                "factorable mode needs the factorable block".into(),
            )),
            ShiftMode::Explicit if self.explicit_shifts.is_none() => Err(Error::InvalidConfig(
                "explicit mode needs explicit_shifts".into(),
            )),
            _ => {
                if self.shift_mode != ShiftMode::Factorable && self.factorable.is_some() {
                    return Err(Error::InvalidConfig(
                        "factorable block present outside factorable mode".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn from_path(path: &std::path::Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// (1/|H|)·Σ_h a(h)·Σ_m A(1,m)·λ(rm+h)·V(m/X).
pub fn shifted_sum_direct(
    gl2: &FourierCoefficientTable,
    gl3: &GL3CoefficientTable,
    spec: &ShiftSpec,
    r: u64,
    x: f64,
    v: &Window,
) -> Result<Complex64> {
    let h_size = spec.h_size();
    if h_size == 0 {
        return Err(Error::EmptyShiftSet);
    }
    let (m_lo, m_hi) = m_range(v, x);
    if m_hi > gl3.bound2 {
        return Err(Error::TableTooSmall {
            need: m_hi,
            have: gl3.bound2,
        });
    }
    let max_shift = spec.shifts.iter().map(|&(h, _)| h).max().unwrap_or(0);
    let need = (r * m_hi) as i64 + max_shift.max(0);
    if need > gl2.bound as i64 {
        return Err(Error::TableTooSmall {
            need: need as u64,
            have: gl2.bound,
        });
    }
    let row = gl3.row1();
    let mut terms: Vec<Complex64> = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    for m in m_lo..=m_hi {
        let wv = v.eval(m as f64 / x);
        if wv == 0.0 {
            continue;
        }
        let am = row[(m - 1) as usize] * wv;
        let base = (r * m) as i64;
        let mut inner = Complex64::new(0.0, 0.0);
        for &(h, a) in &spec.shifts {
            let idx = base + h;
            if idx >= 1 {
                inner += a * gl2.lambda(idx as u64);
            }
        }
        terms.push(inner * am);
    }
    Ok(pairwise_sum_complex(&terms) / h_size as f64)
}

/// Termwise absolute majorant of the same double sum.
pub fn shifted_sum_majorant(
    gl2: &FourierCoefficientTable,
    gl3: &GL3CoefficientTable,
    spec: &ShiftSpec,
    r: u64,
    x: f64,
    v: &Window,
) -> Result<f64> {
    let h_size = spec.h_size();
    if h_size == 0 {
        return Err(Error::EmptyShiftSet);
    }
    let (m_lo, m_hi) = m_range(v, x);
    let row = gl3.row1();
    let mut terms: Vec<f64> = Vec::new();
    for m in m_lo..=m_hi {
        let wv = v.eval(m as f64 / x);
        if wv == 0.0 {
            continue;
        }
        let am = (row[(m - 1) as usize] * wv).abs();
        let base = (r * m) as i64;
        let mut inner = 0.0;
        for &(h, a) in &spec.shifts {
            let idx = base + h;
            if idx >= 1 {
                inner += a.norm() * gl2.lambda(idx as u64).abs();
            }
        }
        terms.push(inner * am);
    }
    Ok(pairwise_sum(&terms) / h_size as f64)
}

fn m_range(v: &Window, x: f64) -> (u64, u64) {
    let (lo, hi) = v.support();
    ((lo * x).floor().max(1.0) as u64, (hi * x).ceil() as u64)
}

/// Build the factorable shift set a±(h) = Σ_{±d·q1·q2 = h−ℓ} V1(d/D)·V2(q2/Q2)·a′(q1).
#[allow(clippy::too_many_arguments)]
pub fn build_factorable_shifts(
    ell: i64,
    d_scale: f64,
    q1_bound: u64,
    q1_mode: Q1Mode,
    q2_scale: f64,
    aprime: &WeightRule,
    sign: Sign,
    v1: &Window,
    v2: &Window,
) -> Result<ShiftSpec> {
    let q1_set: Vec<u64> = match q1_mode {
        Q1Mode::One => vec![1],
        Q1Mode::PrimesInRange => {
            if q1_bound < 2 {
                return Err(Error::InvalidConfig("prime moduli need Q1 >= 2".into()));
            }
            arith::primes_up_to(2 * q1_bound)
                .into_iter()
                .filter(|&p| p >= q1_bound)
                .collect()
        }
    };
    let (d_lo, d_hi) = v1.support();
    let (q_lo, q_hi) = v2.support();
    let d_range = ((d_lo * d_scale).floor().max(1.0) as u64)..=((d_hi * d_scale).ceil() as u64);
    let q_range = ((q_lo * q2_scale).floor().max(1.0) as u64)..=((q_hi * q2_scale).ceil() as u64);
    let mut acc: std::collections::BTreeMap<i64, Complex64> = std::collections::BTreeMap::new();
    let mut lattice_points = 0u64;
    for d in d_range {
        let w1 = v1.eval(d as f64 / d_scale);
        if w1 == 0.0 {
            continue;
        }
        for q2 in q_range.clone() {
            let w2 = v2.eval(q2 as f64 / q2_scale);
            if w2 == 0.0 {
                continue;
            }
            for &q1 in &q1_set {
                lattice_points += 1;
                let h = ell + sign.to_i64() * (d * q1 * q2) as i64;
                *acc.entry(h).or_insert(Complex64::new(0.0, 0.0)) +=
                    aprime.weight(q1) * (w1 * w2);
            }
        }
    }
    if lattice_points == 0 {
        return Err(Error::EmptySupport);
    }
    Ok(ShiftSpec {
        shifts: acc.into_iter().collect(),
        ell,
        description: format!(
            "factorable sign {sign:?}, D={d_scale}, Q1={q1_bound} ({q1_mode:?}), Q2={q2_scale}"
        ),
    })
}

/// Exact congruence-count right side:
/// X^{3/4+ε}/|H| · ‖a‖₂ · (Σ_{b ≤ X^{1/2+ε}} sup_h #{h' ≡ h mod b})^{1/2}.
pub fn theorem_rhs_12(spec: &ShiftSpec, x: f64, eps: f64, a_norm2: f64) -> Result<f64> {
    let h_size = spec.h_size();
    if h_size == 0 {
        return Err(Error::EmptyShiftSet);
    }
    let bmax = x.powf(0.5 + eps).floor() as u64;
    let sum = congruence_supcount_sum(spec, bmax) as f64;
    Ok(x.powf(0.75 + eps) / h_size as f64 * a_norm2 * sum.sqrt())
}

/// Σ_{b ≤ bmax} of the largest residue-class multiplicity of the shift set.
pub fn congruence_supcount_sum(spec: &ShiftSpec, bmax: u64) -> u64 {
    let hs: Vec<i64> = spec
        .shifts
        .iter()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|&(h, _)| h)
        .collect();
    let mut total = 0u64;
    for b in 1..=bmax {
        let mut counts = vec![0u64; b as usize];
        for &h in &hs {
            counts[arith::reduce(h, b) as usize] += 1;
        }
        total += counts.iter().copied().max().unwrap_or(0);
    }
    total
}

/// Factorable-regime right side X^{1+ε}/√|H| · (1 + √X·Q1/(D·Q2))^{1/2}·‖a‖_∞.
pub fn theorem_rhs_13(h_size: u64, x: f64, eps: f64, d: f64, q1: u64, q2: f64, a_inf: f64) -> f64 {
    x.powf(1.0 + eps) / (h_size as f64).sqrt()
        * (1.0 + x.sqrt() * q1 as f64 / (d * q2)).sqrt()
        * a_inf
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRecord {
    pub x: f64,
    pub h_size: u64,
    pub d_ah: Complex64,
    pub abs_majorant: f64,
    pub theorem_rhs: f64,
    pub wall_time_ms: u64,
}

/// Regime flags recorded for factorable sweeps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeFlags {
    pub x: f64,
    /// Q1·Q2 ≥ X^{1/2+ε}
    pub q1q2_large: bool,
    /// D+Q1 ≥ X^{1/2+ε} (the rapidly decaying regime)
    pub dq1_large: bool,
}

/// Build the shift set a config requests at one grid point.
pub fn shifts_for(cfg: &ExperimentConfig, x: f64) -> Result<ShiftSpec> {
    match cfg.shift_mode {
        ShiftMode::Interval => {
            let theta = cfg.interval_length_exponent.expect("validated");
            let len = x.powf(theta).ceil().max(1.0) as i64;
            Ok(ShiftSpec {
                shifts: (0..len)
                    .map(|j| (cfg.ell + j, Complex64::new(1.0, 0.0)))
                    .collect(),
                ell: cfg.ell,
                description: format!("interval of length {len} from {}", cfg.ell),
            })
        }
        ShiftMode::Factorable => {
            let f = cfg.factorable.as_ref().expect("validated");
            build_factorable_shifts(
                cfg.ell,
                f.d,
                f.q1,
                f.q1_mode,
                f.q2,
                &f.aprime,
                f.sign,
                &direct_window(),
                &direct_window(),
            )
        }
        ShiftMode::Explicit => {
            let list = cfg.explicit_shifts.as_ref().expect("validated");
            Ok(ShiftSpec {
                shifts: list
                    .iter()
                    .map(|s| (s.h, Complex64::new(s.re, s.im)))
                    .collect(),
                ell: cfg.ell,
                description: "explicit shifts".into(),
            })
        }
    }
}

/// GL(2) bound needed to run a config.
pub fn required_gl2_bound(cfg: &ExperimentConfig) -> u64 {
    let v = direct_window();
    let (_, hi) = v.support();
    let xmax = *cfg.x_grid.last().unwrap();
    let mut need = (cfg.r as f64 * hi * xmax).ceil() as i64 + cfg.ell.abs();
    if let Ok(spec) = shifts_for(cfg, xmax) {
        let hmax = spec.shifts.iter().map(|&(h, _)| h.abs()).max().unwrap_or(0);
        need += hmax;
    }
    need.max(64) as u64
}

/// Run the sweep: one record per grid X, deterministic given the config.
pub fn sweep_experiment(
    cfg: &ExperimentConfig,
    gl2: &FourierCoefficientTable,
    gl3: &GL3CoefficientTable,
) -> Result<(Vec<SweepRecord>, Vec<RegimeFlags>)> {
    cfg.validate()?;
    let v = direct_window();
    let mut records = Vec::with_capacity(cfg.x_grid.len());
    let mut flags = Vec::new();
    for &x in &cfg.x_grid {
        let started = Instant::now();
        let spec = shifts_for(cfg, x)?;
        let d_ah = shifted_sum_direct(gl2, gl3, &spec, cfg.r, x, &v)?;
        let majorant = shifted_sum_majorant(gl2, gl3, &spec, cfg.r, x, &v)?;
        let rhs = match (cfg.shift_mode, cfg.factorable.as_ref()) {
            (ShiftMode::Factorable, Some(f)) => {
                let threshold = x.powf(0.5 + cfg.eps);
                flags.push(RegimeFlags {
                    x,
                    q1q2_large: f.q1 as f64 * f.q2 >= threshold,
                    dq1_large: f.d + f.q1 as f64 >= threshold,
                });
                if f.d + f.q1 as f64 >= threshold {
                    // rapidly decaying regime: recorded with exponent A = 1
                    x.powf(-1.0)
                } else {
                    theorem_rhs_13(
                        spec.h_size(),
                        x,
                        cfg.eps,
                        f.d,
                        f.q1,
                        f.q2,
                        spec.norm_inf(),
                    )
                }
            }
            _ => theorem_rhs_12(&spec, x, cfg.eps, spec.norm2())?,
        };
        records.push(SweepRecord {
            x,
            h_size: spec.h_size(),
            d_ah,
            abs_majorant: majorant,
            theorem_rhs: rhs,
            wall_time_ms: started.elapsed().as_millis() as u64,
        });
    }
    Ok((records, flags))
}

/// 17-significant-digit float formatting for bit-stable round trips.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CSV_HEADER: &str = "X,H_size,re_D,im_D,abs_majorant,theorem_rhs,wall_time_ms";

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt17(r.x),
            r.h_size,
            fmt17(r.d_ah.re),
            fmt17(r.d_ah.im),
            fmt17(r.abs_majorant),
            fmt17(r.theorem_rhs),
            r.wall_time_ms
        ));
    }
    out
}

/// Least-squares slope of log|D| against log X, with its standard error.
pub fn fit_exponent(records: &[SweepRecord]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.x, r.d_ah.norm())).collect();
    fit_loglog(&pts)
}

/// Generic log-log fit used for both the sums and their majorants.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 || points.iter().any(|&(_, y)| y <= 0.0) {
        return Err(Error::DegenerateFit);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, _, stderr) = ols_slope(&xs, &ys);
    Ok((slope, stderr))
}

/// One dyadic row of the averaged-piece audit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DyadicRow {
    pub d_prime: f64,
    pub h_size: u64,
    /// D′·|D_{a±,H}(X)| for the two signs
    pub weighted_plus: f64,
    pub weighted_minus: f64,
}

/// Report of the fixed-shift decomposition experiment.
#[derive(Debug, Clone, Serialize)]
pub struct MunshiReport {
    pub x: f64,
    pub ell: i64,
    pub delta: f64,
    pub eps: f64,
    pub q1_scale: f64,
    pub q2_scale: f64,
    pub d_scale: f64,
    pub q1_set: Vec<u64>,
    pub q1_degenerate: bool,
    pub q_weight_count: usize,
    pub main_term: Complex64,
    pub as_plus: Complex64,
    pub as_minus: Complex64,
    pub direct: Complex64,
    pub residual_rel: f64,
    pub ratio_as_plus: f64,
    pub ratio_as_minus: f64,
    pub dyadic: Vec<DyadicRow>,
    pub dyadic_sup_plus: f64,
    pub dyadic_sup_minus: f64,
}

/// Decompose the fixed-shift sum over a product modulus family with
/// Q1·Q2 = X^{1/2+δ} and D = X^{1−ε}/(Q1·Q2), then audit the averaged
/// pieces through the factorable shift sets, dyadically in D′.
pub fn munshi_decomposition_experiment(
    ell: i64,
    x: f64,
    delta: f64,
    eps: f64,
    gl2: &FourierCoefficientTable,
    gl3: &GL3CoefficientTable,
) -> Result<MunshiReport> {
    assert!(x > 1.0 && delta > 0.0 && eps > 0.0);
    let q1q2 = x.powf(0.5 + delta);
    let q1_scale = q1q2.cbrt().max(2.0);
    let q2_scale = q1q2 / q1_scale;
    let d_scale = x.powf(1.0 - eps) / q1q2;
    let mut q1_set: Vec<u64> = arith::primes_up_to((2.0 * q1_scale).floor() as u64)
        .into_iter()
        .filter(|&p| p as f64 >= q1_scale)
        .collect();
    let q1_degenerate = q1_set.is_empty();
    if q1_degenerate {
        q1_set = vec![1];
    }
    // weighted modulus family q = q1·q2 with b(q) = Σ V2(q2/Q2), rescaled so
    // the mean weight matches the 1/(|Q1 set|·Q2) normalization
    let v2 = direct_window();
    let (qlo, qhi) = v2.support();
    let q2_lo = (qlo * q2_scale).floor().max(1.0) as u64;
    let q2_hi = (qhi * q2_scale).ceil() as u64;
    let mut q_weights: std::collections::BTreeMap<u64, Complex64> = Default::default();
    for &q1 in &q1_set {
        for q2 in q2_lo..=q2_hi {
            let w = v2.eval(q2 as f64 / q2_scale);
            if w == 0.0 {
                continue;
            }
            *q_weights.entry(q1 * q2).or_insert(Complex64::new(0.0, 0.0)) +=
                Complex64::new(w, 0.0);
        }
    }
    if q_weights.is_empty() {
        return Err(Error::EmptySupport);
    }
    let count = q_weights.len() as f64;
    let scale = count / (q1_set.len() as f64 * q2_scale);
    let q_weights: Vec<(u64, Complex64)> =
        q_weights.into_iter().map(|(q, b)| (q, b * scale)).collect();

    let split = hyperbola_split(
        ell,
        x,
        1,
        &q_weights,
        d_scale,
        Bump::PlateauU,
        gl2,
        gl3,
        &direct_window(),
        &phi_window(),
    )?;

    // dyadic audit of the averaged pieces
    let mut dyadic = Vec::new();
    let mut sup_plus = 0.0f64;
    let mut sup_minus = 0.0f64;
    let mut d_prime = d_scale;
    let v1 = direct_window();
    while d_prime >= 0.5 {
        let mut row = DyadicRow {
            d_prime,
            h_size: 0,
            weighted_plus: 0.0,
            weighted_minus: 0.0,
        };
        for sign in [Sign::Plus, Sign::Minus] {
            let spec = match build_factorable_shifts(
                ell,
                d_prime,
                q1_scale.floor().max(2.0) as u64,
                if q1_degenerate {
                    Q1Mode::One
                } else {
                    Q1Mode::PrimesInRange
                },
                q2_scale,
                &WeightRule::One,
                sign,
                &v1,
                &v2,
            ) {
                Ok(s) => s,
                Err(Error::EmptySupport) => continue,
                Err(e) => return Err(e),
            };
            if spec.h_size() == 0 {
                continue;
            }
            let v = shifted_sum_direct(gl2, gl3, &spec, 1, x, &direct_window())?;
            let weighted = d_prime * v.norm();
            match sign {
                Sign::Plus => {
                    row.h_size = spec.h_size();
                    row.weighted_plus = weighted;
                    sup_plus = sup_plus.max(weighted);
                }
                Sign::Minus => {
                    row.weighted_minus = weighted;
                    sup_minus = sup_minus.max(weighted);
                }
            }
        }
        dyadic.push(row);
        d_prime /= 2.0;
    }

    let dnorm = split.direct.norm().max(1e-300);
    Ok(MunshiReport {
        x,
        ell,
        delta,
        eps,
        q1_scale,
        q2_scale,
        d_scale,
        q1_set,
        q1_degenerate,
        q_weight_count: q_weights.len(),
        main_term: split.main_term,
        as_plus: split.as_plus,
        as_minus: split.as_minus,
        direct: split.direct,
        residual_rel: split.residual_rel(),
        ratio_as_plus: split.as_plus.norm() / dnorm,
        ratio_as_minus: split.as_minus.norm() / dnorm,
        dyadic,
        dyadic_sup_plus: sup_plus,
        dyadic_sup_minus: sup_minus,
    })
}
