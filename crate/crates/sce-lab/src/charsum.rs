//! Complete exponential and character sums: additive characters, Ramanujan
//! and Kloosterman sums, the twisted correlation sums over unit groups, and
//! their closed-form reductions.
//!
//! Every sum with a reduced form keeps its brute-force definition next to it;
//! the test suite and the `verify` drivers compare the two routes.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::arith::{self, gcd, mod_inverse, reduce};
use crate::numeric::pairwise_sum_complex;
use crate::{Error, Result, Sign};

/// Absolute bound on the imaginary residue of sums that must be real.
pub const IM_RESIDUE_LIMIT: f64 = 1e-9;

/// Largest modulus for which a full root-of-unity table is kept.
const ROOT_TABLE_MAX: u64 = 1 << 21;

/// Cached per-modulus data: unit list, inverse table, roots of unity, and a
/// lazily built Ramanujan row. Immutable after construction, so it is safe
/// to share across threads.
pub struct ModulusData {
    pub m: u64,
    pub phi: u64,
    pub units: Vec<u64>,
    /// `inv[r]` = inverse of `r` mod `m` for units, 0 otherwise.
    pub inv: Vec<u64>,
    roots: Vec<Complex64>,
    ram: OnceLock<Vec<f64>>,
}

impl ModulusData {
    fn build(m: u64) -> ModulusData {
        assert!(m >= 1, "modulus must be positive");
        let mut units = Vec::new();
        let mut inv = vec![0u64; m as usize];
        for r in 0..m {
            if gcd(r, m) == 1 {
                units.push(r);
                inv[r as usize] = mod_inverse(r as i64, m).expect("unit");
            }
        }
        let roots = if m <= ROOT_TABLE_MAX {
            (0..m)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
                    Complex64::new(t.cos(), t.sin())
                })
                .collect()
        } else {
            Vec::new()
        };
        ModulusData {
            m,
            phi: units.len() as u64,
            units,
            inv,
            roots,
            ram: OnceLock::new(),
        }
    }

    /// e(j/m) for any representative `j`.
    #[inline]
    pub fn root(&self, j: i64) -> Complex64 {
        let idx = reduce(j, self.m);
        self.root_u(idx)
    }

    #[inline]
    pub fn root_u(&self, idx: u64) -> Complex64 {
        debug_assert!(idx < self.m);
        if !self.roots.is_empty() {
            self.roots[idx as usize]
        } else {
            let t = 2.0 * std::f64::consts::PI * (idx as f64) / (self.m as f64);
            Complex64::new(t.cos(), t.sin())
        }
    }

    /// Row of Ramanujan sums `c_m(k)` for `k = 0..m`, built once.
    /// Real by construction (units are paired with their negatives).
    pub fn ramanujan_row(&self) -> &[f64] {
        self.ram.get_or_init(|| {
            let m = self.m;
            let mut row = vec![0.0f64; m as usize];
            if m == 1 {
                row[0] = 1.0;
                return row;
            }
            for &u in &self.units {
                if u > m - u {
                    continue;
                }
                for k in 0..m {
                    let idx = (u as u128 * k as u128 % m as u128) as u64;
                    let c = 2.0 * std::f64::consts::PI * idx as f64 / m as f64;
                    if u == m - u {
                        // self-paired unit (only u = m/2, i.e. m = 2)
                        row[k as usize] += c.cos();
                    } else {
                        row[k as usize] += 2.0 * c.cos();
                    }
                }
            }
            row
        })
    }
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<ModulusData>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<ModulusData>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared per-modulus tables (content-addressed, immutable).
pub fn modulus_data(m: u64) -> Arc<ModulusData> {
    assert!(m >= 1, "modulus must be positive");
    if let Some(d) = cache().read().unwrap().get(&m) {
        return Arc::clone(d);
    }
    let built = Arc::new(ModulusData::build(m));
    let mut w = cache().write().unwrap();
    Arc::clone(w.entry(m).or_insert(built))
}

/// e(numerator/modulus) = exp(2πi·numerator/modulus).
pub fn additive_char(numerator: i64, modulus: u64) -> Complex64 {
    assert!(modulus >= 1);
    modulus_data(modulus).root(numerator)
}

fn check_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > IM_RESIDUE_LIMIT {
        Err(Error::NumericalInconsistency {
            residue: z.im.abs(),
            limit: IM_RESIDUE_LIMIT,
        })
    } else {
        Ok(z.re)
    }
}

/// Ramanujan sum c_q(n) = Σ*_{α mod q} e(αn/q), by direct summation over
/// units. The imaginary residue is checked and discarded.
pub fn ramanujan_sum(n: i64, q: u64) -> Result<f64> {
    assert!(q >= 1);
    let md = modulus_data(q);
    let nr = reduce(n, q);
    let terms: Vec<Complex64> = md
        .units
        .iter()
        .map(|&a| md.root_u((a as u128 * nr as u128 % q as u128) as u64))
        .collect();
    check_real(pairwise_sum_complex(&terms))
}

/// Kloosterman sum S(a, b; c) = Σ*_{x mod c} e((ax + b·x̄)/c).
pub fn kloosterman(a: i64, b: i64, c: u64) -> Result<f64> {
    assert!(c >= 1);
    let md = modulus_data(c);
    let ar = reduce(a, c);
    let br = reduce(b, c);
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in &md.units {
        let idx = ((ar as u128 * x as u128 + br as u128 * md.inv[x as usize] as u128)
            % c as u128) as u64;
        acc += md.root_u(idx);
    }
    check_real(acc)
}

/// Weil-type majorant τ(c)·√c·√gcd(a,b,c).
pub fn weil_majorant(a: i64, b: i64, c: u64) -> f64 {
    assert!(c >= 1);
    let g = gcd(arith::gcd_i(a, c), arith::gcd_i(b, c));
    arith::divisor_count(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt()
}

/// Parameters shared by the unit-group correlation sums: the modulus
/// factorization b = r0·m0·b′, the coprime cofactor r′ and the two signs.
#[derive(Debug, Clone, Copy)]
pub struct CharSumParams {
    pub r0: u64,
    pub m0: u64,
    pub bprime: u64,
    pub rprime: u64,
    pub eta1: Sign,
    pub eta2: Sign,
}

impl CharSumParams {
    pub fn new(r0: u64, m0: u64, bprime: u64, rprime: u64, eta1: Sign, eta2: Sign) -> Result<Self> {
        assert!(r0 >= 1 && m0 >= 1 && bprime >= 1 && rprime >= 1);
        if gcd(m0 * bprime, rprime) != 1 {
            return Err(Error::NotCoprime(m0 * bprime, rprime));
        }
        Ok(CharSumParams {
            r0,
            m0,
            bprime,
            rprime,
            eta1,
            eta2,
        })
    }

    /// Full outer modulus b = r0·m0·b′.
    pub fn b(&self) -> u64 {
        self.r0 * self.m0 * self.bprime
    }
}

/// S0(m, n, h) = Σ*_{α mod b} e((αh + η₂·ᾱ·n)/b) · S(inv(αr′), η₁·m; b′)
/// with b = r0·m0·b′ and the Kloosterman sum taken mod b′.
pub fn s0_sum(m: i64, n: i64, h: i64, p: &CharSumParams) -> Result<Complex64> {
    let b = p.b();
    let bp = p.bprime;
    let md = modulus_data(b);
    let hr = reduce(h, b);
    let nr = reduce(p.eta2.apply(n), b);
    let mut terms = Vec::with_capacity(md.units.len());
    for &a in &md.units {
        let abar = md.inv[a as usize];
        let idx = ((a as u128 * hr as u128 + abar as u128 * nr as u128) % b as u128) as u64;
        let ar = (a as u128 * p.rprime as u128 % bp.max(1) as u128) as u64;
        let inv_ar = mod_inverse(ar as i64, bp).expect("α·r′ is a unit mod b′");
        let kl = kloosterman(inv_ar as i64, p.eta1.apply(m), bp)?;
        terms.push(md.root_u(idx) * kl);
    }
    Ok(pairwise_sum_complex(&terms))
}

/// T(m, n, h1, h2) = (1/b′) Σ_{γ mod b′} S0(γ,n,h1)·conj(S0(γ,n,h2))·e(mγ/b′).
pub fn t_collapsed(m: i64, n: i64, h1: i64, h2: i64, p: &CharSumParams) -> Result<Complex64> {
    let bp = p.bprime;
    let md = modulus_data(bp);
    let mr = reduce(m, bp);
    let mut terms = Vec::with_capacity(bp as usize);
    for g in 0..bp {
        let s1 = s0_sum(g as i64, n, h1, p)?;
        let s2 = s0_sum(g as i64, n, h2, p)?;
        let idx = (mr as u128 * g as u128 % bp as u128) as u64;
        terms.push(s1 * s2.conj() * md.root_u(idx));
    }
    Ok(pairwise_sum_complex(&terms) / bp as f64)
}

/// Inner Kloosterman factors of the collapsed correlation sum, indexed by
/// (unit index mod b, γ mod b′).
fn inner_kloosterman_table(p: &CharSumParams) -> Result<Vec<Vec<f64>>> {
    let b = p.b();
    let bp = p.bprime;
    let md = modulus_data(b);
    let mut table = Vec::with_capacity(md.units.len());
    for &a in &md.units {
        let ar = (a as u128 * p.rprime as u128 % bp as u128) as u64;
        let inv_ar = mod_inverse(ar as i64, bp).expect("unit");
        let mut row = Vec::with_capacity(bp as usize);
        for g in 0..bp {
            row.push(kloosterman(inv_ar as i64, p.eta1.apply(g as i64), bp)?);
        }
        table.push(row);
    }
    Ok(table)
}

/// 𝒯(ℓ, n, h1, h2) by its definition: (1/b′)·Σ_{γ mod b′} Σ*Σ*_{α1,α2 mod b}
/// e((α1(h1+ℓ) − α2(h2+ℓ) + η₂(ᾱ1−ᾱ2)n)/b)·S(inv(α1r′),η₁γ;b′)·S(inv(α2r′),η₁γ;b′).
pub fn curly_t_brute(ell: i64, n: i64, h1: i64, h2: i64, p: &CharSumParams) -> Result<Complex64> {
    let b = p.b();
    let bp = p.bprime;
    let md = modulus_data(b);
    let kl = inner_kloosterman_table(p)?;
    let a1r = reduce(h1 + ell, b);
    let a2r = reduce(h2 + ell, b);
    let nr = reduce(p.eta2.apply(n), b);
    let nu = md.units.len();
    let mut outer = Vec::with_capacity(bp as usize);
    for g in 0..bp as usize {
        let mut terms = Vec::with_capacity(nu * nu);
        for i1 in 0..nu {
            let al1 = md.units[i1];
            let ab1 = md.inv[al1 as usize];
            let base = (al1 as u128 * a1r as u128 + ab1 as u128 * nr as u128) % b as u128;
            for i2 in 0..nu {
                let al2 = md.units[i2];
                let ab2 = md.inv[al2 as usize];
                let neg = (al2 as u128 * a2r as u128 + ab2 as u128 * nr as u128) % b as u128;
                let idx = ((base + b as u128 - neg % b as u128) % b as u128) as u64;
                terms.push(md.root_u(idx) * (kl[i1][g] * kl[i2][g]));
            }
        }
        outer.push(pairwise_sum_complex(&terms));
    }
    Ok(pairwise_sum_complex(&outer) / bp as f64)
}

/// One divisor split b′ = b1′·b2′ of the reduction: the coprime blocks and
/// the residual block modulus Q = b0²·b10·b20.
struct SplitBlocks {
    b2p: u64,
    b0: u64,
    b1: u64,
    b20: u64,
    b2: u64,
    q: u64,
}

fn split_blocks(p: &CharSumParams, b1p: u64, b2p: u64) -> SplitBlocks {
    let left = p.r0 * p.m0 * b1p;
    let b0 = gcd(left, b2p);
    let (b10, b1) = arith::core_split(left / b0, b0);
    let (b20, b2) = arith::core_split(b2p / b0, b0);
    SplitBlocks {
        b2p,
        b0,
        b1,
        b20,
        b2,
        q: b0 * b0 * b10 * b20,
    }
}

/// Residual correlated unit-pair sum over the block modulus Q:
/// Σ*Σ*_{β1,β2 mod Q, β1≡β2 mod b0·b20} e((β1·a1 − β2·a2 + η₂(β̄1−β̄2)n)·w̄/Q).
fn beta_block(s: &SplitBlocks, a1: u64, a2: u64, nres: u64, eta2: Sign) -> Complex64 {
    let q = s.q;
    if q == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let md = modulus_data(q);
    let w = mod_inverse((s.b1 as i128 * s.b2 as i128 % q as i128) as i64, q).expect("coprime");
    let cong = s.b0 * s.b20;
    let a1r = (a1 % q) as u128;
    let a2r = (a2 % q) as u128;
    let nr = reduce(eta2.apply(nres as i64), q) as u128;
    let mut terms = Vec::new();
    for &b1 in &md.units {
        for &b2 in &md.units {
            if (b1 + q - b2) % cong != 0 {
                continue;
            }
            let ib1 = md.inv[b1 as usize] as u128;
            let ib2 = md.inv[b2 as usize] as u128;
            let num = (b1 as u128 * a1r + nr * ib1 + (q as u128 * q as u128)
                - (b2 as u128 * a2r + nr * ib2) % (q as u128))
                % q as u128;
            let idx = (num * w as u128 % q as u128) as u64;
            terms.push(md.root_u(idx));
        }
    }
    pairwise_sum_complex(&terms)
}

/// 𝒯 by the divisor-split reduction: Möbius-weighted split of b′, a
/// Ramanujan factor, two Kloosterman factors on the block coprime to the
/// shared part, and the residual β-block evaluated directly.
pub fn curly_t_reduced(ell: i64, n: i64, h1: i64, h2: i64, p: &CharSumParams) -> Result<Complex64> {
    let bp = p.bprime;
    let b = p.b();
    let a1 = reduce(h1 + ell, b);
    let a2 = reduce(h2 + ell, b);
    let nres = reduce(n, b);
    let mut total = Vec::new();
    for b1p in arith::divisors(bp) {
        let mu = arith::mobius(b1p);
        if mu == 0 {
            continue;
        }
        let s = split_blocks(p, b1p, bp / b1p);
        // Ramanujan factor on the unconstrained coprime block.
        let ram = ramanujan_sum((a1 as i64) - (a2 as i64), s.b2)?;
        // Kloosterman factors mod b1 with the CRT unit squared.
        let (k1, k2) = if s.b1 == 1 {
            (1.0, 1.0)
        } else {
            let rest = (s.q as u128 * s.b2 as u128 % s.b1 as u128) as u64;
            let wr = mod_inverse(rest as i64, s.b1).expect("coprime");
            let w2 = (wr as u128 * wr as u128 % s.b1 as u128) as u64;
            let arg = reduce(p.eta2.apply(n), s.b1) as u128 * w2 as u128 % s.b1 as u128;
            (
                kloosterman(a1 as i64, arg as i64, s.b1)?,
                kloosterman(a2 as i64, arg as i64, s.b1)?,
            )
        };
        let beta = beta_block(&s, a1, a2, nres, p.eta2);
        total.push(beta * (mu as f64 * s.b2p as f64 * ram * k1 * k2));
    }
    Ok(pairwise_sum_complex(&total))
}

/// Majorant for the reduced correlation sum:
/// r0·m0·b′·max(1, n²)·Σ_{b″|b′} b″·[h1 ≡ h2 mod b″].
pub fn appendix_b_majorant(n: i64, h1: i64, h2: i64, p: &CharSumParams) -> f64 {
    let diff = h1 - h2;
    let s: u64 = arith::divisors(p.bprime)
        .into_iter()
        .filter(|&d| diff.rem_euclid(d as i64) == 0)
        .sum();
    (p.r0 * p.m0 * p.bprime) as f64 * (n as f64 * n as f64).max(1.0) * s as f64
}

/// 𝒞(n, d, q1, q2; c) = Σ*_{α mod c} Σ_{γ mod c} δ(αγq1 ≡ ±q2 mod c)·e((αn − dγ)/c)
/// by the literal double loop (the running product αγq1 mod c is maintained
/// incrementally).
pub fn c_sum_brute(n: i64, d: i64, q1: u64, q2: i64, c: u64, sign: Sign) -> Complex64 {
    assert!(c >= 1 && q1 >= 1);
    let md = modulus_data(c);
    let q1r = reduce(q1 as i64, c);
    let q2r = reduce(sign.apply(q2), c);
    let nr = reduce(n, c);
    let dr = reduce(d, c);
    let mut acc = Complex64::new(0.0, 0.0);
    for &a in &md.units {
        let aq = ((a as u128 * q1r as u128) % c as u128) as u64;
        let mut prod = 0u64; // αγq1 mod c as γ walks 0..c
        for g in 0..c {
            if prod == q2r {
                let idx = ((nr as u128 * a as u128
                    + (c as u128 - dr as u128) * g as u128)
                    % c as u128) as u64;
                acc += md.root_u(idx);
            }
            prod += aq;
            if prod >= c {
                prod -= c;
            }
        }
    }
    acc
}

/// The same double loop as [`c_sum_brute`], emitting every q2 residue at
/// once: each (α, γ) term lands in the bucket whose δ-condition it
/// satisfies, in the same accumulation order, so entry `q2` is bit-identical
/// to `c_sum_brute(n, d, q1, q2, c, sign)`.
pub fn c_sum_brute_q2_row(n: i64, d: i64, q1: u64, c: u64, sign: Sign) -> Vec<Complex64> {
    assert!(c >= 1 && q1 >= 1);
    let md = modulus_data(c);
    let q1r = reduce(q1 as i64, c);
    let nr = reduce(n, c);
    let dr = reduce(d, c);
    let mut row = vec![Complex64::new(0.0, 0.0); c as usize];
    for &a in &md.units {
        let aq = ((a as u128 * q1r as u128) % c as u128) as u64;
        let mut prod = 0u64; // αγq1 mod c as γ walks 0..c
        for g in 0..c {
            let idx = ((nr as u128 * a as u128 + (c as u128 - dr as u128) * g as u128)
                % c as u128) as u64;
            // the δ-condition fires exactly for the bucket q2 ≡ ±αγq1
            let bucket = match sign {
                Sign::Plus => prod,
                Sign::Minus => (c - prod) % c,
            };
            row[bucket as usize] += md.root_u(idx);
            prod += aq;
            if prod >= c {
                prod -= c;
            }
        }
    }
    row
}

/// Closed form of 𝒞 when gcd(c, q1) = 1: a single Kloosterman sum
/// S(n, ∓d·q2·q̄1; c) (second-argument sign opposite to the δ-condition sign).
pub fn c_sum_closed(n: i64, d: i64, q1: u64, q2: i64, c: u64, sign: Sign) -> Result<Complex64> {
    assert!(c >= 1 && q1 >= 1);
    if gcd(q1, c) != 1 {
        return Err(Error::NotCoprime(c, q1));
    }
    let q1inv = mod_inverse(q1 as i64, c)?;
    let arg = -(sign.to_i64() as i128) * d as i128 * q2 as i128 * q1inv as i128;
    let arg = arg.rem_euclid(c as i128) as i64;
    Ok(Complex64::new(kloosterman(n, arg, c)?, 0.0))
}

/// Closed form of 𝒞 for arbitrary gcd g = gcd(c, q1):
/// zero unless g | d and g | q2, and otherwise
/// g · S(n, ∓(d/g)(q2/g)·g·inv(q1/g, c/g); c).
/// Validated against `c_sum_brute` exhaustively in the tests.
pub fn c_sum_closed_any(n: i64, d: i64, q1: u64, q2: i64, c: u64, sign: Sign) -> Result<Complex64> {
    assert!(c >= 1 && q1 >= 1);
    let g = gcd(q1, c);
    if g == 1 {
        return c_sum_closed(n, d, q1, q2, c, sign);
    }
    if d.rem_euclid(g as i64) != 0 || q2.rem_euclid(g as i64) != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = mod_inverse((q1 / g) as i64, c / g)?;
    let arg = -(sign.to_i64() as i128) * (d as i128 / g as i128) * (q2 as i128 / g as i128)
        * g as i128
        * w as i128;
    let arg = arg.rem_euclid(c as i128) as i64;
    Ok(Complex64::new(g as f64 * kloosterman(n, arg, c)?, 0.0))
}

/// Full Kloosterman row S(n, m; c) for m = 0..c, via a c-point DFT of the
/// unit-indicator vector e(n·ū/c). Identical to `kloosterman` per entry up
/// to floating-point rounding; used by the batched dual-sum engines.
pub fn kloosterman_row(n: i64, c: u64, planner: &mut rustfft::FftPlanner<f64>) -> Result<Vec<f64>> {
    assert!(c >= 1);
    let md = modulus_data(c);
    let nr = reduce(n, c);
    let mut v = vec![Complex64::new(0.0, 0.0); c as usize];
    for &u in &md.units {
        let idx = (nr as u128 * md.inv[u as usize] as u128 % c as u128) as u64;
        // conj(e(n·ū/c)) so a forward FFT produces the positive-exponent sum.
        v[u as usize] = md.root_u(idx).conj();
    }
    let fft = planner.plan_fft_forward(c as usize);
    fft.process(&mut v);
    let mut out = Vec::with_capacity(c as usize);
    for z in v {
        let z = z.conj();
        if z.im.abs() > 1e-7 {
            return Err(Error::NumericalInconsistency {
                residue: z.im.abs(),
                limit: 1e-7,
            });
        }
        out.push(z.re);
    }
    Ok(out)
}

/// Batched evaluator for the correlation sum 𝒯 over all argument classes of
/// one parameter set. Exploits that 𝒯 depends on (ℓ, h1, h2) only through
/// h1+ℓ and h2+ℓ mod b, and hoists the γ-average into a unit-pair table.
/// Matches the scalar routes exactly (see tests).
pub struct CurlyTBatch {
    p: CharSumParams,
    md: Arc<ModulusData>,
    /// g[i1][i2] = (1/b′)·Σ_γ K[i1][γ]·K[i2][γ]
    gam: Vec<Vec<f64>>,
}

impl CurlyTBatch {
    pub fn new(p: CharSumParams) -> Result<CurlyTBatch> {
        let md = modulus_data(p.b());
        let kl = inner_kloosterman_table(&p)?;
        let nu = md.units.len();
        let bp = p.bprime as usize;
        let mut gam = vec![vec![0.0f64; nu]; nu];
        for i1 in 0..nu {
            for i2 in 0..nu {
                let mut s = 0.0;
                for g in 0..bp {
                    s += kl[i1][g] * kl[i2][g];
                }
                gam[i1][i2] = s / bp as f64;
            }
        }
        Ok(CurlyTBatch { p, md, gam })
    }

    pub fn modulus(&self) -> u64 {
        self.p.b()
    }

    /// 𝒯 for the argument class (a1, a2, n) = (h1+ℓ, h2+ℓ, n) mod b.
    pub fn brute_class(&self, a1: u64, a2: u64, nres: u64) -> Complex64 {
        let b = self.p.b();
        let md = &self.md;
        let nr = reduce(self.p.eta2.apply(nres as i64), b);
        let nu = md.units.len();
        let mut terms = Vec::with_capacity(nu * nu);
        for i1 in 0..nu {
            let al1 = md.units[i1];
            let ab1 = md.inv[al1 as usize];
            let base = (al1 as u128 * a1 as u128 + ab1 as u128 * nr as u128) % b as u128;
            for i2 in 0..nu {
                let al2 = md.units[i2];
                let ab2 = md.inv[al2 as usize];
                let neg = (al2 as u128 * a2 as u128 + ab2 as u128 * nr as u128) % b as u128;
                let idx = ((base + b as u128 - neg) % b as u128) as u64;
                terms.push(md.root_u(idx) * self.gam[i1][i2]);
            }
        }
        pairwise_sum_complex(&terms)
    }

    /// Reduced-route value for the same class.
    pub fn reduced_class(&self, a1: u64, a2: u64, nres: u64) -> Result<Complex64> {
        curly_t_reduced(0, nres as i64, a1 as i64, a2 as i64, &self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_err_c;

    fn e(x: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * std::f64::consts::PI * x).exp()
    }

    #[test]
    fn additive_char_examples() {
        assert!((additive_char(0, 5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((additive_char(1, 2) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((additive_char(1, 8) - Complex64::new(r, r)).norm() < 1e-14);
        for (num, m) in [(3i64, 7u64), (-5, 11), (123, 997)] {
            assert!((additive_char(num, m).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(0, 12).unwrap().round() as i64, 4);
        assert!((ramanujan_sum(2, 4).unwrap() - (-2.0)).abs() < 1e-12);
        // c_6(1) = μ(6) by the classical identity, used as the oracle.
        assert!((ramanujan_sum(1, 6).unwrap() - arith::mobius(6) as f64).abs() < 1e-12);
    }

    #[test]
    fn ramanujan_integrality_small() {
        for q in 1..=120u64 {
            let phi = arith::euler_phi(q) as f64;
            assert!((ramanujan_sum(0, q).unwrap() - phi).abs() < 1e-9);
            for n in -120i64..=120 {
                let v = ramanujan_sum(n, q).unwrap();
                assert!((v - v.round()).abs() < 1e-9, "q={q} n={n} v={v}");
            }
        }
    }

    #[test]
    fn kloosterman_examples() {
        for c in [1u64, 2, 3, 12, 30] {
            let phi = arith::euler_phi(c) as f64;
            assert!((kloosterman(0, 0, c).unwrap() - phi).abs() < 1e-10);
        }
        assert!((kloosterman(1, 1, 2).unwrap() - 1.0).abs() < 1e-12);
        let expected = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((kloosterman(1, 1, 5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.3819660112501051).abs() < 1e-15);
    }

    #[test]
    fn kloosterman_symmetry_and_multiplicativity() {
        // S(a,b;c) = S(b,a;c)
        for c in [7u64, 16, 45, 121, 200] {
            for (a, b) in [(1i64, 2i64), (3, 7), (-4, 9), (10, 10)] {
                let s1 = kloosterman(a, b, c).unwrap();
                let s2 = kloosterman(b, a, c).unwrap();
                assert!((s1 - s2).abs() < 1e-9, "c={c} a={a} b={b}");
            }
        }
        // twisted multiplicativity over coprime moduli
        for (c1, c2) in [(3u64, 4u64), (5, 8), (7, 9), (25, 12), (49, 50)] {
            let c = c1 * c2;
            for (a, b) in [(1i64, 1i64), (2, 5), (-3, 11), (17, 4)] {
                let c1b = mod_inverse(c1 as i64, c2).unwrap() as i64;
                let c2b = mod_inverse(c2 as i64, c1).unwrap() as i64;
                let lhs = kloosterman(a, b, c).unwrap();
                let rhs = kloosterman(a * c2b, b * c2b, c1).unwrap()
                    * kloosterman(a * c1b, b * c1b, c2).unwrap();
                assert!((lhs - rhs).abs() < 1e-9, "c1={c1} c2={c2} a={a} b={b}");
            }
        }
    }

    #[test]
    fn weil_examples_and_bound_sample() {
        assert!((weil_majorant(1, 1, 5) - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        assert!((weil_majorant(0, 0, 4) - 12.0).abs() < 1e-12);
        let expected = 6.0 * 24f64.sqrt();
        assert!((weil_majorant(6, 4, 12) - expected).abs() < 1e-12);
        for c in 1..=60u64 {
            for (a, b) in [(1i64, 1i64), (0, 3), (5, -7), (12, 30)] {
                let s = kloosterman(a, b, c).unwrap();
                assert!(
                    s.abs() <= weil_majorant(a, b, c) + 1e-9,
                    "c={c} a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn kloosterman_row_matches_pointwise() {
        let mut planner = rustfft::FftPlanner::new();
        for c in [1u64, 2, 12, 35, 97] {
            for n in [-3i64, 0, 1, 17] {
                let row = kloosterman_row(n, c, &mut planner).unwrap();
                for m in 0..c {
                    let direct = kloosterman(n, m as i64, c).unwrap();
                    assert!(
                        (row[m as usize] - direct).abs() < 1e-9,
                        "c={c} n={n} m={m}"
                    );
                }
            }
        }
    }

    fn params(
        r0: u64,
        m0: u64,
        bp: u64,
        rp: u64,
        e1: Sign,
        e2: Sign,
    ) -> CharSumParams {
        CharSumParams::new(r0, m0, bp, rp, e1, e2).unwrap()
    }

    /// Independent double-loop oracle for S0, sharing nothing with the
    /// library implementation.
    fn s0_oracle(m: i64, n: i64, h: i64, p: &CharSumParams) -> Complex64 {
        let b = p.b() as i64;
        let bp = p.bprime as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for alpha in 0..b {
            if arith::gcd(alpha as u64, b as u64) != 1 {
                continue;
            }
            let abar = mod_inverse(alpha, b as u64).unwrap() as i64;
            // inner Kloosterman mod b′ with first argument inv(α·r′)
            let ar = (alpha * p.rprime as i64).rem_euclid(bp);
            let ar_inv = mod_inverse(ar, bp as u64).unwrap() as i64;
            let mut inner = Complex64::new(0.0, 0.0);
            for x in 0..bp {
                if arith::gcd(x as u64, bp as u64) != 1 {
                    continue;
                }
                let xb = mod_inverse(x, bp as u64).unwrap() as i64;
                inner += e(((ar_inv * x + p.eta1.to_i64() * m * xb).rem_euclid(bp)) as f64
                    / bp as f64);
            }
            acc += e(((alpha * h + p.eta2.to_i64() * abar * n).rem_euclid(b)) as f64 / b as f64)
                * inner;
        }
        acc
    }

    #[test]
    fn s0_trivial_modulus() {
        let p = params(1, 1, 1, 1, Sign::Plus, Sign::Plus);
        let v = s0_sum(0, 0, 0, &p).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn s0_matches_independent_oracle() {
        let p = params(1, 1, 3, 1, Sign::Plus, Sign::Plus);
        let v = s0_sum(1, 1, 1, &p).unwrap();
        let o = s0_oracle(1, 1, 1, &p);
        assert!((v - o).norm() < 1e-10);
        let p2 = params(2, 1, 5, 3, Sign::Minus, Sign::Plus);
        for (m, n, h) in [(0i64, 1i64, 2i64), (3, -2, 7), (1, 4, -1)] {
            let v = s0_sum(m, n, h, &p2).unwrap();
            let o = s0_oracle(m, n, h, &p2);
            assert!((v - o).norm() < 1e-10, "({m},{n},{h})");
        }
    }

    #[test]
    fn s0_symmetries() {
        // Negating all three arguments returns the same value; negating
        // (n, h) alone conjugates.
        let p = params(1, 2, 5, 3, Sign::Plus, Sign::Minus);
        for (m, n, h) in [(1i64, 2i64, 3i64), (2, -1, 4), (0, 5, 1)] {
            let v = s0_sum(m, n, h, &p).unwrap();
            let flip_all = s0_sum(-m, -n, -h, &p).unwrap();
            assert!((v - flip_all).norm() < 1e-10);
            let flip_nh = s0_sum(m, -n, -h, &p).unwrap();
            assert!((v.conj() - flip_nh).norm() < 1e-10);
        }
    }

    #[test]
    fn t_collapsed_examples() {
        let p = params(1, 1, 3, 1, Sign::Plus, Sign::Plus);
        // equal shifts at m = 0: mean square, nonnegative real
        let v = t_collapsed(0, 1, 2, 2, &p).unwrap();
        assert!(v.im.abs() < 1e-10);
        assert!(v.re >= -1e-12);
        // triple-loop oracle
        let oracle = {
            let bp = 3i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for g in 0..bp {
                let s1 = s0_oracle(g, 1, 1, &p);
                let s2 = s0_oracle(g, 1, 2, &p);
                acc += s1 * s2.conj() * e(0.0);
            }
            acc / bp as f64
        };
        let v2 = t_collapsed(0, 1, 1, 2, &p).unwrap();
        assert!((v2 - oracle).norm() < 1e-9);
        // b′ = 1 collapses to a single product
        let p1 = params(2, 1, 1, 1, Sign::Plus, Sign::Plus);
        let v3 = t_collapsed(5, 1, 1, 2, &p1).unwrap();
        let s1 = s0_sum(0, 1, 1, &p1).unwrap();
        let s2 = s0_sum(0, 1, 2, &p1).unwrap();
        assert!((v3 - s1 * s2.conj()).norm() < 1e-12);
    }

    /// Quadruple-loop oracle for 𝒯, kept deliberately naive.
    fn curly_t_oracle(ell: i64, n: i64, h1: i64, h2: i64, p: &CharSumParams) -> Complex64 {
        let b = p.b() as i64;
        let bp = p.bprime as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for g in 0..bp {
            for a1 in 0..b {
                if arith::gcd(a1 as u64, b as u64) != 1 {
                    continue;
                }
                for a2 in 0..b {
                    if arith::gcd(a2 as u64, b as u64) != 1 {
                        continue;
                    }
                    let ab1 = mod_inverse(a1, b as u64).unwrap() as i64;
                    let ab2 = mod_inverse(a2, b as u64).unwrap() as i64;
                    let num = ((a1 - a2) * ell + a1 * h1 - a2 * h2
                        + p.eta2.to_i64() * (ab1 - ab2) * n)
                        .rem_euclid(b);
                    // the two inner Kloosterman sums
                    let mut k = [0.0f64; 2];
                    for (j, alpha) in [a1, a2].into_iter().enumerate() {
                        let ar = (alpha * p.rprime as i64).rem_euclid(bp);
                        let ar_inv = mod_inverse(ar, bp as u64).unwrap() as i64;
                        let mut inner = Complex64::new(0.0, 0.0);
                        for x in 0..bp {
                            if arith::gcd(x as u64, bp as u64) != 1 {
                                continue;
                            }
                            let xb = mod_inverse(x, bp as u64).unwrap() as i64;
                            inner += e(((ar_inv * x + p.eta1.to_i64() * g * xb).rem_euclid(bp))
                                as f64
                                / bp as f64);
                        }
                        k[j] = inner.re;
                    }
                    acc += e(num as f64 / b as f64) * k[0] * k[1];
                }
            }
        }
        acc / bp as f64
    }

    #[test]
    fn curly_t_brute_matches_oracle() {
        let p = params(1, 1, 3, 1, Sign::Plus, Sign::Plus);
        let v = curly_t_brute(0, 1, 1, 4, &p).unwrap();
        let o = curly_t_oracle(0, 1, 1, 4, &p);
        assert!((v - o).norm() < 1e-9);
        let p2 = params(2, 1, 4, 3, Sign::Minus, Sign::Plus);
        let v2 = curly_t_brute(1, 2, 3, 5, &p2).unwrap();
        let o2 = curly_t_oracle(1, 2, 3, 5, &p2);
        assert!((v2 - o2).norm() < 1e-9);
    }

    #[test]
    fn curly_t_diagonal_positive() {
        let p = params(1, 1, 5, 1, Sign::Plus, Sign::Plus);
        let v = curly_t_brute(0, 0, 0, 0, &p).unwrap();
        assert!(v.im.abs() < 1e-9);
        assert!(v.re > 0.0);
    }

    #[test]
    fn curly_t_reduced_matches_brute_small() {
        for bp in 1..=6u64 {
            for (r0, m0) in [(1u64, 1u64), (1, 2), (2, 1)] {
                for rp in [1u64, 5] {
                    if arith::gcd(m0 * bp, rp) != 1 {
                        continue;
                    }
                    let p = params(r0, m0, bp, rp, Sign::Plus, Sign::Plus);
                    let m = p.b() as i64;
                    for (ell, n, h1, h2) in
                        [(0i64, 1i64, 1i64, 4i64), (2, 0, 0, 0), (1, 3, 2, 5), (0, 2, 3, 3)]
                    {
                        let vb = curly_t_brute(ell, n % m, h1, h2, &p).unwrap();
                        let vr = curly_t_reduced(ell, n % m, h1, h2, &p).unwrap();
                        assert!(
                            (vb - vr).norm() < 1e-8 * vb.norm().max(1.0),
                            "bp={bp} r0={r0} m0={m0} rp={rp} ({ell},{n},{h1},{h2}): {vb} vs {vr}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn curly_t_eta_and_rprime_invariance() {
        // The reduced route is independent of η1 and r′; brute agrees.
        let base = params(1, 1, 6, 1, Sign::Plus, Sign::Plus);
        let v0 = curly_t_brute(1, 2, 3, 4, &base).unwrap();
        for (rp, e1) in [(5u64, Sign::Minus), (7, Sign::Plus), (1, Sign::Minus)] {
            let p = params(1, 1, 6, rp, e1, Sign::Plus);
            let v = curly_t_brute(1, 2, 3, 4, &p).unwrap();
            assert!((v - v0).norm() < 1e-9, "rp={rp}");
        }
    }

    #[test]
    fn curly_t_batch_matches_scalar() {
        let p = params(1, 2, 6, 5, Sign::Plus, Sign::Plus);
        let batch = CurlyTBatch::new(p).unwrap();
        let b = p.b();
        for (ell, n, h1, h2) in [(0i64, 1i64, 1i64, 4i64), (3, 7, 2, 9), (5, 0, 11, 1)] {
            let scalar = curly_t_brute(ell, n, h1, h2, &p).unwrap();
            let class = batch.brute_class(
                reduce(h1 + ell, b),
                reduce(h2 + ell, b),
                reduce(n, b),
            );
            assert!((scalar - class).norm() < 1e-10);
            let red = batch
                .reduced_class(reduce(h1 + ell, b), reduce(h2 + ell, b), reduce(n, b))
                .unwrap();
            assert!((scalar - red).norm() < 1e-8 * scalar.norm().max(1.0));
        }
    }

    #[test]
    fn c_sum_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert!((c_sum_brute(0, 0, 1, 1, 1, Sign::Plus) - one).norm() < 1e-14);
        // q1 = 1 reduces to a plain Kloosterman sum
        let v = c_sum_closed(3, 2, 1, 5, 7, Sign::Plus).unwrap();
        let k = kloosterman(3, -10, 7).unwrap();
        assert!((v.re - k).abs() < 1e-12);
        assert!(matches!(
            c_sum_closed(1, 1, 5, 1, 10, Sign::Plus),
            Err(Error::NotCoprime(..))
        ));
        // worked instance: q1=3, c=5, 3̄ ≡ 2 mod 5, so the closed form is S(1,-2;5)
        let v = c_sum_closed(1, 1, 3, 1, 5, Sign::Plus).unwrap();
        let k = kloosterman(1, -2, 5).unwrap();
        assert!((v.re - k).abs() < 1e-13);
        let b = c_sum_brute(1, 1, 3, 1, 5, Sign::Plus);
        assert!((v - b).norm() < 1e-10);
    }

    #[test]
    fn c_sum_row_is_bitwise_the_per_tuple_loop() {
        for c in [1u64, 2, 7, 12, 30] {
            for q1 in [1u64, 3, 5] {
                for sign in [Sign::Plus, Sign::Minus] {
                    for (n, d) in [(0i64, 0i64), (1, 2), (5, -3)] {
                        let row = c_sum_brute_q2_row(n, d, q1, c, sign);
                        for q2 in 0..c {
                            let direct = c_sum_brute(n, d, q1, q2 as i64, c, sign);
                            assert_eq!(direct.re.to_bits(), row[q2 as usize].re.to_bits());
                            assert_eq!(direct.im.to_bits(), row[q2 as usize].im.to_bits());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn c_sum_brute_matches_closed_small() {
        for c in 1..=20u64 {
            for q1 in [1u64, 2, 3, 7] {
                if gcd(q1, c) != 1 {
                    continue;
                }
                for sign in [Sign::Plus, Sign::Minus] {
                    for n in 0..c.min(6) {
                        for d in 0..c.min(6) {
                            for q2 in 0..c.min(6) {
                                let vb = c_sum_brute(n as i64, d as i64, q1, q2 as i64, c, sign);
                                let vc =
                                    c_sum_closed(n as i64, d as i64, q1, q2 as i64, c, sign)
                                        .unwrap();
                                assert!(
                                    (vb - vc).norm() < 1e-10,
                                    "c={c} q1={q1} n={n} d={d} q2={q2}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn c_sum_closed_any_matches_brute_including_shared_factors() {
        for c in 1..=24u64 {
            for q1 in 1..=9u64 {
                for sign in [Sign::Plus, Sign::Minus] {
                    for n in [0i64, 1, 5] {
                        for d in 0..c.min(8) as i64 {
                            for q2 in 0..c.min(8) as i64 {
                                let vb = c_sum_brute(n, d, q1, q2, c, sign);
                                let va = c_sum_closed_any(n, d, q1, q2, c, sign).unwrap();
                                assert!(
                                    (vb - va).norm() < 1e-9,
                                    "c={c} q1={q1} sign={sign:?} n={n} d={d} q2={q2}: {vb} vs {va}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn params_rejects_shared_factor() {
        assert!(CharSumParams::new(1, 2, 3, 6, Sign::Plus, Sign::Plus).is_err());
    }
}
