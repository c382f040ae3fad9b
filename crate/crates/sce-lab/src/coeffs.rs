//! Hecke eigenvalue tables: the weight-12 level-1 cusp form (the unique
//! normalized form there, with an exact integer q-expansion) and its
//! symmetric-square lift on GL(3).
//!
//! The q-expansion is carried in exact 128-bit integers and normalized to
//! floating point only when a table is served, so the only build error is
//! the final rounding.

use std::io::{Read, Write};

use crate::arith::{self, spf_table};
use crate::{Error, Result};

/// Magic bytes of the binary coefficient cache.
pub const CACHE_MAGIC: &[u8; 5] = b"SCLB1";

/// Hard cap on table sizes (memory guard).
const MAX_BOUND: u64 = 10_000_000;

/// Exact coefficients of q·∏(1−q^n)^24 up to `bound`, via the cube of the
/// eta-product written as a sparse signed series (exponents k(k+1)/2,
/// coefficients ±(2k+1)) raised to the 8th power. All arithmetic is
/// overflow-checked.
pub fn tau_qexpansion(bound: u64) -> Result<Vec<i128>> {
    assert!(bound >= 1);
    if bound > MAX_BOUND {
        return Err(Error::InvalidConfig(format!(
            "coefficient bound {bound} exceeds the memory guard {MAX_BOUND}"
        )));
    }
    let len = bound as usize; // coefficients of q^0 .. q^{bound-1}
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut k = 0usize;
    loop {
        let pos = k * (k + 1) / 2;
        if pos >= len {
            break;
        }
        let coef = (2 * k + 1) as i128;
        sparse.push((pos, if k % 2 == 0 { coef } else { -coef }));
        k += 1;
    }
    let mut dense = vec![0i128; len];
    dense[0] = 1;
    let mut next = vec![0i128; len];
    for _ in 0..8 {
        next.iter_mut().for_each(|x| *x = 0);
        for &(pos, coef) in &sparse {
            for i in 0..len - pos {
                if dense[i] != 0 {
                    let prod = dense[i].checked_mul(coef).ok_or(Error::Overflow)?;
                    next[i + pos] = next[i + pos].checked_add(prod).ok_or(Error::Overflow)?;
                }
            }
        }
        std::mem::swap(&mut dense, &mut next);
    }
    // tau(n) = [q^{n-1}] of the eta power; shift by one.
    let mut tau = vec![0i128; len + 1];
    tau[1..].copy_from_slice(&dense);
    Ok(tau)
}

/// Normalized GL(2) Hecke eigenvalues λ(n) = τ(n)/n^{11/2} up to a bound.
#[derive(Debug, Clone)]
pub struct FourierCoefficientTable {
    pub weight: u32,
    pub bound: u64,
    lambda: Vec<f64>,
}

impl FourierCoefficientTable {
    /// Unchecked access for hot loops; `n` must be within the bound.
    #[inline]
    pub fn lambda(&self, n: u64) -> f64 {
        self.lambda[n as usize]
    }

    pub fn from_lambda(weight: u32, lambda: Vec<f64>) -> FourierCoefficientTable {
        FourierCoefficientTable {
            weight,
            bound: lambda.len() as u64 - 1,
            lambda,
        }
    }
}

/// Build the weight-12 table from the exact q-expansion.
pub fn build_gl2_table(bound: u64) -> Result<FourierCoefficientTable> {
    assert!(bound >= 1);
    if bound > MAX_BOUND {
        return Err(Error::InvalidConfig(format!(
            "coefficient bound {bound} exceeds the memory guard {MAX_BOUND}"
        )));
    }
    let tau = tau_qexpansion(bound)?;
    let mut lambda = vec![0.0f64; bound as usize + 1];
    for n in 1..=bound as usize {
        lambda[n] = tau[n] as f64 / (n as f64).powf(5.5);
    }
    Ok(FourierCoefficientTable {
        weight: 12,
        bound,
        lambda,
    })
}

/// Serve λ(n); errors outside the table.
pub fn gl2_coeff(table: &FourierCoefficientTable, n: u64) -> Result<f64> {
    if n == 0 || n > table.bound {
        return Err(Error::OutOfRange {
            index: n,
            bound: table.bound,
        });
    }
    Ok(table.lambda(n))
}

/// Symmetric-square GL(3) coefficients A(m, n), dense up to (bound1, bound2),
/// with the archimedean parameters of the lift kept as metadata only.
#[derive(Debug, Clone)]
pub struct GL3CoefficientTable {
    pub bound1: u64,
    pub bound2: u64,
    a: Vec<f64>,
    pub langlands: [f64; 3],
}

impl GL3CoefficientTable {
    #[inline]
    pub fn coeff_unchecked(&self, m: u64, n: u64) -> f64 {
        self.a[((m - 1) * self.bound2 + (n - 1)) as usize]
    }

    /// Row A(1, ·) as a slice indexed from n = 1 at position 0.
    pub fn row1(&self) -> &[f64] {
        &self.a[..self.bound2 as usize]
    }
}

/// Build the lift's coefficients: prime-power values from the local
/// three-term recursion seeded by A(1,p) = λ(p)² − 1 (= λ(p²)), extended
/// multiplicatively, and two-variable values filled by the Möbius relation
/// A(m,n) = Σ_{d|(m,n)} μ(d)·A(m/d,1)·A(1,n/d).
pub fn build_sym2_table(
    gl2: &FourierCoefficientTable,
    bound1: u64,
    bound2: u64,
) -> Result<GL3CoefficientTable> {
    assert!(bound1 >= 1 && bound2 >= 1);
    let maxb = bound1.max(bound2);
    if bound1 * bound2 > MAX_BOUND {
        return Err(Error::InvalidConfig(format!(
            "table of {bound1}x{bound2} entries exceeds the memory guard"
        )));
    }
    if gl2.bound < maxb {
        return Err(Error::InsufficientSourceTable {
            have: gl2.bound,
            need: maxb,
        });
    }
    // One-variable row by multiplicativity over prime powers.
    let spf = spf_table(maxb);
    let mut row = vec![0.0f64; maxb as usize + 1];
    row[1] = 1.0;
    for n in 2..=maxb as usize {
        let p = spf[n] as usize;
        let mut pe = p;
        let mut rest = n / p;
        while rest % p == 0 {
            pe *= p;
            rest /= p;
        }
        if rest > 1 {
            row[n] = row[pe] * row[rest];
            continue;
        }
        // n = p^e: local recursion h_e = h1·h_{e-1} − h1·h_{e-2} + h_{e-3}
        let lp = gl2.lambda(p as u64);
        let h1 = lp * lp - 1.0;
        if (p * p) as u64 <= gl2.bound {
            // the seed is the square-index eigenvalue; both routes must agree
            debug_assert!((h1 - gl2.lambda((p * p) as u64)).abs() < 1e-10);
        }
        if n == p {
            row[n] = h1;
        } else {
            // e >= 2 here; h_{-1} = 0 and h_0 = row[1] = 1.
            let e = n.ilog(p);
            let hm1 = row[p.pow(e - 1)];
            let hm2 = row[p.pow(e - 2)];
            let hm3 = if e >= 3 { row[p.pow(e - 3)] } else { 0.0 };
            row[n] = h1 * hm1 - h1 * hm2 + hm3;
        }
    }
    // Two-variable fill via the Möbius relation; A(m,1) = A(1,m) (self-dual).
    let mut a = vec![0.0f64; (bound1 * bound2) as usize];
    for m in 1..=bound1 {
        for n in 1..=bound2 {
            let g = arith::gcd(m, n);
            let mut v = 0.0;
            for d in arith::divisors(g) {
                let mu = arith::mobius(d);
                if mu != 0 {
                    v += mu as f64 * row[(m / d) as usize] * row[(n / d) as usize];
                }
            }
            a[((m - 1) * bound2 + (n - 1)) as usize] = v;
        }
    }
    let k = gl2.weight as f64;
    Ok(GL3CoefficientTable {
        bound1,
        bound2,
        a,
        langlands: [k - 1.0, 0.0, 1.0 - k],
    })
}

/// Serve A(m, n); errors outside the table.
pub fn sym2_coeff(table: &GL3CoefficientTable, m: u64, n: u64) -> Result<f64> {
    if m == 0 || m > table.bound1 {
        return Err(Error::OutOfRange {
            index: m,
            bound: table.bound1,
        });
    }
    if n == 0 || n > table.bound2 {
        return Err(Error::OutOfRange {
            index: n,
            bound: table.bound2,
        });
    }
    Ok(table.coeff_unchecked(m, n))
}

/// Normalized mean square (Σ_{n≤N} A(1,n)²)/N.
pub fn rankin_selberg_ratio(table: &GL3CoefficientTable, n: u64) -> Result<f64> {
    if n == 0 || n > table.bound2 {
        return Err(Error::OutOfRange {
            index: n,
            bound: table.bound2,
        });
    }
    let s: f64 = table.row1()[..n as usize].iter().map(|a| a * a).sum();
    Ok(s / n as f64)
}

/// Write the GL(2) table as a small binary cache:
/// magic, weight and bound as little-endian u64, then λ(1).. as f64.
pub fn write_coeff_cache(path: &std::path::Path, table: &FourierCoefficientTable) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(CACHE_MAGIC)?;
    f.write_all(&(table.weight as u64).to_le_bytes())?;
    f.write_all(&table.bound.to_le_bytes())?;
    for n in 1..=table.bound {
        f.write_all(&table.lambda(n).to_le_bytes())?;
    }
    Ok(())
}

/// Read a binary coefficient cache written by [`write_coeff_cache`].
pub fn read_coeff_cache(path: &std::path::Path) -> Result<FourierCoefficientTable> {
    let mut f = std::fs::File::open(path)?;
    let mut magic = [0u8; 5];
    f.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::InvalidConfig(format!(
            "{} is not a coefficient cache",
            path.display()
        )));
    }
    let mut buf = [0u8; 8];
    f.read_exact(&mut buf)?;
    let weight = u64::from_le_bytes(buf);
    f.read_exact(&mut buf)?;
    let bound = u64::from_le_bytes(buf);
    if bound == 0 || bound > MAX_BOUND {
        return Err(Error::InvalidConfig("cache bound out of range".into()));
    }
    let mut lambda = vec![0.0f64; bound as usize + 1];
    for slot in lambda.iter_mut().skip(1) {
        f.read_exact(&mut buf)?;
        *slot = f64::from_le_bytes(buf);
    }
    Ok(FourierCoefficientTable {
        weight: weight as u32,
        bound,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent τ oracle: ∏(1−q^n) by the pentagonal-number series,
    /// multiplied out 24 times. Shares nothing with the production route.
    fn tau_pentagonal_oracle(bound: usize) -> Vec<i128> {
        let mut sparse: Vec<(usize, i128)> = vec![(0, 1)];
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g1 >= bound && g2 >= bound {
                break;
            }
            let s = if k % 2 == 0 { 1i128 } else { -1i128 };
            if g1 < bound {
                sparse.push((g1, s));
            }
            if g2 < bound {
                sparse.push((g2, s));
            }
            k += 1;
        }
        let mut dense = vec![0i128; bound];
        dense[0] = 1;
        for _ in 0..24 {
            let mut next = vec![0i128; bound];
            for &(pos, coef) in &sparse {
                for i in 0..bound - pos {
                    next[i + pos] += dense[i] * coef;
                }
            }
            dense = next;
        }
        let mut tau = vec![0i128; bound + 1];
        tau[1..].copy_from_slice(&dense);
        tau
    }

    #[test]
    fn tau_known_values() {
        let tau = tau_qexpansion(30).unwrap();
        assert_eq!(tau[1], 1);
        assert_eq!(tau[2], -24);
        assert_eq!(tau[3], 252);
        assert_eq!(tau[4], -1472);
        assert_eq!(tau[5], 4830);
        assert_eq!(tau[6], -6048);
        assert_eq!(tau[6], tau[2] * tau[3]);
    }

    #[test]
    fn tau_matches_pentagonal_oracle() {
        let bound = 2000;
        let tau = tau_qexpansion(bound as u64).unwrap();
        let oracle = tau_pentagonal_oracle(bound);
        assert_eq!(tau[..=bound], oracle[..=bound]);
    }

    #[test]
    fn gl2_table_basics() {
        let t = build_gl2_table(10_000).unwrap();
        assert_eq!(gl2_coeff(&t, 1).unwrap(), 1.0);
        let l2 = -24.0 / 2f64.powf(5.5);
        assert!((gl2_coeff(&t, 2).unwrap() - l2).abs() < 1e-14);
        assert!((gl2_coeff(&t, 4).unwrap() - (-0.71875)).abs() < 1e-12);
        assert!(matches!(
            gl2_coeff(&t, 10_001),
            Err(Error::OutOfRange { .. })
        ));
        assert!(build_gl2_table(MAX_BOUND + 1).is_err());
    }

    #[test]
    fn gl2_hecke_relations_small() {
        let bound = 10_000u64;
        let t = build_gl2_table(bound).unwrap();
        // multiplicativity over coprime splits
        let spf = spf_table(bound);
        for n in 2..=bound {
            let p = spf[n as usize] as u64;
            let mut pe = p;
            let mut rest = n / p;
            while rest % p == 0 {
                pe *= p;
                rest /= p;
            }
            if rest > 1 {
                let err = (t.lambda(n) - t.lambda(pe) * t.lambda(rest)).abs();
                assert!(err < 1e-10, "n={n}");
            }
        }
        // prime-power recursion λ(p)λ(p^k) = λ(p^{k+1}) + λ(p^{k-1})
        for &p in &arith::primes_up_to(100) {
            let mut pk = p;
            while pk * p <= bound {
                let k = t.lambda(p) * t.lambda(pk);
                let prev = if pk == p { 1.0 } else { t.lambda(pk / p) };
                assert!((k - (t.lambda(pk * p) + prev)).abs() < 1e-10, "p={p} pk={pk}");
                pk *= p;
            }
        }
        // Deligne bound |λ(n)| <= τ(n)
        for n in 1..=bound {
            assert!(t.lambda(n).abs() <= arith::divisor_count(n) as f64 + 1e-10);
        }
    }

    /// Schur-polynomial (Jacobi–Trudi) oracle at prime powers:
    /// A(p^a, p^b) = h_{a+b}·h_b − h_{a+b+1}·h_{b−1} with h_j = A(1, p^j).
    fn jacobi_trudi(row: &dyn Fn(u32) -> f64, a: u32, b: u32) -> f64 {
        let h = |j: i64| -> f64 {
            if j < 0 {
                0.0
            } else {
                row(j as u32)
            }
        };
        h((a + b) as i64) * h(b as i64) - h((a + b + 1) as i64) * h(b as i64 - 1)
    }

    #[test]
    fn sym2_table_basics() {
        let gl2 = build_gl2_table(10_000).unwrap();
        let t = build_sym2_table(&gl2, 100, 100).unwrap();
        assert_eq!(sym2_coeff(&t, 1, 1).unwrap(), 1.0);
        assert!((sym2_coeff(&t, 1, 2).unwrap() - (-0.71875)).abs() < 1e-12);
        assert_eq!(t.langlands, [11.0, 0.0, -11.0]);
        // self-dual symmetry
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                let d = (sym2_coeff(&t, m, n).unwrap() - sym2_coeff(&t, n, m).unwrap()).abs();
                assert!(d < 1e-12, "m={m} n={n}");
            }
        }
        // A(2,2) against the Jacobi–Trudi oracle
        for p in [2u64, 3, 5, 7] {
            let row = |j: u32| sym2_coeff(&t, 1, p.pow(j)).unwrap();
            for (a, b) in [(1u32, 1u32), (1, 2), (2, 2), (2, 1)] {
                if p.pow(a) <= 100 && p.pow(b) <= 100 && p.pow(a + b + 1) <= 100 {
                    let table_v = sym2_coeff(&t, p.pow(a), p.pow(b)).unwrap();
                    let jt = jacobi_trudi(&row, a, b);
                    assert!(
                        (table_v - jt).abs() < 1e-10,
                        "p={p} a={a} b={b}: {table_v} vs {jt}"
                    );
                }
            }
        }
        // insufficient source table is rejected
        let small = build_gl2_table(50).unwrap();
        assert!(matches!(
            build_sym2_table(&small, 100, 100),
            Err(Error::InsufficientSourceTable { .. })
        ));
    }

    #[test]
    fn sym2_hecke_identity_and_prime_bound() {
        let gl2 = build_gl2_table(10_000).unwrap();
        let t = build_sym2_table(&gl2, 1, 10_000).unwrap();
        let row1 = t.row1();
        let h = |n: u64| row1[(n - 1) as usize];
        for &p in &arith::primes_up_to(50) {
            assert!(h(p).abs() <= 3.0 + 1e-12, "p={p}");
            // h1·h_k = h_{k+1} + h1·h_{k-1} − h_{k-2}
            let mut pk = p;
            while pk * p <= 10_000 {
                let e = pk.ilog(p);
                let hm1 = h(pk / p);
                let hm2 = if e >= 2 { h(pk / (p * p)) } else { 0.0 };
                let lhs = h(p) * h(pk);
                let rhs = h(pk * p) + h(p) * hm1 - hm2;
                assert!((lhs - rhs).abs() < 1e-9, "p={p} pk={pk}");
                pk *= p;
            }
        }
    }

    #[test]
    fn rankin_ratio_bracket() {
        let gl2 = build_gl2_table(1_000).unwrap();
        let t = build_sym2_table(&gl2, 1, 1_000).unwrap();
        assert_eq!(rankin_selberg_ratio(&t, 1).unwrap(), 1.0);
        let r = rankin_selberg_ratio(&t, 1_000).unwrap();
        assert!((0.1..=10.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn rankin_partial_sums_grow_linearly() {
        let gl2 = build_gl2_table(100_000).unwrap();
        let t = build_sym2_table(&gl2, 1, 100_000).unwrap();
        // log-log regression of Σ_{n≤N} A(1,n)² over N in 10^3..10^5
        let pts: Vec<(f64, f64)> = [3.0f64, 3.5, 4.0, 4.5, 5.0]
            .iter()
            .map(|&e| {
                let n = 10f64.powf(e) as u64;
                let ratio = rankin_selberg_ratio(&t, n).unwrap();
                ((n as f64).ln(), (ratio * n as f64).ln())
            })
            .collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (slope, _, _) = crate::numeric::ols_slope(&xs, &ys);
        assert!((slope - 1.0).abs() <= 0.15, "slope {slope}");
    }

    #[test]
    fn cache_roundtrip() {
        let t = build_gl2_table(500).unwrap();
        let dir = std::env::temp_dir().join("sce-lab-test-cache");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w12.bin");
        write_coeff_cache(&path, &t).unwrap();
        let back = read_coeff_cache(&path).unwrap();
        assert_eq!(back.weight, 12);
        assert_eq!(back.bound, 500);
        for n in 1..=500u64 {
            assert_eq!(back.lambda(n).to_bits(), t.lambda(n).to_bits());
        }
        std::fs::remove_file(&path).ok();
    }
}
