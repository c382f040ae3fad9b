//! Exact integer and modular arithmetic used by every other module.
//!
//! All moduli and residues are 64-bit; products go through 128-bit
//! intermediates. Factorization is trial division against a small sieve with
//! a Pollard-rho fallback, which is plenty for desk-scale moduli.

use crate::{Error, Result};

/// Largest prime kept in the trial-division sieve.
const SIEVE_LIMIT: u64 = 1_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of a signed value with a modulus.
pub fn gcd_i(a: i64, m: u64) -> u64 {
    gcd(a.unsigned_abs(), m)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Canonical residue of a signed integer in `[0, m)`.
pub fn reduce(a: i64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    let r = a.rem_euclid(m as i64);
    r as u64
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This base set is deterministic for all n < 2^64.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of a positive 64-bit integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Product reconstruction; equals `n` by construction.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(self.n, |acc, &(p, _)| acc / p * (p - 1))
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidConfig("factorize(0) is undefined".into()));
    }
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        factors.push((p, e));
    };
    let mut p = 2u64;
    while p * p <= rest && p <= SIEVE_LIMIT {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            push(p, e, &mut factors);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if rest > 1 {
        if is_prime(rest) {
            push(rest, 1, &mut factors);
        } else {
            // Composite survivor of trial division: split recursively.
            let mut stack = vec![rest];
            let mut extra: Vec<u64> = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    extra.push(m);
                } else {
                    let d = pollard_rho(m);
                    stack.push(d);
                    stack.push(m / d);
                }
            }
            extra.sort_unstable();
            let mut i = 0;
            while i < extra.len() {
                let p = extra[i];
                let mut e = 0u32;
                while i < extra.len() && extra[i] == p {
                    e += 1;
                    i += 1;
                }
                push(p, e, &mut factors);
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(Factorization { n, factors })
}

/// Modular inverse of `a` mod `m`; `mod_inverse(_, 1) == 0`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return Ok(0);
    }
    let a0 = reduce(a, m);
    if gcd(a0, m) != 1 {
        return Err(Error::NotInvertible(a, m));
    }
    // Extended Euclid on (a0, m).
    let (mut old_r, mut r) = (a0 as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Möbius function by the squarefree sign convention.
pub fn mobius(n: u64) -> i32 {
    assert!(n >= 1, "mobius needs n >= 1");
    let f = factorize(n).expect("n >= 1");
    if f.factors.iter().any(|&(_, e)| e >= 2) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ascending list of divisors.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors needs n >= 1");
    let f = factorize(n).expect("n >= 1");
    let mut divs = vec![1u64];
    for &(p, e) in &f.factors {
        let prev = divs.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            divs.extend(prev.iter().map(|d| d * pe));
        }
    }
    divs.sort_unstable();
    divs
}

/// Euler phi.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n).expect("n >= 1").euler_phi()
}

/// Divisor count τ(n).
pub fn divisor_count(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n).expect("n >= 1").divisor_count()
}

/// Split `b = b0 * b1` with every prime of `b0` dividing `a` and
/// `gcd(b1, a) = 1`.
pub fn core_split(b: u64, a: u64) -> (u64, u64) {
    assert!(b >= 1 && a >= 1);
    let mut b1 = b;
    let mut b0 = 1u64;
    let mut g = gcd(b1, a);
    while g > 1 {
        b0 *= g;
        b1 /= g;
        g = gcd(b1, g);
    }
    (b0, b1)
}

/// Primes up to `n` inclusive (simple sieve).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Smallest-prime-factor table for 0..=n (`spf[0] = spf[1] = 0`).
pub fn spf_table(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    for p in 2..=n {
        if spf[p] == 0 {
            let mut q = p;
            while q <= n {
                if spf[q] == 0 {
                    spf[q] = p as u32;
                }
                q += p;
            }
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent Miller–Rabin used only as a test oracle (kept separate
    /// from the library routine on purpose).
    fn oracle_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        let mut d = n - 1;
        let mut s = 0;
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'outer: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
            let a = a % n;
            if a == 0 {
                continue;
            }
            let mut x = pow_mod(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mul_mod(x, x, n);
                if x == n - 1 {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        // 2^61 - 1 is a Mersenne prime; confirmed by the independent oracle.
        let m61 = (1u64 << 61) - 1;
        assert!(oracle_is_prime(m61));
        assert_eq!(factorize(m61).unwrap().factors, vec![(m61, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_reconstructs_exhaustively() {
        for n in 1..=100_000u64 {
            assert_eq!(factorize(n).unwrap().product(), n);
        }
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        for m in 2..50 {
            assert_eq!(mod_inverse(1, m).unwrap(), 1);
        }
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert!(matches!(mod_inverse(4, 6), Err(Error::NotInvertible(..))));
    }

    #[test]
    fn mod_inverse_exhaustive_small_moduli() {
        for m in 1..=1000u64 {
            for a in 0..m {
                if gcd(a, m) == 1 {
                    let inv = mod_inverse(a as i64, m).unwrap();
                    if m > 1 {
                        assert_eq!(mul_mod(a, inv, m), 1, "a={a} m={m}");
                    }
                } else {
                    assert!(mod_inverse(a as i64, m).is_err());
                }
            }
        }
    }

    #[test]
    fn mobius_examples_and_divisor_sum() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        // sum_{d|n} mu(d) = [n == 1]
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n).iter().map(|&d| mobius(d) as i64).sum();
            assert_eq!(s, i64::from(n == 1), "n={n}");
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(28), vec![1, 2, 4, 7, 14, 28]);
        assert!(oracle_is_prime(97));
        assert_eq!(divisors(97), vec![1, 97]);
    }

    #[test]
    fn core_split_examples() {
        assert_eq!(core_split(12, 2), (4, 3));
        assert_eq!(core_split(35, 6), (1, 35));
        assert_eq!(core_split(360, 30), (360, 1));
    }

    #[test]
    fn core_split_exhaustive() {
        for b in 1..=500u64 {
            for a in 1..=500u64 {
                let (b0, b1) = core_split(b, a);
                assert_eq!(b0 * b1, b);
                assert_eq!(gcd(b1, a), 1);
                // every prime of b0 divides a
                for &(p, _) in &factorize(b0).unwrap().factors {
                    assert_eq!(a % p, 0, "b={b} a={a} p={p}");
                }
            }
        }
    }

    #[test]
    fn primality_matches_oracle() {
        for n in 0..5_000u64 {
            assert_eq!(is_prime(n), oracle_is_prime(n), "n={n}");
        }
    }

    proptest! {
        #[test]
        fn factorize_random(n in 1u64..u32::MAX as u64) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.product(), n);
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for &(p, _) in &f.factors {
                prop_assert!(is_prime(p));
            }
        }

        #[test]
        fn inverse_random(a in 1i64..1_000_000, m in 2u64..1_000_000) {
            if gcd_i(a, m) == 1 {
                let inv = mod_inverse(a, m).unwrap();
                prop_assert_eq!(mul_mod(reduce(a, m), inv, m), 1);
            }
        }
    }
}
