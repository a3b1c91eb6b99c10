//! Exact integer number theory: factorization, multiplicative orders,
//! sub-orders and central indices, and the classical arithmetic functions.

mod factor;
mod prime;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use factor::{
    factor_qn_minus_1, factorize, factorize_partial, factorize_u64, Factorization,
    PartialFactorization, RhoBudget, TRIAL_BOUND,
};
pub use prime::{is_prime, is_prime_u64, primes_below};

/// `base^exp mod m` for word-sized operands.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Exponent of the prime `p` in `n` (n > 0).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Sorted list of the positive divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = factorize_u64(n);
    let mut out = vec![1u64];
    for &(r, e) in &f {
        let len = out.len();
        let mut pw = 1u64;
        for _ in 0..e {
            pw *= r;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn radical(m: u64) -> u64 {
    assert!(m >= 1);
    factorize_u64(m).iter().map(|&(r, _)| r).product()
}

pub fn euler_phi(m: u64) -> u64 {
    assert!(m >= 1);
    factorize_u64(m)
        .iter()
        .map(|&(r, e)| (r - 1) * r.pow(e - 1))
        .product()
}

/// Integer Möbius function; zero on non-squarefree input.
pub fn moebius(m: u64) -> i8 {
    assert!(m >= 1);
    let f = factorize_u64(m);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Splits `q = p^a` into `(p, a)`.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower { q });
    }
    let f = factorize_u64(q);
    if f.len() != 1 {
        return Err(Error::NotPrimePower { q });
    }
    Ok(f[0])
}

/// Least `s >= 1` with `q^s = 1 mod k`.
///
/// Descends from `euler_phi(k)` through its prime divisors rather than
/// iterating powers, so it stays fast for large `k`.
pub fn mult_order(q: u64, k: u64) -> Result<u64> {
    assert!(k >= 1);
    if gcd(q % k.max(1), k) != 1 && k > 1 {
        return Err(Error::NotCoprime { q, k });
    }
    if k == 1 {
        return Ok(1);
    }
    let mut t = euler_phi(k);
    for (r, _) in factorize_u64(t) {
        while t % r == 0 && pow_mod(q, t / r, k) == 1 {
            t /= r;
        }
    }
    Ok(t)
}

/// `ord_k(q)`, `ord_rad(k)(q)`, the sub-order and its prime-exponent
/// vector, and the central index `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubordProfile {
    pub k: u64,
    pub q: u64,
    pub ord: u64,
    pub ord_rad: u64,
    pub subord: u64,
    pub alpha: BTreeMap<u64, u32>,
    pub tau: u64,
}

pub fn subord_profile(q: u64, k: u64) -> Result<SubordProfile> {
    let ord = mult_order(q, k)?;
    let rad = radical(k);
    let ord_rad = mult_order(q, rad)?;
    debug_assert_eq!(ord % ord_rad, 0);
    let subord = ord / ord_rad;
    let mut alpha = BTreeMap::new();
    let mut tau = 1u64;
    for &(r, _) in &factorize_u64(k) {
        let a = valuation(subord, r);
        alpha.insert(r, a);
        tau *= r.pow(a / 2);
    }
    Ok(SubordProfile {
        k,
        q,
        ord,
        ord_rad,
        subord,
        alpha,
        tau,
    })
}

/// Value of the k-th cyclotomic polynomial at the integer `x`.
pub fn cyclotomic_value(k: u64, x: &BigUint) -> BigUint {
    // Phi_k(x) = prod_{d | k} (x^d - 1)^{mu(k/d)}
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for d in divisors(k) {
        let term = x.pow(d as u32) - 1u32;
        match moebius(k / d) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    let (quo, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quo
}

/// `floor(log2(x))` for positive `x`.
pub fn floor_log2(x: &BigUint) -> u64 {
    x.bits() - 1
}

#[cfg(test)]
fn big(x: u64) -> BigUint {
    BigUint::from(x)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(3, 4).unwrap(), 2);
        assert_eq!(mult_order(3, 16).unwrap(), 4);
        assert_eq!(mult_order(3, 32).unwrap(), 8);
        assert_eq!(mult_order(5, 1).unwrap(), 1);
        assert_eq!(mult_order(6, 9), Err(Error::NotCoprime { q: 6, k: 9 }));
    }

    #[test]
    fn order_matches_repeated_multiplication() {
        for k in 1..300u64 {
            for q in 2..40u64 {
                if gcd(q, k) != 1 {
                    continue;
                }
                let mut s = 1;
                let mut x = q % k;
                while x != 1 % k {
                    x = x * q % k;
                    s += 1;
                }
                assert_eq!(mult_order(q, k).unwrap(), s, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn subord_examples() {
        let s = subord_profile(3, 16).unwrap();
        assert_eq!(s.tau, 2);
        let s = subord_profile(3, 8).unwrap();
        assert_eq!((s.subord, s.tau), (2, 1));
        let s = subord_profile(3, 1).unwrap();
        assert_eq!((s.subord, s.tau), (1, 1));
        // tau_32 for q = 3: subord 8 = 2^3, floor(3/2) = 1.
        let s = subord_profile(3, 32).unwrap();
        assert_eq!((s.ord, s.subord, s.tau), (8, 8, 2));
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(radical(48), 6);
        assert_eq!(radical(1), 1);
        assert_eq!(euler_phi(32), 16);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(1), 1);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(prime_power(27).unwrap(), (3, 3));
        assert!(prime_power(12).is_err());
    }

    #[test]
    fn cyclotomic_values_multiply_to_power_minus_one() {
        let x = big(7);
        for n in 1..30u64 {
            let prod: BigUint = divisors(n).iter().map(|&d| cyclotomic_value(d, &x)).product();
            assert_eq!(prod, x.pow(n as u32) - 1u32);
        }
        assert_eq!(cyclotomic_value(32, &big(3)), big(3u64.pow(16) + 1));
    }

    /// Grid of `k | 2^6 * 3 * 5 * 7 * 11` and q in {3, 7, 11, 19}.
    fn grid() -> Vec<(u64, u64)> {
        let mut out = vec![];
        for &q in &[3u64, 7, 11, 19] {
            for k in divisors(64 * 3 * 5 * 7 * 11) {
                if gcd(q, k) == 1 {
                    out.push((q, k));
                }
            }
        }
        out
    }

    #[test]
    fn subord_is_order_of_power() {
        for (q, k) in grid() {
            let s = subord_profile(q, k).unwrap();
            let u = mult_order(q, radical(k)).unwrap();
            let qu = pow_mod(q, u, k);
            assert_eq!(s.subord, mult_order(qu, k).unwrap(), "q={q} k={k}");
            assert_eq!((k / radical(k)) % s.subord, 0);
            assert_eq!((k / radical(k)) % s.tau, 0);
        }
    }

    #[test]
    fn order_of_q_tau_modulo_k_over_tau() {
        for (q, k) in grid() {
            let s = subord_profile(q, k).unwrap();
            let qt = pow_mod(q, s.tau, k / s.tau);
            let lhs = mult_order(qt, k / s.tau).unwrap();
            assert_eq!(s.ord % (s.tau * s.tau), 0);
            assert_eq!(lhs, s.ord / (s.tau * s.tau), "q={q} k={k}");
        }
    }
}
