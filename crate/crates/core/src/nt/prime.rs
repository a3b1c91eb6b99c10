use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::pow_mod;

const SMALL_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Primes below `bound`, ascending. The list up to 10^6 is cached.
pub fn primes_below(bound: u64) -> Vec<u64> {
    let cached = sieve_cache();
    if bound <= super::TRIAL_BOUND {
        let end = cached.partition_point(|&p| (p as u64) < bound);
        return cached[..end].iter().map(|&p| p as u64).collect();
    }
    sieve(bound).into_iter().map(|p| p as u64).collect()
}

pub(super) fn sieve_cache() -> &'static [u32] {
    static CACHE: OnceLock<Vec<u32>> = OnceLock::new();
    CACHE.get_or_init(|| sieve(super::TRIAL_BOUND))
}

fn sieve(bound: u64) -> Vec<u32> {
    let n = bound as usize;
    if n < 3 {
        return vec![];
    }
    let mut composite = vec![false; n];
    let mut out = vec![];
    for i in 2..n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = ((x as u128 * x as u128) % n as u128) as u64;
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    SMALL_BASES.iter().all(|&a| miller_rabin_u64(n, a))
}

fn miller_rabin_big(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a / n) for odd positive n.
fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    // D = 5, -7, 9, -11, ...
    let mut abs_d: u64 = 5;
    let mut negative = false;
    let d_mod = loop {
        let dm = if negative {
            n - (BigUint::from(abs_d) % n)
        } else {
            BigUint::from(abs_d) % n
        };
        match jacobi(&dm, n) {
            -1 => break dm,
            0 if BigUint::from(abs_d) % n != BigUint::zero() => return false,
            _ => {}
        }
        abs_d += 2;
        negative = !negative;
    };
    // Q = (1 - D) / 4 mod n, with P = 1.
    let q_mod = {
        let four_inv = half_mod(half_mod(BigUint::one(), n), n);
        let one_minus_d = (BigUint::one() + n - &d_mod) % n;
        one_minus_d * four_inv % n
    };
    let n1 = n + 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;

    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    let bits = d.bits();
    for i in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = (&v * &v + n + n - (&qk << 1) % n) % n;
        qk = &qk * &qk % n;
        if d.bit(i) {
            let u2 = half_mod((&u + &v) % n, n);
            let v2 = half_mod((&d_mod * &u + &v) % n, n);
            u = u2;
            v = v2;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n + n - (&qk << 1) % n) % n;
        qk = &qk * &qk % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Miller-Rabin on the first 13 prime bases, which is a proof below
/// 3.3e24; above that a strong Lucas test is added.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !SMALL_BASES
        .iter()
        .all(|&a| miller_rabin_big(n, &BigUint::from(a)))
    {
        return false;
    }
    let limit: BigUint = "3317044064679887385961981".parse().unwrap();
    if *n < limit {
        return true;
    }
    strong_lucas(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_agree_with_sieve() {
        let ps: std::collections::HashSet<u64> = primes_below(100_000).into_iter().collect();
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), ps.contains(&n), "{n}");
        }
        assert_eq!(primes_below(64).len(), 18);
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // 3825123056546413051 is a strong pseudoprime to bases 2..=23.
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
        let carmichael: BigUint = "318665857834031151167461".parse().unwrap();
        assert!(!is_prime(&carmichael));
    }

    #[test]
    fn big_primes() {
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime(&m127));
        assert!(strong_lucas(&m127));
        let m128 = (BigUint::one() << 128) - 1u32;
        assert!(!is_prime(&m128));
        // 2^89 - 1 and 2^107 - 1 are Mersenne primes; their product is not.
        let a = (BigUint::one() << 89) - 1u32;
        let b = (BigUint::one() << 107) - 1u32;
        assert!(is_prime(&a) && is_prime(&b));
        assert!(!is_prime(&(&a * &b)));
        assert!(!strong_lucas(&(&a * &b)));
    }

    #[test]
    fn lucas_agrees_on_small_odd_numbers() {
        for n in (5u64..20_000).step_by(2) {
            let b = BigUint::from(n);
            if is_prime_u64(n) {
                assert!(strong_lucas(&b), "{n}");
            }
        }
    }
}
