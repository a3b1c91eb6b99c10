use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::prime::{is_prime, sieve_cache};
use super::{cyclotomic_value, divisors};

/// Trial division runs over all primes below this bound.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// A complete prime factorization, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: BigUint,
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn radical(&self) -> BigUint {
        self.factors.iter().map(|(r, _)| r.clone()).product()
    }

    pub fn euler_phi(&self) -> BigUint {
        self.factors
            .iter()
            .map(|(r, e)| (r - 1u32) * r.pow(e - 1))
            .product()
    }

    pub fn moebius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(r, _)| r)
    }

    /// `2^5 * 5 * 41` style rendering.
    pub fn to_text(&self) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        self.factors
            .iter()
            .map(|(r, e)| if *e == 1 { r.to_string() } else { format!("{r}^{e}") })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

/// How much Pollard rho work to spend on one composite cofactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoBudget {
    Unlimited,
    Iterations(u64),
}

/// A factorization that may leave composite cofactors unsplit.
///
/// Every unsplit cofactor is composite, free of primes below
/// [`TRIAL_BOUND`], and coprime to all found primes and to the other
/// cofactors, so `omega` is pinned between [`Self::omega_lower`] and
/// [`Self::omega_upper`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub value: BigUint,
    pub primes: BTreeMap<BigUint, u32>,
    pub unfactored: Vec<BigUint>,
}

impl PartialFactorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    pub fn into_complete(self) -> Option<Factorization> {
        if !self.is_complete() {
            return None;
        }
        Some(Factorization {
            value: self.value,
            factors: self.primes.into_iter().collect(),
        })
    }

    pub fn omega_lower(&self) -> u64 {
        (self.primes.len() + self.unfactored.len()) as u64
    }

    pub fn omega_upper(&self) -> u64 {
        let log_b = (TRIAL_BOUND as f64).log2();
        let extra: u64 = self
            .unfactored
            .iter()
            .map(|c| {
                // all prime factors exceed TRIAL_BOUND, so there are at most
                // floor(log c / log B) of them; round the float estimate
                // up to stay on the safe side
                let bits = c.bits() as f64;
                (bits / log_b).floor() as u64 + 1
            })
            .sum();
        self.primes.len() as u64 + extra
    }
}

fn rem_small(n: &BigUint, d: u32) -> u32 {
    let d = d as u64;
    let mut r = 0u64;
    for &limb in n.to_u32_digits().iter().rev() {
        r = ((r << 32) | limb as u64) % d;
    }
    r as u32
}

/// Strips primes `< TRIAL_BOUND` accepted by `filter` from `n`.
fn trial_divide(
    n: &mut BigUint,
    primes: &mut BTreeMap<BigUint, u32>,
    filter: impl Fn(u32) -> bool,
) {
    for &r in sieve_cache() {
        if n.is_one() {
            return;
        }
        if !filter(r) {
            continue;
        }
        if let Some(small) = n.to_u64() {
            if (r as u64) * (r as u64) > small {
                // what is left is 1 or a prime
                break;
            }
        }
        if rem_small(n, r) == 0 {
            let mut e = 0;
            while rem_small(n, r) == 0 {
                *n /= r;
                e += 1;
            }
            *primes.entry(BigUint::from(r)).or_insert(0) += e;
        }
    }
}

fn rho_u64(n: u64, c: u64, limit: u64) -> Option<u64> {
    let m = n as u128;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % m) as u64;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x;
    let mut ys;
    let mut g;
    let mut spent = 0u64;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            let step = 128.min(r - k);
            for _ in 0..step {
                y = f(y);
                q = ((q as u128 * x.abs_diff(y) as u128) % m) as u64;
            }
            g = q.gcd(&n);
            k += step;
            spent += step;
            if k >= r || g != 1 {
                break;
            }
        }
        r *= 2;
        if g != 1 || spent > limit {
            break;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g != 1 {
                break;
            }
        }
    }
    (g != 1 && g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, limit: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x;
    let mut ys;
    let mut g;
    let mut spent = 0u64;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y.clone();
            let step = 128.min(r - k);
            for _ in 0..step {
                y = f(&y);
                q = q * absdiff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += step;
            spent += step;
            if k >= r || !g.is_one() {
                break;
            }
        }
        r *= 2;
        if !g.is_one() || spent > limit {
            break;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (!g.is_one() && &g != n).then_some(g)
}

/// Finds a nontrivial factor of the composite `n`.
fn split(n: &BigUint, budget: RhoBudget) -> Option<BigUint> {
    let per_try = match budget {
        RhoBudget::Unlimited => 1 << 22,
        RhoBudget::Iterations(it) => it.max(1),
    };
    let tries = match budget {
        RhoBudget::Unlimited => u64::MAX,
        RhoBudget::Iterations(_) => 3,
    };
    for c in 1..=tries {
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, per_try).map(BigUint::from),
            None => rho_big(n, c, per_try),
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

/// `n = root^k` with the largest possible `k`.
fn perfect_power(n: &BigUint) -> (BigUint, u32) {
    let bits = n.bits() as u32;
    for k in (2..=bits.max(2)).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *n {
            return (r, k);
        }
    }
    (n.clone(), 1)
}

fn finish(
    value: BigUint,
    mut primes: BTreeMap<BigUint, u32>,
    rest: BigUint,
    budget: RhoBudget,
) -> PartialFactorization {
    let mut stack = vec![(rest, 1u32)];
    let mut unfactored: Vec<BigUint> = vec![];
    while let Some((x, mult)) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_prime(&x) {
            *primes.entry(x).or_insert(0) += mult;
            continue;
        }
        let (root, k) = perfect_power(&x);
        if k > 1 {
            stack.push((root, mult * k));
            continue;
        }
        match split(&x, budget) {
            Some(d) => {
                let other = &x / &d;
                stack.push((d, mult));
                stack.push((other, mult));
            }
            None => unfactored.push(x),
        }
    }
    // make the leftovers coprime to the found primes and to each other
    let mut cleaned: Vec<BigUint> = vec![];
    for mut c in unfactored {
        for (r, e) in primes.iter_mut() {
            while (&c % r).is_zero() {
                c /= r;
                *e += 1;
            }
        }
        if !c.is_one() {
            cleaned.push(c);
        }
    }
    let mut coprime: Vec<BigUint> = vec![];
    while let Some(c) = cleaned.pop() {
        let mut merged = false;
        for other in coprime.iter_mut() {
            let g = c.gcd(other);
            if !g.is_one() {
                *other = &*other * &c / &g;
                merged = true;
                break;
            }
        }
        if !merged {
            coprime.push(c);
        }
    }
    let mut unfactored = vec![];
    for c in coprime {
        if is_prime(&c) {
            *primes.entry(c).or_insert(0) += 1;
        } else {
            unfactored.push(c);
        }
    }
    unfactored.sort();
    PartialFactorization {
        value,
        primes,
        unfactored,
    }
}

/// Trial division below [`TRIAL_BOUND`], then Brent's variant of Pollard
/// rho within `budget`.
pub fn factorize_partial(m: &BigUint, budget: RhoBudget) -> PartialFactorization {
    assert!(!m.is_zero());
    let mut primes = BTreeMap::new();
    let mut rest = m.clone();
    trial_divide(&mut rest, &mut primes, |_| true);
    finish(m.clone(), primes, rest, budget)
}

pub fn factorize(m: &BigUint) -> Factorization {
    factorize_partial(m, RhoBudget::Unlimited)
        .into_complete()
        .expect("unlimited rho always splits")
}

/// Word-sized factorization as `(prime, exponent)` pairs.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = vec![];
    for &r in sieve_cache() {
        let r = r as u64;
        if r * r > n {
            break;
        }
        if n % r == 0 {
            let mut e = 0;
            while n % r == 0 {
                n /= r;
                e += 1;
            }
            out.push((r, e));
        }
    }
    if n > 1 {
        if n < TRIAL_BOUND * TRIAL_BOUND {
            out.push((n, 1));
        } else {
            let f = factorize(&BigUint::from(n));
            for (r, e) in f.factors {
                out.push((r.to_u64().unwrap(), e));
            }
            out.sort_unstable();
        }
    }
    out
}

/// Factors `q^n - 1` through its cyclotomic pieces `Phi_d(q)`.
///
/// A prime `r` dividing `Phi_d(q)` either divides `d` or satisfies
/// `r = 1 mod d`, which thins out trial division considerably.
pub fn factor_qn_minus_1(q: u64, n: u64, budget: RhoBudget) -> PartialFactorization {
    let qb = BigUint::from(q);
    let value = qb.pow(n as u32) - 1u32;
    let mut primes: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut unfactored = vec![];
    for d in divisors(n) {
        let mut piece = cyclotomic_value(d, &qb);
        let mut local = BTreeMap::new();
        trial_divide(&mut piece, &mut local, |r| {
            let r = r as u64;
            r % d == 1 % d || d % r == 0
        });
        let part = finish(piece.clone(), local, piece, budget);
        for (r, e) in part.primes {
            *primes.entry(r).or_insert(0) += e;
        }
        unfactored.extend(part.unfactored);
    }
    // pieces for different d are coprime apart from primes dividing n,
    // which trial division has already removed
    finish_merge(value, primes, unfactored)
}

fn finish_merge(
    value: BigUint,
    primes: BTreeMap<BigUint, u32>,
    unfactored: Vec<BigUint>,
) -> PartialFactorization {
    let mut unfactored = unfactored;
    unfactored.sort();
    PartialFactorization {
        value,
        primes,
        unfactored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::is_prime_u64;
    use proptest::prelude::*;

    fn text(q: u64, n: u64) -> String {
        factor_qn_minus_1(q, n, RhoBudget::Unlimited)
            .into_complete()
            .unwrap()
            .to_text()
    }

    #[test]
    fn displayed_decompositions() {
        assert_eq!(text(3, 8), "2^5 * 5 * 41");
        assert_eq!(text(11, 8), "2^5 * 3 * 5 * 61 * 7321");
        assert_eq!(text(19, 8), "2^5 * 3^2 * 5 * 17 * 181 * 3833");
        assert_eq!(text(11, 16), "2^6 * 3 * 5 * 17 * 61 * 7321 * 6304673");
        assert_eq!(text(7, 8), "2^6 * 3 * 5^2 * 1201");
        assert_eq!(text(7, 16), "2^7 * 3 * 5^2 * 17 * 1201 * 169553");
        assert_eq!(
            text(7, 24),
            "2^6 * 3^2 * 5^2 * 13 * 19 * 43 * 73 * 181 * 193 * 409 * 1201"
        );
        assert_eq!(text(3, 16), "2^6 * 5 * 17 * 41 * 193");
    }

    #[test]
    fn one_has_no_factors() {
        let f = factorize(&BigUint::one());
        assert!(f.factors.is_empty());
        assert_eq!(f.to_text(), "1");
    }

    #[test]
    fn splits_a_semiprime_with_large_factors() {
        let a = BigUint::from(1_000_000_007u64);
        let b = BigUint::from(998_244_353u64);
        let c = BigUint::from(2_147_483_647u64);
        let n = &a * &b * &c * &c;
        let f = factorize(&n);
        assert_eq!(
            f.factors,
            vec![(b.clone(), 1), (a.clone(), 1), (c.clone(), 2)]
        );
    }

    #[test]
    fn generic_and_cyclotomic_routes_agree() {
        for q in [3u64, 5, 7, 11, 19, 27] {
            for n in 1..=24u64 {
                let value = BigUint::from(q).pow(n as u32) - 1u32;
                let direct = factorize(&value);
                let cyc = factor_qn_minus_1(q, n, RhoBudget::Unlimited)
                    .into_complete()
                    .unwrap();
                assert_eq!(direct, cyc, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn budgeted_bounds_bracket_the_truth() {
        // 2^67 - 1 = 193707721 * 761838257287, both above the trial bound
        let m = (BigUint::one() << 67) - 1u32;
        let partial = factorize_partial(&m, RhoBudget::Iterations(1));
        let truth = factorize(&m).omega() as u64;
        assert!(partial.omega_lower() <= truth && truth <= partial.omega_upper());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn factorization_remultiplies(m in 1u64..=1_000_000) {
            let f = factorize_u64(m);
            let prod: u64 = f.iter().map(|&(r, e)| r.pow(e)).product();
            prop_assert_eq!(prod, m);
            for w in f.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for &(r, _) in &f {
                prop_assert!(is_prime_u64(r));
            }
        }

        #[test]
        fn big_factorization_remultiplies(a in 1u64..1 << 36, b in 1u64..1 << 36, c in 1u64..1 << 20) {
            let m = BigUint::from(a) * BigUint::from(b) * BigUint::from(c);
            let f = factorize(&m);
            let prod: BigUint = f.factors.iter().map(|(r, e)| r.pow(*e)).product();
            prop_assert_eq!(prod, m);
            for (r, _) in &f.factors {
                prop_assert!(is_prime(r));
            }
        }
    }
}
