//! Number-theoretic classification of pairs `(q, n)`: regularity, the
//! exceptional divisors, component counts, the existence criteria and the
//! closed-form count of completely normal elements.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dec;
use crate::error::{Error, Result};
use crate::nt::{
    divisors, euler_phi, factor_qn_minus_1, factorize_u64, mult_order, prime_power, primes_below,
    radical, subord_profile, valuation, RhoBudget,
};

/// Rho iterations spent per cofactor before falling back to bounds on omega.
pub const DEFAULT_RHO_BUDGET: RhoBudget = RhoBudget::Iterations(1 << 16);

/// The decomposition `n = p^a * 2^b * n_bar` of a degree relative to `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSplit {
    pub p: u64,
    pub a: u32,
    pub n_prime: u64,
    pub b: u32,
    pub n_bar: u64,
}

pub fn split_degree(q: u64, n: u64) -> Result<DegreeSplit> {
    assert!(n >= 1);
    let (p, _) = prime_power(q)?;
    let a = valuation(n, p);
    let n_prime = n / p.pow(a);
    let b = valuation(n_prime, 2);
    Ok(DegreeSplit {
        p,
        a,
        n_prime,
        b,
        n_bar: n_prime >> b,
    })
}

/// The data behind the regularity test `gcd(ord_{rad(n')}(q), n) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regularity {
    pub q: u64,
    pub n: u64,
    pub n_prime: u64,
    pub rad: u64,
    pub ord: u64,
    pub gcd: u64,
    pub regular: bool,
}

impl Regularity {
    pub fn reason(&self) -> String {
        format!(
            "gcd(ord_{}({}) = {}, {}) = {}",
            self.rad, self.q, self.ord, self.n, self.gcd
        )
    }

    fn to_error(&self) -> Error {
        Error::NotRegular {
            q: self.q,
            n: self.n,
            rad: self.rad,
            ord: self.ord,
            gcd: self.gcd,
        }
    }
}

pub fn regularity(q: u64, n: u64) -> Result<Regularity> {
    let s = split_degree(q, n)?;
    let rad = radical(s.n_prime);
    let ord = mult_order(q, rad)?;
    let gcd = ord.gcd(&n);
    Ok(Regularity {
        q,
        n,
        n_prime: s.n_prime,
        rad,
        ord,
        gcd,
        regular: gcd == 1,
    })
}

/// `false` also when `q` is not a prime power.
pub fn is_regular(q: u64, n: u64) -> bool {
    regularity(q, n).map(|r| r.regular).unwrap_or(false)
}

fn require_regular(q: u64, n: u64) -> Result<DegreeSplit> {
    let r = regularity(q, n)?;
    if !r.regular {
        return Err(r.to_error());
    }
    split_degree(q, n)
}

/// `q = 3 mod 4`, `2^c || k` with `c >= 3`, and `ord_{2^c}(q) = 2`.
pub fn is_exceptional_divisor(q: u64, k: u64) -> bool {
    if q % 4 != 3 || k == 0 {
        return false;
    }
    let c = valuation(k, 2);
    c >= 3 && mult_order(q, 1u64 << c) == Ok(2)
}

/// For every prime `r | n`, `r` does not divide `ord_{(n/r)'}(q)`.
pub fn is_completely_basic(q: u64, n: u64) -> bool {
    let Ok((p, _)) = prime_power(q) else {
        return false;
    };
    factorize_u64(n).iter().all(|&(r, _)| {
        let m = n / r;
        let m_free = m / p.pow(valuation(m, p));
        mult_order(q, m_free).map(|o| o % r != 0).unwrap_or(false)
    })
}

/// The equivalent test for regular pairs: no exceptional divisor and every
/// exponent in the suborder of `q` modulo `n'` is at most one.
pub fn is_completely_basic_via_suborder(q: u64, n: u64) -> Result<bool> {
    let s = require_regular(q, n)?;
    if divisors(s.n_prime)
        .into_iter()
        .any(|k| is_exceptional_divisor(q, k))
    {
        return Ok(false);
    }
    let prof = subord_profile(q, s.n_prime)?;
    Ok(prof.alpha.values().all(|&a| a <= 1))
}

/// Everything about a regular pair that the criteria need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProfile {
    pub q: u64,
    pub n: u64,
    pub p: u64,
    pub a: u32,
    pub n_prime: u64,
    pub b: u32,
    pub n_bar: u64,
    /// 2-adic valuation of `q^2 - 1`; absent for even `q`.
    pub e: Option<u32>,
    pub divisor_partition: BTreeMap<u32, Vec<u64>>,
    #[serde(rename = "set_N_prime")]
    pub set_n_prime: Vec<u64>,
    #[serde(rename = "set_N_doubleprime")]
    pub set_n_doubleprime: Vec<u64>,
    #[serde(rename = "set_E")]
    pub set_e: Vec<u64>,
    pub tau: BTreeMap<u64, u64>,
    #[serde(rename = "F_counts")]
    pub f_counts: BTreeMap<u64, u64>,
    #[serde(rename = "F_eps_counts")]
    pub f_eps_counts: BTreeMap<u64, u64>,
    /// Sum of the component counts over each `D_j`.
    pub level_sums: BTreeMap<u32, u64>,
    #[serde(rename = "Omega")]
    pub big_omega: u64,
    #[serde(rename = "Omega_eps")]
    pub big_omega_eps: u64,
    #[serde(rename = "Omega_c")]
    pub big_omega_c: u64,
    /// Distinct prime factors of `q^n - 1`, when the factorization finished.
    pub omega: Option<u64>,
    pub omega_bounds: (u64, u64),
}

impl PairProfile {
    pub fn set_n(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .set_n_prime
            .iter()
            .chain(&self.set_n_doubleprime)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    pub fn is_exceptional(&self) -> bool {
        !self.set_e.is_empty()
    }
}

pub fn profile(q: u64, n: u64) -> Result<PairProfile> {
    profile_with(q, n, DEFAULT_RHO_BUDGET)
}

pub fn profile_with(q: u64, n: u64, budget: RhoBudget) -> Result<PairProfile> {
    let s = require_regular(q, n)?;
    let e = (q % 2 == 1).then(|| valuation(q - 1, 2) + valuation(q + 1, 2));

    let mut divisor_partition = BTreeMap::new();
    let odd_divs = divisors(s.n_bar);
    for j in 0..=s.b {
        divisor_partition.insert(j, odd_divs.iter().map(|l| l << j).collect::<Vec<u64>>());
    }

    let mut set_e = vec![];
    let mut set_n_prime = vec![];
    let mut set_n_doubleprime = vec![];
    let mut tau = BTreeMap::new();
    let mut f_counts = BTreeMap::new();
    let mut f_eps_counts = BTreeMap::new();
    let mut level_sums = BTreeMap::new();
    for (&j, ds) in &divisor_partition {
        let mut level = 0;
        for &k in ds {
            let sp = subord_profile(q, k)?;
            tau.insert(k, sp.tau);
            let num = sp.tau * euler_phi(k);
            if is_exceptional_divisor(q, k) {
                debug_assert_eq!(num % (2 * sp.ord), 0);
                let c = num / (2 * sp.ord);
                f_eps_counts.insert(k, c);
                set_e.push(k);
                level += c;
            } else {
                debug_assert_eq!(num % sp.ord, 0);
                let c = num / sp.ord;
                f_counts.insert(k, c);
                if j <= 2 {
                    set_n_prime.push(k);
                } else {
                    set_n_doubleprime.push(k);
                }
                level += c;
            }
        }
        level_sums.insert(j, level);
    }
    set_e.sort_unstable();
    set_n_prime.sort_unstable();
    set_n_doubleprime.sort_unstable();
    let big_omega: u64 = f_counts.values().sum();
    let big_omega_eps: u64 = f_eps_counts.values().sum();

    let (omega, omega_bounds) = omega_of(q, n, budget);
    Ok(PairProfile {
        q,
        n,
        p: s.p,
        a: s.a,
        n_prime: s.n_prime,
        b: s.b,
        n_bar: s.n_bar,
        e,
        divisor_partition,
        set_n_prime,
        set_n_doubleprime,
        set_e,
        tau,
        f_counts,
        f_eps_counts,
        level_sums,
        big_omega,
        big_omega_eps,
        big_omega_c: big_omega + 3 * big_omega_eps,
        omega,
        omega_bounds,
    })
}

/// Exact omega when factoring finishes, plus bounds that always hold.
fn omega_of(q: u64, n: u64, budget: RhoBudget) -> (Option<u64>, (u64, u64)) {
    let part = factor_qn_minus_1(q, n, budget);
    if part.is_complete() {
        let w = part.primes.len() as u64;
        return (Some(w), (w, w));
    }
    let lo = part.omega_lower();
    let hi = part
        .omega_upper()
        .min(omega_upper_bound(q, n, 64).integer_bound.max(0) as u64);
    (None, (lo, hi.max(lo)))
}

/// `|F_k|` for the non-exceptional and `|F^eps_k|` for the exceptional
/// divisors of `n'`.
pub fn component_counts(q: u64, n: u64) -> Result<(BTreeMap<u64, u64>, BTreeMap<u64, u64>)> {
    let prof = profile_with(q, n, RhoBudget::Iterations(0))?;
    Ok((prof.f_counts, prof.f_eps_counts))
}

/// `2^lhs_exp <= q^rhs_exp`, decided exactly.
pub fn pow2_le_pow(lhs_exp: u64, q: u64, rhs_exp: u64) -> bool {
    let diff = rhs_exp as f64 * (q as f64).log2() - lhs_exp as f64;
    if diff.abs() > 1e-6 * (lhs_exp as f64).max(1.0) {
        return diff > 0.0;
    }
    BigUint::one() << lhs_exp <= BigUint::from(q).pow(rhs_exp as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaSource {
    Exact,
    UpperBound,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionDetail {
    pub omega: Option<u64>,
    pub omega_bounds: (u64, u64),
    pub omega_used: u64,
    pub omega_source: OmegaSource,
    #[serde(rename = "Omega")]
    pub big_omega: u64,
    #[serde(rename = "Omega_eps")]
    pub big_omega_eps: u64,
    #[serde(rename = "Omega_c")]
    pub big_omega_c: u64,
    pub relaxed: bool,
}

/// `sqrt(q^n) > (2^omega - 1)(2^Omega_c - 1)`, decided as `q^n > rhs^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub pair: (u64, u64),
    /// `q^n`
    #[serde(with = "dec")]
    pub lhs: BigUint,
    /// `q^(n/2)` for even `n`
    #[serde(with = "dec::opt")]
    pub lhs_sqrt: Option<BigUint>,
    #[serde(with = "dec")]
    pub rhs: BigUint,
    #[serde(with = "dec")]
    pub rhs_squared: BigUint,
    pub holds: bool,
    pub detail: CriterionDetail,
}

#[derive(Debug, Clone, Copy)]
pub struct CriterionOptions {
    /// Accept regular pairs outside `q = 3 mod 4`, `n` even.
    pub relaxed: bool,
    pub budget: RhoBudget,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        CriterionOptions {
            relaxed: false,
            budget: DEFAULT_RHO_BUDGET,
        }
    }
}

pub fn sufficient_criterion(q: u64, n: u64) -> Result<CriterionReport> {
    sufficient_criterion_with(q, n, CriterionOptions::default())
}

pub fn sufficient_criterion_with(q: u64, n: u64, opts: CriterionOptions) -> Result<CriterionReport> {
    require_regular(q, n)?;
    if !opts.relaxed {
        if n % 2 == 1 {
            return Err(Error::WrongParity(n));
        }
        if q % 4 != 3 {
            return Err(Error::UnsupportedPair { q, n });
        }
    }
    let prof = profile_with(q, n, opts.budget)?;
    criterion_from_profile(&prof, opts.relaxed)
}

fn criterion_from_profile(prof: &PairProfile, relaxed: bool) -> Result<CriterionReport> {
    let (q, n) = (prof.q, prof.n);
    let lhs = BigUint::from(q).pow(n as u32);
    let rhs_for = |w: u64| {
        ((BigUint::one() << w) - 1u32) * ((BigUint::one() << prof.big_omega_c) - 1u32)
    };
    let (lo, hi) = prof.omega_bounds;
    let (omega_used, source, holds) = match prof.omega {
        Some(w) => {
            let r = rhs_for(w);
            (w, OmegaSource::Exact, lhs > &r * &r)
        }
        None => {
            let r_hi = rhs_for(hi);
            let r_lo = rhs_for(lo);
            if lhs > &r_hi * &r_hi {
                (hi, OmegaSource::UpperBound, true)
            } else if lhs <= &r_lo * &r_lo {
                (lo, OmegaSource::LowerBound, false)
            } else {
                return Err(Error::Unfactored { q, n });
            }
        }
    };
    let rhs = rhs_for(omega_used);
    Ok(CriterionReport {
        pair: (q, n),
        lhs_sqrt: (n % 2 == 0).then(|| BigUint::from(q).pow((n / 2) as u32)),
        lhs,
        rhs_squared: &rhs * &rhs,
        rhs,
        holds,
        detail: CriterionDetail {
            omega: prof.omega,
            omega_bounds: prof.omega_bounds,
            omega_used,
            omega_source: source,
            big_omega: prof.big_omega,
            big_omega_eps: prof.big_omega_eps,
            big_omega_c: prof.big_omega_c,
            relaxed,
        },
    })
}

/// The relaxed criterion in terms of `log2(q)` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakCriterionReport {
    pub pair: (u64, u64),
    /// `"4|n"` or `"n=2 mod 4"`
    pub branch: String,
    /// Left-hand side `16/n + c/p^a` in lowest terms.
    pub lhs_num: u64,
    pub lhs_den: u64,
    /// The verdict is `2^lhs_num <= q^lhs_den`.
    pub holds: bool,
}

impl WeakCriterionReport {
    pub fn lhs_f64(&self) -> f64 {
        self.lhs_num as f64 / self.lhs_den as f64
    }
}

pub fn weak_criterion(q: u64, n: u64) -> Result<WeakCriterionReport> {
    let s = require_regular(q, n)?;
    if n % 2 == 1 {
        return Err(Error::WrongParity(n));
    }
    if q % 4 != 3 {
        return Err(Error::UnsupportedPair { q, n });
    }
    let pa = s.p.pow(s.a);
    let (num, den, branch) = if n % 4 == 0 {
        (64 * pa + 9 * n, 4 * n * pa, "4|n")
    } else {
        (16 * pa + 3 * n, n * pa, "n=2 mod 4")
    };
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    Ok(WeakCriterionReport {
        pair: (q, n),
        branch: branch.into(),
        lhs_num: num,
        lhs_den: den,
        holds: pow2_le_pow(num, q, den),
    })
}

/// The bound `omega <= (log(q^n - 1) - log L) / log(ell) + |Lambda|` with
/// `Lambda` the primes below `ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaBound {
    pub ell: u64,
    pub lambda: Vec<u64>,
    pub floor_log2_l: u64,
    /// `(n log2 q - floor(log2 L)) / log2 ell + |Lambda|`, as a float.
    pub value: f64,
    /// `|Lambda| + max{t : ell^t * L <= q^n - 1}`, exact.
    pub integer_bound: i64,
}

pub fn omega_upper_bound(q: u64, n: u64, ell: u64) -> OmegaBound {
    assert!(ell >= 2);
    let lambda = primes_below(ell);
    let l: BigUint = lambda.iter().map(|&r| BigUint::from(r)).product();
    let floor_log2_l = l.bits() - 1;
    let big_n = BigUint::from(q).pow(n as u32) - 1u32;
    let value = (n as f64 * (q as f64).log2() - floor_log2_l as f64) / (ell as f64).log2() + lambda.len() as f64;

    let ell_b = BigUint::from(ell);
    let mut t: i64 = 0;
    if l <= big_n {
        let mut acc = l.clone() * &ell_b;
        while acc <= big_n {
            t += 1;
            acc *= &ell_b;
        }
    } else {
        let mut acc = big_n.clone();
        while acc < l {
            t -= 1;
            acc *= &ell_b;
        }
    }
    OmegaBound {
        integer_bound: lambda.len() as i64 + t,
        ell,
        lambda,
        floor_log2_l,
        value,
    }
}

/// The number of completely normal elements of a regular extension.
pub fn count_cn(q: u64, n: u64) -> Result<BigUint> {
    let s = require_regular(q, n)?;
    let qb = BigUint::from(q);
    let pa = s.p.pow(s.a);
    let mut total = BigUint::one();
    for k in divisors(s.n_prime) {
        let sp = subord_profile(q, k)?;
        let phi = euler_phi(k);
        let deg = sp.ord / sp.tau;
        let qd = qb.pow(deg as u32);
        let (base, exp) = if is_exceptional_divisor(q, k) {
            (&qd * &qd + 3u32 - &qd * 4u32, sp.tau * phi / (2 * sp.ord))
        } else {
            (&qd - 1u32, sp.tau * phi / sp.ord)
        };
        total *= base.pow(exp as u32) * qb.pow(((pa - 1) * phi) as u32);
    }
    Ok(total)
}

/// Upper bounds for `Omega_c` from the case analysis on `b` and `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaCBound {
    pub case: String,
    /// The sharpest bound derived for this case.
    pub sharp: u64,
    /// The bound that feeds the weak criterion.
    pub uc: u64,
}

pub fn omega_c_upper_bound(q: u64, n: u64) -> Result<OmegaCBound> {
    let s = require_regular(q, n)?;
    if n % 2 == 1 {
        return Err(Error::WrongParity(n));
    }
    if q % 4 != 3 {
        return Err(Error::UnsupportedPair { q, n });
    }
    let e = valuation(q - 1, 2) + valuation(q + 1, 2);
    let (b, nb) = (s.b, s.n_bar);
    let (case, sharp, uc) = match b {
        1 => ("b=1", 2 * nb, 2 * nb),
        2 => ("b=2", 3 * nb, 3 * nb),
        _ if b <= e => ("3<=b<=e", 3 * (1 << (b - 2)) * nb, 3 * (1 << (b - 2)) * nb),
        _ => (
            "b>e",
            ((1 << (b - 1)) + (1 << (e - 2))) * nb,
            3 * (1 << (b - 2)) * nb,
        ),
    };
    Ok(OmegaCBound {
        case: case.into(),
        sharp,
        uc,
    })
}

/// Evaluation of the bound `Omega_c <= (2r-1)/r^2 * n'` for one prime `r`
/// with `r^2 | ord_{n'}(q)`, and of the resulting sufficient condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeBoundReport {
    pub pair: (u64, u64),
    pub r: u64,
    #[serde(rename = "Omega_c")]
    pub big_omega_c: u64,
    pub uc_num: u64,
    pub uc_den: u64,
    pub omega_c_within: bool,
    /// `16/n + (6r - 3)/(r^2 p^a)` in lowest terms.
    pub lhs_num: u64,
    pub lhs_den: u64,
    /// `16/(2r^3) + (6r - 3)/r^2`, which dominates the left-hand side.
    pub chain_num: u64,
    pub chain_den: u64,
    pub lhs_within_chain: bool,
    pub condition_holds: bool,
}

impl CubeBoundReport {
    pub fn passes(&self) -> bool {
        self.omega_c_within && self.lhs_within_chain && self.condition_holds
    }
}

/// Applies to regular pairs with `q = 3 mod 4`, `n` even but not divisible
/// by 8, that are not completely basic. Returns one report per qualifying
/// odd prime, or `None` when the pair is outside that class.
pub fn cube_bound(q: u64, n: u64) -> Result<Option<Vec<CubeBoundReport>>> {
    let s = require_regular(q, n)?;
    if q % 4 != 3 || n % 2 == 1 || n % 8 == 0 || is_completely_basic(q, n) {
        return Ok(None);
    }
    let prof = profile_with(q, n, RhoBudget::Iterations(0))?;
    let sub = subord_profile(q, s.n_prime)?;
    let pa = s.p.pow(s.a);
    let mut out = vec![];
    for (&r, &alpha) in &sub.alpha {
        if r == 2 || alpha < 2 {
            continue;
        }
        let uc_num = (2 * r - 1) * s.n_prime;
        let uc_den = r * r;
        let (ln, ld) = reduce(16 * r * r * pa + (6 * r - 3) * n, n * r * r * pa);
        let (cn, cd) = reduce(16 + 2 * r * (6 * r - 3), 2 * r * r * r);
        out.push(CubeBoundReport {
            pair: (q, n),
            r,
            big_omega_c: prof.big_omega_c,
            uc_num,
            uc_den,
            omega_c_within: prof.big_omega_c * uc_den <= uc_num,
            lhs_num: ln,
            lhs_den: ld,
            chain_num: cn,
            chain_den: cd,
            lhs_within_chain: ln as u128 * cd as u128 <= cn as u128 * ld as u128,
            condition_holds: pow2_le_pow(ln, q, ld),
        });
    }
    Ok(Some(out))
}

fn reduce(num: u64, den: u64) -> (u64, u64) {
    let g = num.gcd(&den);
    (num / g, den / g)
}

/// Congruence restrictions for a scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFilter {
    /// `(modulus, residue)` that `q` must satisfy.
    pub q_mod: Option<(u64, u64)>,
    /// `(modulus, residue)` that `n` must satisfy.
    pub n_mod: Option<(u64, u64)>,
}

impl ScanFilter {
    fn admits(&self, q: u64, n: u64) -> bool {
        let ok = |x: u64, c: Option<(u64, u64)>| c.map_or(true, |(m, r)| x % m == r % m);
        ok(q, self.q_mod) && ok(n, self.n_mod)
    }
}

/// Evaluates the criterion on every regular admissible pair, in ascending
/// `(q, n)` order. Non-prime-power `q` are skipped.
pub fn scan_reports(
    q_range: RangeInclusive<u64>,
    n_range: RangeInclusive<u64>,
    filter: ScanFilter,
    opts: CriterionOptions,
) -> Result<Vec<CriterionReport>> {
    let mut cells = vec![];
    for q in q_range {
        if prime_power(q).is_err() {
            continue;
        }
        if !opts.relaxed && q % 4 != 3 {
            continue;
        }
        for n in n_range.clone() {
            if n == 0 || !filter.admits(q, n) || !is_regular(q, n) {
                continue;
            }
            if !opts.relaxed && n % 2 == 1 {
                continue;
            }
            cells.push((q, n));
        }
    }
    let mut out: Vec<CriterionReport> = cells
        .into_par_iter()
        .map(|(q, n)| sufficient_criterion_with(q, n, opts))
        .collect::<Result<_>>()?;
    out.sort_by_key(|r| r.pair);
    Ok(out)
}

/// The pairs of [`scan_reports`] on which the criterion fails.
pub fn scan_pairs(
    q_range: RangeInclusive<u64>,
    n_range: RangeInclusive<u64>,
    filter: ScanFilter,
    opts: CriterionOptions,
) -> Result<Vec<CriterionReport>> {
    Ok(scan_reports(q_range, n_range, filter, opts)?
        .into_iter()
        .filter(|r| !r.holds)
        .collect())
}

/// Flat per-pair summary; fields that do not apply are `null`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub q: u64,
    pub n: u64,
    pub regular: bool,
    pub regularity: Regularity,
    pub exceptional_divisors: Vec<u64>,
    pub completely_basic: bool,
    pub omega: Option<u64>,
    #[serde(rename = "Omega")]
    pub big_omega: Option<u64>,
    #[serde(rename = "Omega_eps")]
    pub big_omega_eps: Option<u64>,
    #[serde(rename = "Omega_c")]
    pub big_omega_c: Option<u64>,
    pub criterion_76_holds: Option<bool>,
    pub weak_criterion_holds: Option<bool>,
    #[serde(with = "dec::opt")]
    pub cn_count: Option<BigUint>,
}

pub fn pair_report(q: u64, n: u64, budget: RhoBudget) -> Result<PairReport> {
    let reg = regularity(q, n)?;
    let completely_basic = is_completely_basic(q, n);
    if !reg.regular {
        return Ok(PairReport {
            q,
            n,
            regular: false,
            regularity: reg,
            exceptional_divisors: vec![],
            completely_basic,
            omega: None,
            big_omega: None,
            big_omega_eps: None,
            big_omega_c: None,
            criterion_76_holds: None,
            weak_criterion_holds: None,
            cn_count: None,
        });
    }
    let prof = profile_with(q, n, budget)?;
    let in_scope = q % 4 == 3 && n % 2 == 0;
    let criterion = criterion_from_profile(&prof, !in_scope).ok().map(|r| r.holds);
    let weak = in_scope
        .then(|| weak_criterion(q, n).ok().map(|w| w.holds))
        .flatten();
    Ok(PairReport {
        q,
        n,
        regular: true,
        regularity: reg,
        exceptional_divisors: prof.set_e.clone(),
        completely_basic,
        omega: prof.omega,
        big_omega: Some(prof.big_omega),
        big_omega_eps: Some(prof.big_omega_eps),
        big_omega_c: Some(prof.big_omega_c),
        criterion_76_holds: criterion,
        weak_criterion_holds: weak,
        cn_count: Some(count_cn(q, n)?),
    })
}

/// Divisors of `n'` for which `C_k` is exceptional.
pub fn exceptional_divisors(q: u64, n: u64) -> Result<Vec<u64>> {
    let s = split_degree(q, n)?;
    Ok(divisors(s.n_prime)
        .into_iter()
        .filter(|&k| is_exceptional_divisor(q, k))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_examples() {
        assert!(is_regular(3, 8));
        assert!(!is_regular(2, 6));
        for q in [2, 3, 4, 5, 7, 8, 9, 11] {
            assert!(is_regular(q, 1));
        }
        let r = regularity(2, 6).unwrap();
        assert_eq!((r.rad, r.ord, r.gcd), (3, 2, 2));
        assert!(matches!(profile(2, 6), Err(Error::NotRegular { gcd: 2, .. })));
        assert!(matches!(regularity(6, 2), Err(Error::NotPrimePower { q: 6 })));
    }

    #[test]
    fn exceptional_examples() {
        assert!(is_exceptional_divisor(3, 8));
        assert!(!is_exceptional_divisor(3, 16));
        assert!(is_exceptional_divisor(7, 16));
        assert!(is_exceptional_divisor(7, 8));
        assert!(!is_exceptional_divisor(5, 8));
        assert!(!is_exceptional_divisor(7, 4));
    }

    #[test]
    fn completely_basic_examples() {
        assert!(!is_completely_basic(3, 8));
        assert!(is_completely_basic(2, 3));
        assert!(is_completely_basic(5, 1));
        assert!(!is_completely_basic_via_suborder(3, 8).unwrap());
        assert!(is_completely_basic_via_suborder(2, 3).unwrap());
    }

    #[test]
    fn profiles_of_small_pairs() {
        let p = profile(3, 8).unwrap();
        assert_eq!(p.set_e, vec![8]);
        assert_eq!(p.set_n(), vec![1, 2, 4]);
        assert_eq!((p.big_omega, p.big_omega_eps, p.big_omega_c), (3, 1, 6));
        assert_eq!(p.e, Some(3));
        let p = profile(3, 16).unwrap();
        assert_eq!(p.set_e, vec![8]);
        assert_eq!(p.set_n(), vec![1, 2, 4, 16]);
        assert_eq!(p.f_counts[&16], 4);
        assert_eq!(p.big_omega_c, 10);
        let p = profile(7, 24).unwrap();
        assert_eq!(p.set_n(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(p.set_e, vec![8, 24]);
        assert_eq!((p.big_omega, p.big_omega_eps, p.big_omega_c), (9, 3, 18));
        let p = profile(7, 16).unwrap();
        assert_eq!(p.f_eps_counts[&16], 2);
        assert_eq!(profile(2, 1).unwrap().e, None);
    }

    #[test]
    fn tau_32_follows_the_definition() {
        let p = profile(3, 32).unwrap();
        assert_eq!(p.tau[&32], 2);
        assert_eq!(p.f_counts[&32], 4);
        assert_eq!(p.big_omega_c, 14);
    }

    #[test]
    fn criterion_fixtures() {
        let r = sufficient_criterion(19, 8).unwrap();
        assert!(r.holds);
        assert_eq!(r.detail.omega, Some(6));
        assert_eq!(r.lhs_sqrt, Some(BigUint::from(130321u32)));
        let r = sufficient_criterion(3, 8).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rhs, BigUint::from(441u32));
        let r = sufficient_criterion(3, 16).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rhs, BigUint::from(31713u32));
        assert_eq!(sufficient_criterion(3, 3).unwrap_err(), Error::WrongParity(3));
    }

    #[test]
    fn weak_criterion_examples() {
        let w = weak_criterion(19, 16).unwrap();
        assert!(w.holds);
        assert_eq!((w.lhs_num, w.lhs_den), (13, 4));
        let w = weak_criterion(3, 24).unwrap();
        assert!(w.holds);
        assert_eq!((w.lhs_num, w.lhs_den), (17, 12));
        assert!(!weak_criterion(3, 16).unwrap().holds);
        assert!(!weak_criterion(7, 2).unwrap().holds);
    }

    #[test]
    fn omega_bound_constants() {
        let b = omega_upper_bound(3, 8, 64);
        assert_eq!(b.lambda.len(), 18);
        assert_eq!(b.floor_log2_l, 76);
        assert!(b.value >= 3.0);
        let u = 8.0 / 6.0 * 3f64.log2() + 16.0 / 3.0;
        assert!((b.value - u).abs() < 1e-9);
        assert!(b.integer_bound >= 3);
    }

    #[test]
    fn counts() {
        assert_eq!(count_cn(3, 8).unwrap(), BigUint::from(1536u32));
        assert_eq!(count_cn(3, 16).unwrap(), BigUint::from(6291456u32));
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            assert_eq!(count_cn(q, 1).unwrap(), BigUint::from(q - 1));
        }
    }

    #[test]
    fn pow2_comparison() {
        assert!(pow2_le_pow(13, 19, 4));
        assert!(!pow2_le_pow(13, 3, 4));
        assert!(pow2_le_pow(10, 1024, 1));
        assert!(!pow2_le_pow(11, 1024, 1));
        assert!(pow2_le_pow(40, 4, 20));
    }

    #[test]
    fn empty_scan() {
        #[allow(clippy::reversed_empty_ranges)]
        let r = scan_pairs(5..=4, 1..=8, ScanFilter::default(), CriterionOptions::default());
        assert!(r.unwrap().is_empty());
    }
}
