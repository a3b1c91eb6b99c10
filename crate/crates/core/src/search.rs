//! Finding and certifying primitive completely normal elements.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::is_regular;
use crate::error::{Error, Result};
use crate::ff::{build_field, build_field_with, FieldCtx, FieldElem, FpMatrix, MODULUS_POLICY};
use crate::modstruct::ModuleFrame;
use crate::nt::{divisors, factorize, prime_power};
use crate::poly::{is_irreducible, Poly};

/// Label recorded when a certificate's field was built from a caller-supplied modulus.
pub const EXPLICIT_MODULUS: &str = "explicit";

const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum Strategy {
    /// Index order, first hit.
    Exhaustive,
    /// Uniform samples from a seeded stream.
    Random { seed: u64 },
    /// Complete generators of each `C_k` combined, then tested for primitivity.
    Sieved,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Random { .. } => "random",
            Strategy::Sieved => "sieved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveWitness {
    #[serde(with = "crate::dec")]
    pub prime: BigUint,
    /// `z^{(q^n - 1)/r}`, which must differ from 1.
    pub power: String,
}

/// Everything needed to re-verify that an element is a primitive completely
/// normal element of `F_{q^n}` over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcnCertificate {
    pub pair: (u64, u64),
    pub p: u64,
    pub modulus: String,
    pub modulus_policy: String,
    pub element: String,
    pub element_coeffs: Vec<u32>,
    pub primitive_witnesses: Vec<PrimitiveWitness>,
    /// `d -> Ord_{q^d}(z)`, each equal to `x^{n/d} - 1`.
    pub normality_orders: BTreeMap<u64, String>,
    /// Over `F_q`, in the default presentation of `F_q`.
    pub minimal_polynomial: String,
    pub found_by: String,
}

fn policy_of(big: &FieldCtx) -> String {
    let default = build_field(big.p(), big.m(), None).expect("valid characteristic");
    if default.modulus() == big.modulus() {
        MODULUS_POLICY.to_string()
    } else {
        EXPLICIT_MODULUS.to_string()
    }
}

fn witnesses(big: &FieldCtx, z: &FieldElem) -> Result<Vec<PrimitiveWitness>> {
    let n = big.group_order();
    let one = big.one();
    let mut out = vec![];
    for (r, _) in &factorize(&n).factors {
        let pw = big.pow_big(z, &(&n / r));
        if pw == one {
            return Err(Error::Certificate(format!("z^((q^n-1)/{r}) = 1")));
        }
        out.push(PrimitiveWitness {
            prime: r.clone(),
            power: big.format_elem(&pw),
        });
    }
    Ok(out)
}

fn normality_orders(frame: &ModuleFrame, z: &FieldElem) -> Result<BTreeMap<u64, String>> {
    let mut out = BTreeMap::new();
    for &d in frame.divisors() {
        let ord = frame.q_order(z, d)?;
        let full = Poly::x_pow_minus_one(frame.level(d)?.sub(), (frame.n() / d) as usize);
        if ord != full {
            return Err(Error::Certificate(format!("not normal over F_(q^{d})")));
        }
        out.insert(d, ord.to_string());
    }
    Ok(out)
}

/// `prod (x - sigma^i(z))` over the `n` conjugates, pulled back to `F_q`.
fn minimal_polynomial(frame: &ModuleFrame, z: &FieldElem) -> Result<Poly> {
    let big = frame.big();
    let mut f = Poly::one(big);
    let mut conj = z.clone();
    for _ in 0..frame.n() {
        f = f.mul(&Poly::from_coeffs(big, vec![big.neg(&conj), big.one()]));
        conj = frame.sigma(&conj, 1);
    }
    f.pullback(frame.level(1)?.embedding())
}

/// Certifies `z`, or reports the first property that fails.
pub fn certify(frame: &ModuleFrame, z: &FieldElem, found_by: &str) -> Result<PcnCertificate> {
    let big = frame.big();
    if z.is_zero() {
        return Err(Error::Certificate("zero element".into()));
    }
    let primitive_witnesses = witnesses(big, z)?;
    let normality_orders = normality_orders(frame, z)?;
    let minimal_polynomial = minimal_polynomial(frame, z)?;
    if !is_irreducible(&minimal_polynomial) {
        return Err(Error::Certificate("minimal polynomial is reducible".into()));
    }
    Ok(PcnCertificate {
        pair: (frame.q(), frame.n()),
        p: frame.p(),
        modulus: big.modulus_text(),
        modulus_policy: policy_of(big),
        element: big.format_elem(z),
        element_coeffs: z.coeffs().to_vec(),
        primitive_witnesses,
        normality_orders,
        minimal_polynomial: minimal_polynomial.to_string(),
        found_by: found_by.to_string(),
    })
}

fn is_pcn(frame: &ModuleFrame, z: &FieldElem) -> bool {
    !z.is_zero() && frame.is_completely_normal(z) && frame.big().is_primitive(z).unwrap_or(false)
}

fn too_large(size: BigUint, budget: u64) -> Result<u64> {
    if size > BigUint::from(budget) {
        return Err(Error::TooLarge {
            size: size.to_string(),
            budget,
        });
    }
    Ok(u64::try_from(size).expect("bounded by the budget"))
}

/// Finds and certifies a primitive completely normal element of `F_{q^n}`
/// in the default field. `budget` bounds the enumeration (exhaustive), the
/// number of samples (random) or the module sizes and combinations tried
/// (sieved).
pub fn find_pcn(q: u64, n: u64, strategy: Strategy, budget: u64) -> Result<PcnCertificate> {
    let frame = ModuleFrame::new(q, n)?;
    find_pcn_in(&frame, strategy, budget)
}

pub fn find_pcn_in(frame: &ModuleFrame, strategy: Strategy, budget: u64) -> Result<PcnCertificate> {
    let z = match strategy {
        Strategy::Exhaustive => exhaustive(frame, budget)?,
        Strategy::Random { seed } => random(frame, seed, budget)?,
        Strategy::Sieved if is_regular(frame.q(), frame.n()) => sieved(frame, budget)?,
        // the module tests assume a regular pair
        Strategy::Sieved => exhaustive(frame, budget)?,
    };
    let label = match strategy {
        Strategy::Random { seed } => format!("random(seed={seed})"),
        s => s.name().to_string(),
    };
    certify(frame, &z, &label)
}

fn exhaustive(frame: &ModuleFrame, budget: u64) -> Result<FieldElem> {
    let big = frame.big();
    let size = too_large(big.size(), budget)?;
    (1..size)
        .into_par_iter()
        .map(|i| big.from_index(i))
        .find_first(|z| is_pcn(frame, z))
        .ok_or(Error::ExhaustedNoneFound)
}

fn random(frame: &ModuleFrame, seed: u64, budget: u64) -> Result<FieldElem> {
    let big = frame.big();
    let p = big.p() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left = budget;
    while left > 0 {
        let take = left.min(BATCH as u64);
        left -= take;
        let batch: Vec<FieldElem> = (0..take)
            .map(|_| FieldElem((0..big.m()).map(|_| rng.gen_range(0..p)).collect()))
            .collect();
        if let Some(z) = batch.into_par_iter().find_first(|z| is_pcn(frame, z)) {
            return Ok(z);
        }
    }
    Err(Error::ExhaustedNoneFound)
}

fn sieved(frame: &ModuleFrame, budget: u64) -> Result<FieldElem> {
    let big = frame.big();
    let lists = divisors(frame.n_prime())
        .into_iter()
        .map(|k| frame.module_generators(k, budget))
        .collect::<Result<Vec<_>>>()?;
    if lists.iter().any(|l| l.is_empty()) {
        return Err(Error::ExhaustedNoneFound);
    }
    let total = lists
        .iter()
        .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.len()));
    let combine = |mut idx: u64| {
        let mut z = big.zero();
        for l in &lists {
            let len = l.len() as u64;
            big.add_assign(&mut z, &l[(idx % len) as usize]);
            idx /= len;
        }
        z
    };
    let limit = u64::try_from(total.clone()).unwrap_or(u64::MAX).min(budget);
    let mut start = 0u64;
    while start < limit {
        let end = limit.min(start + BATCH as u64);
        // complete normality holds by construction; only primitivity is open
        if let Some(z) = (start..end)
            .into_par_iter()
            .map(combine)
            .find_first(|z| big.is_primitive(z).unwrap_or(false))
        {
            return Ok(z);
        }
        start = end;
    }
    if BigUint::from(limit) < total {
        return Err(Error::TooLarge {
            size: total.to_string(),
            budget,
        });
    }
    Err(Error::ExhaustedNoneFound)
}

/// Indices of every primitive completely normal element of the default field.
pub fn pcn_indices(q: u64, n: u64, budget: u64) -> Result<Vec<u64>> {
    let frame = ModuleFrame::new(q, n)?;
    let big = frame.big();
    let size = too_large(big.size(), budget)?;
    Ok((1..size)
        .into_par_iter()
        .filter(|&i| is_pcn(&frame, &big.from_index(i)))
        .collect())
}

/// Frame for `F_{q^n}` presented as `F_p[x]/(poly)`, so that `x` is a root.
fn frame_for_poly(poly: &Poly, q: u64) -> Result<ModuleFrame> {
    if !poly.ctx().is_prime_field() {
        return Err(Error::MixedContext);
    }
    if !poly.is_monic() || poly.degree().unwrap_or(0) == 0 {
        return Err(Error::NotMonic);
    }
    if !is_irreducible(poly) {
        return Err(Error::Reducible);
    }
    let (p, a) = prime_power(q)?;
    let m = poly.degree().expect("nonzero");
    if p != poly.ctx().p() || m % a as usize != 0 {
        return Err(Error::BadModulus { expected: m });
    }
    ModuleFrame::with_field(q, build_field_with(poly)?)
}

/// Whether the roots of `poly` (over `F_p`) are primitive and completely
/// normal over `F_q`.
pub fn verify_pcn_poly(poly: &Poly, q: u64) -> Result<bool> {
    let frame = frame_for_poly(poly, q)?;
    Ok(is_pcn(&frame, &frame.big().gen()))
}

pub fn certify_poly(poly: &Poly, q: u64) -> Result<Option<PcnCertificate>> {
    let frame = frame_for_poly(poly, q)?;
    let z = frame.big().gen();
    if !is_pcn(&frame, &z) {
        return Ok(None);
    }
    certify(&frame, &z, "polynomial").map(Some)
}

/// Re-verifies a certificate from its text alone.
pub fn recheck(cert: &PcnCertificate) -> Result<()> {
    let fail = |s: &str| Err(Error::Certificate(s.to_string()));
    let (q, n) = cert.pair;
    let (p, _) = prime_power(q)?;
    if p != cert.p {
        return fail("characteristic does not match q");
    }
    let modulus = Poly::parse(&FieldCtx::prime(p)?, &cert.modulus)?;
    let frame = ModuleFrame::with_field(q, build_field_with(&modulus)?)?;
    let big: Arc<FieldCtx> = frame.big().clone();
    let z = big.parse_elem(&cert.element)?;
    if z.coeffs() != cert.element_coeffs.as_slice() {
        return fail("element text and coefficients disagree");
    }
    if z.is_zero() {
        return fail("zero element");
    }

    let order = big.group_order();
    let primes: Vec<BigUint> = factorize(&order).factors.into_iter().map(|(r, _)| r).collect();
    let listed: Vec<&BigUint> = cert.primitive_witnesses.iter().map(|w| &w.prime).collect();
    if listed != primes.iter().collect::<Vec<_>>() {
        return fail("witness primes are not the prime divisors of q^n - 1");
    }
    for w in &cert.primitive_witnesses {
        let pw = big.pow_big(&z, &(&order / &w.prime));
        if pw == big.one() || big.format_elem(&pw) != w.power {
            return fail(&format!("witness for {} does not hold", w.prime));
        }
    }

    let expected: Vec<u64> = divisors(n);
    if cert.normality_orders.keys().copied().collect::<Vec<_>>() != expected {
        return fail("normality orders do not cover every divisor of n");
    }
    for (&d, text) in &cert.normality_orders {
        let ord = frame.q_order(&z, d)?;
        let full = Poly::x_pow_minus_one(frame.level(d)?.sub(), (n / d) as usize);
        if ord != full || ord.to_string() != *text {
            return fail(&format!("not normal over F_(q^{d})"));
        }
    }

    let f = minimal_polynomial(&frame, &z)?;
    if f.to_string() != cert.minimal_polynomial || f.degree() != Some(n as usize) {
        return fail("minimal polynomial mismatch");
    }
    if !is_irreducible(&f) {
        return fail("minimal polynomial is reducible");
    }
    if !f.map_coefficients(frame.level(1)?.embedding())?.eval(&z).is_zero() {
        return fail("element is not a root of its minimal polynomial");
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentCheck {
    pub claim: String,
    pub element: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Construction {
    pub certificate: PcnCertificate,
    pub components: Vec<ComponentCheck>,
}

/// `z` lies in `F_{q^e}` and its `e` conjugates there are independent over `F_q`.
fn normal_in_subfield(frame: &ModuleFrame, z: &FieldElem, e: u64) -> Result<bool> {
    let big = frame.big();
    if frame.sigma(z, e) != *z {
        return Ok(false);
    }
    let fq = frame.level(1)?;
    let mut cols = vec![];
    let mut conj = z.clone();
    for _ in 0..e {
        let mut c = fq.sub().one();
        for _ in 0..fq.sub().m() {
            cols.push(big.mul(&fq.embedding().map(&c), &conj).coeffs().to_vec());
            c = fq.sub().mul(&c, &fq.sub().gen());
        }
        conj = frame.sigma(&conj, 1);
    }
    let rank = FpMatrix::from_columns(big.p(), big.m(), &cols).rank();
    Ok(rank == cols.len())
}

/// The explicit elements for `(3, 8)` and `(3, 16)`: `v = zeta^4 + zeta^2 +
/// (zeta + zeta^3)` with `zeta^8 + zeta^4 = 1`, and for `n = 16` also
/// `u = eta + eta^3 + eta^5 + eta^7` with `eta^16 + eta^8 = 1`, `zeta = eta^2`.
pub fn construct_explicit(q: u64, n: u64) -> Result<Construction> {
    let modulus = match (q, n) {
        (3, 8) => "x^8+x^4-1",
        (3, 16) => "x^16+x^8-1",
        _ => return Err(Error::UnsupportedPair { q, n }),
    };
    let frame = ModuleFrame::with_field(q, build_field_with(&Poly::parse(&FieldCtx::prime(3)?, modulus)?)?)?;
    let big = frame.big().clone();
    let root = big.gen();
    let zeta = if n == 8 { root.clone() } else { big.square(&root) };
    let pw = |e: u64| big.pow(&zeta, e);
    let w8 = big.add(&zeta, &pw(3));
    let v = big.add(&big.add(&pw(4), &pw(2)), &w8);

    let show = |z: &FieldElem| big.format_elem(z);
    let mut components = vec![
        ComponentCheck {
            claim: "zeta^4 is normal in F_9 over F_3".into(),
            element: show(&pw(4)),
            holds: normal_in_subfield(&frame, &pw(4), 2)?,
        },
        ComponentCheck {
            claim: "zeta^2 is a complete generator of C_4".into(),
            element: show(&pw(2)),
            holds: frame.is_complete_generator(&pw(2), 4)?,
        },
        ComponentCheck {
            claim: "zeta+zeta^3 is a complete generator of C_8".into(),
            element: show(&w8),
            holds: frame.is_complete_generator(&w8, 8)?,
        },
    ];
    let z = if n == 8 {
        v
    } else {
        let u = [1u64, 3, 5, 7]
            .iter()
            .fold(big.zero(), |acc, &e| big.add(&acc, &big.pow(&root, e)));
        components.push(ComponentCheck {
            claim: "eta+eta^3+eta^5+eta^7 is a complete generator of C_16".into(),
            element: show(&u),
            holds: frame.is_complete_generator(&u, 16)?,
        });
        big.add(&v, &u)
    };
    let certificate = certify(&frame, &z, "construction")?;
    Ok(Construction {
        certificate,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_extension() {
        let c = find_pcn(2, 1, Strategy::Exhaustive, 1 << 10).unwrap();
        assert_eq!(c.element, "1");
        recheck(&c).unwrap();
    }

    #[test]
    fn tampered_certificates_fail() {
        let c = find_pcn(3, 4, Strategy::Exhaustive, 1 << 10).unwrap();
        recheck(&c).unwrap();
        let mut bad = c.clone();
        bad.element = "1".into();
        bad.element_coeffs = vec![1, 0, 0, 0];
        assert!(recheck(&bad).is_err());
        let mut bad = c.clone();
        bad.primitive_witnesses.pop();
        assert!(recheck(&bad).is_err());
        let mut bad = c;
        bad.normality_orders.remove(&2);
        assert!(recheck(&bad).is_err());
    }
}
