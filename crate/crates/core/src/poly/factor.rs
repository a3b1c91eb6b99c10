//! Squarefree, distinct-degree and equal-degree factorization.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::nt::factorize_u64;

use super::Poly;

/// Seed for the equal-degree splitting step.
pub const FACTOR_SEED: u64 = 0x00c0_ffee;

/// `unit * prod f_i^{e_i}` with monic irreducible `f_i`, sorted by degree
/// and then coefficients from the top down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactorization {
    pub input: Poly,
    pub unit: FieldElem,
    pub factors: Vec<(Poly, u32)>,
}

impl PolyFactorization {
    pub fn product(&self) -> Poly {
        let ctx = self.input.ctx();
        self.factors
            .iter()
            .fold(Poly::constant(ctx, self.unit.clone()), |acc, (f, e)| {
                acc.mul(&f.pow(*e as u64))
            })
    }

    pub fn distinct(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|(f, _)| f)
    }
}

fn sort_factors(v: &mut [(Poly, u32)]) {
    v.sort_by(|a, b| a.0.cmp_key(&b.0));
}

/// `c` with `c^p = a`, which is `a^{p^{m-1}}` in `F_{p^m}`.
fn pth_root(ctx: &FieldCtx, a: &FieldElem) -> FieldElem {
    ctx.frobenius(a, ctx.m() - 1)
}

/// Splits a monic `f` into `(g_i, e_i)` with pairwise coprime squarefree
/// `g_i` and `f = prod g_i^{e_i}`.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    assert!(f.is_monic(), "squarefree decomposition needs a monic input");
    let ctx = f.ctx().clone();
    let p = ctx.p() as usize;
    let mut out = vec![];
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if !c.is_one() {
        // c is a polynomial in x^p
        let deg = c.degree().unwrap();
        let v = (0..=deg / p).map(|j| pth_root(&ctx, &c.coeff(j * p))).collect();
        let root = Poly::from_coeffs(&ctx, v);
        for (g, e) in squarefree_decomposition(&root) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// `h^Q mod f` where `Q` is the size of the coefficient field.
fn frobenius_mod(h: &Poly, f: &Poly) -> Poly {
    h.powmod(&h.ctx().size(), f)
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let ctx = f.ctx().clone();
    let x = Poly::x(&ctx);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = vec![];
    let mut i = 0;
    while let Some(d) = rest.degree() {
        i += 1;
        if d < 2 * i {
            if d > 0 {
                out.push((rest.clone(), d));
            }
            break;
        }
        h = frobenius_mod(&h, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
    }
    out
}

fn random_poly(ctx: &Arc<FieldCtx>, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    let p = ctx.p();
    let v = (0..deg)
        .map(|_| {
            let c: Vec<u32> = (0..ctx.m()).map(|_| rng.gen_range(0..p) as u32).collect();
            ctx.from_coeffs(&c).unwrap()
        })
        .collect();
    Poly::from_coeffs(ctx, v)
}

/// Splits a monic squarefree `f` whose irreducible factors all have degree `d`.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = f.degree().unwrap();
    if n == d {
        out.push(f.clone());
        return;
    }
    let ctx = f.ctx().clone();
    let qd = ctx.size().pow(d as u32);
    loop {
        let a = random_poly(&ctx, n, rng);
        if a.degree().map_or(true, |k| k == 0) {
            continue;
        }
        let b = if ctx.p() == 2 {
            // absolute trace from F_{2^{md}} down to F_2
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..ctx.m() * d {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e: BigUint = (qd.clone() - 1u32) >> 1;
            a.powmod(&e, f).sub(&Poly::one(&ctx))
        };
        let g = b.gcd(f);
        if let Some(k) = g.degree() {
            if k > 0 && k < n {
                let h = f.div_exact(&g);
                equal_degree(&g, d, rng, out);
                equal_degree(&h, d, rng, out);
                return;
            }
        }
    }
}

pub fn factor(f: &Poly) -> Result<PolyFactorization> {
    factor_seeded(f, FACTOR_SEED)
}

/// Full factorization; the seed only affects running time, never the output.
pub fn factor_seeded(f: &Poly, seed: u64) -> Result<PolyFactorization> {
    let unit = f.lc().cloned().ok_or(Error::ZeroPolynomial)?;
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = vec![];
    for (g, e) in squarefree_decomposition(&monic) {
        for (h, d) in distinct_degree(&g) {
            let mut parts = vec![];
            equal_degree(&h, d, &mut rng, &mut parts);
            factors.extend(parts.into_iter().map(|p| (p, e)));
        }
    }
    sort_factors(&mut factors);
    Ok(PolyFactorization {
        input: f.clone(),
        unit,
        factors,
    })
}

/// Rabin's test.
pub fn is_irreducible(f: &Poly) -> bool {
    let Some(n) = f.degree() else {
        return false;
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let f = f.monic();
    let x = Poly::x(f.ctx());
    // x^{Q^j} mod f for j = 0..=n
    let mut powers = vec![x.rem(&f)];
    for j in 1..=n {
        let next = frobenius_mod(&powers[j - 1], &f);
        powers.push(next);
    }
    if powers[n] != x.rem(&f) {
        return false;
    }
    factorize_u64(n as u64)
        .iter()
        .all(|&(r, _)| powers[n / r as usize].sub(&x).gcd(&f).is_one())
}

/// Distinct roots in the coefficient field, ascending.
pub fn roots(f: &Poly) -> Vec<FieldElem> {
    if f.degree().map_or(true, |d| d == 0) {
        return vec![];
    }
    let ctx = f.ctx().clone();
    let monic = f.monic();
    let x = Poly::x(&ctx);
    let split = frobenius_mod(&x, &monic).sub(&x).gcd(&monic);
    if split.degree() == Some(0) {
        return vec![];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    let mut lin = vec![];
    equal_degree(&split, 1, &mut rng, &mut lin);
    let mut out: Vec<FieldElem> = lin.iter().map(|l| ctx.neg(&l.coeff(0))).collect();
    out.sort();
    out
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// comparing `(c_{m-1}, ..., c_0)` with the constant term last.
pub fn default_irreducible(p: u64, m: usize) -> Vec<u32> {
    let fp = FieldCtx::prime(p).expect("p is prime");
    let mut lower = vec![0u32; m];
    loop {
        let ok = m == 1 || lower[0] != 0;
        if ok {
            let mut c = lower.clone();
            c.push(1);
            if is_irreducible(&Poly::from_prime_coeffs(&fp, &c)) {
                return c;
            }
        }
        // increment with the constant term least significant
        let mut i = 0;
        loop {
            assert!(i < m, "ran out of candidates");
            lower[i] += 1;
            if lower[i] as u64 == p {
                lower[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;
    use proptest::prelude::*;

    fn f3() -> Arc<FieldCtx> {
        FieldCtx::prime(3).unwrap()
    }

    #[test]
    fn x_squared_minus_one() {
        let f = Poly::parse(&f3(), "x^2-1").unwrap();
        let fac = factor(&f).unwrap();
        let texts: Vec<String> = fac.distinct().map(|g| g.to_string()).collect();
        assert_eq!(texts, vec!["x+1", "x+2"]);
    }

    #[test]
    fn repeated_factors_and_pth_powers() {
        let k = f3();
        let f = Poly::parse(&k, "x-1").unwrap().pow(3).mul(&Poly::parse(&k, "x^2+1").unwrap().pow(2));
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.factors[0].1, 3);
        assert_eq!(fac.factors[1].1, 2);
        assert_eq!(fac.product(), f);
    }

    #[test]
    fn morgan_mullen_octic_is_irreducible() {
        let k = f3();
        assert!(is_irreducible(&Poly::parse(&k, "x^8+x^7+2x^3+2x^2+2").unwrap()));
        assert!(!is_irreducible(&Poly::parse(&k, "x^8-1").unwrap()));
        assert!(!is_irreducible(&Poly::parse(&k, "x^4+1").unwrap()));
    }

    #[test]
    fn default_irreducibles() {
        assert_eq!(default_irreducible(3, 1), vec![0, 1]);
        assert_eq!(default_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(default_irreducible(3, 2), vec![1, 0, 1]);
    }

    #[test]
    fn roots_over_extension() {
        let f9 = build_field(3, 2, None).unwrap();
        let f = Poly::parse(&f9, "x^2+1").unwrap();
        let r = roots(&f);
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!(f.eval(z).is_zero());
        }
        let g = Poly::parse(&f9, "x^3-x+1").unwrap();
        assert!(roots(&g).is_empty());
    }

    #[test]
    fn characteristic_two() {
        let f2 = FieldCtx::prime(2).unwrap();
        let f = Poly::parse(&f2, "x^15-1").unwrap();
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors.len(), 5);
        assert_eq!(fac.product(), f);
        let f4 = build_field(2, 2, None).unwrap();
        let g = Poly::parse(&f4, "x^3-1").unwrap();
        assert_eq!(factor(&g).unwrap().factors.len(), 3);
    }

    fn check_factorization(ctx: &Arc<FieldCtx>, idx: &[u64]) -> std::result::Result<(), TestCaseError> {
        let size = ctx.size_u64().unwrap();
        let coeffs: Vec<FieldElem> = idx.iter().map(|&i| ctx.from_index(i % size)).collect();
        let f = Poly::from_coeffs(ctx, coeffs);
        if f.is_zero() {
            return Ok(());
        }
        let fac = factor(&f).unwrap();
        prop_assert_eq!(fac.product(), f);
        for (g, _) in &fac.factors {
            prop_assert!(g.is_monic());
            prop_assert!(is_irreducible(g));
        }
        for w in fac.factors.windows(2) {
            prop_assert!(w[0].0.cmp_key(&w[1].0).is_lt());
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn refactors_over_f3(idx in proptest::collection::vec(0u64..3, 1..18)) {
            check_factorization(&f3(), &idx)?;
        }

        #[test]
        fn refactors_over_f9(idx in proptest::collection::vec(0u64..9, 1..18)) {
            check_factorization(&build_field(3, 2, None).unwrap(), &idx)?;
        }

        #[test]
        fn refactors_over_f49(idx in proptest::collection::vec(0u64..49, 1..18)) {
            check_factorization(&build_field(7, 2, None).unwrap(), &idx)?;
        }
    }
}
