use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::nt::{divisors, valuation};

use super::{factor, Poly, PolyFactorization};

/// The k-th cyclotomic polynomial with coefficients reduced into `ctx`.
///
/// Computed over the prime field by dividing `x^k - 1` by the cyclotomic
/// polynomials of the proper divisors, then lifted.
pub fn cyclotomic_poly(k: u64, ctx: &Arc<FieldCtx>) -> Result<Poly> {
    assert!(k >= 1);
    let p = ctx.p();
    if k % p == 0 {
        return Err(Error::CharacteristicDividesK { p, k });
    }
    let fp = FieldCtx::prime(p)?;
    let divs = divisors(k);
    let mut table: Vec<(u64, Poly)> = Vec::with_capacity(divs.len());
    for &d in &divs {
        let mut phi = Poly::x_pow_minus_one(&fp, d as usize);
        for (e, pe) in &table {
            if d % e == 0 {
                phi = phi.div_exact(pe);
            }
        }
        table.push((d, phi));
    }
    let phi = &table.last().unwrap().1;
    Ok(Poly::from_prime_coeffs(ctx, &phi.prime_coeffs()))
}

/// Number of units of `F_Q[x]/(g)` for monic `g`.
pub fn poly_euler_phi(g: &Poly) -> Result<BigUint> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    let q = g.ctx().size();
    let fac = factor(g)?;
    Ok(fac
        .factors
        .iter()
        .map(|(h, e)| {
            let d = h.degree().unwrap() as u32;
            let qd = q.pow(d);
            (&qd - 1u32) * qd.pow(e - 1)
        })
        .product())
}

/// `(-1)^{number of irreducible factors}` on squarefree monic input, else 0.
pub fn poly_moebius(g: &Poly) -> Result<i8> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    let fac = factor(g)?;
    if fac.factors.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// `x^m - 1 = prod_{k | m'} Phi_k^{p^a}` over `ctx`, with `m = p^a m'`.
pub fn factor_xm_minus_1(ctx: &Arc<FieldCtx>, m: u64) -> PolyFactorization {
    let p = ctx.p();
    let a = valuation(m, p);
    let m_free = m / p.pow(a);
    let mult = p.pow(a) as u32;
    let mut factors = vec![];
    for k in divisors(m_free) {
        let phi = cyclotomic_poly(k, ctx).expect("k is coprime to p");
        let fac = factor(&phi).expect("nonzero");
        factors.extend(fac.factors.into_iter().map(|(h, e)| {
            debug_assert_eq!(e, 1);
            (h, mult)
        }));
    }
    factors.sort_by(|a, b| a.0.cmp_key(&b.0));
    PolyFactorization {
        input: Poly::x_pow_minus_one(ctx, m as usize),
        unit: ctx.one(),
        factors,
    }
}
