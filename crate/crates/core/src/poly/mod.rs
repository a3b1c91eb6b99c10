//! Dense univariate polynomials over a [`FieldCtx`].

mod cyclo;
mod factor;
mod text;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem, SubfieldEmbedding};

pub use cyclo::{cyclotomic_poly, factor_xm_minus_1, poly_euler_phi, poly_moebius};
pub use factor::{
    default_irreducible, factor, factor_seeded, is_irreducible, roots, squarefree_decomposition,
    PolyFactorization, FACTOR_SEED,
};
pub use text::{format_prime_coeffs, parse_prime_coeffs};

/// Coefficients are stored constant term first with no trailing zeros, so
/// the zero polynomial has an empty vector and no degree.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FieldElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('x'))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('x'))
    }
}

fn same_ctx(a: &Arc<FieldCtx>, b: &Arc<FieldCtx>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Poly {
    pub fn from_coeffs(ctx: &Arc<FieldCtx>, coeffs: Vec<FieldElem>) -> Poly {
        let mut p = Poly {
            ctx: ctx.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    /// Lifts residues mod `p` (constant term first) into `ctx`.
    pub fn from_prime_coeffs(ctx: &Arc<FieldCtx>, coeffs: &[u32]) -> Poly {
        let p = ctx.p() as i64;
        Poly::from_coeffs(
            ctx,
            coeffs.iter().map(|&c| ctx.scalar(c as i64 % p)).collect(),
        )
    }

    /// Parses the text format over the prime field of `ctx`.
    pub fn parse(ctx: &Arc<FieldCtx>, s: &str) -> Result<Poly> {
        Ok(Poly::from_prime_coeffs(ctx, &parse_prime_coeffs(s, ctx.p())?))
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Poly {
        Poly {
            ctx: ctx.clone(),
            coeffs: vec![],
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::constant(ctx, ctx.one())
    }

    pub fn x(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::monomial(ctx, ctx.one(), 1)
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FieldElem) -> Poly {
        Poly::from_coeffs(ctx, vec![c])
    }

    pub fn monomial(ctx: &Arc<FieldCtx>, c: FieldElem, deg: usize) -> Poly {
        let mut v = vec![ctx.zero(); deg + 1];
        v[deg] = c;
        Poly::from_coeffs(ctx, v)
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(ctx: &Arc<FieldCtx>, n: usize) -> Poly {
        let mut v = vec![ctx.zero(); n + 1];
        v[n] = ctx.one();
        v[0] = ctx.add(&v[0], &ctx.scalar(-1));
        Poly::from_coeffs(ctx, v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.ctx.one()
    }

    pub fn lc(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_some_and(|c| *c == self.ctx.one())
    }

    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.ctx.inv(lc).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Coefficients as residues mod `p`; panics unless all lie in `F_p`.
    pub fn prime_coeffs(&self) -> Vec<u32> {
        self.coeffs
            .iter()
            .map(|c| {
                assert!(c.0[1..].iter().all(|&x| x == 0), "coefficient outside F_p");
                c.0[0]
            })
            .collect()
    }

    pub fn to_text(&self, var: char) -> String {
        if self.ctx.is_prime_field() {
            return format_prime_coeffs(&self.prime_coeffs(), var);
        }
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = format!("({})", format_prime_coeffs(&c.0, 'a'));
            parts.push(match i {
                0 => coef,
                1 => format!("{coef}*{var}"),
                _ => format!("{coef}*{var}^{i}"),
            });
        }
        parts.join("+")
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::MixedContext)
        }
    }

    fn expect_same(&self, other: &Poly) {
        assert!(
            same_ctx(&self.ctx, &other.ctx),
            "polynomials over different coefficient fields"
        );
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    pub fn checked_divrem(&self, other: &Poly) -> Result<(Poly, Poly)> {
        self.check(other)?;
        self.divrem(other)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.expect_same(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => self.ctx.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(&self.ctx, v)
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(
            &self.ctx,
            self.coeffs.iter().map(|c| self.ctx.neg(c)).collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        Poly::from_coeffs(
            &self.ctx,
            self.coeffs.iter().map(|a| self.ctx.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.expect_same(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let ctx = &self.ctx;
        let mut v = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = ctx.mul(a, b);
                ctx.add_assign(&mut v[i + j], &t);
            }
        }
        Poly::from_coeffs(ctx, v)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division; the divisor need not be monic.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.expect_same(d);
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let ctx = &self.ctx;
        let Some(sd) = self.degree() else {
            return Ok((Poly::zero(ctx), Poly::zero(ctx)));
        };
        if sd < dd {
            return Ok((Poly::zero(ctx), self.clone()));
        }
        let lc_inv = ctx.inv(d.lc().unwrap())?;
        let monic = lc_inv == ctx.one();
        let mut r = self.coeffs.clone();
        let mut q = vec![ctx.zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let top = &r[i + dd];
            if top.is_zero() {
                continue;
            }
            let c = if monic { top.clone() } else { ctx.mul(top, &lc_inv) };
            for (j, dj) in d.coeffs.iter().enumerate() {
                if dj.is_zero() {
                    continue;
                }
                let t = ctx.mul(&c, dj);
                r[i + j] = ctx.sub(&r[i + j], &t);
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Poly::from_coeffs(ctx, q), Poly::from_coeffs(ctx, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Quotient of an exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d).expect("nonzero divisor");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.expect_same(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        self.expect_same(other);
        let ctx = &self.ctx;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(ctx), Poly::zero(ctx));
        let (mut t0, mut t1) = (Poly::zero(ctx), Poly::one(ctx));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lc().cloned() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = ctx.inv(&lc).unwrap();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m)
    }

    /// `self^e mod m`.
    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let base = self.rem(m);
        let mut acc = Poly::one(&self.ctx).rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn eval(&self, z: &FieldElem) -> FieldElem {
        let ctx = &self.ctx;
        self.coeffs
            .iter()
            .rev()
            .fold(ctx.zero(), |acc, c| ctx.add(&ctx.mul(&acc, z), c))
    }

    pub fn derivative(&self) -> Poly {
        let ctx = &self.ctx;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| ctx.scale(c, (i as u64 % ctx.p()) as u32))
            .collect();
        Poly::from_coeffs(ctx, v)
    }

    /// `self(x^k)`.
    pub fn compose_x_power(&self, k: usize) -> Poly {
        let ctx = &self.ctx;
        let Some(d) = self.degree() else {
            return self.clone();
        };
        let mut v = vec![ctx.zero(); d * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Poly::from_coeffs(ctx, v)
    }

    /// Monic reciprocal `x^deg * self(1/x)`, normalized; requires `self(0) != 0`.
    pub fn reciprocal(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::from_coeffs(&self.ctx, v).monic()
    }

    /// Pushes coefficients through `emb` into its big field.
    pub fn map_coefficients(&self, emb: &SubfieldEmbedding) -> Result<Poly> {
        if !same_ctx(&self.ctx, emb.sub()) {
            return Err(Error::MixedContext);
        }
        Ok(Poly::from_coeffs(
            emb.big(),
            self.coeffs.iter().map(|c| emb.map(c)).collect(),
        ))
    }

    /// Pulls coefficients back along `emb`; fails if some coefficient is
    /// outside the subfield.
    pub fn pullback(&self, emb: &SubfieldEmbedding) -> Result<Poly> {
        if !same_ctx(&self.ctx, emb.big()) {
            return Err(Error::MixedContext);
        }
        let v = self
            .coeffs
            .iter()
            .map(|c| emb.preimage(c).ok_or(Error::MixedContext))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(emb.sub(), v))
    }

    /// Order by degree, then coefficients from the top down.
    pub fn cmp_key(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;

    fn f3() -> Arc<FieldCtx> {
        FieldCtx::prime(3).unwrap()
    }

    #[test]
    fn arithmetic_and_text() {
        let k = f3();
        let a = Poly::parse(&k, "x^2+1").unwrap();
        let b = Poly::parse(&k, "x-1").unwrap();
        assert_eq!(a.mul(&b).to_text('x'), "x^3+2*x^2+x+2");
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert_eq!(r.to_text('x'), "2");
        assert_eq!(Poly::zero(&k).degree(), None);
        assert_eq!(Poly::zero(&k).to_text('x'), "0");
    }

    #[test]
    fn gcd_and_xgcd() {
        let k = f3();
        let a = Poly::parse(&k, "x^2-1").unwrap();
        let b = Poly::parse(&k, "x^2+x-2").unwrap();
        let g = a.gcd(&b);
        assert_eq!(g.to_text('x'), "x+2");
        let (g2, s, t) = a.xgcd(&b);
        assert_eq!(g2, g);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn mixed_contexts_are_rejected() {
        let a = Poly::one(&f3());
        let b = Poly::one(&build_field(3, 2, None).unwrap());
        assert_eq!(a.checked_add(&b).unwrap_err(), Error::MixedContext);
        assert_eq!(a.checked_mul(&b).unwrap_err(), Error::MixedContext);
    }

    #[test]
    fn coefficient_transport() {
        let big = build_field(3, 4, None).unwrap();
        let emb = crate::ff::embed_subfield(&big, 2).unwrap();
        let sub = emb.sub().clone();
        let f = Poly::from_coeffs(&sub, vec![sub.gen(), sub.one(), sub.scalar(2)]);
        let g = f.map_coefficients(&emb).unwrap();
        assert_eq!(g.pullback(&emb).unwrap(), f);
        let h = Poly::from_coeffs(&big, vec![big.gen(), big.one()]);
        assert!(h.pullback(&emb).is_err());
    }
}
