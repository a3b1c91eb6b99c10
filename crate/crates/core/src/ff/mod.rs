//! Prime and extension fields as quotients `F_p[x]/(modulus)`, with
//! Frobenius maps, subfield embeddings and primitivity testing.

mod embed;
mod linalg;

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nt::{self, Factorization};
use crate::poly::{self, Poly};

pub use embed::{embed_subfield, SubfieldEmbedding};
pub use linalg::FpMatrix;
pub(crate) use linalg::inv_mod;

/// Frobenius powers are tabulated as matrices up to this degree.
pub const FROBENIUS_TABLE_MAX_DEGREE: usize = 64;

/// Identifier of the default modulus policy, embedded in reports.
pub const MODULUS_POLICY: &str = "lex-min-monic-irreducible/v1";

/// An element of some [`FieldCtx`], stored as `m` residues mod `p` in the
/// polynomial basis (index `i` holds the coefficient of `x^i`).
///
/// Elements are ordered by their index `sum c_i p^i`, so the highest
/// coefficient is compared first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem(pub(crate) Vec<u32>);

impl FieldElem {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The field `F_{p^m}`.
pub struct FieldCtx {
    p: u64,
    m: usize,
    modulus: Vec<u32>,
    frob: OnceLock<Vec<FpMatrix>>,
    trace: OnceLock<Vec<u32>>,
    order_factors: OnceLock<Factorization>,
    primitive: OnceLock<FieldElem>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {}", self.p, self.m, self.modulus_text())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Builds `F_{p^m}`. Without an explicit modulus the lexicographically
/// smallest monic irreducible of degree `m` is used; for `m = 1` that is
/// `x` itself.
pub fn build_field(p: u64, m: usize, modulus: Option<&[u32]>) -> Result<Arc<FieldCtx>> {
    if !nt::is_prime_u64(p) || p >= 1 << 31 {
        return Err(Error::NotPrime(p));
    }
    assert!(m >= 1, "extension degree must be positive");
    let modulus = match modulus {
        Some(c) => {
            if c.len() != m + 1 || c[m] != 1 || c.iter().any(|&x| x as u64 >= p) {
                return Err(Error::BadModulus { expected: m });
            }
            let f = Poly::from_prime_coeffs(&FieldCtx::prime(p)?, c);
            if !poly::is_irreducible(&f) {
                return Err(Error::NotIrreducible);
            }
            c.to_vec()
        }
        None => poly::default_irreducible(p, m),
    };
    Ok(Arc::new(FieldCtx::raw(p, m, modulus)))
}

/// Same as [`build_field`] with the modulus given as a polynomial over `F_p`.
pub fn build_field_with(modulus: &Poly) -> Result<Arc<FieldCtx>> {
    let ctx = modulus.ctx();
    if !ctx.is_prime_field() {
        return Err(Error::MixedContext);
    }
    let m = modulus.degree().ok_or(Error::ZeroPolynomial)?;
    if m == 0 {
        return Err(Error::BadModulus { expected: 1 });
    }
    build_field(ctx.p(), m, Some(&modulus.prime_coeffs()))
}

impl FieldCtx {
    fn raw(p: u64, m: usize, modulus: Vec<u32>) -> Self {
        FieldCtx {
            p,
            m,
            modulus,
            frob: OnceLock::new(),
            trace: OnceLock::new(),
            order_factors: OnceLock::new(),
            primitive: OnceLock::new(),
        }
    }

    /// The prime field `F_p` (modulus `x`).
    pub fn prime(p: u64) -> Result<Arc<FieldCtx>> {
        if !nt::is_prime_u64(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        Ok(Arc::new(FieldCtx::raw(p, 1, vec![0, 1])))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Degree over the prime field.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    /// Modulus coefficients, constant term first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_poly(&self) -> Poly {
        let fp = FieldCtx::prime(self.p).expect("p is prime");
        Poly::from_prime_coeffs(&fp, &self.modulus)
    }

    pub fn modulus_text(&self) -> String {
        poly::format_prime_coeffs(&self.modulus, 'x')
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.p).pow(self.m as u32)
    }

    /// `p^m` when it fits in a word.
    pub fn size_u64(&self) -> Option<u64> {
        self.p.checked_pow(self.m as u32)
    }

    pub fn group_order(&self) -> BigUint {
        self.size() - 1u32
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.m])
    }

    pub fn one(&self) -> FieldElem {
        self.scalar(1)
    }

    /// Image of an integer under `Z -> F_p -> F_{p^m}`.
    pub fn scalar(&self, c: i64) -> FieldElem {
        let mut v = vec![0; self.m];
        v[0] = c.rem_euclid(self.p as i64) as u32;
        FieldElem(v)
    }

    /// The class of `x`. In the prime field this is `0`.
    pub fn gen(&self) -> FieldElem {
        let mut v = vec![0; self.m];
        if self.m > 1 {
            v[1] = 1;
        } else {
            v[0] = (self.p - self.modulus[0] as u64) as u32 % self.p as u32;
        }
        FieldElem(v)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() > self.m {
            return Err(Error::Parse(format!(
                "{} coefficients for a degree {} field",
                coeffs.len(),
                self.m
            )));
        }
        let mut v = vec![0; self.m];
        for (slot, &c) in v.iter_mut().zip(coeffs) {
            *slot = (c as u64 % self.p) as u32;
        }
        Ok(FieldElem(v))
    }

    /// Element with index `sum c_i p^i`.
    pub fn from_index(&self, mut idx: u64) -> FieldElem {
        let mut v = vec![0; self.m];
        for slot in v.iter_mut() {
            *slot = (idx % self.p) as u32;
            idx /= self.p;
        }
        FieldElem(v)
    }

    pub fn index(&self, z: &FieldElem) -> u64 {
        z.0.iter().rev().fold(0u64, |acc, &c| acc * self.p + c as u64)
    }

    /// All elements in index order. Panics if the field has 2^64 or more elements.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let size = self.size_u64().expect("field too large to enumerate");
        (0..size).map(move |i| self.from_index(i))
    }

    /// Advances `z` to the next element in index order; `false` on wraparound.
    pub fn increment(&self, z: &mut FieldElem) -> bool {
        for c in z.0.iter_mut() {
            *c += 1;
            if *c as u64 == self.p {
                *c = 0;
            } else {
                return true;
            }
        }
        false
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p as u32;
        FieldElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn add_assign(&self, a: &mut FieldElem, b: &FieldElem) {
        let p = self.p as u32;
        for (x, &y) in a.0.iter_mut().zip(&b.0) {
            let s = *x + y;
            *x = if s >= p { s - p } else { s };
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p as u32;
        FieldElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| if x >= y { x - y } else { x + p - y })
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.p as u32;
        FieldElem(a.0.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
    }

    pub fn scale(&self, a: &FieldElem, c: u32) -> FieldElem {
        let p = self.p;
        FieldElem(a.0.iter().map(|&x| (x as u64 * c as u64 % p) as u32).collect())
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let m = self.m;
        let p = self.p;
        if m == 1 {
            return FieldElem(vec![(a.0[0] as u64 * b.0[0] as u64 % p) as u32]);
        }
        let mut prod = vec![0u64; 2 * m - 1];
        let wide = p >= 1 << 16;
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                let t = x as u64 * y as u64;
                if wide {
                    prod[i + j] = (prod[i + j] + t) % p;
                } else {
                    prod[i + j] += t;
                }
            }
        }
        self.reduce(prod)
    }

    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// Reduces an unreduced product of length up to `2m - 1`.
    fn reduce(&self, mut prod: Vec<u64>) -> FieldElem {
        let m = self.m;
        let p = self.p;
        for c in prod.iter_mut() {
            *c %= p;
        }
        for i in (m..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            // x^i = x^{i-m} * x^m and x^m = -(lower terms of the modulus)
            for (j, &mj) in self.modulus[..m].iter().enumerate() {
                if mj != 0 {
                    let slot = &mut prod[i - m + j];
                    *slot = (*slot + (p - mj as u64) * c) % p;
                }
            }
        }
        prod.truncate(m);
        FieldElem(prod.into_iter().map(|c| c as u32).collect())
    }

    pub fn pow(&self, a: &FieldElem, e: u64) -> FieldElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &FieldElem, e: &BigUint) -> FieldElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.m == 1 {
            return Ok(FieldElem(vec![inv_mod(a.0[0] as u64, self.p) as u32]));
        }
        Ok(self.pow_big(a, &(self.size() - 2u32)))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn frob_tables(&self) -> Option<&[FpMatrix]> {
        if self.m > FROBENIUS_TABLE_MAX_DEGREE {
            return None;
        }
        Some(self.frob.get_or_init(|| {
            let xp = self.pow(&self.gen(), self.p);
            let mut cols = vec![];
            let mut cur = self.one();
            for _ in 0..self.m {
                cols.push(cur.0.clone());
                cur = self.mul(&cur, &xp);
            }
            let f1 = FpMatrix::from_columns(self.p, self.m, &cols);
            let mut out = vec![FpMatrix::identity(self.p, self.m)];
            for j in 1..self.m {
                let next = out[j - 1].mul(&f1);
                out.push(next);
            }
            out
        }))
    }

    /// Matrix of `z -> z^{p^e}` over `F_p`.
    pub fn frobenius_matrix(&self, e: usize) -> FpMatrix {
        let e = e % self.m;
        match self.frob_tables() {
            Some(t) => t[e].clone(),
            None => {
                let cols: Vec<Vec<u32>> = (0..self.m)
                    .map(|i| {
                        let mut v = vec![0; self.m];
                        v[i] = 1;
                        self.frobenius(&FieldElem(v), e).0
                    })
                    .collect();
                FpMatrix::from_columns(self.p, self.m, &cols)
            }
        }
    }

    /// `z^{p^e}`.
    pub fn frobenius(&self, z: &FieldElem, e: usize) -> FieldElem {
        let e = e % self.m;
        if e == 0 {
            return z.clone();
        }
        match self.frob_tables() {
            Some(t) => FieldElem(t[e].mul_vec(&z.0)),
            None => self.pow_big(z, &BigUint::from(self.p).pow(e as u32)),
        }
    }

    /// Matrix of `z -> c z` over `F_p`.
    pub fn mul_matrix(&self, c: &FieldElem) -> FpMatrix {
        let mut cols = vec![];
        let x = self.gen();
        let mut cur = c.clone();
        for _ in 0..self.m {
            cols.push(cur.0.clone());
            cur = self.mul(&cur, &x);
        }
        FpMatrix::from_columns(self.p, self.m, &cols)
    }

    fn trace_vector(&self) -> &[u32] {
        self.trace.get_or_init(|| {
            (0..self.m)
                .map(|i| {
                    let mut v = vec![0; self.m];
                    v[i] = 1;
                    let xi = FieldElem(v);
                    let mut acc = self.zero();
                    for j in 0..self.m {
                        acc = self.add(&acc, &self.frobenius(&xi, j));
                    }
                    debug_assert!(acc.0[1..].iter().all(|&c| c == 0));
                    acc.0[0]
                })
                .collect()
        })
    }

    /// Absolute trace to `F_p`.
    pub fn trace(&self, z: &FieldElem) -> u32 {
        let t = self.trace_vector();
        let s: u64 = z.0.iter().zip(t).map(|(&a, &b)| a as u64 * b as u64 % self.p).sum();
        (s % self.p) as u32
    }

    /// The coefficient vector `(Tr(u), Tr(u x), ..., Tr(u x^{m-1}))`, so that
    /// `Tr(u z)` is its dot product with `z`.
    pub fn trace_form(&self, u: &FieldElem) -> Vec<u32> {
        let x = self.gen();
        let mut cur = u.clone();
        let mut out = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            out.push(self.trace(&cur));
            cur = self.mul(&cur, &x);
        }
        out
    }

    /// Prime factorization of `p^m - 1`, computed once.
    pub fn order_factorization(&self) -> &Factorization {
        self.order_factors
            .get_or_init(|| nt::factorize(&self.group_order()))
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, z: &FieldElem) -> Result<BigUint> {
        if z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let f = self.order_factorization();
        let mut t = self.group_order();
        for (r, e) in &f.factors {
            for _ in 0..*e {
                let cand = &t / r;
                if self.pow_big(z, &cand) == self.one() {
                    t = cand;
                } else {
                    break;
                }
            }
        }
        Ok(t)
    }

    pub fn is_primitive(&self, z: &FieldElem) -> Result<bool> {
        if z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.group_order();
        let one = self.one();
        if n.is_one() {
            return Ok(*z == one);
        }
        Ok(self
            .order_factorization()
            .primes()
            .all(|r| self.pow_big(z, &(&n / r)) != one))
    }

    /// Index-smallest primitive element.
    pub fn primitive_element(&self) -> &FieldElem {
        self.primitive.get_or_init(|| {
            let mut z = self.one();
            loop {
                if !z.is_zero() && self.is_primitive(&z).unwrap() {
                    return z;
                }
                assert!(self.increment(&mut z), "no primitive element found");
            }
        })
    }

    /// `g^{(p^m - 1)/k}` for the index-smallest primitive element `g`.
    pub fn primitive_root_of_unity(&self, k: u64) -> Result<FieldElem> {
        let n = self.group_order();
        let kb = BigUint::from(k);
        if k == 0 || !(&n % &kb).is_zero() {
            return Err(Error::OrderUnavailable {
                k,
                field_size: self.size().to_string(),
            });
        }
        Ok(self.pow_big(self.primitive_element(), &(n / kb)))
    }

    /// Renders an element as a polynomial in `x`.
    pub fn format_elem(&self, z: &FieldElem) -> String {
        poly::format_prime_coeffs(&z.0, 'x')
    }

    /// Parses the polynomial text format and reduces modulo the modulus.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let coeffs = poly::parse_prime_coeffs(s, self.p)?;
        let x = self.gen();
        let mut z = self.zero();
        for &c in coeffs.iter().rev() {
            z = self.mul(&z, &x);
            z.0[0] = ((z.0[0] as u64 + c as u64) % self.p) as u32;
        }
        Ok(z)
    }
}
