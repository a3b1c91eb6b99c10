//! `F_{q^n}` as a module over `F_{q^d}[x]`, with `x` acting as `sigma^d`.
//!
//! Everything lives in one ambient field. Polynomials over `F_{q^d}` act
//! through the subfield embedding of that level, and every operator is
//! materialized as an `F_p`-matrix on the coordinate vectors.

mod census;

use std::sync::{Arc, OnceLock};

use crate::classify::is_exceptional_divisor;
use crate::error::{Error, Result};
use crate::ff::{build_field, embed_subfield, FieldCtx, FieldElem, FpMatrix, SubfieldEmbedding};
use crate::nt::{divisors, prime_power, radical, subord_profile, valuation};
use crate::poly::{cyclotomic_poly, factor, factor_xm_minus_1, Poly};

pub use census::{
    cn_census, decomposition_equivalence, mixed_order_check, module_censuses, CensusReport,
    LatticeCensus, LatticeLabel, ModuleCensus, DEFAULT_ENUMERATION_BUDGET,
};

/// The data attached to one divisor `d` of `n`.
pub struct Level {
    d: u64,
    emb: SubfieldEmbedding,
    factors: Vec<(Poly, u32)>,
    // (F / h^e)(S), h(S) and (F / h)(S) for F = x^{n/d} - 1, S = sigma^d
    coprime: Vec<FpMatrix>,
    step: Vec<FpMatrix>,
    normal: Vec<FpMatrix>,
}

impl Level {
    pub fn d(&self) -> u64 {
        self.d
    }

    /// `F_{q^d}`.
    pub fn sub(&self) -> &Arc<FieldCtx> {
        self.emb.sub()
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.emb
    }

    /// Irreducible factorization of `x^{n/d} - 1` over `F_{q^d}`.
    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn factor_index(&self, h: &Poly) -> Option<usize> {
        self.factors.iter().position(|(g, _)| g == h)
    }
}

/// A fixed `F_{q^n}` together with lazily built per-level data.
pub struct ModuleFrame {
    q: u64,
    n: u64,
    p: u64,
    a0: usize,
    a: u32,
    n_prime: u64,
    big: Arc<FieldCtx>,
    divisors: Vec<u64>,
    levels: Vec<OnceLock<Level>>,
    projectors: OnceLock<Vec<(u64, FpMatrix)>>,
}

/// A list of order conditions `Ord_{q^d}(w) = target`, each target given as
/// an exponent vector against the factors of its level.
#[derive(Debug, Clone)]
pub struct OrderTest {
    pub k: u64,
    pub conditions: Vec<(u64, Vec<u32>)>,
}

/// The pair `(Ord_Q(w), Ord_{Q^2}(w))` for `w` in `W_{k,f}`, `Q = q^tau_k`.
#[derive(Debug, Clone)]
pub struct OrderPair {
    pub k: u64,
    pub f: Poly,
    pub ord_q: Poly,
    pub ord_q2: Poly,
    pub label: LatticeLabel,
}

impl ModuleFrame {
    /// Frame over the default field `F_{q^n}`.
    pub fn new(q: u64, n: u64) -> Result<Self> {
        let (p, a0) = prime_power(q)?;
        let big = build_field(p, a0 as usize * n as usize, None)?;
        Self::with_field(q, big)
    }

    /// Frame over an already built field, which must have absolute degree a
    /// multiple of `log_p q`.
    pub fn with_field(q: u64, big: Arc<FieldCtx>) -> Result<Self> {
        let (p, a0) = prime_power(q)?;
        let a0 = a0 as usize;
        if big.p() != p || big.m() % a0 != 0 {
            return Err(Error::NotADivisor { d: a0, m: big.m() });
        }
        let n = (big.m() / a0) as u64;
        let a = valuation(n, p);
        let divisors = divisors(n);
        let levels = divisors.iter().map(|_| OnceLock::new()).collect();
        Ok(ModuleFrame {
            q,
            n,
            p,
            a0,
            a,
            n_prime: n / p.pow(a),
            big,
            divisors,
            levels,
            projectors: OnceLock::new(),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n_prime(&self) -> u64 {
        self.n_prime
    }

    /// `p^a`, the multiplicity of every factor of `x^n - 1`.
    pub fn p_power(&self) -> u32 {
        self.p.pow(self.a) as u32
    }

    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// `sigma^d(z) = z^{q^d}`.
    pub fn sigma(&self, z: &FieldElem, d: u64) -> FieldElem {
        self.big.frobenius(z, self.a0 * d as usize)
    }

    pub fn level(&self, d: u64) -> Result<&Level> {
        let i = self
            .divisors
            .iter()
            .position(|&e| e == d)
            .ok_or(Error::NotADivisor {
                d: d as usize,
                m: self.n as usize,
            })?;
        Ok(self.levels[i].get_or_init(|| self.build_level(d)))
    }

    fn build_level(&self, d: u64) -> Level {
        let emb = embed_subfield(&self.big, self.a0 * d as usize).expect("d divides n");
        let sub = emb.sub().clone();
        let big_n = self.n / d;
        let factors = factor_xm_minus_1(&sub, big_n).factors;
        let whole = Poly::x_pow_minus_one(&sub, big_n as usize);
        let mut coprime = vec![];
        let mut step = vec![];
        let mut normal = vec![];
        for (h, e) in &factors {
            let b = whole.div_exact(&h.pow(*e as u64));
            let bm = self.matrix_at(&emb, d, &b);
            let hm = self.matrix_at(&emb, d, h);
            normal.push(bm.mul(&hm.pow(*e as u64 - 1)));
            coprime.push(bm);
            step.push(hm);
        }
        Level {
            d,
            emb,
            factors,
            coprime,
            step,
            normal,
        }
    }

    fn matrix_at(&self, emb: &SubfieldEmbedding, d: u64, g: &Poly) -> FpMatrix {
        let m = self.big.m();
        let mut acc = FpMatrix::zeros(self.p, m, m);
        for (j, c) in g.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = self.big.frobenius_matrix(self.a0 * d as usize * j);
            let cb = emb.map(c);
            let term = if cb.coeffs()[1..].iter().all(|&x| x == 0) {
                s.scale(cb.coeffs()[0])
            } else {
                self.big.mul_matrix(&cb).mul(&s)
            };
            acc = acc.add(&term);
        }
        acc
    }

    /// The `F_p`-matrix of `g(sigma^d)` for `g` over `F_{q^d}`.
    pub fn poly_matrix(&self, g: &Poly, d: u64) -> Result<FpMatrix> {
        let level = self.level(d)?;
        if g.ctx() != level.sub() {
            return Err(Error::MixedContext);
        }
        Ok(self.matrix_at(&level.emb, d, g))
    }

    /// `g(sigma^d)(z)`.
    pub fn apply(&self, g: &Poly, d: u64, z: &FieldElem) -> Result<FieldElem> {
        let level = self.level(d)?;
        if g.ctx() != level.sub() {
            return Err(Error::MixedContext);
        }
        let mut acc = self.big.zero();
        let mut cur = z.clone();
        for c in g.coeffs() {
            let t = self.big.mul(&level.emb.map(c), &cur);
            self.big.add_assign(&mut acc, &t);
            cur = self.sigma(&cur, d);
        }
        Ok(acc)
    }

    /// Exponents of the level-`d` factors in `Ord_{q^d}(z)`.
    pub fn q_order_exponents(&self, z: &FieldElem, d: u64) -> Result<Vec<u32>> {
        let level = self.level(d)?;
        Ok((0..level.factors.len())
            .map(|i| factor_exponent(level, i, z))
            .collect())
    }

    /// `Ord_{q^d}(z)`, the monic annihilator of least degree.
    pub fn q_order(&self, z: &FieldElem, d: u64) -> Result<Poly> {
        let exps = self.q_order_exponents(z, d)?;
        let level = self.level(d)?;
        Ok(level
            .factors
            .iter()
            .zip(&exps)
            .fold(Poly::one(level.sub()), |acc, ((h, _), &s)| {
                acc.mul(&h.pow(s as u64))
            }))
    }

    /// Multiplicities of the level-`d` factors in `g`.
    pub fn exponents_of(&self, g: &Poly, d: u64) -> Result<Vec<u32>> {
        let level = self.level(d)?;
        if g.ctx() != level.sub() {
            return Err(Error::MixedContext);
        }
        Ok(level
            .factors
            .iter()
            .map(|(h, _)| {
                let mut rest = g.clone();
                let mut s = 0;
                while !rest.is_zero() && h.divides(&rest) {
                    rest = rest.div_exact(h);
                    s += 1;
                }
                s
            })
            .collect())
    }

    pub fn is_normal(&self, z: &FieldElem, d: u64) -> Result<bool> {
        let level = self.level(d)?;
        Ok(level.normal.iter().all(|mat| !mat.kills(z.coeffs())))
    }

    /// Normality by the definition: the conjugates `sigma^{di}(z)` are
    /// independent over `F_{q^d}`.
    pub fn is_normal_by_basis(&self, z: &FieldElem, d: u64) -> Result<bool> {
        let level = self.level(d)?;
        let sub = level.sub();
        let mut cols = vec![];
        let mut conj = z.clone();
        for _ in 0..self.n / d {
            let mut c = sub.one();
            for _ in 0..sub.m() {
                cols.push(self.big.mul(&level.emb.map(&c), &conj).coeffs().to_vec());
                c = sub.mul(&c, &sub.gen());
            }
            conj = self.sigma(&conj, d);
        }
        let m = self.big.m();
        Ok(FpMatrix::from_columns(self.p, m, &cols).rank() == m)
    }

    pub fn is_completely_normal(&self, z: &FieldElem) -> bool {
        self.divisors
            .iter()
            .all(|&d| self.is_normal(z, d).expect("d divides n"))
    }

    fn projector_table(&self) -> &[(u64, FpMatrix)] {
        self.projectors.get_or_init(|| {
            let level = self.level(1).expect("1 divides n");
            let pa = self.p_power() as u64;
            divisors(self.n_prime)
                .into_iter()
                .map(|k| {
                    let phi = cyclotomic_poly(k, level.sub()).expect("p does not divide k");
                    let e = idempotent(level.sub(), self.n, &phi.pow(pa));
                    (k, self.matrix_at(&level.emb, 1, &e))
                })
                .collect()
        })
    }

    /// The idempotent projector of `F_{q^n}` onto `C_k`.
    pub fn projector(&self, k: u64) -> Result<&FpMatrix> {
        self.projector_table()
            .iter()
            .find(|(j, _)| *j == k)
            .map(|(_, m)| m)
            .ok_or(Error::NotADivisor {
                d: k as usize,
                m: self.n_prime as usize,
            })
    }

    /// The `C_k`-component of `z`.
    pub fn cyclotomic_component(&self, z: &FieldElem, k: u64) -> Result<FieldElem> {
        Ok(FieldElem(self.projector(k)?.mul_vec(z.coeffs())))
    }

    pub fn in_cyclotomic_module(&self, z: &FieldElem, k: u64) -> Result<bool> {
        Ok(self.projector(k)?.mul_vec(z.coeffs()) == z.coeffs())
    }

    /// An `F_p`-basis of `C_k`.
    pub fn module_basis(&self, k: u64) -> Result<Vec<FieldElem>> {
        let pr = self.projector(k)?;
        let fixed = pr.sub(&FpMatrix::identity(self.p, self.big.m()));
        Ok(fixed.kernel().into_iter().map(FieldElem).collect())
    }

    pub fn central_index(&self, k: u64) -> Result<u64> {
        Ok(subord_profile(self.q, k)?.tau)
    }

    pub fn is_exceptional(&self, k: u64) -> bool {
        is_exceptional_divisor(self.q, k)
    }

    fn target(&self, d: u64, g: &Poly) -> Result<(u64, Vec<u32>)> {
        Ok((d, self.exponents_of(g, d)?))
    }

    /// The order conditions characterizing complete generators of `C_k`:
    /// `Ord_{q^tau}(w) = Phi_{k/tau}^{p^a}`, and for exceptional `k` also
    /// `Ord_{q^{2 tau}}(w) = Phi_{k/(2 tau)}^{p^a}`.
    pub fn generator_test(&self, k: u64) -> Result<OrderTest> {
        self.projector(k)?;
        let tau = self.central_index(k)?;
        let pa = self.p_power() as u64;
        let mut conditions = vec![];
        let sub = self.level(tau)?.sub().clone();
        conditions.push(self.target(tau, &cyclotomic_poly(k / tau, &sub)?.pow(pa))?);
        if self.is_exceptional(k) {
            let sub2 = self.level(2 * tau)?.sub().clone();
            conditions.push(self.target(2 * tau, &cyclotomic_poly(k / (2 * tau), &sub2)?.pow(pa))?);
        }
        Ok(OrderTest { k, conditions })
    }

    /// The same property stated level by level: for every `d` dividing the
    /// module character, `Ord_{q^d}(w) = Phi_{rad k}(x^{p^a k / (rad(k) d)})`.
    pub fn generator_test_by_levels(&self, k: u64) -> Result<OrderTest> {
        self.projector(k)?;
        let pa = self.p_power() as u64;
        let rad = radical(k);
        let character = pa * k / rad;
        let mut conditions = vec![];
        for d in divisors(character) {
            let sub = self.level(d)?.sub().clone();
            let g = cyclotomic_poly(rad, &sub)?.compose_x_power((character / d) as usize);
            conditions.push(self.target(d, &g)?);
        }
        Ok(OrderTest { k, conditions })
    }

    pub fn passes(&self, test: &OrderTest, w: &FieldElem) -> bool {
        test.conditions.iter().all(|(d, target)| {
            let level = self.level(*d).expect("test built on this frame");
            target
                .iter()
                .enumerate()
                .all(|(i, &t)| factor_exponent(level, i, w) == t)
        })
    }

    pub fn is_complete_generator(&self, w: &FieldElem, k: u64) -> Result<bool> {
        if !self.in_cyclotomic_module(w, k)? {
            return Err(Error::NotInModule);
        }
        Ok(self.passes(&self.generator_test(k)?, w))
    }

    pub fn is_complete_generator_by_levels(&self, w: &FieldElem, k: u64) -> Result<bool> {
        if !self.in_cyclotomic_module(w, k)? {
            return Err(Error::NotInModule);
        }
        Ok(self.passes(&self.generator_test_by_levels(k)?, w))
    }

    /// `F^eps_k`: the irreducible factors of `Phi_{k/(2 tau)}` over `F_{q^tau}`.
    pub fn exceptional_factors(&self, k: u64) -> Result<Vec<Poly>> {
        if self.n_prime % k != 0 || !self.is_exceptional(k) {
            return Err(Error::NotExceptional { k });
        }
        self.projector(k)?;
        let tau = self.central_index(k)?;
        let sub = self.level(tau)?.sub().clone();
        let mut fs: Vec<Poly> = factor(&cyclotomic_poly(k / (2 * tau), &sub)?)?
            .distinct()
            .cloned()
            .collect();
        fs.sort_by(|a, b| a.cmp_key(b));
        Ok(fs)
    }

    /// Projector of `F_{q^n}` onto `W_{k,f} = ker f(x^2)^{p^a}(sigma^tau)`.
    pub fn w_projector(&self, k: u64, f: &Poly) -> Result<FpMatrix> {
        let tau = self.central_index(k)?;
        let level = self.level(tau)?;
        let a = f.compose_x_power(2).pow(self.p_power() as u64);
        let e = idempotent(level.sub(), self.n / tau, &a);
        self.poly_matrix(&e, tau)
    }

    /// Splits `w` in `C_k` along `C_k = sum over f in F^eps_k of W_{k,f}`.
    pub fn exceptional_split(&self, w: &FieldElem, k: u64) -> Result<Vec<(Poly, FieldElem)>> {
        let fs = self.exceptional_factors(k)?;
        if !self.in_cyclotomic_module(w, k)? {
            return Err(Error::NotInModule);
        }
        fs.into_iter()
            .map(|f| {
                let pr = self.w_projector(k, &f)?;
                let wf = FieldElem(pr.mul_vec(w.coeffs()));
                Ok((f, wf))
            })
            .collect()
    }

    pub fn order_pair(&self, w: &FieldElem, k: u64, f: &Poly) -> Result<OrderPair> {
        let ctx = census::PairContext::new(self, k, f)?;
        if !ctx.contains(self, w) {
            return Err(Error::NotInModule);
        }
        let tau = ctx.tau;
        let lq = self.level(tau)?;
        let lq2 = self.level(2 * tau)?;
        let eq: Vec<u32> = ctx.g.iter().map(|&i| factor_exponent(lq, i, w)).collect();
        let eq2: Vec<u32> = ctx.h.iter().map(|&i| factor_exponent(lq2, i, w)).collect();
        let build = |level: &Level, idx: &[usize], exps: &[u32]| {
            idx.iter().zip(exps).fold(Poly::one(level.sub()), |acc, (&i, &s)| {
                acc.mul(&level.factors[i].0.pow(s as u64))
            })
        };
        Ok(OrderPair {
            k,
            f: f.clone(),
            ord_q: build(lq, &ctx.g, &eq),
            ord_q2: build(lq2, &ctx.h, &eq2),
            label: LatticeLabel::classify(&eq, &eq2, self.p_power()),
        })
    }

    /// Moves a polynomial over `F_{q^d}` to `F_{q^e}` (both levels of this
    /// frame), failing if a coefficient is outside the target.
    pub fn transfer(&self, g: &Poly, from: u64, to: u64) -> Result<Poly> {
        let src = self.level(from)?;
        let dst = self.level(to)?;
        g.map_coefficients(&src.emb)?.pullback(&dst.emb)
    }
}

/// The exponent of the `i`-th level factor in the order of `z`.
fn factor_exponent(level: &Level, i: usize, z: &FieldElem) -> u32 {
    let mut y = level.coprime[i].mul_vec(z.coeffs());
    let mut s = 0;
    while y.iter().any(|&c| c != 0) {
        y = level.step[i].mul_vec(&y);
        s += 1;
    }
    s
}

/// The idempotent of `F[x]/(x^len - 1)` that is 1 modulo `a` and 0 modulo the
/// cofactor; `a` must be a unitary divisor.
fn idempotent(ctx: &Arc<FieldCtx>, len: u64, a: &Poly) -> Poly {
    let whole = Poly::x_pow_minus_one(ctx, len as usize);
    let b = whole.div_exact(a);
    let (g, _, t) = a.xgcd(&b);
    assert!(g.is_one(), "divisor shares factors with its cofactor");
    t.mul(&b).rem(&whole)
}
