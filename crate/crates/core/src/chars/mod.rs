//! Additive and multiplicative characters of small fields, evaluated in
//! floating point, and numerical checks of the character-sum formulas for
//! orders, primitivity and complete generators.
//!
//! Verdicts here are approximate by nature; the exact predicates they are
//! compared against come from [`crate::modstruct`] and [`crate::ff`].

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use num_traits::{Float, FloatConst, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::modstruct::{LatticeLabel, ModuleFrame};
use crate::nt::{divisors, euler_phi, gcd, moebius, radical};
use crate::poly::{cyclotomic_poly, poly_euler_phi, poly_moebius, Poly};

/// Largest field the tables are built for.
pub const MAX_CHAR_FIELD: u64 = 1 << 16;

/// Absolute tolerance per summand.
pub const TOLERANCE: f64 = 1e-6;

/// `chi_u(z) = exp(2 pi i Tr(u z) / p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveChar {
    pub u: FieldElem,
}

/// `psi_j(g^t) = exp(2 pi i j t / (p^m - 1))` for the fixed primitive `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplicativeChar {
    pub j: u64,
}

/// Outcome of a numerical identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verification {
    pub name: String,
    pub points: u64,
    pub summands: u64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Verification {
    fn new(name: &str, points: u64, summands: u64, max_deviation: f64) -> Self {
        let tolerance = TOLERANCE * summands.max(1) as f64;
        Verification {
            name: name.into(),
            points,
            summands,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

/// Precomputed traces, logarithms and roots of unity for one field.
pub struct CharTables<F> {
    frame: ModuleFrame,
    elems: Vec<FieldElem>,
    forms: Vec<Vec<u32>>,
    dlog: Vec<Option<u64>>,
    add_roots: Vec<Complex<F>>,
    mult_roots: Vec<Complex<F>>,
}

pub type CharTables64 = CharTables<f64>;
pub type CharTables32 = CharTables<f32>;

fn unit_roots<F: Float + FloatConst>(count: u64) -> Vec<Complex<F>> {
    let c = F::from(count).unwrap();
    (0..count)
        .map(|j| Complex::from_polar(F::one(), F::TAU() * F::from(j).unwrap() / c))
        .collect()
}

fn to_f64<F: Float>(x: F) -> f64 {
    x.to_f64().unwrap()
}

/// Discrete logarithm of `z` to base `g` by baby-step giant-step, `None` if
/// `z` is not a power of `g`.
pub fn discrete_log(ctx: &FieldCtx, g: &FieldElem, z: &FieldElem) -> Option<u64> {
    if z.is_zero() {
        return None;
    }
    let order = ctx.size_u64()? - 1;
    let s = (order as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(s as usize);
    let mut cur = ctx.one();
    for j in 0..s {
        baby.entry(cur.clone()).or_insert(j);
        cur = ctx.mul(&cur, g);
    }
    let giant = ctx.inv(&ctx.pow(g, s)).ok()?;
    let mut y = z.clone();
    for i in 0..=s {
        if let Some(&j) = baby.get(&y) {
            return Some((i * s + j) % order);
        }
        y = ctx.mul(&y, &giant);
    }
    None
}

impl<F: Float + FloatConst + Send + Sync> CharTables<F> {
    /// Tables for the default `F_{q^n}`.
    pub fn new(q: u64, n: u64) -> Result<Self> {
        Self::with_frame(ModuleFrame::new(q, n)?)
    }

    pub fn with_frame(frame: ModuleFrame) -> Result<Self> {
        let big = frame.big().clone();
        let size = match big.size_u64() {
            Some(s) if s <= MAX_CHAR_FIELD => s,
            _ => {
                return Err(Error::TooLarge {
                    size: big.size().to_string(),
                    budget: MAX_CHAR_FIELD,
                })
            }
        };
        let elems: Vec<FieldElem> = big.elements().collect();
        let forms = elems.iter().map(|u| big.trace_form(u)).collect();
        let order = size - 1;
        let mut dlog = vec![None; size as usize];
        let g = big.primitive_element().clone();
        let mut cur = big.one();
        for t in 0..order {
            dlog[big.index(&cur) as usize] = Some(t);
            cur = big.mul(&cur, &g);
        }
        Ok(CharTables {
            add_roots: unit_roots(big.p()),
            mult_roots: unit_roots(order),
            frame,
            elems,
            forms,
            dlog,
        })
    }

    pub fn frame(&self) -> &ModuleFrame {
        &self.frame
    }

    pub fn size(&self) -> u64 {
        self.elems.len() as u64
    }

    fn group_order(&self) -> u64 {
        self.size() - 1
    }

    fn trace_pair(&self, u: usize, z: &FieldElem) -> usize {
        let p = self.frame.p();
        let s: u64 = self.forms[u]
            .iter()
            .zip(z.coeffs())
            .map(|(&a, &b)| a as u64 * b as u64)
            .sum();
        (s % p) as usize
    }

    fn idx(&self, z: &FieldElem) -> usize {
        self.frame.big().index(z) as usize
    }

    pub fn additive(&self, chi: &AdditiveChar, z: &FieldElem) -> Complex<F> {
        self.add_roots[self.trace_pair(self.idx(&chi.u), z)]
    }

    pub fn multiplicative(&self, psi: MultiplicativeChar, z: &FieldElem) -> Complex<F> {
        self.mult_value(psi.j, self.idx(z))
    }

    fn mult_value(&self, j: u64, z: usize) -> Complex<F> {
        let order = self.group_order();
        match self.dlog[z] {
            None if j % order == 0 => Complex::new(F::one(), F::zero()),
            None => Complex::new(F::zero(), F::zero()),
            Some(t) => self.mult_roots[((j % order) as u128 * t as u128 % order as u128) as usize],
        }
    }

    /// `ord(psi_j) = (q^n - 1) / gcd(j, q^n - 1)`.
    pub fn mult_order(&self, psi: MultiplicativeChar) -> u64 {
        let order = self.group_order();
        order / gcd(psi.j % order, order)
    }

    /// Whether `g . chi_u` is trivial, with `g` acting by precomposition
    /// with `g(sigma^d)`.
    fn annihilates(&self, g_mat: &crate::ff::FpMatrix, u: usize) -> bool {
        let p = self.frame.p();
        let form = &self.forms[u];
        let m = form.len();
        (0..m).all(|c| {
            let s: u64 = (0..m).map(|r| form[r] as u64 * g_mat.get(r, c) as u64).sum();
            s % p == 0
        })
    }

    /// `Ord_{q^d}(chi_u)`, read off from `Ord_{q^d}(u)` through the
    /// reciprocal.
    pub fn char_order_additive(&self, chi: &AdditiveChar, d: u64) -> Result<Poly> {
        Ok(self.frame.q_order(&chi.u, d)?.reciprocal())
    }

    /// `Ord_{q^d}(chi_u)` by searching all monic divisors of `x^{n/d} - 1`
    /// for the annihilator of least degree.
    pub fn char_order_brute(&self, chi: &AdditiveChar, d: u64) -> Result<Poly> {
        let level = self.frame.level(d)?;
        let factors = level.factors().to_vec();
        let u = self.idx(&chi.u);
        let mut best: Option<Poly> = None;
        let mut exps = vec![0u32; factors.len()];
        loop {
            let g = factors
                .iter()
                .zip(&exps)
                .fold(Poly::one(level.sub()), |acc, ((h, _), &e)| acc.mul(&h.pow(e as u64)));
            let better = best
                .as_ref()
                .is_none_or(|b| g.degree() < b.degree());
            if better && self.annihilates(&self.frame.poly_matrix(&g, d)?, u) {
                best = Some(g);
            }
            let mut i = 0;
            while i < exps.len() && exps[i] == factors[i].1 {
                exps[i] = 0;
                i += 1;
            }
            if i == exps.len() {
                break;
            }
            exps[i] += 1;
        }
        Ok(best.expect("x^{n/d} - 1 annihilates every character"))
    }

    /// `Gamma_{d,g}`: the twists `u` with `g . chi_u` trivial.
    pub fn gamma(&self, d: u64, g: &Poly) -> Result<Vec<FieldElem>> {
        let mat = self.frame.poly_matrix(g, d)?;
        Ok((0..self.elems.len())
            .into_par_iter()
            .filter(|&u| self.annihilates(&mat, u))
            .map(|u| self.elems[u].clone())
            .collect())
    }

    /// Evaluates `z -> sum_u c_u chi_u(z)` at every element.
    fn evaluate(&self, terms: &[(usize, F)]) -> Vec<Complex<F>> {
        self.elems
            .par_iter()
            .map(|z| {
                terms.iter().fold(Complex::new(F::zero(), F::zero()), |acc, &(u, c)| {
                    acc + self.add_roots[self.trace_pair(u, z)] * c
                })
            })
            .collect()
    }

    fn deviation(values: &[Complex<F>], expected: impl Fn(usize) -> f64) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let e = expected(i);
                ((to_f64(v.re) - e).powi(2) + to_f64(v.im).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    fn check_divisor_of_pfree(&self, d: u64, g: &Poly) -> Result<()> {
        let np = self.frame.n_prime();
        if np % d != 0 {
            return Err(Error::NotADivisor {
                d: d as usize,
                m: np as usize,
            });
        }
        let sub = self.frame.level(d)?.sub().clone();
        if !g.is_monic() {
            return Err(Error::NotMonic);
        }
        if !g.divides(&Poly::x_pow_minus_one(&sub, (np / d) as usize)) {
            return Err(Error::NotADivisor {
                d: g.degree().unwrap_or(0),
                m: (np / d) as usize,
            });
        }
        Ok(())
    }

    /// The sum of `Gamma_{d,g}` against `|Gamma|` times the indicator of
    /// the dual module `ker ghat(sigma^d)`.
    pub fn orthogonality_check(&self, d: u64, g: &Poly) -> Result<Verification> {
        self.check_divisor_of_pfree(d, g)?;
        let gamma = self.gamma(d, g)?;
        let terms: Vec<(usize, F)> = gamma.iter().map(|u| (self.idx(u), F::one())).collect();
        let values = self.evaluate(&terms);
        let sub = self.frame.level(d)?.sub().clone();
        let ghat = Poly::x_pow_minus_one(&sub, (self.frame.n() / d) as usize).div_exact(g);
        let dual = self.frame.poly_matrix(&ghat, d)?;
        let size = gamma.len() as f64;
        let dev = Self::deviation(&values, |i| {
            if dual.kills(self.elems[i].coeffs()) {
                size
            } else {
                0.0
            }
        });
        Ok(Verification::new("orthogonality", self.size(), gamma.len() as u64, dev))
    }

    /// Coefficients `mu(Ord chi) / phi(Ord chi)` over `Gamma_{d,g}`.
    fn mobius_terms(&self, d: u64, g: &Poly) -> Result<Vec<(usize, F)>> {
        let mut cache: BTreeMap<String, F> = BTreeMap::new();
        let mut terms = vec![];
        for u in self.gamma(d, g)? {
            let o = self.char_order_additive(&AdditiveChar { u: u.clone() }, d)?;
            let key = o.to_string();
            let c = match cache.get(&key) {
                Some(&c) => c,
                None => {
                    let mu = poly_moebius(&o)?;
                    let phi = poly_euler_phi(&o)?;
                    let c = F::from(mu).unwrap() / F::from(phi.to_f64().unwrap()).unwrap();
                    cache.insert(key, c);
                    c
                }
            };
            if c != F::zero() {
                terms.push((self.idx(&u), c));
            }
        }
        Ok(terms)
    }

    /// `A^g_d` as a character sum against the indicator of
    /// `g^{p^a} | Ord_{q^d}(z)`.
    pub fn verify_a_gd(&self, d: u64, g: &Poly) -> Result<Verification> {
        self.check_divisor_of_pfree(d, g)?;
        let terms = self.mobius_terms(d, g)?;
        let scale = {
            let phi = poly_euler_phi(g)?.to_f64().unwrap();
            let qd = self.frame.level(d)?.sub().size().to_f64().unwrap();
            F::from(phi / qd.powi(g.degree().unwrap() as i32)).unwrap()
        };
        let values: Vec<Complex<F>> = self.evaluate(&terms).into_iter().map(|v| v * scale).collect();
        let target = self.frame.exponents_of(&g.pow(self.frame.p_power() as u64), d)?;
        let dev = Self::deviation(&values, |i| {
            let ord = self.frame.q_order_exponents(&self.elems[i], d).unwrap();
            let hit = ord.iter().zip(&target).all(|(o, t)| o >= t);
            hit as u8 as f64
        });
        Ok(Verification::new("A^g_d", self.size(), terms.len() as u64, dev))
    }

    /// `B_k = sum over Gamma_k of mu/phi chi` against the rescaled
    /// indicator of `Phi_{k/tau}^{p^a} | Ord_{q^tau}(z)`, for
    /// non-exceptional `k`.
    pub fn verify_b_k(&self, k: u64) -> Result<Verification> {
        let tau = self.frame.central_index(k)?;
        let sub = self.frame.level(tau)?.sub().clone();
        let phi_k = cyclotomic_poly(k / tau, &sub)?;
        self.check_divisor_of_pfree(tau, &phi_k)?;
        let terms = self.mobius_terms(tau, &phi_k)?;
        let values = self.evaluate(&terms);
        let norm = {
            let qd = sub.size().to_f64().unwrap().powi(phi_k.degree().unwrap() as i32);
            qd / poly_euler_phi(&phi_k)?.to_f64().unwrap()
        };
        let target = self.frame.exponents_of(&phi_k.pow(self.frame.p_power() as u64), tau)?;
        let dev = Self::deviation(&values, |i| {
            let ord = self.frame.q_order_exponents(&self.elems[i], tau).unwrap();
            let hit = ord.iter().zip(&target).all(|(o, t)| o >= t);
            if hit {
                norm
            } else {
                0.0
            }
        });
        Ok(Verification::new("B_k", self.size(), terms.len() as u64, dev))
    }

    /// Order-pair label of `chi_u` in `Gamma^eps_{k,f}`.
    fn char_label(&self, u: &FieldElem, tau: u64, g: &[Poly], h: &[Poly]) -> Result<LatticeLabel> {
        let chi = AdditiveChar { u: u.clone() };
        let oq = self.char_order_additive(&chi, tau)?;
        let oq2 = self.char_order_additive(&chi, 2 * tau)?;
        let eq: Vec<u32> = g.iter().map(|gi| gi.divides(&oq) as u32).collect();
        let eq2: Vec<u32> = h.iter().map(|hj| hj.divides(&oq2) as u32).collect();
        Ok(LatticeLabel::classify(&eq, &eq2, 1))
    }

    /// The exceptional product formula for `(k, f)` against the indicator of
    /// the `(k,f)`-component being a complete generator of `W_{k,f}`; also
    /// returns the character counts per lattice label.
    pub fn verify_exceptional_product(
        &self,
        k: u64,
        f: &Poly,
    ) -> Result<(Verification, BTreeMap<LatticeLabel, u64>)> {
        let frame = &self.frame;
        let fs = frame.exceptional_factors(k)?;
        if !fs.contains(f) {
            return Err(Error::NotInModule);
        }
        let tau = frame.central_index(k)?;
        let fx2 = f.compose_x_power(2);
        let mut g: Vec<Poly> = crate::poly::factor(&fx2)?.distinct().cloned().collect();
        g.sort_by(|a, b| a.cmp_key(b));
        let f2 = frame.transfer(f, tau, 2 * tau)?;
        let mut h: Vec<Poly> = crate::poly::factor(&f2)?.distinct().cloned().collect();
        h.sort_by(|a, b| a.cmp_key(b));

        let big_q = frame.level(tau)?.sub().size().to_f64().unwrap();
        let qd = big_q.powi(f.degree().unwrap() as i32);
        let mut counts: BTreeMap<LatticeLabel, u64> = BTreeMap::new();
        let mut labelled = vec![];
        for u in self.gamma(tau, &fx2)? {
            let l = self.char_label(&u, tau, &g, &h)?;
            *counts.entry(l).or_default() += 1;
            labelled.push((self.idx(&u), l));
        }
        let terms: Vec<(usize, F)> = labelled
            .iter()
            .map(|&(u, l)| {
                let phi = l.phi(qd as u128) as f64;
                let c = if phi == 0.0 { 0.0 } else { l.mu() as f64 / phi };
                (u, F::from(c).unwrap())
            })
            .collect();
        let top = LatticeLabel::Top.phi(qd as u128) as f64;
        let scale = F::from(top / (qd * qd)).unwrap();
        let values: Vec<Complex<F>> = self.evaluate(&terms).into_iter().map(|v| v * scale).collect();
        let proj = frame.w_projector(k, f)?;
        let dev = Self::deviation(&values, |i| {
            let w = FieldElem(proj.mul_vec(self.elems[i].coeffs()));
            let pair = frame.order_pair(&w, k, f).unwrap();
            (pair.label == LatticeLabel::Top) as u8 as f64
        });
        Ok((
            Verification::new("exceptional product", self.size(), terms.len() as u64, dev),
            counts,
        ))
    }

    /// `G(psi, chi) = sum_w psi(w) chi(w)`.
    pub fn gauss_sum(&self, psi: MultiplicativeChar, chi: &AdditiveChar) -> Complex<F> {
        let u = self.idx(&chi.u);
        self.elems
            .iter()
            .enumerate()
            .fold(Complex::new(F::zero(), F::zero()), |acc, (i, z)| {
                acc + self.mult_value(psi.j, i) * self.add_roots[self.trace_pair(u, z)]
            })
    }

    /// `|G(psi, chi)|` against `q^{n/2}`, `q^n` or 0. A nontrivial `chi_u`
    /// only rescales the sum by `psi(u)`, so every `psi` is paired with
    /// `chi_0` and `chi_1`, and the two trivial-side cases with every `chi`.
    pub fn verify_gauss_sums(&self) -> Verification {
        let big = self.frame.big();
        let size = self.size() as f64;
        let zero = AdditiveChar { u: big.zero() };
        let one = AdditiveChar { u: big.one() };
        let expect = |j: u64, u_trivial: bool| match (j == 0, u_trivial) {
            (true, true) => size,
            (false, false) => size.sqrt(),
            _ => 0.0,
        };
        let mut cases: Vec<(u64, usize)> = (0..self.group_order())
            .flat_map(|j| [(j, self.idx(&zero.u)), (j, self.idx(&one.u))])
            .collect();
        cases.extend((0..self.elems.len()).flat_map(|i| [(0, i), (1 % self.group_order(), i)]));
        let dev = cases
            .par_iter()
            .map(|&(j, i)| {
                let g = self.gauss_sum(MultiplicativeChar { j }, &AdditiveChar { u: self.elems[i].clone() });
                let re = to_f64(g.re);
                let im = to_f64(g.im);
                ((re * re + im * im).sqrt() - expect(j, self.elems[i].is_zero())).abs()
            })
            .reduce(|| 0.0, f64::max);
        Verification::new("gauss-magnitude", cases.len() as u64, self.size(), dev)
    }

    /// `P(z)`, the primitive-element indicator as a sum over all
    /// multiplicative characters.
    pub fn primitivity_values(&self) -> Vec<Complex<F>> {
        let order = self.group_order();
        let coeff: Vec<F> = (0..order)
            .map(|j| {
                let o = order / gcd(j, order);
                F::from(moebius(o)).unwrap() / F::from(euler_phi(o)).unwrap()
            })
            .collect();
        self.evaluate_mult(&coeff.into_iter().enumerate().map(|(j, c)| (j as u64, c)).collect::<Vec<_>>())
    }

    /// `P(z)` as a sum over squarefree orders `e | rad(q^n - 1)`, each
    /// weighted once and summed over the characters of that order.
    pub fn primitivity_values_alt(&self) -> Vec<Complex<F>> {
        let order = self.group_order();
        let mut terms = vec![];
        for e in divisors(radical(order)) {
            let w = F::from(moebius(e)).unwrap() / F::from(euler_phi(e)).unwrap();
            // characters of order e are psi_j with j = (N/e) t, gcd(t, e) = 1
            for t in 0..e {
                if gcd(t, e) == 1 {
                    terms.push((order / e * t, w));
                }
            }
        }
        self.evaluate_mult(&terms)
    }

    fn evaluate_mult(&self, terms: &[(u64, F)]) -> Vec<Complex<F>> {
        let order = self.group_order();
        let scale = F::from(euler_phi(order) as f64 / order as f64).unwrap();
        (0..self.elems.len())
            .into_par_iter()
            .map(|i| {
                terms.iter().fold(Complex::new(F::zero(), F::zero()), |acc, &(j, c)| {
                    acc + self.mult_value(j, i) * c
                }) * scale
            })
            .collect()
    }

    /// Both forms of `P` against the exact primitivity test on nonzero
    /// elements. At zero only the trivial character survives, so the
    /// expected value there is `phi(N)/N` rather than 0.
    pub fn verify_p(&self) -> Result<(Verification, Verification)> {
        let big = self.frame.big().clone();
        let n = self.group_order();
        let at_zero = euler_phi(n) as f64 / n as f64;
        let exact: Vec<f64> = self
            .elems
            .iter()
            .map(|z| {
                if z.is_zero() {
                    at_zero
                } else {
                    big.is_primitive(z).unwrap() as u8 as f64
                }
            })
            .collect();
        let p = self.primitivity_values();
        let alt = self.primitivity_values_alt();
        Ok((
            Verification::new("P", self.size(), n, Self::deviation(&p, |i| exact[i])),
            Verification::new("P-alt", self.size(), n, Self::deviation(&alt, |i| exact[i])),
        ))
    }

    /// Number of nonzero elements flagged by `P` (rounded).
    pub fn primitive_count(&self) -> u64 {
        self.primitivity_values()
            .iter()
            .zip(&self.elems)
            .filter(|(v, z)| !z.is_zero() && to_f64(v.re) > 0.5)
            .count() as u64
    }
}
