//! Exhaustive censuses over fields and submodules.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{count_cn, regularity};
use crate::error::{Error, Result};
use crate::ff::{FieldElem, FpMatrix};
use crate::poly::{factor, Poly};

use super::{factor_exponent, ModuleFrame};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// The six elements of the order-pair lattice, plus a slot for pairs that
/// fit none of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LatticeLabel {
    #[serde(rename = "(1,1)")]
    Bottom,
    #[serde(rename = "(f(x^2),h1)")]
    H1,
    #[serde(rename = "(f(x^2),h2)")]
    H2,
    #[serde(rename = "(g1,f)")]
    G1,
    #[serde(rename = "(g2,f)")]
    G2,
    #[serde(rename = "(f(x^2),f)")]
    Top,
    #[serde(rename = "invalid")]
    Invalid,
}

impl LatticeLabel {
    pub const ALL: [LatticeLabel; 6] = [
        LatticeLabel::Bottom,
        LatticeLabel::H1,
        LatticeLabel::H2,
        LatticeLabel::G1,
        LatticeLabel::G2,
        LatticeLabel::Top,
    ];

    /// Reads off the label from the exponents of `(g1, g2)` in the
    /// `Q`-order and of `(h1, h2)` in the `Q^2`-order. A side is attained
    /// when the exponent reaches `full`.
    pub fn classify(eq: &[u32], eq2: &[u32], full: u32) -> LatticeLabel {
        let a: Vec<bool> = eq.iter().map(|&e| e == full).collect();
        let b: Vec<bool> = eq2.iter().map(|&e| e == full).collect();
        match (a.as_slice(), b.as_slice()) {
            ([false, false], [false, false]) => LatticeLabel::Bottom,
            ([true, true], [true, false]) => LatticeLabel::H1,
            ([true, true], [false, true]) => LatticeLabel::H2,
            ([true, false], [true, true]) => LatticeLabel::G1,
            ([false, true], [true, true]) => LatticeLabel::G2,
            ([true, true], [true, true]) => LatticeLabel::Top,
            _ => LatticeLabel::Invalid,
        }
    }

    /// The lattice Moebius value against the bottom element.
    pub fn mu(self) -> i64 {
        match self {
            LatticeLabel::Bottom => 1,
            LatticeLabel::Top => 3,
            LatticeLabel::Invalid => 0,
            _ => -1,
        }
    }

    /// Number of elements of `W_{k,f}` with exactly this pair, where
    /// `qd = Q^delta`.
    pub fn phi(self, qd: u128) -> u128 {
        match self {
            LatticeLabel::Bottom => 1,
            LatticeLabel::Top => qd * qd + 3 - 4 * qd,
            LatticeLabel::Invalid => 0,
            _ => qd - 1,
        }
    }
}

/// Precomputed data for one `(k, f)` with `k` exceptional.
pub(crate) struct PairContext {
    pub tau: u64,
    pub f: Poly,
    // indices of g1, g2 at level tau and of h1, h2 at level 2 tau
    pub g: Vec<usize>,
    pub h: Vec<usize>,
    pub kill: FpMatrix,
}

impl PairContext {
    pub fn new(frame: &ModuleFrame, k: u64, f: &Poly) -> Result<Self> {
        let fs = frame.exceptional_factors(k)?;
        if !fs.contains(f) {
            return Err(Error::NotInModule);
        }
        let tau = frame.central_index(k)?;
        let lq = frame.level(tau)?;
        let lq2 = frame.level(2 * tau)?;
        let fx2 = f.compose_x_power(2);
        let g = sorted_indices(lq, &fx2)?;
        let f2 = frame.transfer(f, tau, 2 * tau)?;
        let h = sorted_indices(lq2, &f2)?;
        let kill = frame.poly_matrix(&fx2.pow(frame.p_power() as u64), tau)?;
        Ok(PairContext {
            tau,
            f: f.clone(),
            g,
            h,
            kill,
        })
    }

    pub fn contains(&self, _frame: &ModuleFrame, w: &FieldElem) -> bool {
        self.kill.kills(w.coeffs())
    }
}

fn sorted_indices(level: &super::Level, g: &Poly) -> Result<Vec<usize>> {
    let mut parts: Vec<Poly> = factor(g)?.distinct().cloned().collect();
    parts.sort_by(|a, b| a.cmp_key(b));
    Ok(parts
        .iter()
        .map(|h| level.factor_index(h).expect("factor of x^N - 1"))
        .collect())
}

/// Census of order-pair labels over `W_{k,f}` (element side) or over the
/// characters annihilated by `f(x^2)` (character side).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeCensus {
    pub pair: (u64, u64),
    pub k: u64,
    pub f: String,
    pub side: String,
    pub big_q: u64,
    pub delta: usize,
    pub total: u64,
    pub counts: BTreeMap<LatticeLabel, u64>,
    pub expected: Option<BTreeMap<LatticeLabel, u64>>,
    pub matches: bool,
    pub mixed_violations: u64,
}

fn span_element(basis: &[FieldElem], p: u64, m: usize, mut idx: u64) -> FieldElem {
    let mut v = vec![0u32; m];
    for b in basis {
        let c = idx % p;
        idx /= p;
        if c != 0 {
            for (x, y) in v.iter_mut().zip(b.coeffs()) {
                *x = ((*x as u64 + c * *y as u64) % p) as u32;
            }
        }
    }
    FieldElem(v)
}

fn span_size(p: u64, dim: usize, budget: u64) -> Result<u64> {
    let size = BigUint::from(p).pow(dim as u32);
    if size > BigUint::from(budget) {
        return Err(Error::TooLarge {
            size: size.to_string(),
            budget,
        });
    }
    Ok(p.pow(dim as u32))
}

impl ModuleFrame {
    fn lattice_census(&self, k: u64, f: &Poly, budget: u64, characters: bool) -> Result<LatticeCensus> {
        let ctx = PairContext::new(self, k, f)?;
        // characters are taken in the module annihilated by f(x^2) itself,
        // where every order is squarefree
        let full = if characters { 1 } else { self.p_power() };
        let lq = self.level(ctx.tau)?;
        let lq2 = self.level(2 * ctx.tau)?;
        // chi_u has order the reciprocal of Ord(u), so the character module
        // is the element module of the reciprocal, read through reciprocals
        let (kill, g, h) = if characters {
            let recip = f.compose_x_power(2).reciprocal();
            let rg = ctx
                .g
                .iter()
                .map(|&i| lq.factor_index(&lq.factors[i].0.reciprocal()).unwrap())
                .collect::<Vec<_>>();
            let rh = ctx
                .h
                .iter()
                .map(|&i| lq2.factor_index(&lq2.factors[i].0.reciprocal()).unwrap())
                .collect::<Vec<_>>();
            (self.poly_matrix(&recip, ctx.tau)?, rg, rh)
        } else {
            (ctx.kill.clone(), ctx.g.clone(), ctx.h.clone())
        };
        let basis: Vec<FieldElem> = kill.kernel().into_iter().map(FieldElem).collect();
        let size = span_size(self.p(), basis.len(), budget)?;
        let m = self.big().m();
        let p = self.p();
        let (counts, violations) = (0..size)
            .into_par_iter()
            .map(|idx| {
                let w = span_element(&basis, p, m, idx);
                let eq: Vec<u32> = g.iter().map(|&i| factor_exponent(lq, i, &w)).collect();
                let eq2: Vec<u32> = h.iter().map(|&i| factor_exponent(lq2, i, &w)).collect();
                let label = LatticeLabel::classify(&eq, &eq2, full);
                let ones = |v: &[u32]| v.iter().filter(|&&e| e == full).count();
                let bad = (ones(&eq2) == 1 && ones(&eq) != 2) || (ones(&eq) == 1 && ones(&eq2) != 2);
                let mut c = [0u64; 7];
                c[label as usize] = 1;
                (c, bad as u64)
            })
            .reduce(
                || ([0u64; 7], 0),
                |(mut a, x), (b, y)| {
                    for i in 0..7 {
                        a[i] += b[i];
                    }
                    (a, x + y)
                },
            );
        let mut map = BTreeMap::new();
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                map.insert(label_at(i), c);
            }
        }
        let big_q = self.q().pow(ctx.tau as u32);
        let delta = f.degree().unwrap();
        let expected = (full == 1).then(|| {
            let qd = (big_q as u128).pow(delta as u32);
            LatticeLabel::ALL
                .iter()
                .map(|&l| (l, l.phi(qd) as u64))
                .collect::<BTreeMap<_, _>>()
        });
        let matches = expected.as_ref().is_some_and(|e| *e == map);
        Ok(LatticeCensus {
            pair: (self.q(), self.n()),
            k,
            f: ctx.f.to_string(),
            side: if characters { "character" } else { "element" }.into(),
            big_q,
            delta,
            total: size,
            counts: map,
            expected,
            matches,
            mixed_violations: violations,
        })
    }

    /// Every complete generator of `C_k`, in span-index order.
    pub fn module_generators(&self, k: u64, budget: u64) -> Result<Vec<FieldElem>> {
        let basis = self.module_basis(k)?;
        let size = span_size(self.p(), basis.len(), budget)?;
        let test = self.generator_test(k)?;
        let m = self.big().m();
        Ok((0..size)
            .into_par_iter()
            .map(|i| span_element(&basis, self.p(), m, i))
            .filter(|w| self.passes(&test, w))
            .collect())
    }

    pub fn element_lattice_census(&self, k: u64, f: &Poly, budget: u64) -> Result<LatticeCensus> {
        self.lattice_census(k, f, budget, false)
    }

    pub fn character_lattice_census(&self, k: u64, f: &Poly, budget: u64) -> Result<LatticeCensus> {
        self.lattice_census(k, f, budget, true)
    }
}

fn label_at(i: usize) -> LatticeLabel {
    LatticeLabel::ALL.get(i).copied().unwrap_or(LatticeLabel::Invalid)
}

/// Checks, over every element of `W_{k,f}`, that a one-sided maximal order
/// at either level forces the maximal order at the other. With `f = None`
/// every `f` in `F^eps_k` is checked.
pub fn mixed_order_check(q: u64, n: u64, k: u64, f: Option<&str>, budget: u64) -> Result<bool> {
    let frame = ModuleFrame::new(q, n)?;
    let fs = match f {
        Some(text) => {
            let tau = frame.central_index(k)?;
            vec![Poly::parse(frame.level(tau)?.sub(), text)?]
        }
        None => frame.exceptional_factors(k)?,
    };
    for f in fs {
        if frame.element_lattice_census(k, &f, budget)?.mixed_violations > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of completely normal elements of `F_{q^n}` over `F_q`, by testing
/// every element.
pub fn cn_census(q: u64, n: u64, budget: u64) -> Result<u64> {
    let frame = ModuleFrame::new(q, n)?;
    let size = span_size(q, n as usize, budget)?;
    let big = frame.big().clone();
    Ok((0..size)
        .into_par_iter()
        .filter(|&i| frame.is_completely_normal(&big.from_index(i)))
        .count() as u64)
}

/// Complete generators of one cyclotomic module.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleCensus {
    pub k: u64,
    pub exceptional: bool,
    pub size: u64,
    pub generators: u64,
    /// Elements on which the two generator tests disagree.
    pub disagreements: u64,
}

/// Enumerates every `C_k` through its projector and counts complete
/// generators with both tests.
pub fn module_censuses(q: u64, n: u64, budget: u64) -> Result<Vec<ModuleCensus>> {
    let frame = ModuleFrame::new(q, n)?;
    let p = frame.p();
    let m = frame.big().m();
    crate::nt::divisors(frame.n_prime())
        .into_iter()
        .map(|k| {
            let basis = frame.module_basis(k)?;
            let size = span_size(p, basis.len(), budget)?;
            let t1 = frame.generator_test(k)?;
            let t2 = frame.generator_test_by_levels(k)?;
            let (generators, disagreements) = (0..size)
                .into_par_iter()
                .map(|i| {
                    let w = span_element(&basis, p, m, i);
                    let a = frame.passes(&t1, &w);
                    let b = frame.passes(&t2, &w);
                    (a as u64, (a != b) as u64)
                })
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            Ok(ModuleCensus {
                k,
                exceptional: frame.is_exceptional(k),
                size,
                generators,
                disagreements,
            })
        })
        .collect()
}

/// Checks on every element that complete normality agrees with every
/// cyclotomic component being a complete generator.
pub fn decomposition_equivalence(q: u64, n: u64, budget: u64) -> Result<bool> {
    let r = regularity(q, n)?;
    if !r.regular {
        return Err(Error::NotRegular {
            q,
            n,
            rad: r.rad,
            ord: r.ord,
            gcd: r.gcd,
        });
    }
    let frame = ModuleFrame::new(q, n)?;
    let size = span_size(q, n as usize, budget)?;
    let tests = crate::nt::divisors(frame.n_prime())
        .into_iter()
        .map(|k| Ok((frame.projector(k)?.clone(), frame.generator_test(k)?)))
        .collect::<Result<Vec<_>>>()?;
    let big = frame.big().clone();
    Ok((0..size).into_par_iter().all(|i| {
        let z = big.from_index(i);
        let direct = frame.is_completely_normal(&z);
        let split = tests
            .iter()
            .all(|(pr, t)| frame.passes(t, &FieldElem(pr.mul_vec(z.coeffs()))));
        direct == split
    }))
}

/// A census result in the common output shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    pub pair: (u64, u64),
    pub module: String,
    pub lattice_counts: Option<BTreeMap<LatticeLabel, u64>>,
    #[serde(with = "crate::dec")]
    pub cn_count: BigUint,
    #[serde(with = "crate::dec")]
    pub formula_count: BigUint,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl CensusReport {
    /// Whole-field census against the counting formula.
    pub fn field(q: u64, n: u64, budget: u64) -> Result<Self> {
        let cn = BigUint::from(cn_census(q, n, budget)?);
        let formula = count_cn(q, n)?;
        Ok(CensusReport {
            pair: (q, n),
            module: format!("F_{{{q}^{n}}}"),
            lattice_counts: None,
            matches: cn == formula,
            cn_count: cn,
            formula_count: formula,
        })
    }

    /// Product of per-module generator counts against the counting formula.
    pub fn modules(q: u64, n: u64, budget: u64) -> Result<Self> {
        let parts = module_censuses(q, n, budget)?;
        let cn: BigUint = parts.iter().map(|c| BigUint::from(c.generators)).product();
        let formula = count_cn(q, n)?;
        let agree = parts.iter().all(|c| c.disagreements == 0);
        Ok(CensusReport {
            pair: (q, n),
            module: "product over C_k".into(),
            lattice_counts: None,
            matches: agree && cn == formula,
            cn_count: cn,
            formula_count: formula,
        })
    }

    /// Lattice census over `W_{k,f}`; counts are compared with the table
    /// values and the formula column holds their total.
    pub fn lattice(c: &LatticeCensus) -> Self {
        let expected_total: u64 = c.expected.as_ref().map_or(0, |e| e.values().sum());
        CensusReport {
            pair: c.pair,
            module: format!("W_{{{},{}}} ({})", c.k, c.f, c.side),
            lattice_counts: Some(c.counts.clone()),
            cn_count: BigUint::from(c.counts.get(&LatticeLabel::Top).copied().unwrap_or(0)),
            formula_count: BigUint::from(expected_total),
            matches: c.matches,
        }
    }
}
