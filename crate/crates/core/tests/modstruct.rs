use cnbase::classify::count_cn;
use cnbase::error::Error;
use cnbase::ff::{build_field, FieldElem};
use cnbase::modstruct::*;
use cnbase::poly::Poly;
use num_bigint::BigUint;
use proptest::prelude::*;

const B: u64 = DEFAULT_ENUMERATION_BUDGET;

fn frame_with(q: u64, modulus: &str) -> ModuleFrame {
    let p = 3;
    let fp = cnbase::ff::FieldCtx::prime(p).unwrap();
    let g = Poly::parse(&fp, modulus).unwrap();
    let big = cnbase::ff::build_field_with(&g).unwrap();
    ModuleFrame::with_field(q, big).unwrap()
}

#[test]
fn census_matches_formula_small() {
    for (q, n) in [(2u64, 2u64), (3, 2), (3, 4), (5, 4), (4, 2), (2, 5), (3, 8)] {
        let c = cn_census(q, n, B).unwrap();
        assert_eq!(BigUint::from(c), count_cn(q, n).unwrap(), "({q},{n})");
    }
    assert_eq!(cn_census(3, 8, B).unwrap(), 1536);
    assert!(matches!(cn_census(3, 16, B), Err(Error::TooLarge { .. })));
}

#[test]
fn complete_normality_by_definition_in_small_fields() {
    // every element of F_9 and F_81, against independence of conjugates
    for (q, n) in [(3u64, 2u64), (3, 4), (2, 4)] {
        let fr = ModuleFrame::new(q, n).unwrap();
        let big = fr.big().clone();
        for z in big.elements() {
            let by_basis = fr
                .divisors()
                .iter()
                .all(|&d| fr.is_normal_by_basis(&z, d).unwrap());
            assert_eq!(fr.is_completely_normal(&z), by_basis);
        }
    }
}

#[test]
fn module_censuses_multiply_to_count() {
    let r = CensusReport::modules(3, 16, B).unwrap();
    assert_eq!(r.cn_count, BigUint::from(6291456u64));
    assert!(r.matches);
    let parts = module_censuses(3, 16, B).unwrap();
    assert_eq!(parts.iter().map(|c| c.size).max(), Some(6561));
    for (q, n) in [(3u64, 8u64), (7, 8), (5, 4), (3, 6)] {
        let r = CensusReport::modules(q, n, B).unwrap();
        assert!(r.matches, "({q},{n}) {r:?}");
    }
    let full = CensusReport::field(3, 8, B).unwrap();
    assert!(full.matches);
    let v = serde_json::to_value(&full).unwrap();
    assert_eq!(v["cn_count"], "1536");
    assert_eq!(v["match"], true);
}

#[test]
fn generator_routes_agree_everywhere_in_c_k() {
    // every module of F_{3^8}, element by element
    let parts = module_censuses(3, 8, B).unwrap();
    assert!(parts.iter().all(|c| c.disagreements == 0));
    assert_eq!(parts.len(), 4);
}

#[test]
fn explicit_element_components() {
    let fr = frame_with(3, "x^8+x^4-1");
    let big = fr.big().clone();
    let z = big.gen();
    let w8 = big.add(&z, &big.pow(&z, 3));
    assert!(fr.is_complete_generator(&w8, 8).unwrap());
    assert!(fr.is_complete_generator(&big.pow(&z, 2), 4).unwrap());
    assert!(fr.is_complete_generator(&big.one(), 1).unwrap());
    assert!(!fr.is_complete_generator(&big.zero(), 1).unwrap());
    assert_eq!(fr.is_complete_generator(&big.one(), 8).unwrap_err(), Error::NotInModule);
    // the q-order of zeta itself is Phi_8
    assert_eq!(fr.q_order(&z, 1).unwrap().to_string(), "x^4+1");
    let f = &fr.exceptional_factors(8).unwrap()[0];
    let pair = fr.order_pair(&w8, 8, f).unwrap();
    assert_eq!(pair.label, LatticeLabel::Top);
    assert_eq!(fr.order_pair(&big.zero(), 8, f).unwrap().label, LatticeLabel::Bottom);
}

#[test]
fn morgan_mullen_roots_are_completely_normal() {
    for modulus in ["x^8+x^7+2x^3+2x^2+2", "x^16+x^15+2x^6+2x+2"] {
        let fr = frame_with(3, modulus);
        let z = fr.big().gen();
        assert!(fr.is_normal(&z, 1).unwrap());
        assert!(fr.is_completely_normal(&z));
    }
}

#[test]
fn order_pair_table_counts() {
    let fr = ModuleFrame::new(3, 8).unwrap();
    let f = fr.exceptional_factors(8).unwrap().remove(0);
    for c in [
        fr.element_lattice_census(8, &f, B).unwrap(),
        fr.character_lattice_census(8, &f, B).unwrap(),
    ] {
        assert_eq!(c.total, 81);
        assert!(c.matches, "{c:?}");
        assert_eq!(c.counts[&LatticeLabel::Bottom], 1);
        assert_eq!(c.counts[&LatticeLabel::Top], 48);
        for l in [LatticeLabel::H1, LatticeLabel::H2, LatticeLabel::G1, LatticeLabel::G2] {
            assert_eq!(c.counts[&l], 8);
        }
    }
    // |mu| sums to 8 and the phi values add up to |W|
    assert_eq!(LatticeLabel::ALL.iter().map(|l| l.mu().abs()).sum::<i64>(), 8);
    for qd in [3u128, 9, 49] {
        assert_eq!(LatticeLabel::ALL.iter().map(|l| l.phi(qd)).sum::<u128>(), qd * qd);
    }
    for (q, n, k) in [(7u64, 8u64, 8u64), (7, 16, 16), (19, 8, 8), (11, 8, 8)] {
        let fr = ModuleFrame::new(q, n).unwrap();
        for f in fr.exceptional_factors(k).unwrap() {
            let e = fr.element_lattice_census(k, &f, B).unwrap();
            let c = fr.character_lattice_census(k, &f, B).unwrap();
            assert!(e.matches && c.matches, "({q},{n}) k={k} f={f}");
        }
    }
}

#[test]
fn mixed_order_property() {
    assert!(mixed_order_check(3, 8, 8, Some("x^2+1"), B).unwrap());
    assert!(mixed_order_check(3, 16, 8, None, B).unwrap());
    assert!(mixed_order_check(7, 8, 8, None, B).unwrap());
    // with p^a > 1 the module grows but the property still holds
    assert!(mixed_order_check(3, 24, 8, None, B).unwrap());
    assert!(matches!(
        mixed_order_check(3, 8, 4, None, B),
        Err(Error::NotExceptional { k: 4 })
    ));
    assert!(matches!(
        mixed_order_check(7, 8, 8, None, 100),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn decomposition_equivalence_exhaustive() {
    for (q, n) in [(3u64, 4u64), (3, 8), (5, 4), (2, 5), (3, 6)] {
        assert!(decomposition_equivalence(q, n, B).unwrap(), "({q},{n})");
    }
    assert!(matches!(
        decomposition_equivalence(2, 6, B),
        Err(Error::NotRegular { .. })
    ));
}

#[test]
fn exceptional_split_sums_back() {
    let fr = ModuleFrame::new(7, 16).unwrap();
    let big = fr.big().clone();
    for seed in 0..20u64 {
        let z = big.from_index(seed * 1_000_003 % 33_232_930_569_601);
        for (k, parts) in [(8u64, 1usize), (16, 2)] {
            let w = fr.cyclotomic_component(&z, k).unwrap();
            let split = fr.exceptional_split(&w, k).unwrap();
            assert_eq!(split.len(), parts);
            let mut sum = big.zero();
            for (f, wf) in &split {
                let ann = f.compose_x_power(2).pow(fr.p_power() as u64);
                assert!(fr.apply(&ann, fr.central_index(k).unwrap(), wf).unwrap().is_zero());
                sum = big.add(&sum, wf);
            }
            assert_eq!(sum, w);
        }
    }
    let zero = big.zero();
    assert!(fr.exceptional_split(&zero, 16).unwrap().iter().all(|(_, w)| w.is_zero()));
    assert_eq!(
        fr.exceptional_split(&zero, 4).unwrap_err(),
        Error::NotExceptional { k: 4 }
    );
}

fn random_elem(big: &cnbase::ff::FieldCtx, coeffs: &[u32]) -> FieldElem {
    let p = big.p() as u32;
    let v: Vec<u32> = coeffs.iter().take(big.m()).map(|c| c % p).collect();
    big.from_coeffs(&v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_sum_and_lie_in_modules(c in prop::collection::vec(0u32..1000, 16)) {
        for (q, n) in [(3u64, 8u64), (7, 8), (3, 16), (5, 6)] {
            let fr = ModuleFrame::new(q, n).unwrap();
            let big = fr.big().clone();
            let z = random_elem(&big, &c);
            let mut sum = big.zero();
            for k in cnbase::nt::divisors(fr.n_prime()) {
                let zk = fr.cyclotomic_component(&z, k).unwrap();
                prop_assert!(fr.in_cyclotomic_module(&zk, k).unwrap());
                let phi = cnbase::poly::cyclotomic_poly(k, fr.level(1).unwrap().sub()).unwrap();
                let ann = phi.pow(fr.p_power() as u64);
                prop_assert!(fr.apply(&ann, 1, &zk).unwrap().is_zero());
                sum = big.add(&sum, &zk);
            }
            prop_assert_eq!(sum, z);
        }
    }

    #[test]
    fn orders_are_galois_invariant(c in prop::collection::vec(0u32..1000, 12)) {
        for (q, n) in [(3u64, 12u64), (9, 4), (2, 12)] {
            let fr = ModuleFrame::new(q, n).unwrap();
            let z = random_elem(fr.big(), &c);
            for &d in fr.divisors() {
                let o = fr.q_order(&z, d).unwrap();
                prop_assert_eq!(fr.q_order(&fr.sigma(&z, d), d).unwrap(), o.clone());
                prop_assert!(fr.apply(&o, d, &z).unwrap().is_zero());
                prop_assert_eq!(fr.is_normal(&z, d).unwrap(), fr.is_normal_by_basis(&z, d).unwrap());
            }
        }
    }
}

#[test]
fn default_fields_are_used() {
    let fr = ModuleFrame::new(3, 8).unwrap();
    assert_eq!(fr.big().modulus(), build_field(3, 8, None).unwrap().modulus());
}
