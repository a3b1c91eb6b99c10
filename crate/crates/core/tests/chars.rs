use cnbase::chars::*;
use cnbase::modstruct::LatticeLabel;
use cnbase::nt::{divisors, euler_phi};
use cnbase::poly::{cyclotomic_poly, factor, Poly};
use num_complex::Complex;
use proptest::prelude::*;

fn poly(t: &CharTables64, d: u64, s: &str) -> Poly {
    Poly::parse(t.frame().level(d).unwrap().sub(), s).unwrap()
}

#[test]
fn character_orders_agree_with_brute_force() {
    for (q, n) in [(3u64, 2u64), (3, 4), (2, 4), (5, 2)] {
        let t = CharTables64::new(q, n).unwrap();
        let big = t.frame().big().clone();
        for u in big.elements() {
            let chi = AdditiveChar { u };
            for &d in t.frame().divisors() {
                assert_eq!(
                    t.char_order_additive(&chi, d).unwrap(),
                    t.char_order_brute(&chi, d).unwrap()
                );
            }
        }
    }
    let t = CharTables64::new(3, 2).unwrap();
    let big = t.frame().big().clone();
    assert!(t.char_order_additive(&AdditiveChar { u: big.zero() }, 1).unwrap().is_one());
    for u in big.elements() {
        if t.frame().is_normal(&u, 1).unwrap() {
            let o = t.char_order_additive(&AdditiveChar { u }, 1).unwrap();
            assert_eq!(o.to_string(), "x^2+2");
        }
    }
}

#[test]
fn gamma_sizes() {
    // |Gamma_{d,g}| = q^{d deg g} for every monic divisor g of x^{n'/d} - 1
    for (q, n) in [(3u64, 4u64), (3, 8), (5, 4)] {
        let t = CharTables64::new(q, n).unwrap();
        for &d in t.frame().divisors() {
            let sub = t.frame().level(d).unwrap().sub().clone();
            let whole = Poly::x_pow_minus_one(&sub, (n / d) as usize);
            for h in factor(&whole).unwrap().distinct() {
                let size = t.gamma(d, h).unwrap().len() as u64;
                assert_eq!(size, q.pow((d as usize * h.degree().unwrap()) as u32));
            }
        }
    }
}

#[test]
fn characters_are_distinct() {
    for (q, n) in [(2u64, 6u64), (3, 4), (5, 3), (7, 2)] {
        let t = CharTables64::new(q, n).unwrap();
        let big = t.frame().big().clone();
        let mut rows = std::collections::BTreeSet::new();
        for u in big.elements() {
            let chi = AdditiveChar { u };
            let row: Vec<(i64, i64)> = big
                .elements()
                .map(|z| {
                    let v = t.additive(&chi, &z);
                    ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64)
                })
                .collect();
            rows.insert(row);
        }
        assert_eq!(rows.len() as u64, t.size());
    }
}

#[test]
fn orthogonality() {
    let t = CharTables64::new(3, 2).unwrap();
    let r = t.orthogonality_check(1, &poly(&t, 1, "x-1")).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.summands, 3);
    let r = t.orthogonality_check(1, &poly(&t, 1, "1")).unwrap();
    assert!(r.passed && r.summands == 1);
    let t = CharTables64::new(3, 4).unwrap();
    let r = t.orthogonality_check(1, &poly(&t, 1, "x^2+1")).unwrap();
    assert!(r.passed && r.summands == 9);
    let t = CharTables64::new(3, 8).unwrap();
    for &d in &[1u64, 2, 4, 8] {
        let sub = t.frame().level(d).unwrap().sub().clone();
        let whole = Poly::x_pow_minus_one(&sub, (8 / d) as usize);
        for h in factor(&whole).unwrap().distinct() {
            assert!(t.orthogonality_check(d, h).unwrap().passed);
        }
    }
}

#[test]
fn a_gd_is_the_order_indicator() {
    let t = CharTables64::new(3, 2).unwrap();
    assert!(t.verify_a_gd(1, &poly(&t, 1, "x-1")).unwrap().passed);
    assert!(t.verify_a_gd(1, &poly(&t, 1, "1")).unwrap().passed);
    let t = CharTables64::new(3, 4).unwrap();
    let phi4 = cyclotomic_poly(4, t.frame().level(1).unwrap().sub()).unwrap();
    assert!(t.verify_a_gd(1, &phi4).unwrap().passed);
    assert!(t.verify_a_gd(2, &poly(&t, 2, "x+1")).unwrap().passed);
    let t = CharTables64::new(3, 8).unwrap();
    for &d in &[1u64, 2, 4] {
        let sub = t.frame().level(d).unwrap().sub().clone();
        for k in divisors(8 / d) {
            let g = cyclotomic_poly(k, &sub).unwrap();
            let r = t.verify_a_gd(d, &g).unwrap();
            assert!(r.passed, "d={d} k={k} {r:?}");
        }
    }
    // p^a > 1: F_{3^6} over F_3 has n' = 2
    let t = CharTables64::new(3, 6).unwrap();
    assert!(t.verify_a_gd(1, &poly(&t, 1, "x+1")).unwrap().passed);
    assert!(t.verify_a_gd(2, &poly(&t, 2, "x-1")).unwrap().passed);
}

#[test]
fn b_k_normalization() {
    for (q, n) in [(3u64, 4u64), (3, 8), (5, 4)] {
        let t = CharTables64::new(q, n).unwrap();
        for k in divisors(t.frame().n_prime()) {
            if t.frame().is_exceptional(k) {
                continue;
            }
            assert!(t.verify_b_k(k).unwrap().passed, "({q},{n}) k={k}");
        }
    }
}

#[test]
fn exceptional_product_formula() {
    let t = CharTables64::new(3, 8).unwrap();
    let f = poly(&t, 1, "x^2+1");
    let (r, counts) = t.verify_exceptional_product(8, &f).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.points, 6561);
    assert_eq!(counts[&LatticeLabel::Bottom], 1);
    assert_eq!(counts[&LatticeLabel::Top], 48);
    for l in [LatticeLabel::H1, LatticeLabel::H2, LatticeLabel::G1, LatticeLabel::G2] {
        assert_eq!(counts[&l], 8);
    }
    assert_eq!(LatticeLabel::ALL.iter().map(|l| l.mu().abs()).sum::<i64>(), 8);
    assert!(t.verify_exceptional_product(4, &f).is_err());
    let t = CharTables64::new(7, 4).unwrap();
    assert!(t.verify_exceptional_product(8, &f).is_err());
}

#[test]
fn gauss_sums() {
    for (q, n) in [(3u64, 2u64), (3, 4), (2, 4), (5, 2)] {
        let t = CharTables64::new(q, n).unwrap();
        let big = t.frame().big().clone();
        let size = t.size() as f64;
        let g0 = t.gauss_sum(MultiplicativeChar { j: 0 }, &AdditiveChar { u: big.zero() });
        assert!((g0 - Complex::new(size, 0.0)).norm() < 1e-6 * size);
        for j in 0..t.size() - 1 {
            for u in big.elements().step_by(3) {
                let trivial_u = u.is_zero();
                let g = t.gauss_sum(MultiplicativeChar { j }, &AdditiveChar { u });
                let expect = match (j == 0, trivial_u) {
                    (true, true) => size,
                    (false, false) => size.sqrt(),
                    _ => 0.0,
                };
                assert!((g.norm() - expect).abs() < 1e-6 * size, "q={q} n={n} j={j}");
            }
        }
        assert!(t.verify_gauss_sums().passed);
    }
}

#[test]
fn primitivity_indicator() {
    for (q, n, count) in [(3u64, 2u64, 4u64), (2, 2, 2), (2, 1, 1), (3, 4, 32)] {
        let t = CharTables64::new(q, n).unwrap();
        let (p, alt) = t.verify_p().unwrap();
        assert!(p.passed && alt.passed, "{p:?} {alt:?}");
        assert_eq!(t.primitive_count(), count);
        assert_eq!(count, euler_phi(t.size() - 1));
    }
    let t = CharTables64::new(3, 8).unwrap();
    let (p, alt) = t.verify_p().unwrap();
    assert!(p.passed && alt.passed);
}

#[test]
fn single_precision_tables() {
    let t = CharTables32::new(3, 2).unwrap();
    let (p, _) = t.verify_p().unwrap();
    assert!(p.max_deviation < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn additive_characters_are_homomorphisms(u in 0u64..81, a in 0u64..81, b in 0u64..81) {
        let t = CharTables64::new(3, 4).unwrap();
        let big = t.frame().big().clone();
        let chi = AdditiveChar { u: big.from_index(u) };
        let (a, b) = (big.from_index(a), big.from_index(b));
        let lhs = t.additive(&chi, &big.add(&a, &b));
        let rhs = t.additive(&chi, &a) * t.additive(&chi, &b);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn multiplicative_characters_are_homomorphisms(j in 0u64..80, a in 1u64..81, b in 1u64..81) {
        let t = CharTables64::new(3, 4).unwrap();
        let big = t.frame().big().clone();
        let psi = MultiplicativeChar { j };
        let (a, b) = (big.from_index(a), big.from_index(b));
        let lhs = t.multiplicative(psi, &big.mul(&a, &b));
        let rhs = t.multiplicative(psi, &a) * t.multiplicative(psi, &b);
        prop_assert!((lhs - rhs).norm() < 1e-9);
        let ord = t.mult_order(psi);
        let pw = (0..ord).fold(Complex::new(1.0, 0.0), |acc, _| acc * t.multiplicative(psi, &a));
        prop_assert!((pw - Complex::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn bsgs_inverts_powers(t_exp in 0u64..6560) {
        let big = cnbase::ff::build_field(3, 8, None).unwrap();
        let g = big.primitive_element().clone();
        let z = big.pow(&g, t_exp);
        prop_assert_eq!(discrete_log(&big, &g, &z), Some(t_exp));
    }
}
