use std::time::Instant;

use cnbase::classify::*;
use cnbase::nt::{divisors, euler_phi, factor_qn_minus_1, RhoBudget};
use num_bigint::BigUint;

fn three_mod_four_prime_powers(max: u64) -> Vec<u64> {
    (3..=max)
        .filter(|&q| q % 4 == 3 && cnbase::nt::prime_power(q).is_ok())
        .collect()
}

#[test]
fn section_9_and_10_fixtures() {
    // (q, n, Omega_c, omega)
    let table = [
        (19, 8, 6, 6),
        (11, 8, 6, 5),
        (11, 16, 10, 7),
        (7, 8, 6, 4),
        (7, 16, 12, 6),
        (7, 24, 18, 11),
        (3, 8, 6, 3),
        (3, 16, 10, 5),
    ];
    for (q, n, omega_c, omega) in table {
        let r = sufficient_criterion(q, n).unwrap();
        assert_eq!(r.detail.big_omega_c, omega_c, "({q},{n})");
        assert_eq!(r.detail.omega, Some(omega), "({q},{n})");
        // 2^(omega + Omega_c) against q^(n/2) is the form used for the passing pairs
        let two_pow = BigUint::from(1u32) << (omega + omega_c);
        let sqrt = r.lhs_sqrt.clone().unwrap();
        if q != 3 {
            assert!(two_pow < sqrt, "({q},{n})");
            assert!(r.holds);
        } else {
            assert!(!r.holds);
        }
    }
    assert_eq!(sufficient_criterion(3, 8).unwrap().lhs_sqrt.unwrap(), BigUint::from(81u32));
    assert_eq!(sufficient_criterion(3, 16).unwrap().rhs, BigUint::from(31713u32));
}

#[test]
fn partition_and_phi_sum() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 19, 23, 27] {
        for n in 1..=96u64 {
            if !is_regular(q, n) {
                continue;
            }
            let p = profile_with(q, n, RhoBudget::Iterations(0)).unwrap();
            let mut all: Vec<u64> = p.divisor_partition.values().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, divisors(p.n_prime), "({q},{n})");
            let phi_sum: u64 = all.iter().map(|&k| euler_phi(k)).sum();
            assert_eq!(phi_sum, p.n_prime);
            let mut covered: Vec<u64> = p.set_n().into_iter().chain(p.set_e.clone()).collect();
            covered.sort_unstable();
            assert_eq!(covered, all);
            if !p.set_e.is_empty() {
                assert!(q % 4 == 3 && p.b >= 3);
            }
            if q % 4 == 3 && n % 2 == 0 {
                let e = p.e.unwrap();
                // the level structure of the exceptional and doubly-primed sets
                for (&j, ds) in &p.divisor_partition {
                    for k in ds {
                        let in_e = p.set_e.contains(k);
                        assert_eq!(in_e, (3..=e.min(p.b)).contains(&j));
                        assert_eq!(p.set_n_doubleprime.contains(k), j > e);
                    }
                }
                let l = &p.level_sums;
                assert_eq!(l[&1], l[&0]);
                if p.b >= 2 {
                    assert_eq!(l[&2], l[&0]);
                }
                for j in 3..=e.min(p.b) {
                    assert_eq!(l[&j], (1 << (j - 3)) * l[&0], "({q},{n}) j={j}");
                }
                assert_eq!(p.big_omega_c, p.big_omega + 3 * p.big_omega_eps);
            }
            if q % 4 == 3 {
                for k in [1u64, 2, 4] {
                    if let Some(&c) = p.f_counts.get(&k) {
                        assert_eq!(c, 1);
                    }
                }
            }
        }
    }
}

#[test]
fn completely_basic_two_routes_agree() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 19, 23, 25, 27] {
        for n in 1..=200u64 {
            if !is_regular(q, n) {
                continue;
            }
            assert_eq!(
                is_completely_basic(q, n),
                is_completely_basic_via_suborder(q, n).unwrap(),
                "({q},{n})"
            );
        }
    }
}

#[test]
fn completely_basic_implies_regular() {
    for q in 2..=30u64 {
        for n in 1..=120u64 {
            if is_completely_basic(q, n) {
                assert!(is_regular(q, n), "({q},{n})");
            }
        }
    }
}

#[test]
fn omega_c_within_case_bounds() {
    for q in three_mod_four_prime_powers(23) {
        for n in (2..=128u64).step_by(2) {
            if !is_regular(q, n) {
                continue;
            }
            let p = profile_with(q, n, RhoBudget::Iterations(0)).unwrap();
            let b = omega_c_upper_bound(q, n).unwrap();
            assert!(p.big_omega_c <= b.sharp, "({q},{n}) {b:?}");
            assert!(b.sharp <= b.uc);
        }
    }
}

#[test]
fn omega_bound_dominates_true_omega() {
    for q in three_mod_four_prime_powers(31) {
        for n in (2..=24u64).step_by(2) {
            let w = factor_qn_minus_1(q, n, RhoBudget::Unlimited)
                .into_complete()
                .unwrap()
                .omega() as i64;
            let b = omega_upper_bound(q, n, 64);
            assert!(w <= b.integer_bound, "({q},{n})");
            assert!((w as f64) < b.value);
        }
    }
}

#[test]
fn cube_bound_never_fails() {
    let mut seen = 0;
    for q in three_mod_four_prime_powers(19) {
        for n in (2..=400u64).step_by(2) {
            if n % 8 == 0 || !is_regular(q, n) {
                continue;
            }
            if let Some(reports) = cube_bound(q, n).unwrap() {
                assert!(!reports.is_empty(), "({q},{n})");
                for r in reports {
                    assert!(r.passes(), "{r:?}");
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 0);
    // the desk range with n <= 48 has no such pairs at all
    for q in three_mod_four_prime_powers(19) {
        for n in (2..=48u64).step_by(4) {
            if is_regular(q, n) {
                assert!(cube_bound(q, n).unwrap().map_or(true, |v| v.iter().all(|r| r.passes())));
            }
        }
    }
}

#[test]
fn weak_criterion_implies_criterion_on_small_range() {
    for q in three_mod_four_prime_powers(50) {
        for n in (2..=32u64).step_by(2) {
            if !is_regular(q, n) {
                continue;
            }
            if weak_criterion(q, n).unwrap().holds {
                assert!(sufficient_criterion(q, n).unwrap().holds, "({q},{n})");
            }
        }
    }
}

#[test]
fn count_matches_product_shape() {
    // (3,16) = (3,8) count times (3^2 - 1)^4 for k = 16
    let a = count_cn(3, 8).unwrap();
    let b = count_cn(3, 16).unwrap();
    assert_eq!(b, a * BigUint::from(8u32).pow(4));
}

#[test]
fn scan_small_range_fails_only_at_3_8_and_3_16() {
    let t = Instant::now();
    let failures = scan_pairs(
        2..=19,
        1..=64,
        ScanFilter {
            q_mod: None,
            n_mod: Some((8, 0)),
        },
        CriterionOptions::default(),
    )
    .unwrap();
    let pairs: Vec<_> = failures.iter().map(|r| r.pair).collect();
    assert_eq!(pairs, vec![(3, 8), (3, 16)]);
    eprintln!("scan took {:?}", t.elapsed());
}

#[test]
fn pair_report_fields() {
    let r = pair_report(3, 8, DEFAULT_RHO_BUDGET).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["exceptional_divisors"], serde_json::json!([8]));
    assert_eq!(v["Omega_c"], 6);
    assert_eq!(v["cn_count"], "1536");
    assert_eq!(v["criterion_76_holds"], false);
    let r = pair_report(2, 6, DEFAULT_RHO_BUDGET).unwrap();
    assert!(!r.regular);
    let r = pair_report(5, 1, DEFAULT_RHO_BUDGET).unwrap();
    assert_eq!(r.cn_count, Some(BigUint::from(4u32)));
}
