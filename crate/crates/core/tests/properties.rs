use num_bigint::BigUint;
use proptest::prelude::*;

use perclab::bound::{
    binom_kth_root_limit_check, bound_at, log_binomial, log_path_count, psi_finite, threshold_p,
    LIMIT,
};
use perclab::count::{binomial, count_row, ln_big, pascal_next, path_count};
use perclab::lattice::{
    arc_recursive, arc_t, arc_z2, ball, ball_bfs, is_on_arc_t, LatticeVariant, Sign, Vertex,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_binomial_matches_exact(k in 1u64..=200, frac in 0.0f64..=1.0) {
        let i = (frac * k as f64).round() as u64;
        let exact = ln_big(&binomial(k, i).unwrap());
        let got = log_binomial(k, i).unwrap();
        prop_assert!((got - exact).abs() <= 1e-12 * exact.max(1.0), "k={} i={} got={} exact={}", k, i, got, exact);
    }

    #[test]
    fn threshold_cancels_count(k in 1u64..=300, frac in 0.0f64..=1.0) {
        let i = (frac * k as f64).round() as u64;
        let p = threshold_p(k, i).unwrap();
        let log_product = k as f64 * p.ln() + log_path_count(k, i).unwrap();
        prop_assert!(log_product.abs() < 1e-9 * k as f64);
    }

    #[test]
    fn psi_sign_follows_threshold(k in 2u64..=2000, delta in 0.01f64..0.2) {
        let b = bound_at(k).unwrap().b_k;
        prop_assert!(psi_finite(k, (b + delta).min(1.0)).unwrap().log_psi > 0.0);
        prop_assert!(psi_finite(k, b - delta.min(b / 2.0)).unwrap().log_psi < 0.0);
    }

    #[test]
    fn counts_follow_pascal(k in 1u64..=120) {
        let row = count_row(k).unwrap();
        let next = count_row(k + 1).unwrap();
        let coeffs: Vec<BigUint> = (0..=k).map(|i| row.coefficient(i).unwrap()).collect();
        let next_coeffs = pascal_next(&coeffs).unwrap();
        for (i, c) in next_coeffs.iter().enumerate() {
            prop_assert_eq!(c << (k + 1 - i as u64), next.counts[i].clone());
            prop_assert_eq!(path_count(k + 1, i as u64).unwrap(), next.counts[i].clone());
        }
    }

    #[test]
    fn kth_root_below_two(half in 1u64..50_000) {
        let r = binom_kth_root_limit_check(2 * half + 1).unwrap();
        prop_assert!(r > 1.0 && r < 2.0);
    }

    #[test]
    fn arc_t_closed_form(a1 in -12i64..=12, a2 in -12i64..=12, k in 1u64..=10) {
        let v = Vertex { a1, a2 };
        prop_assert_eq!(is_on_arc_t(v, k), arc_t(k).unwrap().contains(&v));
    }
}

#[test]
fn bound_decreases_toward_limit() {
    let ks: Vec<u64> = (0..=20).map(|e| (1u64 << e) + 1).collect();
    let b: Vec<f64> = ks.iter().map(|&k| bound_at(k).unwrap().b_k).collect();
    assert!(b.windows(2).all(|w| w[0] > w[1]), "{b:?}");
    assert!(b.iter().all(|&x| x > LIMIT));
}

#[test]
fn arcs_agree_with_recursion() {
    for k in 1..=9 {
        let plus: std::collections::BTreeSet<Vertex> = arc_z2(k, Sign::Plus)
            .unwrap()
            .vertices
            .into_iter()
            .collect();
        assert_eq!(plus, arc_recursive(k, LatticeVariant::Z2).unwrap());
        assert_eq!(
            arc_t(k).unwrap(),
            arc_recursive(k, LatticeVariant::TriUp).unwrap()
        );
    }
}

#[test]
fn balls_agree_with_search() {
    for variant in [
        LatticeVariant::Z2,
        LatticeVariant::TriUp,
        LatticeVariant::TriRight,
    ] {
        for k in 0..=15 {
            assert_eq!(ball(k, variant), ball_bfs(k, variant), "{variant} k={k}");
        }
    }
}
