use proptest::prelude::*;
use silver_rgd::schedules::{constant_schedule, rate_r, restart_plan, silver_prefix, silver_schedule, silver_step, RHO};

proptest! {
    #[test]
    fn levels_are_palindromes_and_nest(k in 1u32..=16) {
        let s = silver_schedule(k).unwrap().entries;
        prop_assert_eq!(s.len(), (1usize << k) - 1);
        prop_assert!(s.iter().eq(s.iter().rev()));
        let next = silver_schedule(k + 1).unwrap().entries;
        prop_assert_eq!(&next[..s.len()], &s[..]);
        prop_assert_eq!(next[s.len()], 1.0 + RHO.powi(k as i32 - 1));
    }

    #[test]
    fn prefix_matches_index_form(n in 0usize..5000) {
        let p = silver_prefix(n);
        prop_assert_eq!(p.len(), n);
        for (i, e) in p.entries.iter().enumerate() {
            prop_assert_eq!(*e, silver_step(i as u64));
        }
    }

    #[test]
    fn smoothness_divides_applied_steps(l in 1e-3f64..1e3, i in 0usize..100) {
        let s = silver_prefix(100).with_smoothness(l).unwrap();
        prop_assert!((s.applied(i) * l - s.eta(i)).abs() <= 1e-12 * s.eta(i));
        let c = constant_schedule(1.5, 10).unwrap().with_smoothness(l).unwrap();
        prop_assert!((c.applied(i) - 1.5 / l).abs() <= 1e-15 / l);
    }

    #[test]
    fn restart_blocks_contract(kappa in 1.5f64..1e9) {
        let p = restart_plan(kappa, 3).unwrap();
        prop_assert_eq!(p.inner_iters, (1usize << p.k_star) - 1);
        prop_assert_eq!(p.total, 3 * p.inner_iters);
        prop_assert!(2.0 * kappa * rate_r(p.k_star) <= 2.0 / RHO);
    }
}

#[test]
fn rate_is_decreasing() {
    for k in 1..30 {
        assert!(rate_r(k + 1) < rate_r(k));
    }
    assert!((rate_r(1) - 0.18158466).abs() < 1e-8);
}
