mod common;

use common::solve_dense;
use proptest::prelude::*;
use regwait_core::markov::{expected_hitting_time, greens_function, hitting_probability};
use regwait_core::population::{fermi_binding, mixture_mean_years};
use regwait_core::word_stats::{expected_almost_matches, overlap_profile, time_t_bounds};
use regwait_core::{BirthDeathChain, DnaWord};

/// Random irreducible chain on `0..=n`, rows scaled so holding is positive.
fn chain_strategy() -> impl Strategy<Value = BirthDeathChain> {
    (2usize..12)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0.05f64..1.0, n + 1),
                proptest::collection::vec(0.05f64..1.0, n + 1),
            )
        })
        .prop_map(|(mut up, mut down)| {
            let n = up.len() - 1;
            up[n] = 0.0;
            down[0] = 0.0;
            for x in 0..=n {
                let s = up[x] + down[x];
                if s > 0.95 {
                    up[x] *= 0.95 / s;
                    down[x] *= 0.95 / s;
                }
            }
            BirthDeathChain::new(up, down).unwrap()
        })
}

proptest! {
    #[test]
    fn hitting_times_match_dense_solve(chain in chain_strategy(), t in 0usize..12) {
        let n = chain.max_state();
        let target = t % (n + 1);
        let others: Vec<usize> = (0..=n).filter(|&x| x != target).collect();
        let a: Vec<Vec<f64>> = others
            .iter()
            .map(|&x| others.iter().map(|&y| f64::from(x == y) - chain.transition(x, y)).collect())
            .collect();
        let u = solve_dense(a, vec![1.0; others.len()]);
        let fast = expected_hitting_time(&chain, target).unwrap();
        for (i, &x) in others.iter().enumerate() {
            prop_assert!((u[i] / fast[x] - 1.0).abs() < 1e-8, "x={} {} vs {}", x, u[i], fast[x]);
        }
        prop_assert_eq!(fast[target], 0.0);
    }

    #[test]
    fn hitting_probability_is_harmonic(chain in chain_strategy()) {
        let n = chain.max_state();
        let h = hitting_probability(&chain, 0, n).unwrap();
        for x in 1..n {
            let next = chain.up(x) * h[x + 1] + chain.down(x) * h[x - 1] + chain.stay(x) * h[x];
            prop_assert!((next - h[x]).abs() < 1e-12);
            prop_assert!(h[x] >= h[x - 1]);
        }
    }

    #[test]
    fn greens_function_sums_to_hitting_time(chain in chain_strategy(), from in 0usize..12) {
        let n = chain.max_state();
        let from = from % n;
        let total: f64 = (0..n).map(|y| greens_function(&chain, from, y, n).unwrap()).sum();
        let u = expected_hitting_time(&chain, n).unwrap();
        prop_assert!((total / u[from] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn relabelling_letters_keeps_bounds(
        codes in proptest::collection::vec(0u8..4, 3..=10),
        perm in Just([0u8, 1, 2, 3]).prop_shuffle(),
    ) {
        let a = DnaWord::from_codes(&codes).unwrap();
        let b = DnaWord::from_codes(&codes.iter().map(|&c| perm[c as usize]).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(overlap_profile(&a), overlap_profile(&b));
        let ra = time_t_bounds(&a, 1024, 1.0).unwrap();
        let rb = time_t_bounds(&b, 1024, 1.0).unwrap();
        prop_assert_eq!(ra.tv_bound, rb.tv_bound);
        prop_assert_eq!(ra.clump_size, rb.clump_size);
    }

    #[test]
    fn tv_bound_matches_its_terms(codes in proptest::collection::vec(0u8..4, 2..=12), lambda in 0.01f64..5.0) {
        let w = DnaWord::from_codes(&codes).unwrap();
        let r = time_t_bounds(&w, 1024, lambda).unwrap();
        let expected = 2.0 * (r.b1 + r.b2) * (1.0 - (-lambda).exp()) / lambda;
        prop_assert!((r.tv_bound - expected).abs() < 1e-12);
        prop_assert!(r.b1 >= 0.0 && r.b2 >= 0.0 && r.clump_size >= 1.0);
    }

    #[test]
    fn almost_matches_sum_to_segment(w in 1usize..=16, l in 1usize..5000) {
        let total: f64 = (0..=w).map(|i| expected_almost_matches(w, l, i).unwrap()).sum();
        prop_assert!((total / l as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fermi_is_a_decreasing_probability(r in -10.0f64..10.0, r0 in -5.0f64..5.0, eps in 0.0f64..20.0) {
        let p = fermi_binding(r, r0, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(fermi_binding(r + 1.0, r0, eps).unwrap() <= p);
    }

    #[test]
    fn mixture_never_exceeds_base(m in 0.01f64..50.0, base in 1.0f64..1e6) {
        let y = mixture_mean_years(base, m, 1.0).unwrap();
        prop_assert!(y > 0.0 && y <= base * (1.0 - (-m).exp()) + 1e-9 * base);
    }
}
