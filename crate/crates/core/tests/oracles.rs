mod common;

use std::collections::HashMap;

use common::solve_dense;
use regwait_core::markov::{expected_hitting_time, hitting_probability};
use regwait_core::mutation_chain::build_match_chain;
use regwait_core::population::{moran_excursion_births, ExcursionCondition};
use regwait_core::stats::tv_to_poisson;
use regwait_core::word_stats::{initial_condition_bounds, overlap_profile, time_t_bounds};
use regwait_core::DnaWord;

#[test]
fn match_chain_times_against_dense_solve() {
    for w in [3, 6, 8] {
        let chain = build_match_chain(w).unwrap();
        // (I - P) u = 1 on states 0..w-1, u(w) = 0
        let a: Vec<Vec<f64>> = (0..w)
            .map(|x| (0..w).map(|y| f64::from(x == y) - chain.transition(x, y)).collect())
            .collect();
        let u = solve_dense(a, vec![1.0; w]);
        let fast = expected_hitting_time(&chain, w).unwrap();
        for x in 0..w {
            assert!((u[x] / fast[x] - 1.0).abs() < 1e-9, "W={w} x={x}");
        }
    }
}

#[test]
fn match_chain_hitting_probability_against_dense_solve() {
    let w = 8;
    let chain = build_match_chain(w).unwrap();
    let n = w - 1;
    let a: Vec<Vec<f64>> = (1..w)
        .map(|x| (1..w).map(|y| f64::from(x == y) - chain.transition(x, y)).collect())
        .collect();
    let b: Vec<f64> = (1..w).map(|x| chain.transition(x, w)).collect();
    let h = solve_dense(a, b);
    let fast = hitting_probability(&chain, 0, w).unwrap();
    for i in 0..n {
        assert!((h[i] / fast[i + 1] - 1.0).abs() < 1e-9);
    }
}

/// Distribution of the number of circular windows equal to `word` over all
/// `4^L` sequences.
fn exact_match_counts(word: &DnaWord, l: usize) -> Vec<f64> {
    let w = word.len();
    let target = word.codes();
    let mut counts = vec![0u64; l + 1];
    for s in 0u32..1 << (2 * l) {
        let letter = |i: usize| ((s >> (2 * (i % l))) & 3) as u8;
        let hits = (0..l).filter(|&start| (0..w).all(|j| letter(start + j) == target[j])).count();
        counts[hits] += 1;
    }
    let total = (1u64 << (2 * l)) as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

#[test]
fn short_words_within_chen_stein_bound() {
    for word in DnaWord::all(2) {
        let pmf = exact_match_counts(&word, 8);
        let r = initial_condition_bounds(&word, 8).unwrap();
        let tv = tv_to_poisson(&pmf, r.lambda);
        assert!(tv <= r.tv_bound, "{word}: tv {tv} > bound {}", r.tv_bound);
        assert!((pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum::<f64>() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn category_determines_initial_b2() {
    let mut by_category: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut sizes: HashMap<Vec<usize>, usize> = HashMap::new();
    for word in DnaWord::all(6).filter(|w| !w.is_constant()) {
        let profile = overlap_profile(&word);
        let r = initial_condition_bounds(&word, 1024).unwrap();
        let per_gamma = r.b2 / r.lambda;
        assert_eq!(per_gamma, 2.0 * profile.q0());
        let shifts = profile.exact_shifts();
        *sizes.entry(shifts.clone()).or_default() += 1;
        let seen = *by_category.entry(shifts).or_insert(per_gamma);
        assert_eq!(seen, per_gamma, "{word}");
    }
    let expected = [
        (vec![], 2832),
        (vec![5], 948),
        (vec![4], 180),
        (vec![4, 5], 60),
        (vec![3], 48),
        (vec![3, 5], 12),
        (vec![2, 4], 12),
    ];
    assert_eq!(sizes.len(), expected.len());
    for (shifts, n) in expected {
        assert_eq!(sizes[&shifts], n, "{shifts:?}");
    }
}

#[test]
fn tv_depends_only_on_overlap_profile() {
    let mut seen: HashMap<_, f64> = HashMap::new();
    for word in DnaWord::all(6) {
        let tv = time_t_bounds(&word, 1024, 1.0).unwrap().tv_bound;
        let prev = *seen.entry(overlap_profile(&word)).or_insert(tv);
        assert_eq!(prev, tv, "{word}");
    }
    // swapping A<->G and C<->T keeps the profile, so the bound too
    let a: DnaWord = "ACAGCTGT".parse().unwrap();
    let b: DnaWord = "GTGATCAC".parse().unwrap();
    assert_eq!(
        time_t_bounds(&a, 1024, 1.0).unwrap().tv_bound,
        time_t_bounds(&b, 1024, 1.0).unwrap().tv_bound
    );
}

/// Expected births in an excursion of the Moran jump chain conditioned on
/// how it ends, from first-step equations on the conditioned chain.
fn moran_births_oracle(n: u64, condition: ExcursionCondition) -> f64 {
    let m = (2 * n) as usize;
    // probability of ending the way we condition on, from state k
    let h = |k: usize| match condition {
        ExcursionCondition::Loss => (m - k) as f64 / m as f64,
        ExcursionCondition::Fixation => k as f64 / m as f64,
    };
    let interior: Vec<usize> = (1..m).collect();
    let q = |k: usize, j: usize| 0.5 * h(j) / h(k);
    // visits G = (I - Q)^-1 applied to the indicator of the start state
    let dim = interior.len();
    let mut a = vec![vec![0.0; dim]; dim];
    for (i, &k) in interior.iter().enumerate() {
        a[i][i] = 1.0;
        for (j, &l) in interior.iter().enumerate() {
            if l + 1 == k || l == k + 1 {
                // transposed: visits solve G^T from the start state
                a[j][i] -= q(k, l);
            }
        }
    }
    let mut start = vec![0.0; dim];
    start[0] = 1.0;
    let visits = solve_dense(a, start);
    interior
        .iter()
        .zip(&visits)
        .map(|(&k, v)| {
            let type_one = k as f64 / (4.0 * n as f64 - 2.0 * k as f64);
            v * (type_one + q(k, k + 1))
        })
        .sum()
}

#[test]
fn moran_exact_sums_against_first_step_oracle() {
    for n in [2, 3, 7] {
        for cond in [ExcursionCondition::Loss, ExcursionCondition::Fixation] {
            let exact = moran_excursion_births(n, cond).unwrap().mean_births;
            let oracle = moran_births_oracle(n, cond);
            assert!((exact / oracle - 1.0).abs() < 1e-10, "N={n} {cond:?}: {exact} vs {oracle}");
        }
    }
}
