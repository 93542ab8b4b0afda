//! The match-count chain for a single W-letter site.
//!
//! Each step mutates one uniformly chosen letter to one of its three
//! alternatives. The state is the number of letters agreeing with the target.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{self, BirthDeathChain};

/// Chain on `0..=w` with `p(x, x-1) = x/w`, `p(x, x+1) = (w-x)/3w`.
pub fn build_match_chain(w: usize) -> Result<BirthDeathChain> {
    if w == 0 {
        return Err(Error::InvalidParameter("word length must be at least 1".into()));
    }
    let wf = w as f64;
    let up = (0..=w).map(|x| (w - x) as f64 / (3.0 * wf)).collect();
    let down = (0..=w).map(|x| x as f64 / wf).collect();
    let stay = (0..=w).map(|x| 2.0 * (w - x) as f64 / (3.0 * wf)).collect();
    BirthDeathChain::from_rows(up, down, stay)
}

/// Binomial(w, 1/4) pmf, the equilibrium law of the match count.
pub fn binomial_quarter(w: usize) -> Vec<f64> {
    (0..=w)
        .map(|x| {
            crate::stats::binomial_coefficient(w, x)
                * 0.25f64.powi(x as i32)
                * 0.75f64.powi((w - x) as i32)
        })
        .collect()
}

/// `h(x) = P_x(T_w < T_0)` for the match chain.
pub fn match_hitting_probability(w: usize) -> Result<Vec<f64>> {
    let chain = build_match_chain(w)?;
    markov::hitting_probability(&chain, 0, w)
}

/// Relaxation time of the per-step jump chain, one over the spectral gap `4/(3w)`.
pub fn relaxation_time(w: usize) -> f64 {
    0.75 * w as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct MutationChainSummary {
    pub word_length: usize,
    /// `P_w(T_w^+ < T_0) = h(w - 1)`.
    pub a: f64,
    pub mean_from_zero: f64,
    pub mean_stationary: f64,
    /// `4^w / (1 - a)`.
    pub clump_mean_formula: f64,
    pub relaxation_time: f64,
}

pub fn chain_summary(w: usize) -> Result<MutationChainSummary> {
    let chain = build_match_chain(w)?;
    let h = match_hitting_probability(w)?;
    let a = h[w - 1];
    let u = markov::expected_hitting_time(&chain, w)?;
    let pi = binomial_quarter(w);
    let mean_stationary = pi.iter().zip(&u).map(|(p, t)| p * t).sum();
    Ok(MutationChainSummary {
        word_length: w,
        a,
        mean_from_zero: u[0],
        mean_stationary,
        clump_mean_formula: 4f64.powi(w as i32) / (1.0 - a),
        relaxation_time: relaxation_time(w),
    })
}

/// Uniform bound on `|P_pi(T_w > t) - exp(-t / E_pi T_w)|`: `tau_2 / E_pi T_w`.
pub fn exponential_error_bound(w: usize) -> Result<f64> {
    let summary = chain_summary(w)?;
    Ok(summary.relaxation_time / summary.mean_stationary)
}

/// `E_x T_y` for all `x < y <= w`, row `x`, column `y` (zero elsewhere).
pub fn hitting_time_matrix(w: usize) -> Result<Vec<Vec<f64>>> {
    let chain = build_match_chain(w)?;
    let mut rows = vec![vec![0.0; w + 1]; w + 1];
    for y in 1..=w {
        let u = markov::expected_hitting_time(&chain, y)?;
        for x in 0..y {
            rows[x][y] = u[x];
        }
    }
    Ok(rows)
}

/// Expected times for the chain conditioned to hit `w` before 0 (and the
/// reverse excursion conditioned to hit 0 before `w`).
#[derive(Clone, Debug, Serialize)]
pub struct ConditionedTimes {
    /// `E_x(T_w | T_w < T_0)`.
    pub to_top: Vec<f64>,
    /// `E_x(T_0 | T_0 < T_w)`.
    pub to_bottom: Vec<f64>,
}

pub fn conditioned_times(w: usize) -> Result<ConditionedTimes> {
    let chain = build_match_chain(w)?;
    let up = markov::condition_on_hitting(&chain, w, 0)?;
    let down = markov::condition_on_hitting(&chain, 0, w)?;
    Ok(ConditionedTimes {
        to_top: markov::expected_hitting_time(&up, w)?,
        to_bottom: markov::expected_hitting_time(&down, 0)?,
    })
}
