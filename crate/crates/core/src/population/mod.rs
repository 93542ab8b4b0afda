//! Population-level waiting times: fixation-chain approximations, Moran
//! excursions, coalescent arithmetic and year conversions.

pub mod killed;
pub mod moran;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{expected_hitting_time, greens_function};
use crate::mutation_chain::{binomial_quarter, build_match_chain};
use crate::word_stats::expected_almost_matches;

pub use killed::{killed_fixation_chain_sim, KilledChainConfig, KilledChainResult, MinusOneRule};
pub use moran::{
    births_asymptote, moran_exact_visits, moran_excursion_births, moran_excursion_simulate,
    moran_excursion_simulate_from, ExcursionCondition, ExcursionStats, MoranSimulation,
};

/// Above this value of `N^3 mu^2` triple mutations are no longer rare and the
/// stopping-time approximation loses accuracy.
pub const REGIME_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PopulationParams {
    /// Diploid population size.
    pub population_size: u64,
    /// Per-nucleotide, per-generation mutation probability.
    pub mu: f64,
    pub word_length: usize,
    pub segment_length: usize,
    pub generation_years: f64,
}

impl Default for PopulationParams {
    fn default() -> Self {
        Self {
            population_size: 10_000,
            mu: 1e-8,
            word_length: 8,
            segment_length: 1000,
            generation_years: 25.0,
        }
    }
}

impl PopulationParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 1 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if !(self.mu >= 0.0 && self.mu < 1.0) {
            return Err(Error::InvalidParameter(format!("mu = {} outside [0, 1)", self.mu)));
        }
        if self.word_length < 1 || self.segment_length < 1 {
            return Err(Error::InvalidParameter("W and L must be positive".into()));
        }
        if !(self.generation_years > 0.0) {
            return Err(Error::InvalidParameter("generation time must be positive".into()));
        }
        Ok(())
    }

    fn n(&self) -> f64 {
        self.population_size as f64
    }

    fn years(&self, generations: f64) -> f64 {
        generations * self.generation_years
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoTerms {
    /// Chance a fixation interval at match-minus-2 produces the target first.
    pub rho: f64,
    /// Expected good double mutations per fixation interval, `2 N mu / 9W`.
    pub double_mutation_expectation: f64,
}

pub fn rho(params: &PopulationParams) -> Result<RhoTerms> {
    params.validate()?;
    let n = params.n();
    let w = params.word_length as f64;
    let x = 4.0 * n * n * params.mu / (9.0 * w);
    Ok(RhoTerms {
        rho: x / (1.0 + x),
        double_mutation_expectation: 2.0 * n * params.mu / (9.0 * w),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleMutation {
    pub per_interval: f64,
    /// Expected visits to `W-3` before reaching `W-1`, from a fully mismatched word.
    pub visits: f64,
    pub total: f64,
}

pub fn triple_mutation_expectation(params: &PopulationParams) -> Result<TripleMutation> {
    params.validate()?;
    let w = params.word_length;
    if w < 3 {
        return Err(Error::InvalidParameter("triple mutations need W >= 3".into()));
    }
    let n = params.n();
    let per_interval = 4.0 * n.powi(3) * params.mu.powi(2) / (9.0 * w as f64);
    let visits = greens_function(&build_match_chain(w)?, 0, w - 3, w - 1)?;
    Ok(TripleMutation {
        per_interval,
        visits,
        total: per_interval * visits,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Approx3Result {
    pub word_length: usize,
    pub rho: f64,
    /// `E_x S` for `x = 0..=W`.
    pub per_state: Vec<f64>,
    pub from_minus_two: f64,
    pub stationary_mean: f64,
    pub generations: f64,
    pub years: f64,
    pub regime_warning: Option<String>,
}

/// Mean of the fixation-chain time until a match-minus-1 appears, or a
/// match-minus-2 turns into a match by a double mutation (chance `rho`).
pub fn approx3_expected_time(params: &PopulationParams) -> Result<Approx3Result> {
    let rho = rho(params)?.rho;
    approx3_with_rho(params, rho)
}

pub fn approx3_with_rho(params: &PopulationParams, rho: f64) -> Result<Approx3Result> {
    params.validate()?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho = {rho} outside [0, 1]")));
    }
    let w = params.word_length;
    if w < 3 {
        return Err(Error::InvalidParameter("the stopping time needs W >= 3".into()));
    }
    let chain = build_match_chain(w)?;
    let tau = expected_hitting_time(&chain, w - 2)?;
    let up = chain.up(w - 2);
    let down = chain.down(w - 2);
    let from_minus_two =
        (1.0 - rho) * (up + down * tau[w - 3]) / (1.0 - (1.0 - rho) * (1.0 - up));

    let per_state: Vec<f64> = (0..=w)
        .map(|x| if x <= w - 2 { tau[x] + from_minus_two } else { 0.0 })
        .collect();
    let stationary_mean = binomial_quarter(w).iter().zip(&per_state).map(|(p, s)| p * s).sum::<f64>();
    let generations = stationary_mean / (w as f64 * params.mu);

    let n = params.n();
    let regime = n.powi(3) * params.mu.powi(2);
    let regime_warning = (regime > REGIME_THRESHOLD).then(|| {
        format!("N^3 mu^2 = {regime:.3e} is not small; the approximation is unreliable")
    });
    Ok(Approx3Result {
        word_length: w,
        rho,
        per_state,
        from_minus_two,
        stationary_mean,
        generations,
        years: params.years(generations),
        regime_warning,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Rho1Rho2 {
    /// Chance that a lone match-minus-1 in the consensus completes before a
    /// new fixation replaces it.
    pub rho1: f64,
    pub r: f64,
    pub rho2: f64,
}

pub fn rho1_rho2(params: &PopulationParams) -> Rho1Rho2 {
    let n = params.n();
    let l = params.segment_length as f64;
    let r = 4.0 * n * n * params.mu / (9.0 * l);
    Rho1Rho2 {
        rho1: 1.0 / (1.0 + 3.0 * l / (2.0 * n)),
        r,
        rho2: r / (r + 1.0),
    }
}

/// `(base / divisor) * sum_{k>=1} P(Poisson(m) = k) / k`.
///
/// The zero cell is dropped, not renormalized away.
pub fn mixture_mean_years(base_years: f64, poisson_mean: f64, divisor: f64) -> Result<f64> {
    if !(base_years > 0.0 && poisson_mean > 0.0 && divisor > 0.0) {
        return Err(Error::InvalidParameter("mixture inputs must be positive".into()));
    }
    let m = poisson_mean;
    let mut pk = (-m).exp();
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        pk *= m / k;
        let term = pk / k;
        sum += term;
        if k > m && term < 1e-12 * sum {
            break;
        }
        k += 1.0;
    }
    Ok(base_years / divisor * sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoalescentQuantities {
    /// `4N sum_{j<2N} 1/j`, in generations.
    pub tree_length: f64,
    /// `4N ln(2N)`.
    pub tree_length_asymptotic: f64,
    pub expected_mutations_word: f64,
    pub expected_mutations_segment: f64,
    pub expected_mutations_word_asymptotic: f64,
    pub expected_mutations_segment_asymptotic: f64,
    /// Mean mutant frequency of a segregating site, `1 / ln(2N)`.
    pub site_frequency_mean_fraction: f64,
}

pub fn coalescent_quantities(params: &PopulationParams) -> Result<CoalescentQuantities> {
    params.validate()?;
    let two_n = 2 * params.population_size;
    let harmonic: f64 = (1..two_n).map(|j| 1.0 / j as f64).sum();
    let n = params.n();
    let tree_length = 4.0 * n * harmonic;
    let ln_2n = (2.0 * n).ln();
    let tree_length_asymptotic = 4.0 * n * ln_2n;
    let w = params.word_length as f64 * params.mu;
    let l = params.segment_length as f64 * params.mu;
    Ok(CoalescentQuantities {
        tree_length,
        tree_length_asymptotic,
        expected_mutations_word: w * tree_length,
        expected_mutations_segment: l * tree_length,
        expected_mutations_word_asymptotic: w * tree_length_asymptotic,
        expected_mutations_segment_asymptotic: l * tree_length_asymptotic,
        site_frequency_mean_fraction: if two_n > 1 { 1.0 / ln_2n } else { f64::NAN },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinusOneBalance {
    pub disruption_rate: f64,
    pub creation_rate: f64,
}

/// Match-minus-1's destroyed versus created by the mutations on one
/// genealogy, given the mean counts `em1`, `em2` and mutations per site.
pub fn minus_one_balance(word_length: usize, em1: f64, em2: f64, mutations_per_site: f64) -> MinusOneBalance {
    MinusOneBalance {
        disruption_rate: em1 * word_length as f64 * mutations_per_site,
        creation_rate: em2 * 2.0 / 3.0 * mutations_per_site,
    }
}

/// Logistic binding probability `1 / (1 + exp(eps (r - r0)))`.
pub fn fermi_binding(mismatches: f64, threshold: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be >= 0")));
    }
    let x = epsilon * (mismatches - threshold);
    Ok(if x.is_nan() { 0.5 } else { 1.0 / (1.0 + x.exp()) })
}

/// Generations until one of `2N` copies of a match-minus-1 mutates to the
/// right letter: `3 / (2 N mu)`.
pub fn single_minus_one_generations(params: &PopulationParams) -> f64 {
    3.0 / (2.0 * params.n() * params.mu)
}

/// The segment length the almost-match counts are quoted at (`4^5`).
pub const ALMOST_MATCH_SEGMENT: usize = 1024;

#[derive(Clone, Debug, Serialize)]
pub struct Headline {
    pub single_minus_one_years: f64,
    /// Mean over the Poisson number of match-minus-1's at `W = 6`.
    pub six_letter_years: f64,
    pub six_letter_poisson_mean: f64,
    /// Same, for `W = 8` when a match-minus-1 is good enough.
    pub eight_letter_years: f64,
    pub eight_letter_poisson_mean: f64,
    /// Using the unrounded mean.
    pub eight_letter_years_unrounded: f64,
    /// No match-minus-1 at the start, from the killed-chain mean.
    pub no_match_years: Option<f64>,
}

/// Builds the headline estimates. `killed_mean_steps` is the conditional mean
/// of a killed-chain run; the no-match estimate is omitted without it.
pub fn headline(params: &PopulationParams, killed_mean_steps: Option<f64>) -> Result<Headline> {
    params.validate()?;
    let base = params.years(single_minus_one_generations(params));
    let six = expected_almost_matches(6, ALMOST_MATCH_SEGMENT, 1)?;
    let eight_exact = expected_almost_matches(8, ALMOST_MATCH_SEGMENT, 2)?;
    let eight = (eight_exact * 100.0).round() / 100.0;
    let l = params.segment_length as f64;
    Ok(Headline {
        single_minus_one_years: base,
        six_letter_years: mixture_mean_years(base, six, 1.0)?,
        six_letter_poisson_mean: six,
        eight_letter_years: mixture_mean_years(base, eight, 2.0)?,
        eight_letter_poisson_mean: eight,
        eight_letter_years_unrounded: mixture_mean_years(base, eight_exact, 2.0)?,
        no_match_years: killed_mean_steps.map(|s| params.years(s / (l * params.mu))),
    })
}
