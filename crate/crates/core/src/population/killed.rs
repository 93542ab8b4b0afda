//! The fixation chain on a whole segment, killed when a near-match makes
//! quick success likely.
//!
//! Each step of the fixation chain substitutes one uniformly chosen letter by
//! a uniformly chosen different letter. The chain dies when a window is one
//! letter away from the target (or matches it), or by an independent coin of
//! probability `rho2` for every window two letters away.

use rand::Rng;
use serde::Serialize;

use super::{rho1_rho2, PopulationParams};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::{replication_rng, SimRng};
use crate::sequence_sim::{CircularSequence, Histogram, DEFAULT_STEP_CAP};
use crate::stats::{self, Summary};
use crate::word::DnaWord;

/// How a window one letter away from the target ends the chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum MinusOneRule {
    /// Stop as soon as one exists.
    #[default]
    Certain,
    /// Each such window stops the chain independently with probability `rho1`.
    Rho1,
    /// Only exact matches stop the chain.
    Disabled,
}

#[derive(Clone, Debug, Serialize)]
pub struct KilledChainConfig {
    pub word: DnaWord,
    pub params: PopulationParams,
    pub replications: u64,
    pub master_seed: u64,
    pub bin_width: u64,
    pub step_cap: u64,
    pub minus_one: MinusOneRule,
    /// Overrides the `rho2` derived from `params`.
    pub rho2_override: Option<f64>,
    #[serde(skip)]
    pub execution: Execution,
}

impl KilledChainConfig {
    pub fn new(word: DnaWord, params: PopulationParams, replications: u64, master_seed: u64) -> Self {
        Self {
            word,
            params,
            replications,
            master_seed,
            bin_width: 10,
            step_cap: DEFAULT_STEP_CAP,
            minus_one: MinusOneRule::Certain,
            rho2_override: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KilledChainResult {
    pub word: DnaWord,
    pub replications: u64,
    pub seed: u64,
    pub rho1: f64,
    pub rho2: f64,
    /// `P_pi(T_D = 0)`.
    pub atom_at_zero: f64,
    /// `E_pi(T_D | T_D > 0)` in fixation-chain steps.
    pub conditional_mean: f64,
    pub conditional_std_error: f64,
    /// `conditional_mean / (L mu)`.
    pub generations: f64,
    pub years: f64,
    pub histogram: Histogram,
    #[serde(skip)]
    pub samples: Vec<u64>,
}

impl KilledChainResult {
    pub fn ks_exponential(&self) -> f64 {
        let positive: Vec<f64> = self.samples.iter().filter(|&&s| s > 0).map(|&s| s as f64).collect();
        stats::ks_exponential(&positive)
    }
}

/// `1 - (1 - p)^n` without cancellation for tiny `p`.
fn any_of(p: f64, n: u32) -> f64 {
    -(n as f64 * (-p).ln_1p()).exp_m1()
}

struct Killer {
    rule: MinusOneRule,
    rho1: f64,
    rho2: f64,
}

impl Killer {
    fn dies(&self, seq: &CircularSequence, rng: &mut SimRng) -> bool {
        if seq.windows_with(0) > 0 {
            return true;
        }
        let minus_one = seq.windows_with(1);
        match self.rule {
            MinusOneRule::Certain if minus_one > 0 => return true,
            MinusOneRule::Rho1 if minus_one > 0 => {
                if rng.gen::<f64>() < any_of(self.rho1, minus_one) {
                    return true;
                }
            }
            _ => {}
        }
        let minus_two = seq.windows_with(2);
        minus_two > 0 && self.rho2 > 0.0 && rng.gen::<f64>() < any_of(self.rho2, minus_two)
    }
}

/// Death time `T_D` of the killed fixation chain from a uniform random
/// segment, replicated with per-replication random streams.
pub fn killed_fixation_chain_sim(config: &KilledChainConfig) -> Result<KilledChainResult> {
    let params = &config.params;
    params.validate()?;
    if config.replications == 0 || config.bin_width == 0 {
        return Err(Error::InvalidParameter("replications and bin width must be positive".into()));
    }
    let l = params.segment_length;
    if l <= 2 * config.word.len() {
        return Err(Error::InvalidParameter(format!(
            "segment length {l} must exceed twice the word length"
        )));
    }
    let terms = rho1_rho2(params);
    let rho2 = config.rho2_override.unwrap_or(terms.rho2);
    if !(0.0..=1.0).contains(&rho2) {
        return Err(Error::InvalidParameter(format!("rho2 {rho2} outside [0, 1]")));
    }
    let killer = Killer {
        rule: config.minus_one,
        rho1: terms.rho1,
        rho2,
    };

    let samples = config
        .execution
        .map_indexed(config.replications, |r| {
            let mut rng = replication_rng(config.master_seed, r);
            let mut seq = CircularSequence::random(&config.word, l, &mut rng);
            let mut steps = 0u64;
            while !killer.dies(&seq, &mut rng) {
                if steps == config.step_cap {
                    return Err(Error::StepCapExceeded {
                        replication: r,
                        cap: config.step_cap,
                    });
                }
                seq.mutate(&mut rng);
                steps += 1;
            }
            Ok(steps)
        })
        .into_iter()
        .collect::<Result<Vec<u64>>>()?;

    let zeros = samples.iter().filter(|&&s| s == 0).count();
    let positive = Summary::from_values(samples.iter().filter(|&&s| s > 0).map(|&s| s as f64));
    let generations = positive.mean / (l as f64 * params.mu);
    Ok(KilledChainResult {
        word: config.word,
        replications: config.replications,
        seed: config.master_seed,
        rho1: terms.rho1,
        rho2,
        atom_at_zero: zeros as f64 / samples.len() as f64,
        conditional_mean: positive.mean,
        conditional_std_error: positive.std_error(),
        generations,
        years: generations * params.generation_years,
        histogram: Histogram::of_positive(&samples, config.bin_width),
        samples,
    })
}
