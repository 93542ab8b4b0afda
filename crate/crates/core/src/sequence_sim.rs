//! Monte Carlo of the one-letter-at-a-time substitution chain on a circular
//! segment, watching every length-W window for the target word.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::{replication_rng, SimRng};
use crate::stats::{self, LinearFit, Summary};
use crate::word::DnaWord;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

/// A circular segment with per-window mismatch counts against the target.
pub(crate) struct CircularSequence {
    letters: Vec<u8>,
    target: Vec<u8>,
    /// Mismatches of the window starting at each position.
    mismatches: Vec<u8>,
    /// Number of windows with exactly `i` mismatches.
    by_mismatch: Vec<u32>,
}

impl CircularSequence {
    pub(crate) fn random(word: &DnaWord, length: usize, rng: &mut SimRng) -> Self {
        let mut letters = Vec::with_capacity(length);
        while letters.len() < length {
            let bits: u64 = rng.gen();
            for i in 0..32 {
                if letters.len() == length {
                    break;
                }
                letters.push(((bits >> (2 * i)) & 3) as u8);
            }
        }
        Self::from_letters(word, letters)
    }

    pub(crate) fn from_letters(word: &DnaWord, letters: Vec<u8>) -> Self {
        let target = word.codes();
        let w = target.len();
        let l = letters.len();
        let mut mismatches = vec![0u8; l];
        let mut by_mismatch = vec![0u32; w + 1];
        for (start, slot) in mismatches.iter_mut().enumerate() {
            let m = (0..w).filter(|&i| letters[(start + i) % l] != target[i]).count();
            *slot = m as u8;
            by_mismatch[m] += 1;
        }
        Self {
            letters,
            target,
            mismatches,
            by_mismatch,
        }
    }

    /// Windows differing from the target in exactly `i` letters.
    pub(crate) fn windows_with(&self, i: usize) -> u32 {
        self.by_mismatch.get(i).copied().unwrap_or(0)
    }

    /// Replaces the letter at `pos` by a uniformly chosen different letter,
    /// updating only the windows that cover `pos`.
    pub(crate) fn mutate(&mut self, rng: &mut SimRng) {
        let l = self.letters.len();
        let pos = rng.gen_range(0..l);
        let old = self.letters[pos];
        let new = (old + rng.gen_range(1..4u8)) & 3;
        self.letters[pos] = new;
        for (offset, &t) in self.target.iter().enumerate() {
            let was = old == t;
            let is = new == t;
            if was == is {
                continue;
            }
            let start = if pos >= offset { pos - offset } else { pos + l - offset };
            let m = &mut self.mismatches[start];
            self.by_mismatch[*m as usize] -= 1;
            if was {
                *m += 1;
            } else {
                *m -= 1;
            }
            self.by_mismatch[*m as usize] += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub word: DnaWord,
    pub segment_length: usize,
    pub replications: u64,
    pub master_seed: u64,
    pub bin_width: u64,
    pub step_cap: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(word: DnaWord, segment_length: usize, replications: u64, master_seed: u64) -> Self {
        Self {
            word,
            segment_length,
            replications,
            master_seed,
            bin_width: 100,
            step_cap: DEFAULT_STEP_CAP,
            execution: Execution::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.segment_length <= 2 * self.word.len() {
            return Err(Error::InvalidParameter(format!(
                "segment length {} must exceed twice the word length",
                self.segment_length
            )));
        }
        if self.bin_width == 0 {
            return Err(Error::InvalidParameter("bin width must be at least 1".into()));
        }
        Ok(())
    }
}

/// Positive outcomes grouped into fixed-width bins; empty bins are omitted.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub bin_width: u64,
    /// `(bin_start, count)` in increasing order.
    pub bins: Vec<(u64, u64)>,
}

impl Histogram {
    pub fn of_positive(samples: &[u64], bin_width: u64) -> Self {
        let mut counts = BTreeMap::new();
        for &s in samples.iter().filter(|&&s| s > 0) {
            *counts.entry(s / bin_width * bin_width).or_insert(0u64) += 1;
        }
        Self {
            bin_width,
            bins: counts.into_iter().collect(),
        }
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.1).sum()
    }

    /// Least-squares line through `(bin_start, ln count)` over bins holding
    /// at least `min_count` observations.
    pub fn log_linear_fit(&self, min_count: u64) -> LinearFit {
        let points: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(|b| b.1 >= min_count)
            .map(|&(start, count)| (start as f64, (count as f64).ln()))
            .collect();
        stats::linear_fit(&points)
    }
}

/// Outcome of a batch of waiting-time replications.
#[derive(Clone, Debug, Serialize)]
pub struct SimResult {
    pub replications: u64,
    pub seed: u64,
    /// Fraction of replications that succeed before any step.
    pub atom_at_zero: f64,
    /// Mean of the positive outcomes.
    pub conditional_mean: f64,
    pub conditional_std_error: f64,
    pub histogram: Histogram,
    #[serde(skip)]
    pub samples: Vec<u64>,
}

impl SimResult {
    pub fn from_samples(samples: Vec<u64>, seed: u64, bin_width: u64) -> Self {
        let zeros = samples.iter().filter(|&&s| s == 0).count();
        let positive = Summary::from_values(samples.iter().filter(|&&s| s > 0).map(|&s| s as f64));
        Self {
            replications: samples.len() as u64,
            seed,
            atom_at_zero: zeros as f64 / samples.len() as f64,
            conditional_mean: positive.mean,
            conditional_std_error: positive.std_error(),
            histogram: Histogram::of_positive(&samples, bin_width),
            samples,
        }
    }

    pub fn positive_samples(&self) -> Vec<f64> {
        self.samples.iter().filter(|&&s| s > 0).map(|&s| s as f64).collect()
    }

    /// KS distance of the positive outcomes from an exponential with their mean.
    pub fn ks_exponential(&self) -> f64 {
        stats::ks_exponential(&self.positive_samples())
    }
}

fn waiting_time(config: &SimConfig, replication: u64) -> Result<u64> {
    let mut rng = replication_rng(config.master_seed, replication);
    let mut seq = CircularSequence::random(&config.word, config.segment_length, &mut rng);
    let mut steps = 0u64;
    while seq.windows_with(0) == 0 {
        if steps == config.step_cap {
            return Err(Error::StepCapExceeded {
                replication,
                cap: config.step_cap,
            });
        }
        seq.mutate(&mut rng);
        steps += 1;
    }
    Ok(steps)
}

/// Number of substitutions until the word first appears somewhere in the
/// segment, from a uniformly random start (0 if it is already there).
pub fn simulate_segment_waiting(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let samples = config
        .execution
        .map_indexed(config.replications, |r| waiting_time(config, r))
        .into_iter()
        .collect::<Result<Vec<u64>>>()?;
    Ok(SimResult::from_samples(samples, config.master_seed, config.bin_width))
}

#[derive(Clone, Debug, Serialize)]
pub struct InitialMatchDistribution {
    pub replications: u64,
    pub seed: u64,
    /// `L / 4^W`.
    pub gamma: f64,
    /// Empirical pmf of the number of matching windows.
    pub pmf: Vec<f64>,
    pub tv_to_poisson: f64,
    pub at_least_one: f64,
}

/// Counts exact-match windows in independent uniform segments.
pub fn initial_match_distribution(
    word: &DnaWord,
    segment_length: usize,
    replications: u64,
    seed: u64,
    execution: Execution,
) -> Result<InitialMatchDistribution> {
    if replications == 0 || segment_length < word.len() {
        return Err(Error::InvalidParameter(
            "need at least one replication and a segment no shorter than the word".into(),
        ));
    }
    let counts = execution.map_indexed(replications, |r| {
        let mut rng = replication_rng(seed, r);
        CircularSequence::random(word, segment_length, &mut rng).windows_with(0) as usize
    });
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut pmf = vec![0.0; max + 1];
    for c in &counts {
        pmf[*c] += 1.0;
    }
    let n = replications as f64;
    pmf.iter_mut().for_each(|p| *p /= n);
    let gamma = segment_length as f64 * 0.25f64.powi(word.len() as i32);
    Ok(InitialMatchDistribution {
        replications,
        seed,
        gamma,
        tv_to_poisson: stats::tv_to_poisson(&pmf, gamma),
        at_least_one: 1.0 - pmf[0],
        pmf,
    })
}

/// Writes `bin_start,count` rows, framed by `# key=value` comment lines
/// carrying the run parameters and the summary.
pub fn write_histogram<W: Write>(
    result: &SimResult,
    header: &[(String, String)],
    out: &mut W,
) -> Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "# seed={}", result.seed)?;
    writeln!(out, "# replications={}", result.replications)?;
    writeln!(out, "# bin_width={}", result.histogram.bin_width)?;
    writeln!(out, "bin_start,count")?;
    for (start, count) in &result.histogram.bins {
        writeln!(out, "{start},{count}")?;
    }
    writeln!(
        out,
        "# summary atom_at_zero={} conditional_mean={}",
        result.atom_at_zero, result.conditional_mean
    )?;
    Ok(())
}

pub fn export_histogram(result: &SimResult, header: &[(String, String)], path: &Path) -> Result<()> {
    if result.replications == 0 {
        return Err(Error::InvalidParameter("empty result".into()));
    }
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_histogram(result, header, &mut out)?;
    out.flush()?;
    Ok(())
}
