//! Excursions of a single mutant lineage in the neutral Moran model.
//!
//! With `2N` haploid copies and `k` mutants, mutant-for-mutant replacements
//! (type I) leave `k` unchanged, while types II and III move it down or up
//! with equal rates, so the jump chain is a simple random walk. Births are
//! type I plus type III events.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::replication_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExcursionCondition {
    /// The mutant dies out (`T_0 < T_2N`).
    Loss,
    /// The mutant takes over (`T_2N < T_0`).
    Fixation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcursionStats {
    pub condition: ExcursionCondition,
    pub mean_births: f64,
    /// Expected jump-chain visits to each state `0..=2N` (zero at the ends).
    pub per_state_visits: Option<Vec<f64>>,
    /// Number of simulated excursions behind the means, if simulated.
    pub excursions: Option<u64>,
    pub births_std_error: Option<f64>,
    pub visits_std_error: Option<Vec<f64>>,
}

fn check_state(n: u64, k: u64) -> Result<()> {
    if k == 0 || k >= 2 * n {
        return Err(Error::InvalidParameter(format!(
            "state {k} outside 1..{} for N = {n}",
            2 * n
        )));
    }
    Ok(())
}

/// `E_1(N_k | condition)`: loss gives `2(2N-k)^2 / (2N(2N-1))`, fixation
/// `2k(2N-k) / 2N`.
pub fn moran_exact_visits(n: u64, k: u64, condition: ExcursionCondition) -> Result<f64> {
    check_state(n, k)?;
    let m = 2.0 * n as f64;
    let k = k as f64;
    Ok(match condition {
        ExcursionCondition::Loss => 2.0 * (m - k).powi(2) / (m * (m - 1.0)),
        ExcursionCondition::Fixation => 2.0 * k * (m - k) / m,
    })
}

/// Mean type I events per visit to `k`: `k / (4N - 2k)`.
fn mean_holding_births(n: u64, k: u64) -> f64 {
    k as f64 / (4.0 * n as f64 - 2.0 * k as f64)
}

/// `N` for loss, `2N^2` for fixation.
pub fn births_asymptote(n: u64, condition: ExcursionCondition) -> f64 {
    let n = n as f64;
    match condition {
        ExcursionCondition::Loss => n,
        ExcursionCondition::Fixation => 2.0 * n * n,
    }
}

/// Expected births in an excursion from one mutant, by the exact finite sums
/// over states (before any large-N approximation).
pub fn moran_excursion_births(n: u64, condition: ExcursionCondition) -> Result<ExcursionStats> {
    if n < 1 {
        return Err(Error::InvalidParameter("population size must be at least 1".into()));
    }
    let two_n = 2 * n;
    let m = two_n as f64;
    let mut visits = vec![0.0; two_n as usize + 1];
    let mut total = 0.0;
    for k in 1..two_n {
        let kf = k as f64;
        let v = moran_exact_visits(n, k, condition)?;
        visits[k as usize] = v;
        let type_one = v * mean_holding_births(n, k);
        let type_three = match condition {
            ExcursionCondition::Loss => {
                (m - kf) / (kf * (m - 1.0)) * ((kf + 1.0) * (m - kf) / m - 1.0)
            }
            ExcursionCondition::Fixation => (kf + 1.0) * (m - kf) / m,
        };
        total += type_one + type_three;
    }
    Ok(ExcursionStats {
        condition,
        mean_births: total,
        per_state_visits: Some(visits),
        excursions: None,
        births_std_error: None,
        visits_std_error: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MoranSimulation {
    pub population_size: u64,
    pub start: u64,
    pub replications: u64,
    pub seed: u64,
    pub fixation_fraction: f64,
    pub loss: ExcursionStats,
    pub fixation: ExcursionStats,
}

#[derive(Clone, Default)]
struct Accumulator {
    count: u64,
    births: u64,
    births_sq: u64,
    visits: Vec<u64>,
    visits_sq: Vec<u64>,
}

impl Accumulator {
    fn new(states: usize) -> Self {
        Self {
            visits: vec![0; states],
            visits_sq: vec![0; states],
            ..Default::default()
        }
    }

    fn add(&mut self, births: u64, visits: &[u32]) {
        self.count += 1;
        self.births += births;
        self.births_sq += births * births;
        for (i, &v) in visits.iter().enumerate() {
            let v = v as u64;
            self.visits[i] += v;
            self.visits_sq[i] += v * v;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.births += other.births;
        self.births_sq += other.births_sq;
        for i in 0..self.visits.len() {
            self.visits[i] += other.visits[i];
            self.visits_sq[i] += other.visits_sq[i];
        }
    }

    fn into_stats(self, condition: ExcursionCondition) -> ExcursionStats {
        let n = self.count as f64;
        let mean_se = |sum: u64, sum_sq: u64| {
            if self.count == 0 {
                return (f64::NAN, f64::NAN);
            }
            let mean = sum as f64 / n;
            let var = if self.count > 1 {
                ((sum_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            (mean, (var / n).sqrt())
        };
        let (mean_births, births_se) = mean_se(self.births, self.births_sq);
        let (visits, visits_se): (Vec<f64>, Vec<f64>) = self
            .visits
            .iter()
            .zip(&self.visits_sq)
            .map(|(&s, &sq)| mean_se(s, sq))
            .unzip();
        ExcursionStats {
            condition,
            mean_births,
            per_state_visits: Some(visits),
            excursions: Some(self.count),
            births_std_error: Some(births_se),
            visits_std_error: Some(visits_se),
        }
    }
}

const CHUNK: u64 = 1024;

/// Simulates `replications` excursions from `start` mutants and splits them by
/// how they end.
pub fn moran_excursion_simulate_from(
    n: u64,
    start: u64,
    replications: u64,
    seed: u64,
    execution: Execution,
) -> Result<MoranSimulation> {
    if n < 1 || start > 2 * n || replications == 0 {
        return Err(Error::InvalidParameter(format!(
            "need N >= 1, start in 0..=2N and replications > 0 (N = {n}, start = {start})"
        )));
    }
    let two_n = 2 * n;
    let states = two_n as usize + 1;
    let holding: Vec<Option<Geometric>> = (0..=two_n)
        .map(|k| {
            if k == 0 || k == two_n {
                None
            } else {
                let p = (4.0 * n as f64 - 2.0 * k as f64) / (4.0 * n as f64 - k as f64);
                Some(Geometric::new(p).expect("jump probability in (0, 1]"))
            }
        })
        .collect();

    let chunks = replications.div_ceil(CHUNK);
    let partials = execution.map_indexed(chunks, |c| {
        let mut loss = Accumulator::new(states);
        let mut fix = Accumulator::new(states);
        let mut visits = vec![0u32; states];
        for r in c * CHUNK..((c + 1) * CHUNK).min(replications) {
            let mut rng = replication_rng(seed, r);
            visits.iter_mut().for_each(|v| *v = 0);
            let mut k = start;
            let mut births = 0u64;
            while k != 0 && k != two_n {
                visits[k as usize] += 1;
                if let Some(g) = &holding[k as usize] {
                    births += g.sample(&mut rng);
                }
                if rng.gen::<bool>() {
                    births += 1;
                    k += 1;
                } else {
                    k -= 1;
                }
            }
            if k == 0 {
                loss.add(births, &visits);
            } else {
                fix.add(births, &visits);
            }
        }
        (loss, fix)
    });

    let mut loss = Accumulator::new(states);
    let mut fix = Accumulator::new(states);
    for (l, f) in &partials {
        loss.merge(l);
        fix.merge(f);
    }
    let fixation_fraction = fix.count as f64 / replications as f64;
    Ok(MoranSimulation {
        population_size: n,
        start,
        replications,
        seed,
        fixation_fraction,
        loss: loss.into_stats(ExcursionCondition::Loss),
        fixation: fix.into_stats(ExcursionCondition::Fixation),
    })
}

/// Excursions started from a single new mutant.
pub fn moran_excursion_simulate(
    n: u64,
    replications: u64,
    seed: u64,
    execution: Execution,
) -> Result<MoranSimulation> {
    moran_excursion_simulate_from(n, 1, replications, seed, execution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_visit_values() {
        assert_relative_eq!(moran_exact_visits(10, 1, ExcursionCondition::Loss).unwrap(), 1.9);
        assert_relative_eq!(moran_exact_visits(10, 10, ExcursionCondition::Fixation).unwrap(), 10.0);
        let n = 10;
        assert_relative_eq!(
            moran_exact_visits(n, 2 * n - 1, ExcursionCondition::Loss).unwrap(),
            2.0 / (20.0 * 19.0)
        );
        assert!(moran_exact_visits(10, 0, ExcursionCondition::Loss).is_err());
        assert!(moran_exact_visits(10, 20, ExcursionCondition::Loss).is_err());
    }

    #[test]
    fn births_approach_asymptotes() {
        let loss = moran_excursion_births(500, ExcursionCondition::Loss).unwrap();
        let fix = moran_excursion_births(500, ExcursionCondition::Fixation).unwrap();
        assert!((loss.mean_births / 500.0 - 1.0).abs() < 0.02);
        assert!((fix.mean_births / (2.0 * 500.0 * 500.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn full_start_fixes_immediately() {
        let sim = moran_excursion_simulate_from(5, 10, 50, 1, Execution::Sequential).unwrap();
        assert_eq!(sim.fixation_fraction, 1.0);
        assert_eq!(sim.fixation.mean_births, 0.0);
    }

    #[test]
    fn simulation_is_schedule_independent() {
        let a = moran_excursion_simulate(8, 3000, 11, Execution::Sequential).unwrap();
        let b = moran_excursion_simulate(8, 3000, 11, Execution::Parallel).unwrap();
        assert_eq!(a.loss.mean_births, b.loss.mean_births);
        assert_eq!(a.fixation.per_state_visits, b.fixation.per_state_visits);
    }
}
