//! Exact numerics for nearest-neighbour (birth-death) chains on `0..=n`.
//!
//! Everything here is O(n) and works on successive differences instead of
//! dense linear solves. Holding probabilities never enter the recursions
//! except through `1 - stay = up + down`, which is how geometric holding
//! is integrated out.

use serde::Serialize;

use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-12;

/// Transition kernel of a birth-death chain on states `0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirthDeathChain {
    up: Vec<f64>,
    down: Vec<f64>,
    stay: Vec<f64>,
}

impl BirthDeathChain {
    /// Builds a chain from up and down probabilities; holding makes up the rest.
    pub fn new(up: Vec<f64>, down: Vec<f64>) -> Result<Self> {
        if up.len() != down.len() {
            return Err(Error::InvalidChain(format!(
                "up has {} states, down has {}",
                up.len(),
                down.len()
            )));
        }
        let stay = up
            .iter()
            .zip(&down)
            .map(|(u, d)| (1.0 - u - d).max(0.0))
            .collect();
        Self::from_rows(up, down, stay)
    }

    pub fn from_rows(up: Vec<f64>, down: Vec<f64>, stay: Vec<f64>) -> Result<Self> {
        let n = up.len();
        if n == 0 || down.len() != n || stay.len() != n {
            return Err(Error::InvalidChain("rows must be non-empty and of equal length".into()));
        }
        for x in 0..n {
            let (u, d, s) = (up[x], down[x], stay[x]);
            for p in [u, d, s] {
                if !(0.0..=1.0).contains(&p) || p.is_nan() {
                    return Err(Error::InvalidChain(format!("probability {p} at state {x}")));
                }
            }
            if (u + d + s - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidChain(format!(
                    "row {x} sums to {}",
                    u + d + s
                )));
            }
        }
        if down[0] != 0.0 {
            return Err(Error::InvalidChain("state 0 cannot step down".into()));
        }
        if up[n - 1] != 0.0 {
            return Err(Error::InvalidChain(format!("state {} cannot step up", n - 1)));
        }
        Ok(Self { up, down, stay })
    }

    /// Largest state `n`.
    pub fn max_state(&self) -> usize {
        self.up.len() - 1
    }

    pub fn n_states(&self) -> usize {
        self.up.len()
    }

    pub fn up(&self, x: usize) -> f64 {
        self.up[x]
    }

    pub fn down(&self, x: usize) -> f64 {
        self.down[x]
    }

    pub fn stay(&self, x: usize) -> f64 {
        self.stay[x]
    }

    /// `p(x, y)`; zero for non-neighbours.
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        if y == x {
            self.stay[x]
        } else if y == x + 1 {
            self.up[x]
        } else if y + 1 == x {
            self.down[x]
        } else {
            0.0
        }
    }

    /// The same chain with states relabelled `x -> n - x`.
    pub fn mirrored(&self) -> Self {
        Self {
            up: self.down.iter().rev().copied().collect(),
            down: self.up.iter().rev().copied().collect(),
            stay: self.stay.iter().rev().copied().collect(),
        }
    }

    fn check_state(&self, x: usize) -> Result<()> {
        if x > self.max_state() {
            Err(Error::StateOutOfRange {
                state: x,
                max: self.max_state(),
            })
        } else {
            Ok(())
        }
    }

    /// Stationary law by detailed balance, `pi(x+1) down(x+1) = pi(x) up(x)`.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n = self.max_state();
        let mut weights = Vec::with_capacity(n + 1);
        weights.push(1.0);
        for x in 0..n {
            if self.up[x] == 0.0 || self.down[x + 1] == 0.0 {
                return Err(Error::NotIrreducible {
                    lower: 0,
                    upper: n,
                    state: x,
                });
            }
            let next = weights[x] * self.up[x] / self.down[x + 1];
            weights.push(next);
        }
        let total: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / total).collect())
    }
}

/// `P_x(T_upper < T_lower)` for every state of the chain.
///
/// Differences `h(x+1) - h(x)` are generated from the top of the interval
/// down, `d(x-1) = d(x) up(x) / down(x)`, and normalised by their telescoping
/// sum. States below `lower` get 0 and states above `upper` get 1, since a
/// nearest-neighbour path has to cross the nearer boundary first.
pub fn hitting_probability(chain: &BirthDeathChain, lower: usize, upper: usize) -> Result<Vec<f64>> {
    chain.check_state(upper)?;
    if lower >= upper {
        return Err(Error::InvalidParameter(format!(
            "lower {lower} must be below upper {upper}"
        )));
    }
    for x in lower + 1..upper {
        if chain.up[x] == 0.0 || chain.down[x] == 0.0 {
            return Err(Error::NotIrreducible {
                lower,
                upper,
                state: x,
            });
        }
    }

    let width = upper - lower;
    let mut diffs = vec![0.0; width];
    diffs[width - 1] = 1.0;
    for x in (lower + 1..upper).rev() {
        diffs[x - 1 - lower] = diffs[x - lower] * chain.up[x] / chain.down[x];
    }
    let total: f64 = diffs.iter().sum();

    let mut h = vec![0.0; chain.n_states()];
    let mut acc = 0.0;
    for x in lower + 1..=upper {
        acc += diffs[x - 1 - lower];
        h[x] = acc / total;
    }
    h[upper] = 1.0;
    for v in h.iter_mut().skip(upper + 1) {
        *v = 1.0;
    }
    Ok(h)
}

/// `P_x(T_target < T_avoid)` for either ordering of the two states.
pub fn hit_before(chain: &BirthDeathChain, target: usize, avoid: usize) -> Result<Vec<f64>> {
    if target > avoid {
        hitting_probability(chain, avoid, target)
    } else if target < avoid {
        let n = chain.max_state();
        let mut h = hitting_probability(&chain.mirrored(), n - avoid, n - target)?;
        h.reverse();
        Ok(h)
    } else {
        Err(Error::InvalidParameter("target and avoid coincide".into()))
    }
}

/// `E_x T_target` for every state, in chain steps.
///
/// Below the target the differences `u(x) - u(x+1)` are iterated upward from
/// `u(0) - u(1) = 1 / up(0)`; above it the mirrored recursion runs down from
/// the top state.
pub fn expected_hitting_time(chain: &BirthDeathChain, target: usize) -> Result<Vec<f64>> {
    chain.check_state(target)?;
    let n = chain.max_state();
    let mut u = vec![0.0; n + 1];

    if target > 0 {
        let mut diffs = vec![0.0; target];
        let mut prev = 0.0;
        for x in 0..target {
            if chain.up[x] == 0.0 {
                return Err(Error::Unreachable { target, from: x });
            }
            let d = (1.0 + chain.down[x] * prev) / chain.up[x];
            diffs[x] = d;
            prev = d;
        }
        let mut acc = 0.0;
        for x in (0..target).rev() {
            acc += diffs[x];
            u[x] = acc;
        }
    }

    if target < n {
        let mut diffs = vec![0.0; n + 1];
        let mut prev = 0.0;
        for x in (target + 1..=n).rev() {
            if chain.down[x] == 0.0 {
                return Err(Error::Unreachable { target, from: x });
            }
            let d = (1.0 + chain.up[x] * prev) / chain.down[x];
            diffs[x] = d;
            prev = d;
        }
        let mut acc = 0.0;
        for x in target + 1..=n {
            acc += diffs[x];
            u[x] = acc;
        }
    }
    Ok(u)
}

/// Green's function `G_stop(from, at) = E_from[visits to at before T_stop]`.
///
/// Computed as reach probability over escape probability. Escape from `at`
/// means stepping towards `stop` and then hitting `stop` before `at`.
pub fn greens_function(chain: &BirthDeathChain, from: usize, at: usize, stop: usize) -> Result<f64> {
    chain.check_state(from)?;
    chain.check_state(at)?;
    chain.check_state(stop)?;
    if from == stop || at == stop {
        return Ok(0.0);
    }
    let blocked = (from < stop && stop < at) || (at < stop && stop < from);
    if blocked {
        return Err(Error::BlockedPath { from, at, stop });
    }

    if at < stop {
        let reach = if from <= at {
            1.0
        } else {
            hit_before(chain, at, stop)?[from]
        };
        let escape_after_step = hit_before(chain, stop, at)?[at + 1];
        let escape = chain.up[at] * escape_after_step;
        if escape == 0.0 {
            return Err(Error::ZeroProbability { state: at });
        }
        Ok(reach / escape)
    } else {
        let reach = if from >= at {
            1.0
        } else {
            hit_before(chain, at, stop)?[from]
        };
        let escape_after_step = hit_before(chain, stop, at)?[at - 1];
        let escape = chain.down[at] * escape_after_step;
        if escape == 0.0 {
            return Err(Error::ZeroProbability { state: at });
        }
        Ok(reach / escape)
    }
}

/// Doob h-transform: the chain conditioned to hit `target` before `avoid`.
///
/// Interior rows become `q(x, y) = p(x, y) h(y) / h(x)`. From `avoid` the
/// conditioned chain steps towards `target` with probability one (an
/// excursion that must reach `target` before returning), `target` is made
/// absorbing, and rows outside the interval are copied unchanged.
pub fn condition_on_hitting(
    chain: &BirthDeathChain,
    target: usize,
    avoid: usize,
) -> Result<BirthDeathChain> {
    chain.check_state(target)?;
    chain.check_state(avoid)?;
    let h = hit_before(chain, target, avoid)?;
    let (lo, hi) = (target.min(avoid), target.max(avoid));

    let mut up = chain.up.clone();
    let mut down = chain.down.clone();
    let mut stay = chain.stay.clone();
    for x in lo + 1..hi {
        if h[x] <= 0.0 {
            return Err(Error::ZeroProbability { state: x });
        }
        up[x] = chain.up[x] * h[x + 1] / h[x];
        down[x] = chain.down[x] * h[x - 1] / h[x];
        stay[x] = chain.stay[x];
        // renormalise away the rounding left by the three divisions
        let total = up[x] + down[x] + stay[x];
        up[x] /= total;
        down[x] /= total;
        stay[x] /= total;
    }
    let toward_up = target > avoid;
    up[avoid] = if toward_up { 1.0 } else { 0.0 };
    down[avoid] = if toward_up { 0.0 } else { 1.0 };
    stay[avoid] = 0.0;
    up[target] = 0.0;
    down[target] = 0.0;
    stay[target] = 1.0;
    BirthDeathChain::from_rows(up, down, stay)
}

/// Kac's identity `E_x T_x^+ = 1 / pi(x)`.
pub fn kac_return_time(stationary: &[f64], x: usize) -> Result<f64> {
    let p = *stationary.get(x).ok_or(Error::StateOutOfRange {
        state: x,
        max: stationary.len().saturating_sub(1),
    })?;
    if p <= 0.0 {
        return Err(Error::ZeroProbability { state: x });
    }
    Ok(1.0 / p)
}

/// Mean return time to `x` by first-step analysis.
pub fn mean_return_time(chain: &BirthDeathChain, x: usize) -> Result<f64> {
    let u = expected_hitting_time(chain, x)?;
    let above = if x < chain.max_state() { chain.up[x] * u[x + 1] } else { 0.0 };
    let below = if x > 0 { chain.down[x] * u[x - 1] } else { 0.0 };
    Ok(1.0 + above + below)
}

/// Hitting probabilities and hitting times for one interval of a chain.
#[derive(Clone, Debug, Serialize)]
pub struct HittingProfile {
    pub lower: usize,
    pub upper: usize,
    /// `P_x(T_upper < T_lower)`.
    pub h: Vec<f64>,
    /// `E_x T_upper`.
    pub u: Vec<f64>,
}

impl HittingProfile {
    pub fn compute(chain: &BirthDeathChain, lower: usize, upper: usize) -> Result<Self> {
        Ok(Self {
            lower,
            upper,
            h: hitting_probability(chain, lower, upper)?,
            u: expected_hitting_time(chain, upper)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::solve_dense;
    use approx::assert_relative_eq;

    fn symmetric_walk(n: usize) -> BirthDeathChain {
        let up = (0..=n).map(|x| if x < n { 0.5 } else { 0.0 }).collect();
        let down = (0..=n).map(|x| if x > 0 { 0.5 } else { 0.0 }).collect();
        BirthDeathChain::new(up, down).unwrap()
    }

    fn lazy_chain() -> BirthDeathChain {
        BirthDeathChain::new(
            vec![0.3, 0.2, 0.45, 0.1, 0.25, 0.0],
            vec![0.0, 0.4, 0.15, 0.6, 0.3, 0.7],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(BirthDeathChain::new(vec![0.5, 0.0], vec![0.1, 0.5]).is_err());
        assert!(BirthDeathChain::new(vec![0.5, 0.2], vec![0.0, 0.5]).is_err());
        assert!(BirthDeathChain::from_rows(vec![0.5, 0.0], vec![0.0, 0.5], vec![0.4, 0.5]).is_err());
    }

    #[test]
    fn symmetric_walk_is_linear() {
        let chain = symmetric_walk(7);
        let h = hitting_probability(&chain, 0, 7).unwrap();
        for (x, v) in h.iter().enumerate() {
            assert_relative_eq!(*v, x as f64 / 7.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn hitting_requires_irreducibility() {
        let chain = BirthDeathChain::new(vec![0.5, 0.0, 0.5, 0.0], vec![0.0, 0.5, 0.5, 0.5]).unwrap();
        assert!(matches!(
            hitting_probability(&chain, 0, 3),
            Err(Error::NotIrreducible { state: 1, .. })
        ));
    }

    #[test]
    fn hitting_time_boundary_is_zero() {
        let chain = lazy_chain();
        for target in 0..=chain.max_state() {
            let u = expected_hitting_time(&chain, target).unwrap();
            assert_eq!(u[target], 0.0);
            assert!(u.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn unreachable_target_is_an_error() {
        let chain = BirthDeathChain::new(vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 1.0]).unwrap();
        assert!(matches!(
            expected_hitting_time(&chain, 2),
            Err(Error::Unreachable { .. })
        ));
    }

    // Dense Gaussian elimination on the same small chain.
    #[test]
    fn agrees_with_dense_solve() {
        let chain = lazy_chain();
        let n = chain.max_state();
        for (lower, upper) in [(0, n), (1, 4), (2, 5)] {
            let h = hitting_probability(&chain, lower, upper).unwrap();
            let m = upper - lower - 1;
            let mut a = vec![vec![0.0; m]; m];
            let mut b = vec![0.0; m];
            for i in 0..m {
                let x = lower + 1 + i;
                a[i][i] = 1.0 - chain.stay(x);
                if x + 1 == upper {
                    b[i] += chain.up(x);
                } else {
                    a[i][i + 1] = -chain.up(x);
                }
                if x - 1 > lower {
                    a[i][i - 1] = -chain.down(x);
                }
            }
            let sol = solve_dense(a, b);
            for i in 0..m {
                assert_relative_eq!(h[lower + 1 + i], sol[i], epsilon = 1e-12);
            }
        }
        for target in 0..=n {
            let u = expected_hitting_time(&chain, target).unwrap();
            let states: Vec<usize> = (0..=n).filter(|&x| x != target).collect();
            let idx = |x: usize| states.iter().position(|&s| s == x);
            let m = states.len();
            let mut a = vec![vec![0.0; m]; m];
            let b = vec![1.0; m];
            for (i, &x) in states.iter().enumerate() {
                a[i][i] = 1.0;
                for y in x.saturating_sub(1)..=(x + 1).min(n) {
                    if let Some(j) = idx(y) {
                        a[i][j] -= chain.transition(x, y);
                    }
                }
            }
            let sol = solve_dense(a, b);
            for (i, &x) in states.iter().enumerate() {
                assert_relative_eq!(u[x], sol[i], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn greens_function_sums_to_hitting_time() {
        let chain = lazy_chain();
        let n = chain.max_state();
        let u = expected_hitting_time(&chain, n).unwrap();
        for x in 0..n {
            let total: f64 = (0..n).map(|y| greens_function(&chain, x, y, n).unwrap()).sum();
            assert_relative_eq!(total, u[x], max_relative = 1e-10);
        }
        let u0 = expected_hitting_time(&chain, 0).unwrap();
        for x in 1..=n {
            let total: f64 = (1..=n).map(|y| greens_function(&chain, x, y, 0).unwrap()).sum();
            assert_relative_eq!(total, u0[x], max_relative = 1e-10);
        }
    }

    #[test]
    fn greens_function_edge_cases() {
        let chain = lazy_chain();
        assert_eq!(greens_function(&chain, 3, 1, 3).unwrap(), 0.0);
        assert!(matches!(
            greens_function(&chain, 1, 4, 2),
            Err(Error::BlockedPath { .. })
        ));
    }

    #[test]
    fn detailed_balance_and_kac() {
        let chain = lazy_chain();
        let pi = chain.stationary().unwrap();
        assert_relative_eq!(pi.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        for x in 0..chain.max_state() {
            assert!((pi[x] * chain.up(x) - pi[x + 1] * chain.down(x + 1)).abs() < 1e-10);
        }
        for x in 0..=chain.max_state() {
            let kac = kac_return_time(&pi, x).unwrap();
            let direct = mean_return_time(&chain, x).unwrap();
            assert_relative_eq!(kac, direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn two_state_fair_chain_returns_in_two() {
        let chain = BirthDeathChain::new(vec![0.5, 0.0], vec![0.0, 0.5]).unwrap();
        let pi = chain.stationary().unwrap();
        assert_relative_eq!(kac_return_time(&pi, 0).unwrap(), 2.0);
        assert!(kac_return_time(&[0.0, 1.0], 0).is_err());
    }

    #[test]
    fn conditioned_rows_sum_to_one() {
        let chain = lazy_chain();
        let n = chain.max_state();
        for (target, avoid) in [(n, 0), (0, n), (4, 1)] {
            let q = condition_on_hitting(&chain, target, avoid).unwrap();
            for x in 0..=n {
                assert_relative_eq!(q.up(x) + q.down(x) + q.stay(x), 1.0, epsilon = 1e-12);
            }
            assert_eq!(q.stay(target), 1.0);
        }
    }

    #[test]
    fn conditioning_matches_excursion_reversal() {
        // A reversible chain's excursion up and its reverse excursion down
        // take the same expected time.
        let chain = lazy_chain();
        let n = chain.max_state();
        let up = condition_on_hitting(&chain, n, 0).unwrap();
        let down = condition_on_hitting(&chain, 0, n).unwrap();
        let t_up = expected_hitting_time(&up, n).unwrap()[0];
        let t_down = expected_hitting_time(&down, 0).unwrap()[n];
        assert_relative_eq!(t_up, t_down, max_relative = 1e-10);
    }

    #[test]
    fn profile_bundles_both_vectors() {
        let chain = symmetric_walk(4);
        let p = HittingProfile::compute(&chain, 0, 4).unwrap();
        assert_eq!(p.h.len(), 5);
        assert_eq!(p.u[4], 0.0);
        assert!(p.u[0] > p.u[3]);
    }
}
