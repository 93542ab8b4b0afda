//! Self-overlap structure of a word and the Chen-Stein bounds built on it.
//!
//! The dependence neighbourhood of a window is the `2W - 1` windows that
//! share a letter with it, so `b3` vanishes and only `b1`, `b2` are needed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mutation_chain;
use crate::par::Execution;
use crate::stats::{binomial_coefficient, binomial_pmf};
use crate::word::DnaWord;

/// Per-shift overlap data for shifts `k = 1..W`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OverlapProfile {
    word_length: usize,
    /// `y[k-1]`: the word agrees with its `k`-shift on all `W - k` overlap letters.
    y: Vec<bool>,
    /// `m[k-1]`: number of agreeing letters in that overlap.
    m: Vec<usize>,
}

impl OverlapProfile {
    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn y(&self, k: usize) -> bool {
        self.y[k - 1]
    }

    pub fn m(&self, k: usize) -> usize {
        self.m[k - 1]
    }

    /// Shifts with an exact overlap, e.g. `[2, 4]` for ACACAC.
    pub fn exact_shifts(&self) -> Vec<usize> {
        (1..self.word_length).filter(|&k| self.y(k)).collect()
    }

    /// `Q0 = sum_k y_k 4^-k`.
    pub fn q0(&self) -> f64 {
        (1..self.word_length)
            .filter(|&k| self.y(k))
            .map(|k| 0.25f64.powi(k as i32))
            .fold(0.0, |acc, t| acc + t)
    }

    /// `Q = sum_k y_k 4^-k (W - k) / W`.
    pub fn q(&self) -> f64 {
        let w = self.word_length as f64;
        (1..self.word_length)
            .filter(|&k| self.y(k))
            .map(|k| 0.25f64.powi(k as i32) * (w - k as f64) / w)
            .fold(0.0, |acc, t| acc + t)
    }

    /// Smallest exact shift, if any.
    pub fn period(&self) -> Option<usize> {
        (1..self.word_length).find(|&k| self.y(k))
    }
}

pub fn overlap_profile(word: &DnaWord) -> OverlapProfile {
    let w = word.len();
    let codes = word.codes();
    let m: Vec<usize> = (1..w)
        .map(|k| (0..w - k).filter(|&i| codes[i + k] == codes[i]).count())
        .collect();
    let y = m.iter().enumerate().map(|(i, &mk)| mk == w - (i + 1)).collect();
    OverlapProfile {
        word_length: w,
        y,
        m,
    }
}

/// Match-chain quantities shared by every word of one length.
#[derive(Clone, Debug)]
pub struct ClumpTables {
    word_length: usize,
    /// `h(x) = P_x(T_W < T_0)`.
    h: Vec<f64>,
    a: f64,
    /// `r[k][j] = P(Binomial(k, 1/4) = j)`.
    r: Vec<Vec<f64>>,
}

impl ClumpTables {
    pub fn new(word_length: usize) -> Result<Self> {
        if word_length == 0 || word_length > crate::word::MAX_WORD_LENGTH {
            return Err(Error::InvalidParameter(format!("word length {word_length}")));
        }
        let h = mutation_chain::match_hitting_probability(word_length)?;
        let a = h[word_length - 1];
        let r = (0..word_length)
            .map(|k| (0..=k).map(|j| binomial_pmf(k, j, 0.25)).collect())
            .collect();
        Ok(Self {
            word_length,
            h,
            a,
            r,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `z(m, k) = sum_j r(k, j) h(m + j) 1{m + j < W}`.
    pub fn z(&self, m: usize, k: usize) -> f64 {
        (0..=k)
            .filter(|&j| m + j < self.word_length)
            .map(|j| self.r[k][j] * self.h[m + j])
            .fold(0.0, |acc, t| acc + t)
    }

    /// `S = sum_k z(m_k, k)`.
    pub fn s_overlap(&self, profile: &OverlapProfile) -> f64 {
        (1..self.word_length).map(|k| self.z(profile.m(k), k)).fold(0.0, |acc, t| acc + t)
    }

    /// `(1 + 2(S + Q)) / (1 - a)`.
    pub fn clump_size(&self, profile: &OverlapProfile) -> f64 {
        (1.0 + 2.0 * (self.s_overlap(profile) + profile.q())) / (1.0 - self.a)
    }
}

/// Chen-Stein terms and derived quantities for one word.
#[derive(Clone, Debug, Serialize)]
pub struct ChenSteinReport {
    pub word: DnaWord,
    /// `gamma = L / 4^W` at time 0, or the supplied expected count at time T.
    pub lambda: f64,
    pub b1: f64,
    pub b2: f64,
    /// `2 (b1 + b2) (1 - e^-lambda) / lambda`.
    pub tv_bound: f64,
    pub clump_size: f64,
    pub q0: f64,
    pub q: f64,
    pub s_overlap: f64,
}

fn tv_from_terms(b1: f64, b2: f64, lambda: f64) -> f64 {
    2.0 * (b1 + b2) * (-(-lambda).exp_m1()) / lambda
}

fn check_segment(word_length: usize, segment_length: usize) -> Result<()> {
    if segment_length <= 2 * word_length {
        return Err(Error::InvalidParameter(format!(
            "segment length {segment_length} must exceed twice the word length {word_length}"
        )));
    }
    Ok(())
}

fn initial_with(
    tables: &ClumpTables,
    word: &DnaWord,
    profile: &OverlapProfile,
    segment_length: usize,
) -> ChenSteinReport {
    let w = word.len();
    let p = 0.25f64.powi(w as i32);
    let gamma = segment_length as f64 * p;
    let q0 = profile.q0();
    let b1 = gamma * (2 * w - 1) as f64 * p;
    let b2 = 2.0 * gamma * q0;
    ChenSteinReport {
        word: *word,
        lambda: gamma,
        b1,
        b2,
        tv_bound: tv_from_terms(b1, b2, gamma),
        clump_size: tables.clump_size(profile),
        q0,
        q: profile.q(),
        s_overlap: tables.s_overlap(profile),
    }
}

fn time_t_with(
    tables: &ClumpTables,
    word: &DnaWord,
    profile: &OverlapProfile,
    segment_length: usize,
    lambda: f64,
) -> ChenSteinReport {
    let w = word.len() as f64;
    let l = segment_length as f64;
    let q = profile.q();
    let s = tables.s_overlap(profile);
    let b1 = lambda * lambda * (2.0 * w - 1.0) / l;
    let b2 = lambda * lambda * (4.0 * w - 4.0) / l + lambda * (2.0 * q + 4.0 * s);
    ChenSteinReport {
        word: *word,
        lambda,
        b1,
        b2,
        tv_bound: tv_from_terms(b1, b2, lambda),
        clump_size: (1.0 + 2.0 * (s + q)) / (1.0 - tables.a),
        q0: profile.q0(),
        q,
        s_overlap: s,
    }
}

/// Bounds for the number of occurrences in a uniformly random segment.
pub fn initial_condition_bounds(word: &DnaWord, segment_length: usize) -> Result<ChenSteinReport> {
    check_segment(word.len(), segment_length)?;
    let tables = ClumpTables::new(word.len())?;
    Ok(initial_with(&tables, word, &overlap_profile(word), segment_length))
}

/// Bounds for the number of occurrences by a time at which `lambda` are expected.
pub fn time_t_bounds(word: &DnaWord, segment_length: usize, lambda: f64) -> Result<ChenSteinReport> {
    check_segment(word.len(), segment_length)?;
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
    }
    let tables = ClumpTables::new(word.len())?;
    Ok(time_t_with(&tables, word, &overlap_profile(word), segment_length, lambda))
}

/// Approximate expected clump size.
pub fn clump_size(word: &DnaWord) -> Result<f64> {
    let tables = ClumpTables::new(word.len())?;
    Ok(tables.clump_size(&overlap_profile(word)))
}

/// Word-free bound for the declumped count: `2(4W - 3)/L * lambda (1 - e^-lambda)`.
pub fn theorem2_bound(word_length: usize, segment_length: usize, lambda_bar: f64) -> f64 {
    2.0 * (4.0 * word_length as f64 - 3.0) / segment_length as f64
        * lambda_bar
        * (-(-lambda_bar).exp_m1())
}

/// Expected number of windows (out of `L`, circular) differing from the word
/// in exactly `mismatches` letters.
pub fn expected_almost_matches(word_length: usize, segment_length: usize, mismatches: usize) -> Result<f64> {
    if mismatches > word_length {
        return Err(Error::InvalidParameter(format!(
            "{mismatches} mismatches in a word of length {word_length}"
        )));
    }
    Ok(segment_length as f64
        * binomial_coefficient(word_length, mismatches)
        * 0.75f64.powi(mismatches as i32)
        * 0.25f64.powi((word_length - mismatches) as i32))
}

/// Non-constant words with an exact self-overlap at a shift of at most half
/// the word length, i.e. words made of a repeated short unit.
pub fn is_repetitive(profile: &OverlapProfile) -> bool {
    profile.period().is_some_and(|p| p <= profile.word_length() / 2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub word: DnaWord,
    pub b1: f64,
    pub b2: f64,
    pub tv: f64,
    pub clump_size: f64,
    /// `2 (b1 + b2) / gamma` for a random initial segment.
    pub initial_bound_per_gamma: f64,
    pub exact_shifts: Vec<usize>,
    pub repetitive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WordScan {
    pub word_length: usize,
    pub segment_length: usize,
    pub lambda: f64,
    /// Non-constant words in lexicographic order.
    pub entries: Vec<ScanEntry>,
    pub constant_words: usize,
}

impl WordScan {
    fn extreme(&self, better: impl Fn(f64, f64) -> bool) -> &ScanEntry {
        // first in lexicographic order wins ties
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if better(e.tv, best.tv) {
                best = e;
            }
        }
        best
    }

    /// Smallest tv bound among non-constant words.
    pub fn best(&self) -> &ScanEntry {
        self.extreme(|a, b| a < b)
    }

    pub fn worst(&self) -> &ScanEntry {
        self.extreme(|a, b| a > b)
    }

    /// Constant words plus non-constant repetitive ones.
    pub fn excluded_count(&self) -> usize {
        self.constant_words + self.entries.iter().filter(|e| e.repetitive).count()
    }

    /// Largest `2 (b1 + b2) / gamma` after dropping repetitive words.
    pub fn max_initial_bound_per_gamma_excluding_repetitive(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !e.repetitive)
            .map(|e| e.initial_bound_per_gamma)
            .fold(0.0, f64::max)
    }
}

/// Bounds and clump sizes for all non-constant words of one length.
pub fn scan_all_words(
    word_length: usize,
    segment_length: usize,
    lambda: f64,
    execution: Execution,
) -> Result<WordScan> {
    if !(2..=10).contains(&word_length) {
        return Err(Error::InvalidParameter(format!(
            "word scans cover lengths 2..=10, got {word_length}"
        )));
    }
    check_segment(word_length, segment_length)?;
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
    }
    let tables = ClumpTables::new(word_length)?;
    let words: Vec<DnaWord> = DnaWord::all(word_length).collect();
    let entries: Vec<Option<ScanEntry>> = execution.map_slice(&words, |word| {
        if word.is_constant() {
            return None;
        }
        let profile = overlap_profile(word);
        let at_t = time_t_with(&tables, word, &profile, segment_length, lambda);
        let at_zero = initial_with(&tables, word, &profile, segment_length);
        Some(ScanEntry {
            word: *word,
            b1: at_t.b1,
            b2: at_t.b2,
            tv: at_t.tv_bound,
            clump_size: at_t.clump_size,
            initial_bound_per_gamma: 2.0 * (at_zero.b1 + at_zero.b2) / at_zero.lambda,
            repetitive: is_repetitive(&profile),
            exact_shifts: profile.exact_shifts(),
        })
    });
    let total = entries.len();
    let entries: Vec<ScanEntry> = entries.into_iter().flatten().collect();
    Ok(WordScan {
        word_length,
        segment_length,
        lambda,
        constant_words: total - entries.len(),
        entries,
    })
}
