use anyhow::Result;

use regwait_core::mutation_chain::{chain_summary, conditioned_times, hitting_time_matrix, match_hitting_probability};
use regwait_core::population::{
    approx3_expected_time, coalescent_quantities, headline, killed_fixation_chain_sim, minus_one_balance,
    rho, rho1_rho2, triple_mutation_expectation, KilledChainConfig, KilledChainResult,
};
use regwait_core::sequence_sim::{simulate_segment_waiting, SimConfig, SimResult};
use regwait_core::word_stats::{
    clump_size, expected_almost_matches, initial_condition_bounds, overlap_profile, scan_all_words,
    time_t_bounds,
};
use regwait_core::{DnaWord, Execution, PopulationParams};

use crate::output::{Cell, Report};
use crate::params::{parse_word, Overrides, UsageError};
use crate::Command;

pub const SEGMENT_L: usize = 1024;
pub const POPULATION_L: usize = 1000;
pub const DEFAULT_REPS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

const TABLE2_EXAMPLES: [&str; 7] = ["ACACAC", "ACAACA", "ACGACG", "AACGAA", "ACGTAC", "ACGTCA", "ACGTAG"];
const TABLE3_W6: [&str; 6] = ["AACCGT", "ACGCTA", "ACAGCA", "AACGAA", "ACAACA", "ACACAC"];
const TABLE3_W8: [&str; 6] = ["ACAGCTGT", "ACAAGGGC", "ACAGACAG", "AAAAAACA", "AACAACAA", "ACACACAC"];
const TABLE4_W6: [&str; 6] = ["AACCGT", "ACGCTA", "ACAGCA", "AACGAA", "AACAAC", "ACACAC"];
const TABLE4_W8: [&str; 6] = ["ACAGCTGT", "ACAAGGGC", "ACAGACAG", "AAAACAAA", "AACAACAA", "ACACACAC"];

type Params = Vec<(String, String)>;

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Resolved settings for one invocation.
pub struct Ctx<'a> {
    o: &'a Overrides,
}

impl<'a> Ctx<'a> {
    pub fn new(o: &'a Overrides) -> Self {
        Self { o }
    }

    fn segment_l(&self) -> usize {
        self.o.l.unwrap_or(SEGMENT_L)
    }

    fn reps(&self) -> u64 {
        self.o.reps.unwrap_or(DEFAULT_REPS)
    }

    fn seed(&self) -> u64 {
        self.o.seed.unwrap_or(DEFAULT_SEED)
    }

    fn lambda(&self) -> f64 {
        self.o.lambda.unwrap_or(1.0)
    }

    fn lengths(&self, defaults: &[usize]) -> Vec<usize> {
        self.o.w.map_or_else(|| defaults.to_vec(), |w| vec![w])
    }

    /// Explicit `--words`, else the defaults for the selected `--W`, else all of them.
    fn words(&self, w6: &[&str], w8: &[&str]) -> Result<Vec<DnaWord>> {
        if let Some(ws) = self.o.parsed_words()? {
            return Ok(ws);
        }
        let names: Vec<&str> = match self.o.w {
            None => w6.iter().chain(w8).copied().collect(),
            Some(6) => w6.to_vec(),
            Some(8) => w8.to_vec(),
            Some(w) => return Err(usage(format!("no default words for W={w}; pass --words"))),
        };
        names.into_iter().map(parse_word).collect()
    }

    fn word(&self, default: &str) -> Result<DnaWord> {
        self.o.parsed_word()?.map_or_else(|| parse_word(default), Ok)
    }

    pub fn population(&self, word_length: usize) -> PopulationParams {
        let d = PopulationParams::default();
        PopulationParams {
            population_size: self.o.n.unwrap_or(d.population_size),
            mu: self.o.mu.unwrap_or(d.mu),
            word_length,
            segment_length: self.o.l.unwrap_or(POPULATION_L),
            generation_years: self.o.generation_years.unwrap_or(d.generation_years),
        }
    }

    fn population_header(&self, p: &PopulationParams) -> Params {
        vec![
            kv("N", p.population_size),
            kv("mu", p.mu),
            kv("L", p.segment_length),
            kv("generation_years", p.generation_years),
        ]
    }

    fn sim_header(&self, l: usize, bin: u64) -> Params {
        let mut h = vec![kv("L", l), kv("reps", self.reps()), kv("seed", self.seed()), kv("bin", bin)];
        if let Some(cap) = self.o.step_cap {
            h.push(kv("step_cap", cap));
        }
        h
    }

    fn segment_sim(&self, word: DnaWord, bin: u64) -> Result<SimResult> {
        let mut c = SimConfig::new(word, self.segment_l(), self.reps(), self.seed());
        c.bin_width = bin;
        if let Some(cap) = self.o.step_cap {
            c.step_cap = cap;
        }
        c.execution = Execution::Parallel;
        Ok(simulate_segment_waiting(&c)?)
    }

    fn killed_sim(&self, word: DnaWord, bin: u64) -> Result<KilledChainResult> {
        let mut c = KilledChainConfig::new(word, self.population(word.len()), self.reps(), self.seed());
        c.bin_width = bin;
        if let Some(cap) = self.o.step_cap {
            c.step_cap = cap;
        }
        Ok(killed_fixation_chain_sim(&c)?)
    }
}

pub fn run(cmd: Command, o: &Overrides) -> Result<Report> {
    let ctx = Ctx::new(o);
    match cmd {
        Command::Table1 => table1(&ctx),
        Command::Table2 => table2(&ctx),
        Command::Table3 => table3(&ctx),
        Command::Table4 => table4(&ctx),
        Command::Table5 => table5(&ctx),
        Command::Table6 => table6(&ctx),
        Command::Table7 => table7(&ctx),
        Command::Table8 => table8(&ctx),
        Command::Fig1 => segment_figure(&ctx, "fig1", "AACCGT"),
        Command::Fig2 => segment_figure(&ctx, "fig2", "ACACAC"),
        Command::Fig3 => killed_figure(&ctx, "fig3", "ACAGCTGT"),
        Command::Fig4 => killed_figure(&ctx, "fig4", "ACACACAC"),
        Command::Scan => scan(&ctx),
        Command::Approx3 => approx3(&ctx),
        Command::Headline => headline_report(&ctx),
        Command::Selftest => unreachable!("handled by the self-test module"),
    }
}

fn table1(ctx: &Ctx) -> Result<Report> {
    let ws = ctx.lengths(&[6, 8]);
    let mut r = Report::new(
        "table1",
        vec![kv("W", join(&ws))],
        &["W", "E_pi_T", "E_0_T", "clump_formula", "a", "relaxation_time"],
    );
    for w in ws {
        let s = chain_summary(w)?;
        r.push(vec![
            w.into(),
            s.mean_stationary.into(),
            s.mean_from_zero.into(),
            s.clump_mean_formula.into(),
            s.a.into(),
            s.relaxation_time.into(),
        ]);
    }
    Ok(r)
}

fn table2(ctx: &Ctx) -> Result<Report> {
    let w = ctx.o.w.unwrap_or(6);
    if !(2..=10).contains(&w) {
        return Err(usage(format!("table2 enumerates lengths 2..=10, got W={w}")));
    }
    let l = ctx.segment_l();
    let examples: Vec<DnaWord> = match ctx.o.parsed_words()? {
        Some(ws) => ws,
        None if w == 6 => TABLE2_EXAMPLES.iter().map(|s| parse_word(s)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    // category -> (count, first word)
    let mut categories: Vec<(Vec<usize>, u64, DnaWord)> = Vec::new();
    for word in DnaWord::all(w) {
        let shifts = overlap_profile(&word).exact_shifts();
        match categories.iter_mut().find(|c| c.0 == shifts) {
            Some(c) => c.1 += 1,
            None => categories.push((shifts, 1, word)),
        }
    }
    let mut rows = Vec::new();
    for (shifts, count, first) in categories {
        let example = examples
            .iter()
            .find(|e| e.len() == w && overlap_profile(e).exact_shifts() == shifts)
            .copied()
            .unwrap_or(first);
        let b = initial_condition_bounds(&example, l)?;
        rows.push((shifts, count, example, b.b1 / b.lambda, b.b2 / b.lambda));
    }
    rows.sort_by(|a, b| b.4.total_cmp(&a.4).then_with(|| a.0.cmp(&b.0)));
    let mut r = Report::new(
        "table2",
        vec![kv("W", w), kv("L", l)],
        &["exact_shifts", "words", "example", "b1_per_gamma", "b2_per_gamma"],
    );
    for (shifts, count, example, b1, b2) in rows {
        let label: Vec<String> = shifts.iter().map(|s| s.to_string()).collect();
        r.push(vec![label.join(" ").into(), count.into(), example.to_string().into(), b1.into(), b2.into()]);
    }
    Ok(r)
}

fn table3(ctx: &Ctx) -> Result<Report> {
    let l = ctx.segment_l();
    let lambda = ctx.lambda();
    let mut r = Report::new(
        "table3",
        vec![kv("L", l), kv("lambda", lambda)],
        &["word", "W", "b1", "b2", "tv", "clump_size"],
    );
    for word in ctx.words(&TABLE3_W6, &TABLE3_W8)? {
        let b = time_t_bounds(&word, l, lambda)?;
        r.push(vec![
            word.to_string().into(),
            word.len().into(),
            b.b1.into(),
            b.b2.into(),
            b.tv_bound.into(),
            b.clump_size.into(),
        ]);
    }
    Ok(r)
}

fn table4(ctx: &Ctx) -> Result<Report> {
    let l = ctx.segment_l();
    let bin = ctx.o.bin.unwrap_or(100);
    let reps = ctx.reps();
    let mut r = Report::new(
        "table4",
        ctx.sim_header(l, bin),
        &[
            "word",
            "W",
            "clump_size",
            "naive_mean",
            "predicted_mean",
            "atom_at_zero",
            "conditional_mean",
            "std_error",
            "ks",
        ],
    );
    for word in ctx.words(&TABLE4_W6, &TABLE4_W8)? {
        let c = clump_size(&word)?;
        let naive = 4f64.powi(word.len() as i32) / word.len() as f64;
        let mut row: Vec<Cell> = vec![
            word.to_string().into(),
            word.len().into(),
            c.into(),
            naive.into(),
            (naive * c).into(),
        ];
        if reps == 0 {
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
        } else {
            let s = ctx.segment_sim(word, bin)?;
            row.extend([
                s.atom_at_zero.into(),
                s.conditional_mean.into(),
                s.conditional_std_error.into(),
                s.ks_exponential().into(),
            ]);
        }
        r.push(row);
    }
    Ok(r)
}

fn table5(ctx: &Ctx) -> Result<Report> {
    let words = match ctx.o.parsed_words()? {
        Some(ws) => ws,
        None => TABLE4_W8.iter().map(|s| parse_word(s)).collect::<Result<_>>()?,
    };
    let bin = ctx.o.bin.unwrap_or(10);
    let p = ctx.population(8);
    let mut header = ctx.population_header(&p);
    header.extend(ctx.sim_header(p.segment_length, bin).into_iter().skip(1));
    let mut r = Report::new(
        "table5",
        header,
        &[
            "word",
            "rho1",
            "rho2",
            "atom_at_zero",
            "conditional_mean",
            "std_error",
            "generations",
            "years",
            "ks",
        ],
    );
    for word in words {
        let k = ctx.killed_sim(word, bin)?;
        r.push(vec![
            word.to_string().into(),
            k.rho1.into(),
            k.rho2.into(),
            k.atom_at_zero.into(),
            k.conditional_mean.into(),
            k.conditional_std_error.into(),
            k.generations.into(),
            k.years.into(),
            k.ks_exponential().into(),
        ]);
    }
    Ok(r)
}

fn table6(ctx: &Ctx) -> Result<Report> {
    let ws = ctx.lengths(&[6, 8]);
    let mut r = Report::new("table6", vec![kv("W", join(&ws))], &["W", "x", "h"]);
    for w in ws {
        let h = match_hitting_probability(w)?;
        for (x, p) in h.iter().enumerate() {
            r.push(vec![w.into(), x.into(), (*p).into()]);
        }
    }
    Ok(r)
}

fn table7(ctx: &Ctx) -> Result<Report> {
    let w = ctx.o.w.unwrap_or(8);
    let m = hitting_time_matrix(w)?;
    let names: Vec<String> = std::iter::once("x".to_string())
        .chain((1..=w).rev().map(|y| format!("T_{y}")))
        .collect();
    let cols: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut r = Report::new("table7", vec![kv("W", w)], &cols);
    for (x, row) in m.iter().enumerate().take(w) {
        let mut cells: Vec<Cell> = vec![x.into()];
        cells.extend((1..=w).rev().map(|y| if y > x { row[y].into() } else { Cell::Empty }));
        r.push(cells);
    }
    Ok(r)
}

fn table8(ctx: &Ctx) -> Result<Report> {
    let w = ctx.o.w.unwrap_or(8);
    let c = conditioned_times(w)?;
    let mut r = Report::new("table8", vec![kv("W", w)], &["x", "to_top", "to_bottom"]);
    for x in 0..=w {
        r.push(vec![x.into(), c.to_top[x].into(), c.to_bottom[x].into()]);
    }
    Ok(r)
}

fn histogram_rows(r: &mut Report, bins: &[(u64, u64)]) {
    for &(start, count) in bins {
        r.push(vec![start.into(), count.into()]);
    }
}

fn segment_figure(ctx: &Ctx, name: &str, default: &str) -> Result<Report> {
    let word = ctx.word(default)?;
    let l = ctx.segment_l();
    let bin = ctx.o.bin.unwrap_or(100);
    let mut header = vec![kv("word", word)];
    header.extend(ctx.sim_header(l, bin));
    let s = ctx.segment_sim(word, bin)?;
    let mut r = Report::new(name, header, &["bin_start", "count"]);
    r.note("atom_at_zero", s.atom_at_zero);
    r.note("conditional_mean", s.conditional_mean);
    r.note("ks", s.ks_exponential());
    histogram_rows(&mut r, &s.histogram.bins);
    Ok(r)
}

fn killed_figure(ctx: &Ctx, name: &str, default: &str) -> Result<Report> {
    let word = ctx.word(default)?;
    let bin = ctx.o.bin.unwrap_or(10);
    let p = ctx.population(word.len());
    let mut header = vec![kv("word", word)];
    header.extend(ctx.population_header(&p));
    header.extend(ctx.sim_header(p.segment_length, bin).into_iter().skip(1));
    let k = ctx.killed_sim(word, bin)?;
    let mut r = Report::new(name, header, &["bin_start", "count"]);
    r.note("atom_at_zero", k.atom_at_zero);
    r.note("conditional_mean", k.conditional_mean);
    r.note("ks", k.ks_exponential());
    histogram_rows(&mut r, &k.histogram.bins);
    Ok(r)
}

fn scan(ctx: &Ctx) -> Result<Report> {
    let w = ctx.o.w.unwrap_or(8);
    let l = ctx.segment_l();
    let lambda = ctx.lambda();
    let s = scan_all_words(w, l, lambda, Execution::Parallel)?;
    let mut r = Report::new(
        "scan",
        vec![kv("W", w), kv("L", l), kv("lambda", lambda)],
        &["word", "b1", "b2", "tv", "clump_size", "repetitive"],
    );
    r.note("best", s.best().word);
    r.note("worst", s.worst().word);
    r.note("excluded", s.excluded_count());
    r.note(
        "max_initial_bound_per_gamma_excluding_repetitive",
        s.max_initial_bound_per_gamma_excluding_repetitive(),
    );
    for e in &s.entries {
        r.push(vec![
            e.word.to_string().into(),
            e.b1.into(),
            e.b2.into(),
            e.tv.into(),
            e.clump_size.into(),
            e.repetitive.into(),
        ]);
    }
    Ok(r)
}

fn approx3(ctx: &Ctx) -> Result<Report> {
    let ws = ctx.lengths(&[6, 8]);
    let p0 = ctx.population(8);
    let mut header = ctx.population_header(&p0);
    header.insert(0, kv("W", join(&ws)));
    let mut r = Report::new(
        "approx3",
        header,
        &[
            "W",
            "rho",
            "from_minus_two",
            "stationary_mean",
            "generations",
            "years",
            "years_from_rounded_mean",
        ],
    );
    for w in ws {
        let a = approx3_expected_time(&ctx.population(w))?;
        if let Some(warn) = &a.regime_warning {
            r.note(&format!("warning_W{w}"), warn);
        }
        r.push(vec![
            w.into(),
            a.rho.into(),
            a.from_minus_two.into(),
            a.stationary_mean.into(),
            a.generations.into(),
            a.years.into(),
            (a.years * round_sig3(a.stationary_mean) / a.stationary_mean).into(),
        ]);
    }
    Ok(r)
}

/// The year figures quoted alongside these means were converted from the
/// means rounded to three significant digits.
fn round_sig3(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(2 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn headline_report(ctx: &Ctx) -> Result<Report> {
    let w = ctx.o.w.unwrap_or(8);
    let p = ctx.population(w);
    let word = ctx.word("ACAGCTGT")?;
    let reps = ctx.reps();
    let mut header = ctx.population_header(&p);
    header.insert(0, kv("W", w));
    header.push(kv("word", word));
    header.push(kv("reps", reps));
    header.push(kv("seed", ctx.seed()));
    let killed = if reps == 0 { None } else { Some(ctx.killed_sim(word, 10)?) };
    let h = headline(&p, killed.as_ref().map(|k| k.conditional_mean))?;
    let rr = rho1_rho2(&p);
    let rt = rho(&p)?;
    let tm = triple_mutation_expectation(&p)?;
    let co = coalescent_quantities(&p)?;
    let per_site = co.expected_mutations_segment_asymptotic / p.segment_length as f64;
    let balance = minus_one_balance(
        6,
        expected_almost_matches(6, SEGMENT_L, 1)?,
        expected_almost_matches(6, SEGMENT_L, 2)?,
        per_site,
    );

    let mut r = Report::new("headline", header, &["quantity", "value"]);
    let mut put = |k: &str, v: Option<f64>| r.push(vec![k.into(), v.map_or(Cell::Empty, Cell::Num)]);
    put("single_minus_one_years", Some(h.single_minus_one_years));
    put("six_letter_poisson_mean", Some(h.six_letter_poisson_mean));
    put("six_letter_years", Some(h.six_letter_years));
    put("eight_letter_poisson_mean", Some(h.eight_letter_poisson_mean));
    put("eight_letter_years", Some(h.eight_letter_years));
    put("eight_letter_years_unrounded", Some(h.eight_letter_years_unrounded));
    put("no_match_years", h.no_match_years);
    put("killed_atom_at_zero", killed.as_ref().map(|k| k.atom_at_zero));
    put("killed_conditional_mean", killed.as_ref().map(|k| k.conditional_mean));
    put("rho1", Some(rr.rho1));
    put("r", Some(rr.r));
    put("rho2", Some(rr.rho2));
    put("rho", Some(rt.rho));
    put("double_mutation_expectation", Some(rt.double_mutation_expectation));
    put("triple_mutation_per_interval", Some(tm.per_interval));
    put("triple_mutation_visits", Some(tm.visits));
    put("triple_mutation_total", Some(tm.total));
    put("tree_length", Some(co.tree_length));
    put("tree_length_asymptotic", Some(co.tree_length_asymptotic));
    put("mutations_word", Some(co.expected_mutations_word));
    put("mutations_segment", Some(co.expected_mutations_segment));
    put("mutations_word_asymptotic", Some(co.expected_mutations_word_asymptotic));
    put("mutations_segment_asymptotic", Some(co.expected_mutations_segment_asymptotic));
    put("site_frequency_mean_fraction", Some(co.site_frequency_mean_fraction));
    put("minus_one_disruption_rate_W6", Some(balance.disruption_rate));
    put("minus_one_creation_rate_W6", Some(balance.creation_rate));
    Ok(r)
}

fn join(ws: &[usize]) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}
