//! Analytic values that must reproduce the published tables.

use anyhow::Result;

use regwait_core::markov::greens_function;
use regwait_core::mutation_chain::{
    build_match_chain, chain_summary, conditioned_times, hitting_time_matrix, match_hitting_probability,
};
use regwait_core::population::{approx3_expected_time, headline, rho1_rho2, triple_mutation_expectation};
use regwait_core::word_stats::{clump_size, initial_condition_bounds, time_t_bounds};
use regwait_core::DnaWord;

use crate::commands::Ctx;
use crate::output::Report;
use crate::params::Overrides;

#[derive(Clone, Copy)]
enum Tol {
    /// Rounded or truncated to this many decimals.
    Printed(i32),
    Relative(f64),
    Absolute(f64),
}

impl Tol {
    fn accepts(self, value: f64, expected: f64) -> bool {
        match self {
            Tol::Printed(d) => {
                let scale = 10f64.powi(d);
                let rounded = (value - expected).abs() <= 0.5 / scale + 1e-12;
                let truncated = ((value * scale + 1e-9).trunc() / scale - expected).abs() < 1e-9 / scale;
                rounded || truncated
            }
            Tol::Relative(r) => (value / expected - 1.0).abs() <= r,
            Tol::Absolute(a) => (value - expected).abs() <= a,
        }
    }

    fn label(self) -> String {
        match self {
            Tol::Printed(d) => format!("printed {d} dp"),
            Tol::Relative(r) => format!("rel {r}"),
            Tol::Absolute(a) => format!("abs {a}"),
        }
    }
}

struct Checks {
    report: Report,
    ok: bool,
}

impl Checks {
    fn add(&mut self, name: String, value: f64, expected: f64, tol: Tol) {
        let pass = tol.accepts(value, expected);
        self.ok &= pass;
        self.report.push(vec![
            name.into(),
            value.into(),
            expected.into(),
            tol.label().into(),
            (if pass { "pass" } else { "FAIL" }).into(),
        ]);
    }
}

fn word(s: &str) -> DnaWord {
    s.parse().expect("built-in word")
}

pub fn run(o: &Overrides) -> Result<(Report, bool)> {
    let mut c = Checks {
        report: Report::new("selftest", Vec::new(), &["check", "value", "expected", "tolerance", "status"]),
        ok: true,
    };

    for (w, rows) in [(6, [4420.0, 4431.0, 4456.0]), (8, [69088.0, 69104.0, 69152.0])] {
        let s = chain_summary(w)?;
        c.add(format!("E_pi T_{w}"), s.mean_stationary, rows[0], Tol::Printed(0));
        c.add(format!("E_0 T_{w}"), s.mean_from_zero, rows[1], Tol::Printed(0));
        c.add(format!("4^{w}/(1-a)"), s.clump_mean_formula, rows[2], Tol::Printed(0));
    }

    let h6 = [0.003782, 0.006051, 0.009455, 0.01966, 0.08093];
    let h8 = [0.0004334, 0.0006190, 0.0008047, 0.001139, 0.002141, 0.007156, 0.05228];
    for (w, printed) in [(6, &h6[..]), (8, &h8[..])] {
        let h = match_hitting_probability(w)?;
        for (i, &p) in printed.iter().enumerate() {
            c.add(format!("h_{w}({})", i + 1), h[i + 1], p, Tol::Relative(5e-4));
        }
    }

    let m = hitting_time_matrix(8)?;
    for (x, y, p) in [(0, 8, 69104.23), (0, 1, 3.00), (3, 4, 20.49), (6, 8, 68654.57), (7, 8, 65535.00)] {
        c.add(format!("E_{x} T_{y}"), m[x][y], p, Tol::Printed(2));
    }
    let t = conditioned_times(8)?;
    c.add("E_7(T_8|T_8<T_0)".into(), t.to_top[7], 2.156068, Tol::Printed(6));
    c.add("E_0(T_8|T_8<T_0)".into(), t.to_top[0], 47.229002, Tol::Printed(6));
    c.add("E_1(T_0|T_0<T_8)".into(), t.to_bottom[1], 26.937262, Tol::Printed(6));
    let chain = build_match_chain(8)?;
    c.add("G(0,6) before 7".into(), greens_function(&chain, 0, 6, 7)?, 12.0, Tol::Absolute(1e-9));
    c.add("G(0,5) before 7".into(), greens_function(&chain, 0, 5, 7)?, 80.0, Tol::Absolute(1e-9));

    for (w, p) in [
        ("ACACAC", 0.13281),
        ("ACAACA", 0.03320),
        ("ACGACG", 0.03125),
        ("AACGAA", 0.00977),
        ("ACGTAC", 0.00781),
        ("ACGTCA", 0.00195),
        ("ACGTAG", 0.0),
    ] {
        let b = initial_condition_bounds(&word(w), 1024)?;
        c.add(format!("b2/gamma {w}"), b.b2 / b.lambda, p, Tol::Printed(5));
    }

    for (w, p) in [("AACCGT", 0.134229), ("ACACAC", 0.465964), ("ACAGCTGT", 0.070616), ("ACACACAC", 0.337132)] {
        c.add(format!("tv {w}"), time_t_bounds(&word(w), 1024, 1.0)?.tv_bound, p, Tol::Printed(6));
    }
    for (w, p, d) in [("AACCGT", 1.129, 3), ("ACACAC", 1.318, 3), ("ACAGCTGT", 1.0624, 4), ("ACACACAC", 1.2253, 4)] {
        c.add(format!("clump {w}"), clump_size(&word(w))?, p, Tol::Printed(d));
    }

    let ctx = Ctx::new(o);
    for (w, p) in [(6, 214.0), (8, 2300.0)] {
        let a = approx3_expected_time(&ctx.population(w))?;
        c.add(format!("E_pi S_stop W={w}"), a.stationary_mean, p, Tol::Relative(0.01));
    }
    let p = ctx.population(8);
    let h = headline(&p, None)?;
    c.add("six-letter years".into(), h.six_letter_years, 107_697.0, Tol::Absolute(1.0));
    c.add("eight-letter years".into(), h.eight_letter_years, 61_560.0, Tol::Absolute(1.0));
    c.add("rho1".into(), rho1_rho2(&p).rho1, 20.0 / 23.0, Tol::Relative(1e-12));
    c.add("triple total".into(), triple_mutation_expectation(&p)?.total, 4.44e-4, Tol::Absolute(0.01e-4));

    let ok = c.ok;
    Ok((c.report, ok))
}
