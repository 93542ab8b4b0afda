use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_regwait");

fn regwait(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    regwait(args).status.code().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&["nope"]), 1);
    assert_eq!(code(&["table1", "--bogus"]), 1);
    assert_eq!(code(&["table3", "--words", "ACGX"]), 1);
    assert_eq!(code(&["table5", "--mu", "2", "--reps", "10"]), 1);
    assert_eq!(code(&["table4", "--W", "7"]), 1);
    assert_eq!(code(&["table1", "--config", "/nonexistent/file"]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn step_cap_exits_three_and_names_the_replication() {
    let out = regwait(&["fig1", "--reps", "50", "--step-cap", "5", "--word", "ACGTAC"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("replication"));
}

#[test]
fn selftest_passes() {
    let out = regwait(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# population\nN=20000\nmu=2e-8\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = String::from_utf8(regwait(&["approx3", "--config", cfg, "--N", "5000"]).stdout).unwrap();
    assert!(out.contains("# N=5000\n"), "{out}");
    assert!(out.contains("# mu=0.00000002\n"), "{out}");

    std::fs::write(dir.path().join("bad.cfg"), "Ne=1\n").unwrap();
    let bad = regwait(&["approx3", "--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown key"));
}

#[test]
fn out_file_matches_stdout_and_embeds_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let args = ["fig3", "--reps", "200", "--seed", "9"];
    let stdout = regwait(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(code(&with_out), 0);
    let file = std::fs::read(&path).unwrap();
    assert_eq!(file, stdout);
    let text = String::from_utf8(file).unwrap();
    for line in ["# seed=9", "# reps=200", "# bin=10", "# N=10000", "# L=1000", "# word=ACAGCTGT"] {
        assert!(text.contains(line), "{line} missing");
    }
}

#[test]
fn segment_and_population_defaults_differ() {
    let seg = String::from_utf8(regwait(&["table3"]).stdout).unwrap();
    assert!(seg.contains("# L=1024\n"));
    let pop = String::from_utf8(regwait(&["approx3"]).stdout).unwrap();
    assert!(pop.contains("# L=1000\n"));
}

#[test]
fn table7_is_triangular() {
    let out = String::from_utf8(regwait(&["table7", "--W", "8"]).stdout).unwrap();
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 8);
    for (x, row) in rows.iter().enumerate() {
        let filled = row.split(',').skip(1).filter(|c| !c.is_empty()).count();
        assert_eq!(filled, 8 - x);
    }
}
