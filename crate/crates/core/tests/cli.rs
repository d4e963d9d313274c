use std::path::PathBuf;
use std::process::{Command, Output};

use wordpriv::harness::CSV_HEADER;
use wordpriv::{MarkovChain, MechanismReport, Word};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wordpriv"))
}

fn chain_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/four_state.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn privatize_word_is_reproducible() {
    let args = ["privatize-word", "--word", "a,b,c", "--alphabet", "a,b,c", "--epsilon", "1", "--seed", "17"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report: MechanismReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report.input, "a,b,c");
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", stdout(&a));
}

#[test]
fn utility_dominant_limit_returns_input() {
    let o = run(&["privatize-word", "--word", "a,b,c", "--alphabet", "a,b,c", "--epsilon", "200", "--adjacency", "1"]);
    let report: MechanismReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.output, "a,b,c");
}

#[test]
fn zero_epsilon_reaches_both_outputs() {
    let mut seen = std::collections::HashSet::new();
    for seed in 0..40 {
        let o = run(&["privatize-word", "--word", "a", "--alphabet", "a,b", "--epsilon", "0", "--seed", &seed.to_string()]);
        seen.insert(serde_json::from_slice::<MechanismReport>(&o.stdout).unwrap().output);
    }
    assert_eq!(seen.len(), 2);
}

#[test]
fn trajectory_output_is_feasible() {
    let chain = MarkovChain::load(chain_file()).unwrap();
    let path = chain_file();
    for seed in 0..10 {
        let o = run(&[
            "privatize-trajectory",
            "--chain",
            path.to_str().unwrap(),
            "--word",
            "y1,y2,y3",
            "--epsilon",
            "1",
            "--seed",
            &seed.to_string(),
        ]);
        assert!(o.status.success());
        let r: MechanismReport = serde_json::from_slice(&o.stdout).unwrap();
        assert!(chain.is_feasible(&Word::parse(chain.states(), &r.output).unwrap()).unwrap());
    }
    let o = run(&["privatize-trajectory", "--chain", path.to_str().unwrap(), "--word", "y1,y2,y3", "--epsilon", "200"]);
    assert_eq!(serde_json::from_slice::<MechanismReport>(&o.stdout).unwrap().output, "y1,y2,y3");
}

#[test]
fn infeasible_trajectory_exits_with_validation_code() {
    let path = chain_file();
    let o = run(&["privatize-trajectory", "--chain", path.to_str().unwrap(), "--word", "y3,y1,y1", "--epsilon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("y3 -> y1"), "{err}");
}

#[test]
fn sweep_csv_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "sweep", "--alphabet", "a,b,c", "--length", "6", "--epsilon", "0.5,2", "--trials", "1", "--seed", "9", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sweep_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let path = chain_file();
    let o = run(&[
        "sweep", "--chain", path.to_str().unwrap(), "--word", "y1,y2,y3", "--epsilon", "1", "--trials", "5", "--format",
        "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let parsed: wordpriv::harness::SweepOutput = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 10);
}

#[test]
fn unwritable_output_is_io_error() {
    let o = run(&["sweep", "--alphabet", "a,b", "--length", "3", "--epsilon", "1", "--trials", "1", "--out", "/nonexistent/x.csv"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn bad_inputs_are_validation_errors() {
    let o = run(&["privatize-word", "--word", "a,z", "--alphabet", "a,b", "--epsilon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["privatize-word", "--word", "a,b", "--alphabet", "a,b", "--epsilon", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep", "--alphabet", "a,b", "--length", "3", "--epsilon", "1", "--format", "xml", "--out", "/tmp/x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn capacity_is_reported() {
    let o = run(&["oracle-compare", "--word", "abababab", "--alphabet", "a,b", "--epsilon", "1", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("capacity"));
}

#[test]
fn bounds_and_pmf_emit_json() {
    let o = run(&["bounds", "--length", "5", "--alphabet-size", "2", "--epsilon", "0.1", "--t", "5"]);
    let r: wordpriv::BoundReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r.upper - 2.437513).abs() < 1e-5);
    assert!((r.hoeffding[0].bound - 2.0 * (-2.0f64).exp()).abs() < 1e-12);

    let o = run(&["pmf", "--alphabet", "a,b", "--word", "aba", "--epsilon", "1", "--mechanism", "em"]);
    let s: wordpriv::pf::DistributionSummary = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s.classes.len(), 4);
}

#[test]
fn gen_chain_round_trips_and_verify_dp_passes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        assert!(run(&["gen-chain", "--states", "43", "--density", "0.1", "--seed", "4", "--out", out.to_str().unwrap()])
            .status
            .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(MarkovChain::load(&a).unwrap().states().size(), 43);

    let path = chain_file();
    let o = run(&["verify-dp", "--chain", path.to_str().unwrap(), "--length", "3", "--epsilon", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"holds\": true"));
}
