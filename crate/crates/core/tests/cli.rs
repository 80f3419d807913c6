use std::path::Path;
use std::process::{Command, Output};

use padelab::cli::config::{ProblemConfig, MARKOV_ARCSINE};
use padelab::cli::{run, RunReport};
use serde_json::json;

fn padelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value = serde_json::from_str(MARKOV_ARCSINE).unwrap();
    v["n_range"] = json!([1, 2, 3, 4]);
    v["output"] = json!(dir.join("out").to_str().unwrap());
    edit(&mut v);
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

/// Arcsine measure with a pole at `3i` and nodes on `|z| = 3`: every even
/// order puts a node on the pole.
fn node_on_pole(v: &mut serde_json::Value) {
    v["poles"] = json!([{ "eta": "3i", "coeffs": ["1"] }]);
    v["scheme"] = json!({ "kind": "circle", "center": "0", "radius": "3", "samples": 256 });
    v["n_range"] = json!([1, 2, 3]);
}

#[test]
fn run_then_check_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", |_| {});
    let o = padelab(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for n in 1..=4 {
        for f in ["poles_n{}.csv", "error_circle_n{}.csv", "approximant_n{}.json"] {
            assert!(out.join(f.replace("{}", &n.to_string())).is_file());
        }
    }
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report.all_solved && report.all_checks_pass);
    let poles = std::fs::read_to_string(out.join("poles_n2.csv")).unwrap();
    assert_eq!(poles.lines().next(), Some("re,im,nearest_singularity,distance"));
    assert_eq!(poles.lines().count(), 3);
    let o = padelab(&["check", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("check_report.json").is_file());
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", |_| {});
    let alt = dir.path().join("alt");
    let o = padelab(&[
        "run",
        &cfg,
        "--n",
        "2,5-6",
        "--precision",
        "192",
        "--out",
        alt.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(alt.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.n_range, vec![2, 5, 6]);
    assert_eq!(report.precision, 192);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "empty.json", |v| v["n_range"] = json!([]));
    assert_eq!(code(&padelab(&["run", &empty])), 2);
    assert_eq!(
        code(&padelab(&["run", dir.path().join("missing.json").to_str().unwrap()])),
        2
    );
    let bad_pole = write_config(dir.path(), "onsupport.json", |v| {
        v["poles"] = json!([{ "eta": "1/2", "coeffs": ["1"] }]);
    });
    assert_eq!(code(&padelab(&["run", &bad_pole])), 2);
    let cfg = write_config(dir.path(), "c.json", |_| {});
    let o = padelab(&["check", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("approximant_n1.json"));
    assert_eq!(code(&padelab(&["oracle", "nonsense"])), 2);
}

#[test]
fn bundled_config_is_found_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s4");
    let o = padelab(&[
        "run",
        "paper_section4.json",
        "--n",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        out.join("approximant_n10.json").is_file(),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let cfg: ProblemConfig = serde_json::from_str(&std::fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg.n_range, vec![10]);
}

#[test]
fn oracle_suites_pass() {
    for suite in ["markov", "potential"] {
        let o = padelab(&["oracle", suite]);
        assert_eq!(code(&o), 0);
        let text = String::from_utf8_lossy(&o.stdout).to_string();
        assert!(text.lines().count() >= 4);
        assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    }
}

#[test]
fn failed_order_does_not_abort_the_others() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", node_on_pole);
    let o = padelab(&["run", &cfg]);
    assert_eq!(code(&o), 1);
    let out = dir.path().join("out");
    assert!(out.join("approximant_n1.json").is_file());
    assert!(!out.join("approximant_n2.json").exists());
    assert!(out.join("approximant_n3.json").is_file());
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let status: Vec<&str> = report.solves.iter().map(|s| s.status.as_str()).collect();
    assert_eq!(status, ["solved", "failed", "solved"]);
    assert!(report.solves[1].error.as_deref().unwrap().contains("node"));
    assert!(!report.all_solved);

    let config = ProblemConfig::from_json(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    let rec = run(&config).unwrap();
    assert!(rec.approximant(1).is_some() && rec.approximant(3).is_some() && rec.approximant(2).is_none());
    assert!(!rec.exit_ok());
}

#[test]
fn artifacts_reload_to_the_same_approximant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", |v| v["n_range"] = json!([6]));
    assert_eq!(code(&padelab(&["run", &cfg])), 0);
    let config = ProblemConfig::from_json(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("out/approximant_n6.json")).unwrap();
    let art: padelab::cli::artifacts::ApproximantArtifact = serde_json::from_str(&text).unwrap();
    let problem = padelab::problem::Problem::build(&config.problem, art.precision).unwrap();
    let back = art.to_approximant(&problem).unwrap();
    let rec = run(&config).unwrap();
    let a = rec.approximant(6).unwrap();
    for (x, y) in
        a.q.coeffs()
            .iter()
            .zip(back.q.coeffs())
            .chain(a.p.coeffs().iter().zip(back.p.coeffs()))
    {
        assert!((x - y).is_zero());
    }
    assert_eq!(a.q.coeffs().len(), back.q.coeffs().len());
}
