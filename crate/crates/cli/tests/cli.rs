use std::path::Path;
use std::process::{Command, Output};

fn strato(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strato"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const TINY: [&str; 4] = ["--set", "grid.n=16", "--set", "run.t_end=0.05"];

#[test]
fn help_lists_subcommands() {
    let o = strato(&["--help"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for c in ["simulate", "converge", "dispersion", "eigen", "verify"] {
        assert!(s.contains(c), "{c} missing from help");
    }
}

#[test]
fn eigen_prints_the_spectrum() {
    let o = strato(&[
        "eigen",
        "--xi",
        "1,0.5,-2",
        "--nu",
        "1",
        "--nuprime",
        "1.2",
        "--eps",
        "0.01",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    let l2: f64 = s
        .lines()
        .find(|l| l.starts_with("numeric lambda2 ="))
        .and_then(|l| l.split_whitespace().nth(3))
        .and_then(|v| v.parse().ok())
        .unwrap();
    assert!((l2 + 5.25).abs() < 1e-10, "{l2}");
    assert!(s.contains("slack =") && s.contains("analytic eigenvalues unavailable"));
    let eq = stdout(&strato(&[
        "eigen",
        "--xi",
        "1,0.5,-2",
        "--nu",
        "1",
        "--nuprime",
        "1",
        "--eps",
        "0.01",
    ]));
    assert!(eq.contains("analytic lambda3"), "{eq}");
    assert!(!strato(&[
        "eigen",
        "--xi",
        "1,2",
        "--nu",
        "1",
        "--nuprime",
        "1",
        "--eps",
        "0.1"
    ])
    .status
    .success());
    assert!(!strato(&[
        "eigen",
        "--xi",
        "0,0,0",
        "--nu",
        "1",
        "--nuprime",
        "1",
        "--eps",
        "0.1"
    ])
    .status
    .success());
}

#[test]
fn default_config_text_is_accepted_back() {
    let o = strato(&["config"]);
    assert!(o.status.success());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.cfg");
    std::fs::write(&p, stdout(&o)).unwrap();
    let parsed = strato::convergence_harness::ExperimentConfig::load(&p).unwrap();
    assert_eq!(
        parsed,
        strato::convergence_harness::ExperimentConfig::default()
    );
    let keys = stdout(&strato(&["config", "--keys"]));
    for k in [
        "grid.n",
        "params.nu",
        "params.nuprime",
        "sweep.eps",
        "data.delta",
        "data.eta",
        "data.gamma",
        "data.seed",
        "run.dt",
        "run.t_end",
        "norms",
        "out.dir",
    ] {
        assert!(keys.lines().any(|l| l.starts_with(k)), "{k}");
    }
}

#[test]
fn converge_exits_zero_whatever_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("study");
    let mut args = vec!["converge", "-o", out.to_str().unwrap()];
    args.extend(TINY);
    let o = strato(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = json(&out.join("meta.json"));
    assert_eq!(meta["complete"], true);
    assert!(meta["verdicts"]["overall"].is_boolean());
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "case,eps,quantity,t,value");
    let re = strato(&["converge", "--reverify", out.to_str().unwrap()]);
    assert!(re.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&re)).unwrap();
    assert_eq!(v, meta["verdicts"]);
}

#[test]
fn converge_reports_failed_members_with_a_nonzero_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("study");
    let mut args = vec![
        "converge",
        "-o",
        out.to_str().unwrap(),
        "--set",
        "data.c0=10000",
        "--set",
        "run.compare_well=false",
    ];
    args.extend(TINY);
    let o = strato(&args);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&out.join("meta.json"))["complete"], false);
    let bad = strato(&["converge", "--set", "no.such.key=1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown key"));
}

#[test]
fn simulate_writes_series_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut args = vec![
        "simulate",
        "-o",
        out.to_str().unwrap(),
        "--eps",
        "0.05",
        "--snapshots",
    ];
    args.extend(TINY);
    let o = strato(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    for c in ["U_energy", "D_Linf", "D_P2_L2", "monitor"] {
        assert!(header.contains(&c), "{c}");
    }
    assert_eq!(csv.lines().count(), 1 + 11);
    let meta = json(&out.join("meta.json"));
    assert_eq!(meta["eps"], 0.05);
    assert!(meta["environment"]["threads"].as_u64().unwrap() >= 1);
    let snaps = meta["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 11);
    let f = strato::spectral_core::read_snapshot(&out.join(snaps[0].as_str().unwrap())).unwrap();
    assert_eq!(f.grid().n, [16, 16, 16]);
}

#[test]
fn verify_passes_and_the_mutation_fails() {
    let o = strato(&["verify", "--json"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["checks"].as_array().unwrap().len() >= 25);
    let m = strato(&["verify", "--mutate", "flip-lambda2"]);
    assert!(!m.status.success());
    assert!(stdout(&m).contains("FAIL linear_stratified"));
}

#[test]
fn dispersion_writes_series_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = strato(&[
        "dispersion",
        "--study",
        "proptech",
        "-o",
        out.to_str().unwrap(),
        "--sigma-max",
        "1e4",
        "--per-decade",
        "2",
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
    let meta = json(&out.join("meta.json"));
    assert!(meta["sup_fit"]["slope"].as_f64().unwrap() < 0.0);
}
