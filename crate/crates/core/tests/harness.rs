use strato::convergence_harness::*;
use strato::pde_solvers::Scheme;
use strato::spectral_core::stratified_part;
use strato::{GridSpec, StratoError};

fn tiny(dir: Option<&std::path::Path>) -> ExperimentConfig {
    let mut text = String::from(
        "grid.n = 16\nsweep.eps = 0.1, 0.05, 0.025, 0.0125\nrun.t_end = 0.04\nrun.dt = 0.01\nrun.scheme = etd2\nnorms = L2t_Linf, Linft_L2\n",
    );
    if let Some(d) = dir {
        text.push_str(&format!("out.dir = {}\n", d.display()));
    }
    ExperimentConfig::parse(&text).unwrap()
}

#[test]
fn config_parses_and_round_trips() {
    let c = ExperimentConfig::parse("# comment\ngrid.n = 24\nparams.nu = 0.3 # trailing\nsweep.eps = 0.2,0.1,0.05,0.02\nwave.filter = full\n").unwrap();
    assert_eq!(c.n, 24);
    assert_eq!(c.nu, 0.3);
    assert_eq!(c.wave, WaveFilter::Full);
    assert_eq!(c.scheme, Scheme::Etd4);
    assert_eq!(c.data.gamma, DataRecipe::default_gamma(0.125, 0.5));
    let back = ExperimentConfig::parse(&c.to_text()).unwrap();
    assert_eq!(back, c);
    assert_eq!(
        ExperimentConfig::parse(&ExperimentConfig::default().to_text()).unwrap(),
        ExperimentConfig::default()
    );
}

#[test]
fn config_rejects_bad_input() {
    for bad in [
        "sweep.eps = 0.1, 0.05, 0.025",
        "sweep.eps = 0.1, 0.2, 0.025, 0.01",
        "data.eta = 0.7",
        "data.delta = 1.0\ndata.eta = 0.5",
        "unknown.key = 1",
        "grid.n = many",
        "no equals sign",
        "norms = L2t_Lfoo",
        "norms = CLL2t_Hdot0.5",
    ] {
        assert!(
            matches!(ExperimentConfig::parse(bad), Err(StratoError::Config(_))),
            "{bad}"
        );
    }
}

#[test]
fn theory_examples() {
    assert_eq!(k_of_q(4.0), Some(0.5));
    assert_eq!(k_of_q(6.0), None);
    let r = DataRecipe {
        delta: 0.125,
        eta: 0.5,
        alpha0: 1.0,
        ..DataRecipe::default()
    };
    let t = theoretical_exponents(&r, false, 4.0);
    let want = 0.125 * 0.5 / 3108.0;
    assert!((t.strong_general.unwrap() - want).abs() < 1e-18);
    assert!((want - 2.011e-5).abs() < 1e-8);
    assert_eq!(t.global_equal, None);
    assert_eq!(t.weak_general, Some(0.5 / 640.0));
    let te = theoretical_exponents(&r, true, 4.0);
    assert_eq!(te.global_equal, Some(3.0 / 16.0));
    assert_eq!(te.weak_equal, Some(0.5 / 544.0));
    assert!((te.strong_equal.unwrap() - (0.0625 - r.gamma)).abs() < 1e-15);
    let outside = theoretical_exponents(&DataRecipe { gamma: 0.1, ..r }, true, 4.0);
    assert!(outside.strong_general.is_none() && outside.strong_equal.is_none());
    assert!(outside.flags.iter().any(|f| f.contains("no guarantee")));
}

/// `(vol Σ|ξ|^{2s}|f̂|²)^{1/2}` written out from the coefficients.
fn hdot(f: &strato::Field4, s: f64) -> f64 {
    let g = f.grid();
    let mut acc = 0.0;
    for i in 0..g.len() {
        let xi = g.xi(i);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 > 0.0 {
            acc += k2.powf(s) * f.mode(i).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
    }
    (acc * (2.0 * std::f64::consts::PI).powi(3)).sqrt()
}

#[test]
fn initial_data_hits_its_targets() {
    let g = GridSpec::cubic(16).unwrap();
    let r = DataRecipe {
        gamma: 0.04,
        ..DataRecipe::default()
    };
    for eps in [0.1, 0.01] {
        let d = generate_initial_data(&r, &g, eps).unwrap();
        d.validate(1e-10).unwrap();
        let measured = hdot(&d.u0_osc, 0.5 + r.delta) / eps.powf(-r.gamma);
        assert!((measured - r.c0).abs() < 1e-10 * r.c0, "{measured}");
        assert!(
            stratified_part(&d.u0_osc).max_abs_coefficient()
                < 1e-12 * d.u0_osc.max_abs_coefficient()
        );
        assert!(stratified_part(&d.u0_s).relative_distance(&d.u0_s) < 1e-12);
    }
    // γ = 0: the oscillating part does not depend on ε
    let r0 = DataRecipe { gamma: 0.0, ..r };
    let (a, b) = (
        generate_initial_data(&r0, &g, 0.1).unwrap(),
        generate_initial_data(&r0, &g, 0.001).unwrap(),
    );
    assert_eq!(a.u0_osc, b.u0_osc);
    assert!(a.u0_s != b.u0_s);
    // well prepared: D(0) = 0
    let w = generate_initial_data(
        &DataRecipe {
            prepared: Preparation::Well,
            ..r
        },
        &g,
        0.05,
    )
    .unwrap();
    assert_eq!(w.d0().max_abs_coefficient(), 0.0);
    assert_eq!(w.theta0_eps, w.theta0);
}

#[test]
fn unresolved_packet_is_reported() {
    let g = GridSpec::cubic(8).unwrap();
    let r = DataRecipe {
        width: 0.15,
        ..DataRecipe::default()
    };
    assert!(matches!(
        generate_initial_data(&r, &g, 0.1),
        Err(StratoError::Resolution(_))
    ));
}

#[test]
fn study_is_reproducible_and_verdicts_come_from_the_csv() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let r1 = run_convergence_study(&tiny(Some(d1.path()))).unwrap();
    let _ = run_convergence_study(&tiny(Some(d2.path()))).unwrap();
    assert!(r1.complete);
    let a = std::fs::read(d1.path().join("series.csv")).unwrap();
    let b = std::fs::read(d2.path().join("series.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(reverify_outputs(d1.path()).unwrap(), r1.verdicts);
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d1.path().join("meta.json")).unwrap()).unwrap();
    assert!(meta["verdicts"]["overall"].is_boolean());
    let header = String::from_utf8(a)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, "case,eps,quantity,t,value");
    for row in read_series(&d1.path().join("series.csv")).unwrap() {
        assert!(row.value.is_finite() && row.value >= 0.0, "{row:?}");
    }
    // well-prepared data stays below ill-prepared data
    for (w, i) in r1
        .table("well", "D_L2t_Linf")
        .iter()
        .zip(r1.table("ill", "D_L2t_Linf"))
    {
        assert!(w.1 < i.1);
    }
}

#[test]
fn aborted_members_mark_the_study_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = tiny(Some(dir.path()));
    c.data.c0 = 1e4; // CFL violation in every member
    c.compare_well = false;
    let r = run_convergence_study(&c).unwrap();
    assert!(!r.complete);
    assert!(r
        .members
        .iter()
        .all(|m| !m.completed && m.error.as_deref().unwrap().contains("CFL")));
    assert!(dir.path().join("meta.json").exists() && dir.path().join("series.csv").exists());
    assert!(!r.verdicts.overall);
}

#[test]
fn verify_suite_is_green_and_catches_a_mutation() {
    let r = run_verify(None);
    let mut names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    names.sort();
    names.dedup();
    assert!(names.len() >= 25, "{}", names.len());
    assert!(r.passed(), "{:?}", r.failures());
    let m = run_verify(Some(Mutation::FlipLambda2));
    assert!(!m.module_passed("linear_stratified"));
    assert!(m
        .failures()
        .iter()
        .any(|c| c.name == "eigenvalues_analytic_vs_numeric"));
}
