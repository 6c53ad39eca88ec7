use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use strato::convergence_harness::{
    reverify_outputs, run_convergence_study, run_simulation, run_verify, write_simulation,
    ExperimentConfig, Mutation, StudyResult, CONFIG_KEYS,
};
use strato::dispersion_lab::{
    gaussian_theta_data, kernel_study, log_grid, measure_strichartz_scaling, proptech_study,
    witness_alpha_scaling, StrichartzMode, StrichartzSpec,
};
use strato::linear_stratified::{
    analytic_eigenvalues, assemble_symbol, numeric_eigendecomposition, oscillation_frequency,
    remainder_bounds, remainder_d,
};
use strato::{GridSpec, PhysParams, StratoError, TruncationSpec};

#[derive(Parser)]
#[command(
    name = "strato",
    version,
    about = "Strongly stratified Boussinesq flows: solvers, dispersion and ε-convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One coupled run (full system, limit, filtering wave) at a single ε.
    Simulate(SimulateArgs),
    /// ε-sweep with rate fits and verdicts.
    Converge(ConvergeArgs),
    /// Dispersion studies: phase integral, kernel decay, Strichartz scaling.
    Dispersion(DispersionArgs),
    /// Eigenvalues of the linear symbol at one wavevector.
    Eigen(EigenArgs),
    /// Invariant suite of every module.
    Verify(VerifyArgs),
    /// Print the default configuration or the documented keys.
    Config {
        /// List the keys with a one-line description instead.
        #[arg(long)]
        keys: bool,
        /// Start from the stretch scenario.
        #[arg(long)]
        stretch: bool,
    },
}

#[derive(Args)]
struct ConfigSource {
    /// key = value configuration file; built-in defaults if omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set grid.n=16` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides out.dir).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Froude number (overrides params.eps).
    #[arg(long)]
    eps: Option<f64>,
    /// Write spectral snapshots of the full solution.
    #[arg(long)]
    snapshots: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Use the 48³, six-ε stretch scenario as the base configuration.
    #[arg(long)]
    stretch: bool,
    /// Recompute the verdicts from a saved study directory instead of running.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["config", "stretch"])]
    reverify: Option<PathBuf>,
    /// Print the full result as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Study {
    Proptech,
    Kernel,
    Strichartz,
}

#[derive(Args)]
struct DispersionArgs {
    #[arg(long, value_enum)]
    study: Study,
    #[arg(long, short)]
    out: PathBuf,
    /// α (proptech) or |ξ_h| (kernel).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Outer radius R (proptech).
    #[arg(long = "big-r", default_value_t = 10.0)]
    big_r: f64,
    #[arg(long, default_value_t = 1e2)]
    sigma_min: f64,
    #[arg(long, default_value_t = 1e6)]
    sigma_max: f64,
    #[arg(long, default_value_t = 4)]
    per_decade: usize,
    /// Grid size (strichartz).
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Gaussian width of the θ bump (strichartz).
    #[arg(long, default_value_t = 0.25)]
    width: f64,
    /// Viscosity ν = ν′ (strichartz), or both diffusivities (kernel).
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    /// Horizon (strichartz).
    #[arg(long, default_value_t = 30.0)]
    t_end: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Froude numbers (strichartz), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
    eps: Vec<f64>,
}

#[derive(Args)]
struct EigenArgs {
    /// Wavevector `a,b,c`.
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1,
        required = true,
        allow_hyphen_values = true
    )]
    xi: Vec<f64>,
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    nuprime: f64,
    #[arg(long)]
    eps: f64,
    /// Check membership of 𝒞_{r,R} with r = ε^m, R = ε^{−M}: `m,M`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    truncation: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    FlipLambda2,
}

#[derive(Args)]
struct VerifyArgs {
    /// Inject a known defect to check that the suite can fail.
    #[arg(long, value_enum)]
    mutate: Option<MutationArg>,
    #[arg(long)]
    json: bool,
}

type CliResult<T> = Result<T, StratoError>;

fn load_config(src: &ConfigSource, base: Option<ExperimentConfig>) -> CliResult<ExperimentConfig> {
    let mut text = match (&src.config, base) {
        (Some(p), _) => std::fs::read_to_string(p)?,
        (None, Some(b)) => b.to_text(),
        (None, None) => String::new(),
    };
    for o in &src.overrides {
        if !o.contains('=') {
            return Err(StratoError::Config(format!(
                "--set expects KEY=VALUE, got '{o}'"
            )));
        }
        text.push('\n');
        text.push_str(o);
    }
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(o) = &src.out {
        cfg.out_dir = Some(o.clone());
    }
    Ok(cfg)
}

fn simulate(a: &SimulateArgs) -> CliResult<ExitCode> {
    let mut cfg = load_config(&a.source, None)?;
    if let Some(e) = a.eps {
        cfg.sim_eps = Some(e);
    }
    cfg.snapshots |= a.snapshots;
    cfg.validate()?;
    let dir = cfg
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("strato-simulate"));
    let run = run_simulation(&cfg)?;
    let meta = write_simulation(&cfg, &run, &dir)?;
    println!(
        "eps {}: {} records, energy balance defect {:.2e}, monitor {:.4e}; written to {}",
        meta.eps,
        meta.steps_recorded,
        meta.energy_balance_defect,
        meta.monitor_final,
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn study_table(r: &StudyResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<18} {:>10} {:>10} {:>8}  values over eps = {:?}",
        "quantity", "decreasing", "slope", "verdict", r.eps
    );
    for q in &r.verdicts.quantities {
        let vals: Vec<String> = q.values.iter().map(|v| format!("{v:.4e}")).collect();
        let _ = writeln!(
            s,
            "{:<18} {:>10} {:>10} {:>8}  {}",
            q.quantity,
            q.strictly_decreasing,
            q.slope
                .map(|x| format!("{x:.4}"))
                .unwrap_or_else(|| "-".into()),
            if q.passed { "pass" } else { "fail" },
            vals.join(" ")
        );
    }
    for m in r.members.iter().filter(|m| !m.completed) {
        let _ = writeln!(
            s,
            "member {} eps {} failed: {}",
            m.case,
            m.eps,
            m.error.as_deref().unwrap_or("?")
        );
    }
    let _ = writeln!(
        s,
        "gated {} | well below ill {:?} | overall {} | complete {}",
        r.verdicts.gated_pass, r.verdicts.well_below_ill, r.verdicts.overall, r.complete
    );
    s
}

fn converge(a: &ConvergeArgs) -> CliResult<ExitCode> {
    if let Some(dir) = &a.reverify {
        let v = reverify_outputs(dir)?;
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(ExitCode::SUCCESS);
    }
    let base = a.stretch.then(ExperimentConfig::stretch);
    let mut cfg = load_config(&a.source, base)?;
    if cfg.out_dir.is_none() {
        cfg.out_dir = Some(PathBuf::from("strato-converge"));
    }
    let r = run_convergence_study(&cfg)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        print!("{}", study_table(&r));
        println!("written to {}", cfg.out_dir.as_ref().unwrap().display());
    }
    // the verdict is data; only a failed member is an execution failure
    Ok(if r.complete {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn write_rows(path: &Path, header: &str, rows: &[Vec<String>]) -> CliResult<()> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn dispersion(a: &DispersionArgs) -> CliResult<ExitCode> {
    std::fs::create_dir_all(&a.out)?;
    let sigmas = log_grid(a.sigma_min, a.sigma_max, a.per_decade);
    let meta = match a.study {
        Study::Proptech => {
            let st = proptech_study(a.alpha, a.big_r, &sigmas)?;
            let rows: Vec<Vec<String>> = st
                .sigmas
                .iter()
                .zip(st.sup.iter().zip(&st.witness))
                .map(|(s, (p, w))| {
                    vec![
                        s.to_string(),
                        p.value.to_string(),
                        p.beta.to_string(),
                        w.value.to_string(),
                    ]
                })
                .collect();
            write_rows(
                &a.out.join("series.csv"),
                "sigma,sup_value,sup_beta,witness_value",
                &rows,
            )?;
            let alpha_fit = witness_alpha_scaling(&[0.5, 1.0, 2.0], a.big_r, a.sigma_max)?;
            println!(
                "sup slope {:.4} (optimal rate -0.25), alpha exponent {:.4} (3/2)",
                st.sup_fit.slope, alpha_fit.slope
            );
            json!({"study": "proptech", "alpha": a.alpha, "big_r": a.big_r, "sup_fit": st.sup_fit,
                   "witness_fit": st.witness_fit, "witness_alpha_fit": alpha_fit, "alpha_fit_sigma": a.sigma_max})
        }
        Study::Kernel => {
            let p = PhysParams::new(a.nu, a.nu, 1e-3)?;
            let tr = TruncationSpec::new(0.5, 2.0)?;
            let st = kernel_study(a.alpha, &tr, &p, &sigmas)?;
            let rows: Vec<Vec<String>> = st
                .points
                .iter()
                .map(|q| {
                    vec![
                        q.sigma.to_string(),
                        q.modulus.to_string(),
                        q.beta.to_string(),
                        q.linf_ratio.to_string(),
                    ]
                })
                .collect();
            write_rows(
                &a.out.join("series.csv"),
                "sigma,modulus,beta,linf_ratio",
                &rows,
            )?;
            println!("kernel slope {:.4}", st.fit.slope);
            json!({"study": "kernel", "xi_h": a.alpha, "params": p, "truncation": tr, "fit": st.fit})
        }
        Study::Strichartz => {
            let g = GridSpec::cubic(a.n)?;
            let f = gaussian_theta_data(&g, a.width)?;
            let p = PhysParams::new(a.nu, a.nu, a.eps[0])?;
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for (name, q, mode) in [
                ("L4t_L6", 4.0, StrichartzMode::Isotropic { r: 6.0 }),
                (
                    "L8t_Linf2",
                    8.0,
                    StrichartzMode::Anisotropic { m: f64::INFINITY },
                ),
            ] {
                let spec = StrichartzSpec {
                    time_exponent: q,
                    mode,
                    theta: 1.0,
                    t_end: a.t_end,
                    time_samples: a.samples,
                };
                let r = measure_strichartz_scaling(&f, &p, &a.eps, &spec)?;
                for (e, v) in r.eps.iter().zip(&r.values) {
                    rows.push(vec![name.to_string(), e.to_string(), v.to_string()]);
                }
                println!(
                    "{name}: exponent {:.4}, theory {:.4}, {}",
                    r.measured_exponent,
                    r.theoretical_exponent,
                    if r.passed { "pass" } else { "fail" }
                );
                reports.push(r);
            }
            write_rows(&a.out.join("series.csv"), "norm,eps,value", &rows)?;
            json!({"study": "strichartz", "n": a.n, "width": a.width, "nu": a.nu, "reports": reports})
        }
    };
    std::fs::write(
        a.out.join("meta.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(ExitCode::SUCCESS)
}

fn eigen(a: &EigenArgs) -> CliResult<ExitCode> {
    let [x, y, z] = a.xi[..] else {
        return Err(StratoError::InvalidParam(format!(
            "--xi needs three components, got {}",
            a.xi.len()
        )));
    };
    let xi = [x, y, z];
    let p = PhysParams::new(a.nu, a.nuprime, a.eps)?;
    let spec = match &a.truncation {
        Some(v) if v.len() == 2 => Some(TruncationSpec::from_exponents(v[0], v[1], a.eps)?),
        Some(v) => {
            return Err(StratoError::InvalidParam(format!(
                "--truncation needs m,M, got {} values",
                v.len()
            )))
        }
        None => None,
    };
    let ne = numeric_eigendecomposition(&assemble_symbol(xi, &p)?);
    println!("xi = {xi:?}");
    println!("nu = {}, nuprime = {}, eps = {}", a.nu, a.nuprime, a.eps);
    if let Some(s) = &spec {
        println!(
            "truncation r = {}, R = {}, contains xi = {}",
            s.r,
            s.big_r,
            s.contains(xi)
        );
    }
    println!("omega = {}", oscillation_frequency(xi, a.eps));
    for (k, l) in ne.eigenvalues.iter().enumerate() {
        println!("numeric lambda{} = {} {:+}i", k + 1, l.re, l.im);
    }
    match analytic_eigenvalues(xi, &p, spec.as_ref()) {
        Ok(an) => {
            for (k, l) in an.lambdas.iter().enumerate() {
                println!("analytic lambda{} = {} {:+}i", k + 1, l.re, l.im);
            }
        }
        Err(e) => println!("analytic eigenvalues unavailable: {e}"),
    }
    if p.equal_diffusion() {
        println!("D = 0 (equal diffusion)");
    } else {
        let d = remainder_d(xi, &p)?;
        let b = remainder_bounds(xi, &p);
        println!("D = {d}");
        println!("bound |D| = {}, slack = {}", b[0], b[0] - d.abs());
        println!("bound |d_xih D| = {}, bound |d_xi3 D| = {}", b[1], b[2]);
    }
    println!(
        "conditioning = {:.3e}, defective = {}",
        ne.conditioning, ne.defective
    );
    Ok(ExitCode::SUCCESS)
}

fn verify(a: &VerifyArgs) -> CliResult<ExitCode> {
    let mutation = a
        .mutate
        .map(|MutationArg::FlipLambda2| Mutation::FlipLambda2);
    let r = run_verify(mutation);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        for c in &r.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            let err = c
                .error
                .as_deref()
                .map(|e| format!("  ({e})"))
                .unwrap_or_default();
            println!(
                "{tag} {:<20} {:<40} {:>11.3e} <= {:.1e}{err}",
                c.module, c.name, c.measured, c.tolerance
            );
        }
        println!("{} checks, {} failed", r.checks.len(), r.failures().len());
    }
    Ok(if r.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.cmd {
        Cmd::Simulate(a) => simulate(&a),
        Cmd::Converge(a) => converge(&a),
        Cmd::Dispersion(a) => dispersion(&a),
        Cmd::Eigen(a) => eigen(&a),
        Cmd::Verify(a) => verify(&a),
        Cmd::Config { keys, stretch } => {
            if keys {
                for (k, doc) in CONFIG_KEYS {
                    println!("{k:<18} {doc}");
                }
            } else if stretch {
                print!("{}", ExperimentConfig::stretch().to_text());
            } else {
                print!("{}", ExperimentConfig::default().to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("strato: {e}");
            ExitCode::FAILURE
        }
    }
}
