//! A single coupled run at one Froude number, persisted as a wide CSV.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::initial::generate_initial_data;
use crate::pde_solvers::{solve_coupled, CoupledRun, Trajectory};
use crate::spectral_core::write_snapshot;
use crate::{Result, StratoError};

/// Where and with what a run was produced.
#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationMeta {
    pub config: ExperimentConfig,
    pub eps: f64,
    pub environment: Environment,
    pub steps_recorded: usize,
    pub energy_balance_defect: f64,
    pub monitor_final: f64,
    pub snapshots: Vec<String>,
}

/// Runs `U_ε`, the limit and the configured filtering wave at
/// [`ExperimentConfig::simulation_eps`].
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<CoupledRun> {
    cfg.validate()?;
    let eps = cfg.simulation_eps();
    let grid = cfg.grid()?;
    let data = generate_initial_data(&cfg.data, &grid, eps)?;
    let mut solver = cfg.solver_config();
    solver.keep_snapshots = cfg.snapshots;
    solve_coupled(&data, &cfg.params(eps)?, &solver, &cfg.filter_wave(eps)?)
}

fn tracks(run: &CoupledRun) -> Vec<(&'static str, &Trajectory)> {
    let mut v = vec![("U", &run.full), ("limit", &run.limit), ("D", &run.diff)];
    if let Some(w) = &run.wave {
        v.push(("W", w));
    }
    if let Some(d) = &run.delta {
        v.push(("delta", d));
    }
    v
}

/// Writes `series.csv` (`t` plus one column per track and recorded series,
/// e.g. `D_Linf`), `meta.json` and, if requested, snapshots under `snapshots/`.
pub fn write_simulation(
    cfg: &ExperimentConfig,
    run: &CoupledRun,
    dir: &Path,
) -> Result<SimulationMeta> {
    std::fs::create_dir_all(dir)?;
    let times = &run.full.times;
    let mut header = vec!["t".to_string()];
    let mut cols: Vec<&[f64]> = Vec::new();
    for (name, tr) in tracks(run) {
        if tr.times.len() != times.len() {
            return Err(StratoError::SizeMismatch {
                expected: times.len(),
                got: tr.times.len(),
            });
        }
        for (k, v) in [("energy", &tr.energy), ("dissipation", &tr.dissipation)]
            .into_iter()
            .chain(tr.norms.iter().map(|(k, v)| (k.as_str(), v)))
            .chain(tr.extra.iter().map(|(k, v)| (k.as_str(), v)))
        {
            header.push(format!("{name}_{k}"));
            cols.push(v);
        }
    }
    header.push("monitor".into());
    cols.push(&run.full.monitor);
    let mut w = csv::Writer::from_path(dir.join("series.csv"))?;
    w.write_record(&header)?;
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(cols.iter().map(|c| c[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    let mut snaps = Vec::new();
    if cfg.snapshots {
        let sd = dir.join("snapshots");
        std::fs::create_dir_all(&sd)?;
        for (k, f) in run.full.snapshots.iter().enumerate() {
            let name = format!("snapshots/full_{k:05}.bin");
            write_snapshot(&dir.join(&name), f)?;
            snaps.push(name);
        }
    }
    let meta = SimulationMeta {
        config: cfg.clone(),
        eps: cfg.simulation_eps(),
        environment: Environment::current(),
        steps_recorded: times.len(),
        energy_balance_defect: run.full.energy_balance_defect(),
        monitor_final: run.full.monitor.last().copied().unwrap_or(0.0),
        snapshots: snaps,
    };
    let mut f = std::fs::File::create(dir.join("meta.json"))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    writeln!(f)?;
    std::fs::write(dir.join("config.txt"), cfg.to_text())?;
    Ok(meta)
}
