//! ε-sweeps: run every member, tabulate the difference norms, fit rates and
//! persist `meta.json` + `series.csv`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{DataRecipe, ExperimentConfig, Preparation};
use super::initial::generate_initial_data;
use super::theory::{theoretical_exponents, TheoryReference};
use crate::fit::RateFit;
use crate::pde_solvers::{solve_coupled, CoupledRun, Trajectory};
use crate::spectral_core::time_lp;
use crate::{Result, StratoError};

/// Quantities whose decrease the overall verdict requires: `‖D_ε‖_{L²_T L^∞}`
/// and `‖ℙ₂D_ε‖_{L²_T L²}`.
pub const GATED: &[&str] = &["D_L2t_Linf", "P2D_L2t_L2"];

/// One row of `series.csv`. Summary rows have `t = None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub case: String,
    pub eps: f64,
    pub quantity: String,
    pub t: Option<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberResult {
    pub case: String,
    pub eps: f64,
    pub completed: bool,
    pub error: Option<String>,
    /// Space-time norms of `D_ε` and `δ_ε`, plus diagnostics.
    pub summary: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantityVerdict {
    pub quantity: String,
    pub values: Vec<f64>,
    pub strictly_decreasing: bool,
    pub slope: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    /// Every summary quantity of the main case.
    pub quantities: Vec<QuantityVerdict>,
    /// The [`GATED`] quantities all pass.
    pub gated_pass: bool,
    /// Well-prepared values below ill-prepared ones at every ε, for every
    /// `D` quantity (absent when no well-prepared comparison ran).
    pub well_below_ill: Option<bool>,
    pub overall: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyResult {
    pub config: ExperimentConfig,
    pub eps: Vec<f64>,
    pub members: Vec<MemberResult>,
    pub theory: TheoryReference,
    pub verdicts: Verdicts,
    pub complete: bool,
    #[serde(skip)]
    pub rows: Vec<SeriesRow>,
}

impl StudyResult {
    /// `(ε, value)` pairs of a summary quantity for one case.
    pub fn table(&self, case: &str, quantity: &str) -> Vec<(f64, f64)> {
        summary_table(&self.rows, case, quantity)
    }

    pub fn verdict(&self, quantity: &str) -> Option<&QuantityVerdict> {
        self.verdicts
            .quantities
            .iter()
            .find(|q| q.quantity == quantity)
    }
}

fn summary_table(rows: &[SeriesRow], case: &str, quantity: &str) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.t.is_none() && r.case == case && r.quantity == quantity)
        .map(|r| (r.eps, r.value))
        .collect()
}

/// `(sup_t ‖f‖²_{L²} + 2∫(ν‖∇f^v‖² + ν′‖∇f^θ‖²))^{1/2}`, the energy-space norm.
fn energy_space_norm(tr: &Trajectory) -> f64 {
    let sup = tr.energy.iter().cloned().fold(0.0, f64::max);
    (sup + 2.0 * tr.dissipation.last().copied().unwrap_or(0.0)).sqrt()
}

fn summarise(
    cfg: &ExperimentConfig,
    run: &CoupledRun,
    case: &str,
    eps: f64,
    rows: &mut Vec<SeriesRow>,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let push_series = |rows: &mut Vec<SeriesRow>, q: &str, times: &[f64], vals: &[f64]| {
        for (&t, &v) in times.iter().zip(vals) {
            rows.push(SeriesRow {
                case: case.into(),
                eps,
                quantity: q.into(),
                t: Some(t),
                value: v,
            });
        }
    };
    let mut tracks: Vec<(&str, &Trajectory)> = vec![("D", &run.diff)];
    if let Some(d) = &run.delta {
        tracks.push(("delta", d));
    }
    for (name, tr) in tracks {
        for n in &cfg.norms {
            let key = n.space.id();
            let vals = tr
                .series(&key)
                .ok_or_else(|| StratoError::InvalidParam(format!("norm {key} was not recorded")))?;
            out.insert(
                format!("{name}_{}", n.id()),
                time_lp(&tr.times, vals, n.time_exponent),
            );
            push_series(rows, &format!("{name}_{key}"), &tr.times, vals);
        }
        let p2 = tr
            .extra
            .get("P2_L2")
            .ok_or_else(|| StratoError::InvalidParam("P2_L2 was not recorded".into()))?;
        let p = if name == "D" { "P2D" } else { "P2delta" };
        out.insert(format!("{p}_L2t_L2"), time_lp(&tr.times, p2, 2.0));
        push_series(rows, &format!("{p}_L2"), &tr.times, p2);
        out.insert(format!("{name}_E0"), energy_space_norm(tr));
    }
    out.insert(
        "monitor".into(),
        run.full.monitor.last().copied().unwrap_or(0.0),
    );
    out.insert(
        "full_energy_final".into(),
        run.full.energy.last().copied().unwrap_or(0.0),
    );
    for (k, v) in &out {
        rows.push(SeriesRow {
            case: case.into(),
            eps,
            quantity: k.clone(),
            t: None,
            value: *v,
        });
    }
    Ok(out)
}

fn run_member(
    cfg: &ExperimentConfig,
    recipe: &DataRecipe,
    case: &str,
    eps: f64,
) -> (MemberResult, Vec<SeriesRow>) {
    let mut rows = Vec::new();
    let res = (|| -> Result<BTreeMap<String, f64>> {
        let grid = cfg.grid()?;
        let data = generate_initial_data(recipe, &grid, eps)?;
        let run = solve_coupled(
            &data,
            &cfg.params(eps)?,
            &cfg.solver_config(),
            &cfg.filter_wave(eps)?,
        )?;
        summarise(cfg, &run, case, eps, &mut rows)
    })();
    match res {
        Ok(summary) => (
            MemberResult {
                case: case.into(),
                eps,
                completed: true,
                error: None,
                summary,
            },
            rows,
        ),
        Err(e) => (
            MemberResult {
                case: case.into(),
                eps,
                completed: false,
                error: Some(e.to_string()),
                summary: BTreeMap::new(),
            },
            rows,
        ),
    }
}

/// Verdicts computed from summary rows alone, so re-running this on a saved
/// `series.csv` reproduces them exactly.
pub fn verdicts_from_rows(rows: &[SeriesRow], eps: &[f64]) -> Verdicts {
    let main = rows
        .iter()
        .find(|r| r.t.is_none())
        .map(|r| r.case.clone())
        .unwrap_or_else(|| "ill".into());
    let mut names: Vec<String> = rows
        .iter()
        .filter(|r| r.t.is_none() && r.case == main)
        .map(|r| r.quantity.clone())
        .collect();
    names.sort();
    names.dedup();
    names.retain(|n| n != "monitor" && n != "full_energy_final");
    let quantities: Vec<QuantityVerdict> = names
        .iter()
        .map(|q| {
            let table = summary_table(rows, &main, q);
            let values: Vec<f64> = eps
                .iter()
                .map(|e| {
                    table
                        .iter()
                        .find(|(x, _)| x == e)
                        .map(|p| p.1)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            let strictly_decreasing =
                values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| w[1] < w[0]);
            let slope = RateFit::loglog(eps, &values).map(|f| f.slope);
            QuantityVerdict {
                quantity: q.clone(),
                passed: strictly_decreasing && slope.is_some_and(|s| s > 0.0),
                values,
                strictly_decreasing,
                slope,
            }
        })
        .collect();
    let gated_pass = GATED
        .iter()
        .all(|g| quantities.iter().any(|q| q.quantity == *g && q.passed));
    let well_below_ill = rows.iter().any(|r| r.case == "well").then(|| {
        names
            .iter()
            .filter(|n| n.starts_with("D_") || n.starts_with("P2D"))
            .all(|q| {
                let (ill, well) = (
                    summary_table(rows, &main, q),
                    summary_table(rows, "well", q),
                );
                eps.iter().all(|e| {
                    let a = ill.iter().find(|p| p.0 == *e).map(|p| p.1);
                    let b = well.iter().find(|p| p.0 == *e).map(|p| p.1);
                    matches!((a, b), (Some(a), Some(b)) if b < a)
                })
            })
    });
    let overall = gated_pass && well_below_ill.unwrap_or(true);
    Verdicts {
        quantities,
        gated_pass,
        well_below_ill,
        overall,
    }
}

/// Runs the sweep (members in parallel), persists the outputs if an output
/// directory is configured, and returns the table and verdicts. Members that
/// abort are recorded as such; the study is then marked incomplete.
pub fn run_convergence_study(config: &ExperimentConfig) -> Result<StudyResult> {
    config.validate()?;
    let mut cases = vec![(
        if config.data.prepared == Preparation::Well {
            "well"
        } else {
            "ill"
        },
        config.data.clone(),
    )];
    if config.compare_well && config.data.prepared == Preparation::Ill {
        cases.push((
            "well",
            DataRecipe {
                prepared: Preparation::Well,
                ..config.data.clone()
            },
        ));
    }
    let jobs: Vec<(&str, &DataRecipe, f64)> = cases
        .iter()
        .flat_map(|(c, r)| config.eps.iter().map(move |&e| (*c, r, e)))
        .collect();
    let outcomes: Vec<(MemberResult, Vec<SeriesRow>)> = jobs
        .par_iter()
        .map(|&(c, r, e)| run_member(config, r, c, e))
        .collect();
    let mut members = Vec::new();
    let mut rows = Vec::new();
    for (m, r) in outcomes {
        members.push(m);
        rows.extend(r);
    }
    let complete = members.iter().all(|m| m.completed);
    let theory = theoretical_exponents(&config.data, config.nu == config.nu_prime, 4.0);
    let verdicts = verdicts_from_rows(&rows, &config.eps);
    let result = StudyResult {
        config: config.clone(),
        eps: config.eps.clone(),
        members,
        theory,
        verdicts,
        complete,
        rows,
    };
    if let Some(dir) = &config.out_dir {
        write_outputs(&result, dir)?;
    }
    Ok(result)
}

/// Writes `series.csv` (header `case,eps,quantity,t,value`; summary rows
/// have an empty `t`), `meta.json` and the config echo `config.txt`.
pub fn write_outputs(result: &StudyResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("series.csv"))?;
    w.write_record(["case", "eps", "quantity", "t", "value"])?;
    for r in &result.rows {
        let t = r.t.map(|t| t.to_string()).unwrap_or_default();
        w.write_record([
            r.case.clone(),
            r.eps.to_string(),
            r.quantity.clone(),
            t,
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    let mut f = std::fs::File::create(dir.join("meta.json"))?;
    serde_json::to_writer_pretty(&mut f, result)?;
    writeln!(f)?;
    std::fs::write(dir.join("config.txt"), result.config.to_text())?;
    Ok(())
}

/// Reads a `series.csv` written by [`write_outputs`].
pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| StratoError::Format(format!("bad number '{}' in series.csv", &rec[i])))
        };
        let t = if rec[3].is_empty() {
            None
        } else {
            Some(num(3)?)
        };
        rows.push(SeriesRow {
            case: rec[0].to_string(),
            eps: num(1)?,
            quantity: rec[2].to_string(),
            t,
            value: num(4)?,
        });
    }
    Ok(rows)
}

/// Recomputes the verdicts from a saved study directory.
pub fn reverify_outputs(dir: &Path) -> Result<Verdicts> {
    let rows = read_series(&dir.join("series.csv"))?;
    let cfg = ExperimentConfig::load(&dir.join("config.txt"))?;
    Ok(verdicts_from_rows(&rows, &cfg.eps))
}
