use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::config::SolverConfig;
use crate::spectral_core::{hom_sobolev, norm, Field4, NormSpec};
use crate::{Result, StratoError};

/// Recorded history of a run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub snapshots: Vec<Field4>,
    /// One series per requested norm, keyed by [`NormSpec::id`].
    pub norms: BTreeMap<String, Vec<f64>>,
    /// `‖U(t)‖²_{L²}`.
    pub energy: Vec<f64>,
    /// Cumulative `∫₀ᵗ (ν‖∇v‖² + ν′‖∇θ‖²)`.
    pub dissipation: Vec<f64>,
    /// Cumulative `∫₀ᵗ ‖∇X‖²_{Ḣ^{1/2}}` for the monitored field `X`.
    pub monitor: Vec<f64>,
    /// Further named series (sources, projections, ...).
    pub extra: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&Field4> {
        self.snapshots.last()
    }

    pub fn series(&self, key: &str) -> Option<&[f64]> {
        match key {
            "energy" => Some(&self.energy),
            "dissipation" => Some(&self.dissipation),
            "monitor" => Some(&self.monitor),
            _ => self
                .norms
                .get(key)
                .or_else(|| self.extra.get(key))
                .map(|v| v.as_slice()),
        }
    }

    pub fn monitor_finite(&self) -> bool {
        self.monitor.iter().all(|m| m.is_finite())
    }

    /// Energy identity residual `max_t |E(t) + 2D(t) − E(0)| / E(0)`.
    pub fn energy_balance_defect(&self) -> f64 {
        let Some(&e0) = self.energy.first() else {
            return 0.0;
        };
        let worst = self
            .energy
            .iter()
            .zip(&self.dissipation)
            .map(|(e, d)| (e + 2.0 * d - e0).abs())
            .fold(0.0, f64::max);
        if e0 > 0.0 {
            worst / e0
        } else {
            worst
        }
    }

    /// Writes `t` plus every scalar series as CSV columns.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec![
            "t".to_string(),
            "energy".into(),
            "dissipation".into(),
            "monitor".into(),
        ];
        header.extend(self.norms.keys().cloned());
        header.extend(self.extra.keys().cloned());
        w.write_record(&header)?;
        for k in 0..self.times.len() {
            let mut row = vec![
                self.times[k],
                self.energy[k],
                self.dissipation[k],
                self.monitor[k],
            ];
            row.extend(self.norms.values().map(|v| v[k]));
            row.extend(self.extra.values().map(|v| v[k]));
            w.write_record(row.iter().map(|x| format!("{x:.12e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dissipation_rate(f: &Field4, nu: f64, nu_prime: f64) -> f64 {
    let g = f.grid();
    let s: f64 = (0..g.len())
        .map(|i| {
            let xi = g.xi(i);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            let m = f.mode(i);
            k2 * (nu * (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr())
                + nu_prime * m[3].norm_sqr())
        })
        .sum();
    g.volume() * s
}

/// Accumulates a [`Trajectory`] from per-step observations.
pub(crate) struct Recorder {
    traj: Trajectory,
    norms: Vec<NormSpec>,
    record_every: usize,
    keep: bool,
    total_steps: usize,
    nu: f64,
    nu_prime: f64,
    last: Option<(f64, f64, f64)>,
    cum: (f64, f64),
}

impl Recorder {
    pub(crate) fn new(cfg: &SolverConfig, total_steps: usize, nu: f64, nu_prime: f64) -> Self {
        let mut traj = Trajectory::default();
        for n in &cfg.norms {
            traj.norms.insert(n.id(), Vec::new());
        }
        Recorder {
            traj,
            norms: cfg.norms.clone(),
            record_every: cfg.record_every,
            keep: cfg.keep_snapshots,
            total_steps,
            nu,
            nu_prime,
            last: None,
            cum: (0.0, 0.0),
        }
    }

    /// Is `step` a recording step?
    pub(crate) fn records(&self, step: usize) -> bool {
        step % self.record_every == 0 || step == self.total_steps
    }

    /// Observes `state` at `(step, t)`; `monitored` is the field whose
    /// `Ḣ^{3/2}` norm feeds the blow-up monitor (often `state` itself).
    /// `extra` values are stored only on recording steps.
    pub(crate) fn observe(
        &mut self,
        step: usize,
        t: f64,
        state: &Field4,
        monitored: &Field4,
        extra: &[(&str, f64)],
    ) -> Result<()> {
        let rate_d = dissipation_rate(state, self.nu, self.nu_prime);
        let rate_m = hom_sobolev(monitored, 1.5).powi(2);
        if let Some((t0, d0, m0)) = self.last {
            let h = t - t0;
            self.cum.0 += 0.5 * h * (d0 + rate_d);
            self.cum.1 += 0.5 * h * (m0 + rate_m);
        }
        self.last = Some((t, rate_d, rate_m));
        if !self.records(step) {
            return Ok(());
        }
        if let Some(&tp) = self.traj.times.last() {
            if t <= tp {
                return Err(StratoError::InvalidParam(format!(
                    "non-increasing time stamp {t} after {tp}"
                )));
            }
        }
        self.traj.times.push(t);
        self.traj
            .energy
            .push(state.coefficient_energy() * state.grid().volume());
        self.traj.dissipation.push(self.cum.0);
        self.traj.monitor.push(self.cum.1);
        for spec in &self.norms {
            let v = norm(state, spec)?;
            self.traj.norms.get_mut(&spec.id()).unwrap().push(v);
        }
        for (k, v) in extra {
            self.traj.extra.entry(k.to_string()).or_default().push(*v);
        }
        if self.keep {
            self.traj.snapshots.push(state.clone());
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> Trajectory {
        self.traj
    }
}
