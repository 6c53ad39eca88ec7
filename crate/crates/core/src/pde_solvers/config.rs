use serde::{Deserialize, Serialize};

use crate::spectral_core::NormSpec;
use crate::{Result, StratoError};

/// Exponential Runge–Kutta scheme. The linear part is always exact; the
/// nonlinearity is integrated against the exact linear flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Second-order exponential RK (Cox–Matthews ETD2RK).
    Etd2,
    /// Fourth-order exponential RK (Cox–Matthews ETDRK4).
    Etd4,
}

impl Scheme {
    pub fn order(self) -> usize {
        match self {
            Scheme::Etd2 => 2,
            Scheme::Etd4 => 4,
        }
    }

    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(Scheme::Etd2),
            4 => Ok(Scheme::Etd4),
            o => Err(StratoError::InvalidParam(format!(
                "scheme order {o}; use 2 or 4"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// `dt ≤ safety · Δx / max|v|` is enforced at every step.
    pub cfl_safety: f64,
    /// Record norms (and snapshots) every this many steps.
    pub record_every: usize,
    pub keep_snapshots: bool,
    pub norms: Vec<NormSpec>,
    /// Switch off the quadratic terms (linear runs).
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 5e-3,
            t_end: 0.5,
            scheme: Scheme::Etd4,
            cfl_safety: 0.5,
            record_every: 1,
            keep_snapshots: true,
            norms: Vec::new(),
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(StratoError::InvalidParam(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(StratoError::InvalidParam(format!(
                "t_end = {} must be nonnegative",
                self.t_end
            )));
        }
        if !(self.cfl_safety > 0.0) || self.record_every == 0 {
            return Err(StratoError::InvalidParam(
                "cfl_safety and record_every must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps; the step is shrunk so that it divides `t_end`.
    pub fn steps(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }
}
