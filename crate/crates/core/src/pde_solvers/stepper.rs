//! Exponential Runge–Kutta time stepping over a set of coupled fields, each
//! with its own exact mode-wise linear propagator.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{Scheme, SolverConfig};
use crate::linear_stratified::{mode_phis, Generator};
use crate::spectral_core::{Field4, GridSpec};
use crate::{Result, StratoError};

/// Per-mode matrices for one step of size `h`.
pub(crate) struct EtdTables {
    /// Etd2: `[e^{hB}, hφ₁(hB), hφ₂(hB)]`.
    /// Etd4: `[e^{hB}, e^{hB/2}, (h/2)φ₁(hB/2), h(φ₁−3φ₂+4φ₃), h(2φ₂−4φ₃), h(4φ₃−φ₂)]`.
    mats: Vec<Vec<Matrix4<f64>>>,
}

impl EtdTables {
    pub(crate) fn build(gen: &Generator, grid: &GridSpec, h: f64, scheme: Scheme) -> Self {
        let n_tab = match scheme {
            Scheme::Etd2 => 3,
            Scheme::Etd4 => 6,
        };
        let per_mode: Vec<Vec<Matrix4<f64>>> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                if !grid.kept(i) {
                    return vec![Matrix4::zeros(); n_tab];
                }
                let xi = grid.xi(i);
                let [e, p1, p2, p3] = mode_phis(gen, xi, h);
                match scheme {
                    Scheme::Etd2 => vec![e, p1 * h, p2 * h],
                    Scheme::Etd4 => {
                        let [e2, q1, _, _] = mode_phis(gen, xi, h / 2.0);
                        vec![
                            e,
                            e2,
                            q1 * (h / 2.0),
                            (p1 - p2 * 3.0 + p3 * 4.0) * h,
                            (p2 * 2.0 - p3 * 4.0) * h,
                            (p3 * 4.0 - p2) * h,
                        ]
                    }
                }
            })
            .collect();
        let mats = (0..n_tab)
            .map(|t| per_mode.iter().map(|m| m[t]).collect())
            .collect();
        EtdTables { mats }
    }

    /// `Σ_k M_k · f_k` mode by mode.
    fn combine(&self, terms: &[(usize, &Field4)]) -> Field4 {
        let g = terms[0].1.grid();
        let out: Vec<[Complex64; 4]> = (0..g.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = [Complex64::new(0.0, 0.0); 4];
                for &(t, f) in terms {
                    let m = &self.mats[t][i];
                    let v = f.mode(i);
                    for (r, a) in acc.iter_mut().enumerate() {
                        *a += v[0] * m[(r, 0)]
                            + v[1] * m[(r, 1)]
                            + v[2] * m[(r, 2)]
                            + v[3] * m[(r, 3)];
                    }
                }
                acc
            })
            .collect();
        Field4::from_modes(g, &out)
    }
}

/// Result of a nonlinear evaluation: one field per block and the largest
/// velocity magnitude seen (for the CFL test).
pub(crate) struct NonlinearEval {
    pub terms: Vec<Field4>,
    pub vmax: f64,
}

pub(crate) trait Nonlinearity {
    fn eval(&mut self, t: f64, state: &[Field4]) -> Result<NonlinearEval>;
}

impl<F> Nonlinearity for F
where
    F: FnMut(f64, &[Field4]) -> Result<NonlinearEval>,
{
    fn eval(&mut self, t: f64, state: &[Field4]) -> Result<NonlinearEval> {
        self(t, state)
    }
}

pub(crate) struct Integrator {
    tables: Vec<EtdTables>,
    scheme: Scheme,
    dt: f64,
    steps: usize,
    cfl_limit: f64,
}

fn lin(a: &Field4, b: &Field4, wa: f64, wb: f64) -> Field4 {
    let mut out = a.scale(wa);
    out.axpy(wb, b);
    out
}

impl Integrator {
    pub(crate) fn new(gens: &[Generator], grid: &GridSpec, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let dt = cfg.effective_dt();
        let tables = gens
            .iter()
            .map(|g| EtdTables::build(g, grid, dt, cfg.scheme))
            .collect();
        Ok(Integrator {
            tables,
            scheme: cfg.scheme,
            dt,
            steps: cfg.steps(),
            cfl_limit: cfg.cfl_safety * grid.dx_min(),
        })
    }

    pub(crate) fn steps(&self) -> usize {
        self.steps
    }

    fn check_cfl(&self, t: f64, vmax: f64) -> Result<()> {
        if vmax > 0.0 && self.dt > self.cfl_limit / vmax {
            return Err(StratoError::Cfl {
                t,
                dt: self.dt,
                limit: self.cfl_limit / vmax,
                vmax,
            });
        }
        Ok(())
    }

    /// One step from `t`.
    pub(crate) fn step(
        &self,
        t: f64,
        u: &[Field4],
        nl: &mut dyn Nonlinearity,
    ) -> Result<Vec<Field4>> {
        let h = self.dt;
        let nu = nl.eval(t, u)?;
        self.check_cfl(t, nu.vmax)?;
        let out = match self.scheme {
            Scheme::Etd2 => {
                let a: Vec<Field4> = (0..u.len())
                    .map(|b| self.tables[b].combine(&[(0, &u[b]), (1, &nu.terms[b])]))
                    .collect();
                let na = nl.eval(t + h, &a)?;
                (0..u.len())
                    .map(|b| {
                        let d = na.terms[b].sub(&nu.terms[b]);
                        a[b].add(&self.tables[b].combine(&[(2, &d)]))
                    })
                    .collect()
            }
            Scheme::Etd4 => {
                let a: Vec<Field4> = (0..u.len())
                    .map(|b| self.tables[b].combine(&[(1, &u[b]), (2, &nu.terms[b])]))
                    .collect();
                let na = nl.eval(t + h / 2.0, &a)?;
                let bb: Vec<Field4> = (0..u.len())
                    .map(|b| self.tables[b].combine(&[(1, &u[b]), (2, &na.terms[b])]))
                    .collect();
                let nb = nl.eval(t + h / 2.0, &bb)?;
                let c: Vec<Field4> = (0..u.len())
                    .map(|b| {
                        let w = lin(&nb.terms[b], &nu.terms[b], 2.0, -1.0);
                        self.tables[b].combine(&[(1, &a[b]), (2, &w)])
                    })
                    .collect();
                let nc = nl.eval(t + h, &c)?;
                (0..u.len())
                    .map(|b| {
                        let s = na.terms[b].add(&nb.terms[b]);
                        self.tables[b].combine(&[
                            (0, &u[b]),
                            (3, &nu.terms[b]),
                            (4, &s),
                            (5, &nc.terms[b]),
                        ])
                    })
                    .collect()
            }
        };
        Ok(out)
    }

    /// Runs all steps, calling `observe(step, t, state)` after each one
    /// (and once for the initial state with step 0).
    pub(crate) fn run(
        &self,
        init: Vec<Field4>,
        nl: &mut dyn Nonlinearity,
        observe: &mut dyn FnMut(usize, f64, &[Field4]) -> Result<()>,
    ) -> Result<Vec<Field4>> {
        let mut u = init;
        observe(0, 0.0, &u)?;
        for s in 0..self.steps {
            let t = s as f64 * self.dt;
            u = self.step(t, &u, nl)?;
            let t1 = (s + 1) as f64 * self.dt;
            if u.iter().any(|f| !f.max_abs_coefficient().is_finite()) {
                return Err(StratoError::BlowUp(t1));
            }
            observe(s + 1, t1, &u)?;
        }
        Ok(u)
    }
}
