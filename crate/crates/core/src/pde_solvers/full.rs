//! The penalised system `∂ₜU + v·∇U − LU + ε⁻¹ℬU = ε⁻¹(−∇Φ, 0)`, advanced
//! together with its limit (and optionally the filtering wave) so that the
//! differences `D_ε` and `δ_ε` are available on the same time grid.

use super::config::SolverConfig;
use super::coupled::{BlockKind, Blocks, WaveForcing};
use super::data::InitialData;
use super::stepper::Integrator;
use super::trajectory::{Recorder, Trajectory};
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{stratified_part, truncate, Field4, TruncationSpec};
use crate::Result;

/// Which filtering wave to integrate alongside the full system.
#[derive(Clone, Debug, PartialEq)]
pub enum FilterWave {
    Off,
    /// `W_ε`, untruncated.
    Full,
    /// `W_ε^T = 𝒫_{r,R} W_ε`.
    Truncated(TruncationSpec),
}

/// Output of [`solve_coupled`].
#[derive(Clone, Debug)]
pub struct CoupledRun {
    pub full: Trajectory,
    /// `(ṽ^h, 0, θ̃_ε)`.
    pub limit: Trajectory,
    /// `D_ε = U_ε − (ṽ^h, 0, θ̃_ε)`, with `‖ℙ₂D_ε‖_{L²}` under `extra["P2_L2"]`.
    pub diff: Trajectory,
    pub wave: Option<Trajectory>,
    /// `δ_ε = D_ε − W`.
    pub delta: Option<Trajectory>,
}

fn l2(f: &Field4) -> f64 {
    (f.coefficient_energy() * f.grid().volume()).sqrt()
}

/// Runs `U_ε`, the limit `(ṽ^h, θ̃_ε)` and optionally a filtering wave together.
pub fn solve_coupled(
    data: &InitialData,
    params: &PhysParams,
    config: &SolverConfig,
    filter: &FilterWave,
) -> Result<CoupledRun> {
    data.validate(1e-10)?;
    let grid = data.u0_s.grid().clone();
    let mut kinds = vec![BlockKind::Full, BlockKind::Limit];
    let mut init = vec![data.combined()?, data.reference0()?];
    match filter {
        FilterWave::Off => {}
        FilterWave::Full => {
            kinds.push(BlockKind::Wave {
                spec: None,
                forcing: WaveForcing::FromLimit,
            });
            init.push(data.u0_osc.clone());
        }
        FilterWave::Truncated(s) => {
            kinds.push(BlockKind::Wave {
                spec: Some(s.clone()),
                forcing: WaveForcing::FromLimit,
            });
            init.push(truncate(&data.u0_osc, s)?);
        }
    }
    for f in &mut init {
        f.dealias();
    }
    let has_wave = init.len() == 3;
    let blocks = Blocks {
        kinds,
        params: *params,
        nonlinear: config.nonlinear,
    };
    let integ = Integrator::new(&blocks.generators(), &grid, config)?;
    let (nu, nup) = (params.nu, params.nu_prime);
    let mk = || Recorder::new(config, integ.steps(), nu, nup);
    let (mut r_full, mut r_lim, mut r_diff) = (mk(), mk(), mk());
    let mut r_wave = has_wave.then(mk);
    let mut r_delta = has_wave.then(mk);

    let mut nl = |_t: f64, s: &[Field4]| blocks.evaluate(s);
    let mut obs = |step: usize, t: f64, s: &[Field4]| -> Result<()> {
        let d = s[0].sub(&s[1]);
        r_full.observe(step, t, &s[0], &d, &[])?;
        r_lim.observe(step, t, &s[1], &s[1], &[])?;
        let rec = r_diff.records(step);
        let p2d = if rec { l2(&stratified_part(&d)) } else { 0.0 };
        r_diff.observe(step, t, &d, &d, &[("P2_L2", p2d)])?;
        if let (Some(rw), Some(rd)) = (r_wave.as_mut(), r_delta.as_mut()) {
            let p2w = if rec {
                l2(&stratified_part(&s[2]))
            } else {
                0.0
            };
            rw.observe(step, t, &s[2], &s[2], &[("P2_L2", p2w)])?;
            let delta = d.sub(&s[2]);
            let p2 = if rec {
                l2(&stratified_part(&delta))
            } else {
                0.0
            };
            rd.observe(step, t, &delta, &delta, &[("P2_L2", p2)])?;
        }
        Ok(())
    };
    integ.run(init, &mut nl, &mut obs)?;
    Ok(CoupledRun {
        full: r_full.finish(),
        limit: r_lim.finish(),
        diff: r_diff.finish(),
        wave: r_wave.map(Recorder::finish),
        delta: r_delta.map(Recorder::finish),
    })
}

/// Solves the full system from `U₀_S + U₀_osc + (0,0,0,θ̃₀ε)`. The blow-up
/// monitor records `∫‖∇D_ε‖²_{Ḣ^{1/2}}`, which needs the limit run as well.
pub fn solve_full_stratif(
    data: &InitialData,
    params: &PhysParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    Ok(solve_coupled(data, params, config, &FilterWave::Off)?.full)
}
