//! Linear waves `∂ₜW − LW + ε⁻¹ℙℬW = F`, possibly frequency truncated, and
//! the Stokes-type system used to absorb `G̃`.

use super::config::SolverConfig;
use super::coupled::{BlockKind, Blocks, WaveForcing};
use super::limit::check_horizontal;
use super::nonlinear::{g_tilde_from_products, horizontal_products};
use super::stepper::Integrator;
use super::trajectory::{Recorder, Trajectory};
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{hom_sobolev, stratified_part, truncate, Field4, TruncationSpec};
use crate::{Result, StratoError};

/// The forcing of a wave run.
#[derive(Clone, Debug)]
pub enum WaveSource {
    None,
    /// A time-independent force.
    Constant(Field4),
    /// `G̃(ṽ^h(t))`, with `ṽ^h` advanced by the limit Navier–Stokes system
    /// from `v0_h` in the same run.
    Limit {
        v0_h: Field4,
    },
}

/// Sobolev indices at which the wave runs track `‖W‖`, `∫‖∇W‖²` and `∫‖F‖`.
pub const TRACKED_S: [f64; 2] = [0.0, 0.5];

fn run_wave(
    w0: &Field4,
    source: &WaveSource,
    params: &PhysParams,
    config: &SolverConfig,
    spec: Option<&TruncationSpec>,
) -> Result<Trajectory> {
    let grid = w0.grid().clone();
    let mut w0 = match spec {
        Some(s) => truncate(w0, s)?,
        None => w0.clone(),
    };
    w0.dealias();
    let (forcing, init) = match source {
        WaveSource::None => (WaveForcing::None, vec![w0]),
        WaveSource::Constant(f) => {
            f.grid().ensure_same(&grid)?;
            let mut f = f.clone();
            f.dealias();
            (WaveForcing::Constant(f), vec![w0])
        }
        WaveSource::Limit { v0_h } => {
            check_horizontal(v0_h)?;
            let mut v = v0_h.clone();
            v.dealias();
            (WaveForcing::FromLimit, vec![w0, v])
        }
    };
    let mut kinds = vec![BlockKind::Wave {
        spec: spec.cloned(),
        forcing: forcing.clone(),
    }];
    if init.len() == 2 {
        kinds.push(BlockKind::Limit);
    }
    let blocks = Blocks {
        kinds,
        params: *params,
        nonlinear: true,
    };
    let integ = Integrator::new(&blocks.generators(), &grid, config)?;
    let mut rec = Recorder::new(config, integ.steps(), params.nu, params.nu_prime);
    // running integrals ∫‖∇W‖²_{Ḣ^s} and ∫‖F‖_{Ḣ^s}
    let mut cum = [[0.0f64; 2]; 2];
    let mut last: Option<(f64, [[f64; 2]; 2])> = None;
    let mut nl = |_t: f64, s: &[Field4]| blocks.evaluate(s);
    let mut obs = |step: usize, t: f64, s: &[Field4]| -> Result<()> {
        let force = match &forcing {
            WaveForcing::None => None,
            WaveForcing::Constant(f) => Some(f.clone()),
            WaveForcing::FromLimit => {
                Some(g_tilde_from_products(&grid, &horizontal_products(&s[1])?.0))
            }
        };
        let force = match (force, spec) {
            (Some(f), Some(sp)) => Some(f.map_modes(|_, xi, m| m.map(|v| v * sp.multiplier(xi)))),
            (f, _) => f,
        };
        let rates: [[f64; 2]; 2] = std::array::from_fn(|k| {
            let s_idx = TRACKED_S[k];
            [
                hom_sobolev(&s[0], s_idx + 1.0).powi(2),
                force.as_ref().map_or(0.0, |f| hom_sobolev(f, s_idx)),
            ]
        });
        if let Some((t0, r0)) = last {
            for k in 0..2 {
                for q in 0..2 {
                    cum[k][q] += 0.5 * (t - t0) * (r0[k][q] + rates[k][q]);
                }
            }
        }
        last = Some((t, rates));
        let p2 = (stratified_part(&s[0]).coefficient_energy() * grid.volume()).sqrt();
        let names = [
            ["grad_int_Hdot0", "force_int_Hdot0"],
            ["grad_int_Hdot0.5", "force_int_Hdot0.5"],
        ];
        let mut extra: Vec<(&str, f64)> = vec![("P2_L2", p2)];
        for k in 0..2 {
            extra.push((
                ["W_Hdot0", "W_Hdot0.5"][k],
                hom_sobolev(&s[0], TRACKED_S[k]),
            ));
            extra.push((names[k][0], cum[k][0]));
            extra.push((names[k][1], cum[k][1]));
        }
        rec.observe(step, t, &s[0], &s[0], &extra)
    };
    integ.run(init, &mut nl, &mut obs)?;
    Ok(rec.finish())
}

/// Solves the wave system from `U₀_osc` (which must satisfy `ℙ₂U₀_osc = 0`),
/// truncating data and source to `𝒞_{r,R}` when `truncation` is given.
pub fn solve_wave(
    u0_osc: &Field4,
    source: &WaveSource,
    params: &PhysParams,
    config: &SolverConfig,
    truncation: Option<&TruncationSpec>,
) -> Result<Trajectory> {
    let scale = u0_osc.coefficient_energy().sqrt();
    let s = stratified_part(u0_osc).coefficient_energy().sqrt();
    if scale > 0.0 && s > 1e-10 * scale {
        return Err(StratoError::InvalidParam(format!(
            "wave data has a stratified part (relative size {:e})",
            s / scale
        )));
    }
    let r = u0_osc.divergence_residual();
    if r > 1e-10 {
        return Err(StratoError::NotDivergenceFree(r));
    }
    run_wave(u0_osc, source, params, config, truncation)
}

/// The Stokes-type system: same linear operator, untruncated, started from
/// `E₀ = U₀_osc + (U₀_S^h − ṽ₀^h, 0, 0)`.
pub fn solve_stokes_type(
    e0: &Field4,
    source: &WaveSource,
    params: &PhysParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let r = e0.divergence_residual();
    if r > 1e-10 {
        return Err(StratoError::NotDivergenceFree(r));
    }
    run_wave(e0, source, params, config, None)
}

/// Slack of `‖E(t)‖²_{Ḣ^s} + ν₀∫‖∇E‖²_{Ḣ^s} ≤ (‖E₀‖²_{Ḣ^s} + ∫‖F‖_{Ḣ^s}) e^{∫‖F‖_{Ḣ^s}}`
/// at every recorded time, for `s` in [`TRACKED_S`].
pub fn stokes_estimate_slack(traj: &Trajectory, params: &PhysParams, s: f64) -> Result<Vec<f64>> {
    let key = |p: &str| format!("{p}{s}");
    let get = |k: String| {
        traj.extra
            .get(&k)
            .ok_or_else(|| StratoError::InvalidParam(format!("trajectory lacks series '{k}'")))
    };
    let w = get(key("W_Hdot"))?;
    let grad = get(key("grad_int_Hdot"))?;
    let force = get(key("force_int_Hdot"))?;
    let w0 = w.first().copied().unwrap_or(0.0);
    Ok((0..w.len())
        .map(|k| {
            let rhs = (w0 * w0 + force[k]) * force[k].exp();
            rhs - (w[k] * w[k] + params.nu0() * grad[k])
        })
        .collect())
}
