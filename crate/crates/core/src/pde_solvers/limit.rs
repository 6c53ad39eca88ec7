//! The limit system: horizontal Navier–Stokes with full 3D diffusion, its
//! pressure `π̃⁰` and the induced force `G̃`.

use super::config::SolverConfig;
use super::coupled::{BlockKind, Blocks};
use super::nonlinear::{g_tilde_from_products, horizontal_products, pressure_from_products};
use super::stepper::Integrator;
use super::trajectory::{Recorder, Trajectory};
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{Field4, Scalar3};
use crate::{Result, StratoError};

/// Largest `|ξ_h·v̂_h| / (|ξ_h| max|v̂_h|)` over the horizontal slots.
pub fn horizontal_divergence_residual(vh: &Field4) -> f64 {
    let g = vh.grid();
    let scale = (0..g.len())
        .map(|i| (vh.comp(0)[i].norm_sqr() + vh.comp(1)[i].norm_sqr()).sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    (0..g.len())
        .map(|i| {
            let xi = g.xi(i);
            let kh = xi[0].hypot(xi[1]);
            if kh == 0.0 {
                0.0
            } else {
                (vh.comp(0)[i] * xi[0] + vh.comp(1)[i] * xi[1]).norm() / (kh * scale)
            }
        })
        .fold(0.0, f64::max)
}

pub(crate) fn check_horizontal(vh: &Field4) -> Result<()> {
    let vertical = vh
        .comp(2)
        .iter()
        .chain(vh.comp(3))
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if vertical > 0.0 {
        return Err(StratoError::InvalidParam(
            "horizontal field has nonzero slots 3 or 4".into(),
        ));
    }
    let r = horizontal_divergence_residual(vh);
    if r > 1e-10 {
        return Err(StratoError::NotDivergenceFree(r));
    }
    Ok(())
}

/// `π̃⁰ = −Σᵢⱼ Δ_h⁻¹∂ᵢ∂ⱼ(ṽⁱṽʲ)`; modes with `ξ_h = 0` are set to zero.
pub fn compute_pressure_pi0(vh: &Field4) -> Result<Scalar3> {
    check_horizontal(vh)?;
    let (p, _) = horizontal_products(vh)?;
    Ok(pressure_from_products(vh.grid(), &p))
}

/// `G̃ = ℙ(∂₁π̃⁰, ∂₂π̃⁰, 0, 0)`.
#[allow(non_snake_case)]
pub fn compute_G_tilde(vh: &Field4) -> Result<Field4> {
    check_horizontal(vh)?;
    let (p, _) = horizontal_products(vh)?;
    Ok(g_tilde_from_products(vh.grid(), &p))
}

/// Advances `∂ₜṽ^h + ṽ^h·∇_hṽ^h − νΔṽ^h = −∇_hπ̃⁰`. The horizontal Leray
/// projection is applied to the nonlinear term at every stage.
pub fn solve_limit_ns(v0_h: &Field4, nu: f64, config: &SolverConfig) -> Result<Trajectory> {
    check_horizontal(v0_h)?;
    let params = PhysParams::new(nu, nu, 1.0)?;
    let blocks = Blocks {
        kinds: vec![BlockKind::Limit],
        params,
        nonlinear: config.nonlinear,
    };
    let integ = Integrator::new(&blocks.generators(), v0_h.grid(), config)?;
    let mut rec = Recorder::new(config, integ.steps(), nu, nu);
    let mut nl = |_t: f64, s: &[Field4]| blocks.evaluate(s);
    let mut obs = |step: usize, t: f64, s: &[Field4]| rec.observe(step, t, &s[0], &s[0], &[]);
    let mut init = v0_h.clone();
    init.dealias();
    integ.run(vec![init], &mut nl, &mut obs)?;
    Ok(rec.finish())
}
