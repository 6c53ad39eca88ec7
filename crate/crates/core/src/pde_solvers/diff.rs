//! Difference diagnostics between recorded trajectories.

use super::heat::solve_heat_1d;
use super::trajectory::Trajectory;
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{hom_sobolev, norm, stratified_part, Field1, Field4, NormSpec};
use crate::{Result, StratoError};

fn check_aligned(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.times.len() != b.times.len()
        || a.snapshots.len() != a.times.len()
        || b.snapshots.len() != b.times.len()
    {
        return Err(StratoError::GridMismatch(format!(
            "trajectories are not aligned ({} vs {} stamps, snapshots kept: {}/{})",
            a.times.len(),
            b.times.len(),
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    for (s, t) in a.times.iter().zip(&b.times) {
        if (s - t).abs() > 1e-12 * s.abs().max(1.0) {
            return Err(StratoError::GridMismatch(format!(
                "time stamps differ: {s} vs {t}"
            )));
        }
    }
    Ok(())
}

/// Builds a trajectory (norm series, energy, trapezoidal dissipation and
/// monitor integrals, `‖ℙ₂·‖_{L²}` under `extra["P2_L2"]`) from snapshots.
pub fn trajectory_from_snapshots(
    times: &[f64],
    fields: Vec<Field4>,
    norms: &[NormSpec],
    params: &PhysParams,
) -> Result<Trajectory> {
    let mut tr = Trajectory {
        times: times.to_vec(),
        ..Default::default()
    };
    let mut cum = (0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    for (k, f) in fields.iter().enumerate() {
        let v = f.grid().volume();
        let vel = Field4::from_components(
            f.grid().clone(),
            [
                f.comp(0).to_vec(),
                f.comp(1).to_vec(),
                f.comp(2).to_vec(),
                vec![Default::default(); f.grid().len()],
            ],
        );
        let th = f.sub(&vel);
        let rate = params.nu * hom_sobolev(&vel, 1.0).powi(2)
            + params.nu_prime * hom_sobolev(&th, 1.0).powi(2);
        let mon = hom_sobolev(f, 1.5).powi(2);
        if let Some((r0, m0)) = prev {
            let h = times[k] - times[k - 1];
            cum.0 += 0.5 * h * (r0 + rate);
            cum.1 += 0.5 * h * (m0 + mon);
        }
        prev = Some((rate, mon));
        tr.energy.push(f.coefficient_energy() * v);
        tr.dissipation.push(cum.0);
        tr.monitor.push(cum.1);
        for spec in norms {
            tr.norms.entry(spec.id()).or_default().push(norm(f, spec)?);
        }
        tr.extra
            .entry("P2_L2".into())
            .or_default()
            .push((stratified_part(f).coefficient_energy() * v).sqrt());
    }
    tr.snapshots = fields;
    Ok(tr)
}

/// `D_ε = U_ε − (ṽ^h, 0, θ̃_ε)` where `θ̃_ε` is the exact heat flow of `θ̃₀ε`.
/// Both trajectories must carry snapshots on the same time stamps.
pub fn compute_d_eps(
    full: &Trajectory,
    limit_ns: &Trajectory,
    theta0_eps: &Field1,
    params: &PhysParams,
    norms: &[NormSpec],
) -> Result<Trajectory> {
    check_aligned(full, limit_ns)?;
    let fields = full
        .times
        .iter()
        .zip(full.snapshots.iter().zip(&limit_ns.snapshots))
        .map(|(&t, (u, v))| {
            u.grid().ensure_same(v.grid())?;
            let th = solve_heat_1d(theta0_eps, params.nu_prime, t)?;
            let mut reference = Field4::from_components(
                v.grid().clone(),
                [
                    v.comp(0).to_vec(),
                    v.comp(1).to_vec(),
                    vec![Default::default(); v.grid().len()],
                    vec![Default::default(); v.grid().len()],
                ],
            );
            reference = reference.with_vertical_profile(&th)?;
            Ok(u.sub(&reference))
        })
        .collect::<Result<Vec<_>>>()?;
    trajectory_from_snapshots(&full.times, fields, norms, params)
}

/// `δ_ε = D_ε − W`.
pub fn compute_delta_eps(
    d_eps: &Trajectory,
    wave: &Trajectory,
    params: &PhysParams,
    norms: &[NormSpec],
) -> Result<Trajectory> {
    check_aligned(d_eps, wave)?;
    let fields = d_eps
        .snapshots
        .iter()
        .zip(&wave.snapshots)
        .map(|(d, w)| Ok(d.sub(w)))
        .collect::<Result<Vec<_>>>()?;
    trajectory_from_snapshots(&d_eps.times, fields, norms, params)
}
