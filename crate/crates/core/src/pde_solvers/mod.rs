//! Time integration of the stratified system, its limit, the filtering waves
//! and the difference diagnostics, plus the Boussinesq change of variables.

mod boussinesq;
mod config;
mod coupled;
mod data;
mod diff;
mod full;
mod heat;
mod limit;
mod nonlinear;
mod stepper;
mod trajectory;
mod wave;

pub use boussinesq::{
    boussinesq_to_stratif, p_bar, rho_bar, stationary_residual, stationary_solution,
    stratif_to_boussinesq, Background, BoussinesqFields, StationaryResidual, StratifFields,
};
pub use config::{Scheme, SolverConfig};
pub use data::InitialData;
pub use diff::{compute_d_eps, compute_delta_eps, trajectory_from_snapshots};
pub use full::{solve_coupled, solve_full_stratif, CoupledRun, FilterWave};
pub use heat::{heat_estimate, solve_heat_1d, HeatEstimate};
#[allow(non_snake_case)]
pub use limit::{
    compute_G_tilde, compute_pressure_pi0, horizontal_divergence_residual, solve_limit_ns,
};
pub use trajectory::Trajectory;
pub use wave::{solve_stokes_type, solve_wave, stokes_estimate_slack, WaveSource, TRACKED_S};

/// `−ℙ div(v ⊗ U)`, the quadratic term of the full system (dealiased).
pub fn stratified_nonlinear_term(
    u: &crate::spectral_core::Field4,
) -> crate::Result<crate::spectral_core::Field4> {
    Ok(nonlinear::stratified_nonlinearity(u)?.0)
}
