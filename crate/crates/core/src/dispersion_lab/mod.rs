//! Oscillatory integrals and dispersive estimates, studied on their
//! continuous definitions (quadrature) or via the exact linear flow.

mod inequalities;
mod kernel;
mod proptech;
mod quadrature;
mod strichartz;

pub use inequalities::{
    aniso_bernstein_constant, bernstein_constant, check_heat_annulus, interpolation_constant,
    random_band_limited, InequalityReport,
};
pub use kernel::{
    eval_i, eval_i_scaled, kernel_study, remainder_closed_form, KernelPoint, KernelSpec,
    KernelStudy, KERNEL_REL_TOL,
};
pub use proptech::{
    eval_i_alpha_beta, f_alpha, f_alpha_peak, log_grid, proptech_study, sup_over_beta,
    upper_bound_constant, witness_alpha_scaling, witness_near_peak, PhaseIntegralSpec,
    ProptechStudy, SupPoint, PHASE_ABS_TOL,
};
pub use quadrature::{gk15, integrate_adaptive, integrate_panels_complex, Quadrature};
pub use strichartz::{
    equal_diffusion_flow, gaussian_theta_data, measure_strichartz_scaling, StrichartzMode,
    StrichartzReport, StrichartzSpec, EXPONENT_SLACK,
};
