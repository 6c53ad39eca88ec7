//! Periodic-box spectral representation and the operators built on it.

mod cutoff;
mod field;
mod grid;
mod norms;
mod operators;
mod snapshot;
mod transform;

pub use cutoff::{
    block_weight, chi, dyadic_block, dyadic_range, lp_block, lp_low, smooth_step, truncate,
    BlockAxis, TruncationSpec,
};
pub use field::{Field1, Field4, Physical4, Scalar3};
pub use grid::{GridSpec, Wavenumbers};
pub use norms::{
    hom_sobolev, norm, pointwise_magnitude, space_time_norm, time_lp, NormSpec, SpaceTimeNorm,
};
pub(crate) use operators::dealias_in_place;
pub use operators::{
    advect, apply_b, decompose_stratified_oscillating, divergence, leray_mode, leray_project,
    product, scalar_derivative, stratified_advection_residual, stratified_mode, stratified_part,
    vorticity, vorticity_identity_residual,
};
pub use snapshot::{read_snapshot, write_snapshot};
pub(crate) use transform::{forward_real, inverse_real};
pub use transform::{scalar_forward, scalar_inverse, transform_forward, transform_inverse};
