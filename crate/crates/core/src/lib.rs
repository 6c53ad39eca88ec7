//! Pseudospectral toolkit for the strongly stratified Boussinesq system
//!
//! ```text
//! ∂t U + v·∇U − L U + ε⁻¹ ℬ U = ε⁻¹ (−∇Φ, 0),   div v = 0
//! ```
//!
//! with `U = (v¹, v², v³, θ)`, its `ε → 0` limit (a horizontal Navier–Stokes
//! flow plus a vertical heat equation), the linear wave systems that filter the
//! fast oscillations, and the dispersive estimates behind the convergence.
//!
//! The crate is split into five layers:
//!
//! * [`spectral_core`]: periodic grids, transforms, projections, cutoffs, norms.
//! * [`linear_stratified`]: the Fourier symbol, its eigenstructure and semigroup.
//! * [`pde_solvers`]: exponential integrators for the full, limit and wave systems.
//! * [`dispersion_lab`]: oscillatory integrals and Strichartz scaling studies.
//! * [`convergence_harness`]: configs, initial data, ε-sweeps and verification.

pub mod convergence_harness;
pub mod dispersion_lab;
mod error;
pub mod fit;
pub mod linear_stratified;
pub mod pde_solvers;
pub mod spectral_core;

pub use error::{Result, StratoError};
pub use fit::RateFit;
pub use linear_stratified::{ModeEigenSystem, PhysParams};
pub use num_complex::Complex64;
pub use spectral_core::{Field1, Field4, GridSpec, NormSpec, Scalar3, TruncationSpec};
