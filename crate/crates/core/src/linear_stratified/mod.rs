//! The linearised, Leray-projected operator `L − ε⁻¹ℙℬ` in Fourier variables.

mod eigen;
mod params;
mod semigroup;
mod symbol;

pub use eigen::{
    analytic_eigenvalues, check_remainder_bounds, check_validity, numeric_eigendecomposition,
    oscillation_frequency, remainder_bounds, remainder_d, spectral_projector, AnalyticEigen,
    BoundViolation, ModeEigenSystem, NumericEigen, RemainderReport, BOUND_TOLERANCE,
    CONDITION_LIMIT,
};
pub use params::PhysParams;
pub use semigroup::{
    apply_mode_matrices, matrix_exponential, mode_exponential, mode_phis, phi_scalar,
    propagate_semigroup, Generator, DIV_FREE_TOL,
};
pub use symbol::assemble_symbol;

use crate::spectral_core::Field4;
use crate::{Result, StratoError};

/// `ℙ_k f` mode by mode. Zero modes are skipped; the mean mode maps to zero.
pub fn apply_projector(
    k: usize,
    f: &Field4,
    params: &PhysParams,
    spec: Option<&crate::spectral_core::TruncationSpec>,
) -> Result<Field4> {
    if !(1..=4).contains(&k) {
        return Err(StratoError::InvalidParam(format!(
            "projector index {k} not in 1..=4"
        )));
    }
    let g = f.grid();
    let zero = num_complex::Complex64::new(0.0, 0.0);
    let mut out = Field4::zeros(g);
    for idx in 0..g.len() {
        let m = f.mode(idx);
        let xi = g.xi(idx);
        if m.iter().all(|v| *v == zero) || xi.iter().all(|&x| x == 0.0) {
            continue;
        }
        if k == 2 {
            out.set_mode(idx, crate::spectral_core::stratified_mode(xi, m));
            continue;
        }
        let p = spectral_projector(k, xi, params, spec)?;
        out.set_mode(
            idx,
            std::array::from_fn(|r| (0..4).map(|c| p[(r, c)] * m[c]).sum()),
        );
    }
    Ok(out)
}
