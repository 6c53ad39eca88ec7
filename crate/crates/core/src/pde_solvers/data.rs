use crate::spectral_core::{stratified_part, Field1, Field4};
use crate::{Result, StratoError};

/// Initial data for the stratified system and its limit.
///
/// The full state at `t = 0` is `U₀_S + U₀_osc + (0,0,0,θ̃₀ε(x₃))`; the limit
/// system starts from `(ṽ₀^h, θ̃₀)`.
#[derive(Clone, Debug)]
pub struct InitialData {
    /// Stratified part: `ℙ₂U₀_S = U₀_S`.
    pub u0_s: Field4,
    /// Oscillating part: `ℙ₂U₀_osc = 0`.
    pub u0_osc: Field4,
    pub theta0_eps: Field1,
    /// Limit velocity, stored in slots 0 and 1.
    pub v0_h: Field4,
    pub theta0: Field1,
}

impl InitialData {
    /// Zero data on a grid.
    pub fn zeros(grid: &crate::GridSpec) -> Self {
        InitialData {
            u0_s: Field4::zeros(grid),
            u0_osc: Field4::zeros(grid),
            theta0_eps: Field1::for_grid(grid),
            v0_h: Field4::zeros(grid),
            theta0: Field1::for_grid(grid),
        }
    }

    /// Checks the structural invariants to relative tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let rel = |a: &Field4, b: &Field4| {
            let s = b.coefficient_energy().sqrt();
            if s == 0.0 {
                a.coefficient_energy().sqrt()
            } else {
                a.coefficient_energy().sqrt() / s
            }
        };
        for (name, f) in [
            ("U0_S", &self.u0_s),
            ("U0_osc", &self.u0_osc),
            ("v0_h", &self.v0_h),
        ] {
            let r = f.divergence_residual();
            if r > tol {
                return Err(StratoError::InvalidParam(format!(
                    "{name} is not divergence free (residual {r:e})"
                )));
            }
        }
        if rel(&stratified_part(&self.u0_osc), &self.u0_osc) > tol {
            return Err(StratoError::InvalidParam(
                "oscillating part has a stratified component".into(),
            ));
        }
        if rel(&self.u0_s.sub(&stratified_part(&self.u0_s)), &self.u0_s) > tol {
            return Err(StratoError::InvalidParam(
                "stratified part has an oscillating component".into(),
            ));
        }
        let vh_vertical = self
            .v0_h
            .comp(2)
            .iter()
            .chain(self.v0_h.comp(3))
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if vh_vertical > 0.0 {
            return Err(StratoError::InvalidParam(
                "limit velocity must live in the horizontal slots".into(),
            ));
        }
        let g = self.u0_s.grid();
        for f in [&self.u0_osc, &self.v0_h] {
            g.ensure_same(f.grid())?;
        }
        for th in [&self.theta0_eps, &self.theta0] {
            if th.n3() != g.n[2] || th.length() != g.lengths[2] {
                return Err(StratoError::GridMismatch(
                    "vertical profile does not match grid".into(),
                ));
            }
        }
        Ok(())
    }

    /// `U_ε(0) = U₀_S + U₀_osc + (0,0,0,θ̃₀ε)`.
    pub fn combined(&self) -> Result<Field4> {
        self.u0_s
            .add(&self.u0_osc)
            .with_vertical_profile(&self.theta0_eps)
    }

    /// `D_ε(0) = U₀_osc + (U₀_S^h − ṽ₀^h, 0, 0)`.
    pub fn d0(&self) -> Field4 {
        self.u0_osc.add(&self.u0_s.sub(&self.v0_h))
    }

    /// `(ṽ₀^h, 0, θ̃₀ε)`, the reference state subtracted in `D_ε`.
    pub fn reference0(&self) -> Result<Field4> {
        self.v0_h.with_vertical_profile(&self.theta0_eps)
    }
}
