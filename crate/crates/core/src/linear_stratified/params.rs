use serde::{Deserialize, Serialize};

use crate::{Result, StratoError};

/// Physical parameters of the stratified system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Kinematic viscosity ν.
    pub nu: f64,
    /// Thermal diffusivity ν′.
    pub nu_prime: f64,
    /// Froude number ε.
    pub eps: f64,
    /// Brunt–Väisälä scale κ of the Boussinesq formulation.
    pub kappa: f64,
}

impl PhysParams {
    pub fn new(nu: f64, nu_prime: f64, eps: f64) -> Result<Self> {
        for (name, v) in [("nu", nu), ("nu_prime", nu_prime), ("eps", eps)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(StratoError::InvalidParam(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        Ok(PhysParams {
            nu,
            nu_prime,
            eps,
            kappa: 1.0,
        })
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(StratoError::InvalidParam(format!(
                "kappa = {kappa} must be positive"
            )));
        }
        self.kappa = kappa;
        Ok(self)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(StratoError::InvalidParam(format!(
                "eps = {eps} must be positive"
            )));
        }
        self.eps = eps;
        Ok(self)
    }

    /// ν₀ = min(ν, ν′)
    pub fn nu0(&self) -> f64 {
        self.nu.min(self.nu_prime)
    }

    pub fn equal_diffusion(&self) -> bool {
        self.nu == self.nu_prime
    }

    /// `ε₁ = (√2/|ν−ν′|)^{1/(1−(3M+m))}`, defined when ν ≠ ν′ and 3M+m < 1.
    pub fn eps1(&self, m: f64, big_m: f64) -> Option<f64> {
        let gap = (self.nu - self.nu_prime).abs();
        let expo = 1.0 - (3.0 * big_m + m);
        if gap == 0.0 || expo <= 0.0 {
            return None;
        }
        Some((2f64.sqrt() / gap).powf(1.0 / expo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive() {
        assert!(PhysParams::new(0.0, 1.0, 0.1).is_err());
        assert!(PhysParams::new(1.0, 1.0, -0.1).is_err());
        assert!(PhysParams::new(1.0, 1.0, 0.1)
            .unwrap()
            .with_kappa(0.0)
            .is_err());
    }

    #[test]
    fn eps1_threshold() {
        let p = PhysParams::new(1.0, 1.2, 0.01).unwrap();
        let e1 = p.eps1(1.0 / 259.0, 1.0 / 1554.0).unwrap();
        let expect = (2f64.sqrt() / 0.2).powf(1.0 / (1.0 - (3.0 / 1554.0 + 1.0 / 259.0)));
        assert!((e1 - expect).abs() < 1e-12 * expect);
        assert!(PhysParams::new(1.0, 1.0, 0.1)
            .unwrap()
            .eps1(0.1, 0.1)
            .is_none());
        assert_eq!(p.nu0(), 1.0);
    }
}
