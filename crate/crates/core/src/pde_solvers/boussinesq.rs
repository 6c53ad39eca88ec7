//! The original Boussinesq variables `(v, ρ, P)` and the change of unknowns
//! to the penalised form. The stable background profile is linear in `x₃`
//! and so is not periodic; everything here works on plain sample arrays.

use serde::Serialize;

use crate::linear_stratified::PhysParams;
use crate::{Result, StratoError};

/// Additive constants of the stationary solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Background {
    pub rho0: f64,
    pub p0: f64,
}

/// Pointwise Boussinesq unknowns at sample points with heights `x3`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoussinesqFields {
    pub v: [Vec<f64>; 3],
    pub rho: Vec<f64>,
    pub pressure: Vec<f64>,
}

/// Pointwise penalised unknowns `U = (v, θ)` and `Φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifFields {
    pub u: [Vec<f64>; 4],
    pub phi: Vec<f64>,
}

fn check_kappa(p: &PhysParams) -> Result<()> {
    if !(p.kappa > 0.0) {
        return Err(StratoError::InvalidParam(format!(
            "κ = {} must be positive",
            p.kappa
        )));
    }
    Ok(())
}

/// `ρ̄(x₃) = ρ̄₀ − x₃/(ε²κ²)`.
pub fn rho_bar(p: &PhysParams, bg: &Background, x3: f64) -> f64 {
    bg.rho0 - x3 / (p.eps * p.eps * p.kappa * p.kappa)
}

/// `P̄(x₃) = P̄₀ − κ²ρ̄₀x₃ + x₃²/(2ε²)`.
pub fn p_bar(p: &PhysParams, bg: &Background, x3: f64) -> f64 {
    bg.p0 - p.kappa * p.kappa * bg.rho0 * x3 + x3 * x3 / (2.0 * p.eps * p.eps)
}

/// The stationary solution `(V̄, P̄)` sampled at heights `x3`: zero velocity,
/// density `ρ̄` and pressure `P̄`.
pub fn stationary_solution(
    params: &PhysParams,
    bg: &Background,
    x3: &[f64],
) -> Result<BoussinesqFields> {
    check_kappa(params)?;
    let n = x3.len();
    Ok(BoussinesqFields {
        v: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        rho: x3.iter().map(|&z| rho_bar(params, bg, z)).collect(),
        pressure: x3.iter().map(|&z| p_bar(params, bg, z)).collect(),
    })
}

fn check_lengths(n: usize, lens: &[usize]) -> Result<()> {
    for &l in lens {
        if l != n {
            return Err(StratoError::SizeMismatch {
                expected: n,
                got: l,
            });
        }
    }
    Ok(())
}

/// `θ = εκ²(ρ − ρ̄)`, `Φ = ε(P − P̄)`.
pub fn boussinesq_to_stratif(
    fields: &BoussinesqFields,
    x3: &[f64],
    params: &PhysParams,
    bg: &Background,
) -> Result<StratifFields> {
    check_kappa(params)?;
    let n = x3.len();
    check_lengths(
        n,
        &[
            fields.v[0].len(),
            fields.v[1].len(),
            fields.v[2].len(),
            fields.rho.len(),
            fields.pressure.len(),
        ],
    )?;
    let (e, k2) = (params.eps, params.kappa * params.kappa);
    let theta = (0..n)
        .map(|i| e * k2 * (fields.rho[i] - rho_bar(params, bg, x3[i])))
        .collect();
    let phi = (0..n)
        .map(|i| e * (fields.pressure[i] - p_bar(params, bg, x3[i])))
        .collect();
    Ok(StratifFields {
        u: [
            fields.v[0].clone(),
            fields.v[1].clone(),
            fields.v[2].clone(),
            theta,
        ],
        phi,
    })
}

/// `ρ = ρ̄ + θ/(εκ²)`, `P = P̄ + Φ/ε`.
pub fn stratif_to_boussinesq(
    fields: &StratifFields,
    x3: &[f64],
    params: &PhysParams,
    bg: &Background,
) -> Result<BoussinesqFields> {
    check_kappa(params)?;
    let n = x3.len();
    check_lengths(
        n,
        &[
            fields.u[0].len(),
            fields.u[1].len(),
            fields.u[2].len(),
            fields.u[3].len(),
            fields.phi.len(),
        ],
    )?;
    let (e, k2) = (params.eps, params.kappa * params.kappa);
    let rho = (0..n)
        .map(|i| rho_bar(params, bg, x3[i]) + fields.u[3][i] / (e * k2))
        .collect();
    let pressure = (0..n)
        .map(|i| p_bar(params, bg, x3[i]) + fields.phi[i] / e)
        .collect();
    Ok(BoussinesqFields {
        v: [
            fields.u[0].clone(),
            fields.u[1].clone(),
            fields.u[2].clone(),
        ],
        rho,
        pressure,
    })
}

/// Largest pointwise residuals of the Boussinesq system at the stationary
/// state, from centred finite differences.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StationaryResidual {
    /// `max |κ²ρ̄ e₃ + ∇P̄|` (the velocity is zero, so only these terms remain).
    pub momentum: f64,
    /// `max |∂ₜρ̄ + v̄·∇ρ̄ − ν′Δρ̄|`.
    pub transport: f64,
    /// Size of the balancing terms, `max |κ²ρ̄|`.
    pub scale: f64,
    pub points: usize,
}

/// Samples the box `[-half_width, half_width]³` on `n³` points and evaluates
/// the residuals with step `h`.
pub fn stationary_residual(
    params: &PhysParams,
    bg: &Background,
    half_width: f64,
    n: usize,
    h: f64,
) -> Result<StationaryResidual> {
    check_kappa(params)?;
    if n < 2 || !(h > 0.0) {
        return Err(StratoError::InvalidParam("need n ≥ 2 and h > 0".into()));
    }
    let rho = |x: [f64; 3]| rho_bar(params, bg, x[2]);
    let pres = |x: [f64; 3]| p_bar(params, bg, x[2]);
    let shift = |x: [f64; 3], a: usize, d: f64| {
        let mut y = x;
        y[a] += d;
        y
    };
    let k2 = params.kappa * params.kappa;
    let (mut mom, mut tr, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    let coord = |i: usize| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [coord(i), coord(j), coord(k)];
                let grad_p: [f64; 3] = std::array::from_fn(|a| {
                    (pres(shift(x, a, h)) - pres(shift(x, a, -h))) / (2.0 * h)
                });
                let buoy = [0.0, 0.0, k2 * rho(x)];
                let r = (0..3)
                    .map(|a| (buoy[a] + grad_p[a]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                mom = mom.max(r);
                scale = scale.max(buoy[2].abs());
                // the background is stationary and at rest: only diffusion remains
                let lap: f64 = (0..3)
                    .map(|a| (rho(shift(x, a, h)) - 2.0 * rho(x) + rho(shift(x, a, -h))) / (h * h))
                    .sum();
                tr = tr.max((params.nu_prime * lap).abs());
            }
        }
    }
    Ok(StationaryResidual {
        momentum: mom,
        transport: tr,
        scale,
        points: n * n * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (PhysParams, Background) {
        (
            PhysParams::new(0.1, 0.2, 0.5)
                .unwrap()
                .with_kappa(1.5)
                .unwrap(),
            Background {
                rho0: 1.2,
                p0: -0.4,
            },
        )
    }

    #[test]
    fn stationary_state_maps_to_zero() {
        let (p, bg) = setup();
        let x3: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let st = stationary_solution(&p, &bg, &x3).unwrap();
        let u = boussinesq_to_stratif(&st, &x3, &p, &bg).unwrap();
        assert!(u.u[3].iter().chain(&u.phi).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn residuals_vanish() {
        let (p, bg) = setup();
        let r = stationary_residual(&p, &bg, 1.0, 9, 0.25).unwrap();
        assert!(r.momentum < 1e-12 && r.transport < 1e-12, "{r:?}");
    }

    #[test]
    fn zero_kappa_rejected() {
        let (mut p, bg) = setup();
        p.kappa = 0.0;
        assert!(stationary_solution(&p, &bg, &[0.0]).is_err());
    }
}
