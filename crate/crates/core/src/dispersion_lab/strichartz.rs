//! ε-scaling of space-time norms of the free wave `e^{t(L − ε⁻¹ℙℬ)}f₀` for
//! oscillating data.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::fit::RateFit;
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{norm, stratified_part, transform_forward, Field4, GridSpec, NormSpec};
use crate::{Result, StratoError};

/// Exact flow of `L − ε⁻¹ℙℬ` when `ν = ν′`, for divergence-free `f`:
/// heat decay `e^{−ν|ξ|²t}` times the rotation by `ω t`, `ω = |ξ_h|/(ε|ξ|)`,
/// in the plane spanned by `e_b = (ξ₁ξ₃, ξ₂ξ₃, −|ξ_h|², 0)/(|ξ||ξ_h|)` and `θ`.
pub fn equal_diffusion_flow(f: &Field4, t: f64, params: &PhysParams) -> Result<Field4> {
    if !params.equal_diffusion() {
        return Err(StratoError::InvalidParam(
            "closed-form flow needs ν = ν′".into(),
        ));
    }
    if t < 0.0 {
        return Err(StratoError::NegativeTime(t));
    }
    let nu = params.nu;
    Ok(f.map_modes(|_, xi, m| {
        let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
        let k2 = kh2 + xi[2] * xi[2];
        if k2 == 0.0 {
            return m;
        }
        let decay = (-nu * k2 * t).exp();
        if kh2 == 0.0 {
            return m.map(|v| v * decay);
        }
        let (kh, k) = (kh2.sqrt(), k2.sqrt());
        let eb = [xi[0] * xi[2] / (k * kh), xi[1] * xi[2] / (k * kh), -kh / k];
        let a: Complex64 = m[0] * eb[0] + m[1] * eb[1] + m[2] * eb[2];
        let (s, c) = (kh / (params.eps * k) * t).sin_cos();
        let a1 = a * c + m[3] * s;
        let th1 = -a * s + m[3] * c;
        let da = (a1 - a) * decay;
        [
            m[0] * decay + da * eb[0],
            m[1] * decay + da * eb[1],
            m[2] * decay + da * eb[2],
            th1 * decay,
        ]
    }))
}

/// Which family of Strichartz estimates is measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum StrichartzMode {
    /// `L^p_t L^r`.
    Isotropic { r: f64 },
    /// `L^p_t L^{m,2}_{v,h}`.
    Anisotropic { m: f64 },
}

impl StrichartzMode {
    pub fn space_norm(&self) -> NormSpec {
        match *self {
            StrichartzMode::Isotropic { r } => NormSpec::Lebesgue { p: r },
            StrichartzMode::Anisotropic { m } => NormSpec::Aniso {
                vertical: m,
                horizontal: 2.0,
            },
        }
    }

    /// Predicted ε-exponent: `(θ/4)(1 − 2/r)` or `(θ/8)(1 − 2/m)`.
    pub fn theoretical_exponent(&self, theta: f64) -> f64 {
        match *self {
            StrichartzMode::Isotropic { r } => theta / 4.0 * (1.0 - 2.0 / r),
            StrichartzMode::Anisotropic { m } => theta / 8.0 * (1.0 - 2.0 / m),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StrichartzSpec {
    pub time_exponent: f64,
    pub mode: StrichartzMode,
    pub theta: f64,
    /// Horizon of the time integral.
    pub t_end: f64,
    /// Log-spaced samples from `ε·10⁻³` to `t_end` (plus `t = 0`).
    pub time_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrichartzReport {
    pub spec: StrichartzSpec,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: RateFit,
    /// Fitted slope of `log‖W_ε‖` against `log ε`: `‖W_ε‖ ~ ε^{exponent}`.
    pub measured_exponent: f64,
    pub theoretical_exponent: f64,
    pub passed: bool,
}

/// Tolerance below the predicted exponent that still passes.
pub const EXPONENT_SLACK: f64 = 0.05;

fn time_grid(eps: f64, t_end: f64, n: usize) -> Vec<f64> {
    let lo = (eps * 1e-3).log10();
    let hi = t_end.log10();
    let mut ts = vec![0.0];
    ts.extend((0..n).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)));
    ts
}

/// Solves the free linear system for each ε (closed form, `ν = ν′`) and fits
/// `log ‖W_ε‖_{L^p_t X}` against `log ε`.
pub fn measure_strichartz_scaling(
    f0: &Field4,
    params: &PhysParams,
    eps_list: &[f64],
    spec: &StrichartzSpec,
) -> Result<StrichartzReport> {
    if eps_list.len() < 4 {
        return Err(StratoError::InvalidParam(format!(
            "need at least 4 values of ε, got {}",
            eps_list.len()
        )));
    }
    if spec.time_samples < 2 || !(spec.t_end > 0.0) {
        return Err(StratoError::InvalidParam(
            "need t_end > 0 and at least two time samples".into(),
        ));
    }
    let scale = f0.coefficient_energy().sqrt();
    if scale > 0.0 && stratified_part(f0).coefficient_energy().sqrt() > 1e-10 * scale {
        return Err(StratoError::InvalidParam(
            "Strichartz data must be purely oscillating".into(),
        ));
    }
    let space = spec.mode.space_norm();
    let values: Vec<f64> = eps_list
        .iter()
        .map(|&eps| -> Result<f64> {
            let p = params.with_eps(eps)?;
            let ts = time_grid(eps, spec.t_end, spec.time_samples);
            let vals: Vec<f64> = ts
                .par_iter()
                .map(|&t| norm(&equal_diffusion_flow(f0, t, &p)?, &space))
                .collect::<Result<_>>()?;
            Ok(crate::spectral_core::time_lp(
                &ts,
                &vals,
                spec.time_exponent,
            ))
        })
        .collect::<Result<_>>()?;
    let fit = RateFit::loglog(eps_list, &values)
        .ok_or_else(|| StratoError::InvalidParam("degenerate ε sweep".into()))?;
    let theory = spec.mode.theoretical_exponent(spec.theta);
    Ok(StrichartzReport {
        spec: spec.clone(),
        eps: eps_list.to_vec(),
        values,
        measured_exponent: fit.slope,
        theoretical_exponent: theory,
        passed: fit.slope >= theory - EXPONENT_SLACK,
        fit,
    })
}

/// Oscillating test data: a Gaussian temperature bump of width `w` centred
/// in the box, dealiased, with the `ξ_h = 0` modes removed (they carry no
/// waves and do not disperse).
pub fn gaussian_theta_data(grid: &GridSpec, width: f64) -> Result<Field4> {
    let mut th = vec![0.0; grid.len()];
    for (idx, v) in th.iter_mut().enumerate() {
        let ijk = grid.unravel(idx);
        let r2: f64 = (0..3)
            .map(|a| (grid.coordinate(a, ijk[a]) - 0.5 * grid.lengths[a]).powi(2))
            .sum();
        *v = (-r2 / (2.0 * width * width)).exp();
    }
    let zero = vec![0.0; grid.len()];
    let mut f = transform_forward(grid, &[zero.clone(), zero.clone(), zero, th])?;
    f.dealias();
    Ok(f.map_modes(|_, xi, m| {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            [Complex64::new(0.0, 0.0); 4]
        } else {
            m
        }
    }))
}
