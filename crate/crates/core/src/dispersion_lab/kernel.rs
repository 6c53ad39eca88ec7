//! The vertical oscillatory kernel
//! `I(ξ_h, x₃) = (2π)⁻¹ ∫ e^{ix₃ξ₃} e^{−(ν+ν′)(t+t′)|ξ|²/4 + i(t−t′)|ξ_h|/(ε|ξ|) − i(t−t′)εD(ε,ξ)} χ(|ξ|/2R)(1−χ(|ξ_h|/r)) dξ₃`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::proptech::f_alpha_peak;
use super::quadrature::integrate_panels_complex;
use crate::fit::RateFit;
use crate::linear_stratified::PhysParams;
use crate::spectral_core::{chi, TruncationSpec};
use crate::{Result, StratoError};

/// Relative tolerance of [`eval_i`] (two successive panel doublings).
pub const KERNEL_REL_TOL: f64 = 1e-8;
/// Panels per phase period.
const PANELS_PER_PERIOD: f64 = 8.0;
/// `χ` vanishes beyond this argument.
const CHI_SUPPORT: f64 = 0.95;

/// Arguments of the kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSpec {
    /// `|ξ_h|`.
    pub xi_h: f64,
    pub x3: f64,
    pub t: f64,
    pub t_prime: f64,
    pub params: PhysParams,
    /// `(r, R)` of the cutoff `χ(|ξ|/2R)(1−χ(|ξ_h|/r))`.
    pub truncation: TruncationSpec,
}

/// `D(ε,ξ) = (ω − √(ω² − δ²))/ε` with `ω = |ξ_h|/(ε|ξ|)`, `δ = (ν−ν′)|ξ|²/2`.
pub fn remainder_closed_form(xi_h: f64, xi3: f64, p: &PhysParams) -> Result<f64> {
    let k2 = xi_h * xi_h + xi3 * xi3;
    let omega = xi_h / (p.eps * k2.sqrt());
    let delta = 0.5 * (p.nu - p.nu_prime) * k2;
    if delta == 0.0 {
        return Ok(0.0);
    }
    if omega <= delta.abs() {
        return Err(StratoError::Domain {
            xi: [xi_h, 0.0, xi3],
            reason: "no oscillating pair (ω ≤ |δ|)".into(),
        });
    }
    // ω − √(ω²−δ²) = δ² / (ω + √(ω²−δ²)) avoids cancellation
    Ok(delta * delta / (omega + (omega * omega - delta * delta).sqrt()) / p.eps)
}

/// Half-length of the `ξ₃` support, zero if the cutoff kills everything.
fn support(spec: &KernelSpec) -> f64 {
    let rr = 2.0 * spec.truncation.big_r * CHI_SUPPORT;
    if spec.xi_h >= rr || 1.0 - chi(spec.xi_h / spec.truncation.r) == 0.0 {
        return 0.0;
    }
    (rr * rr - spec.xi_h * spec.xi_h).sqrt()
}

/// Evaluates the kernel by panel Gauss–Kronrod quadrature, at least eight
/// panels per local phase period, doubling until converged to 1e−8.
pub fn eval_i(spec: &KernelSpec) -> Result<Complex64> {
    let tr = &spec.truncation;
    if !(tr.r > 0.0 && tr.r < tr.big_r) {
        return Err(StratoError::InvalidTruncation {
            r: tr.r,
            big_r: tr.big_r,
        });
    }
    let half = support(spec);
    if half == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = &spec.params;
    let (xh, x3) = (spec.xi_h, spec.x3);
    let dt = spec.t - spec.t_prime;
    let heat = (p.nu + p.nu_prime) * (spec.t + spec.t_prime) / 4.0;
    let hcut = 1.0 - chi(xh / tr.r);
    let mut err = None;
    let integrand = |z: f64| -> Complex64 {
        let k2 = xh * xh + z * z;
        let k = k2.sqrt();
        let d = match remainder_closed_form(xh, z, p) {
            Ok(d) => d,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let phase = x3 * z + dt / p.eps * xh / k - dt * p.eps * d;
        Complex64::from_polar((-heat * k2).exp() * chi(k / (2.0 * tr.big_r)) * hcut, phase)
    };
    // |∂_{ξ₃} phase| ≤ |x₃| + |t−t′|/ε · max ξ₃|ξ_h|/|ξ|³
    let slope = x3.abs() + dt.abs() / p.eps * 0.4 / xh + 1.0;
    let n0 = ((2.0 * half * slope / (2.0 * std::f64::consts::PI) * PANELS_PER_PERIOD).ceil()
        as usize)
        .max(16);
    let (v, _, ok) = integrate_panels_complex(integrand, -half, half, n0, KERNEL_REL_TOL, n0 << 6);
    if let Some(e) = err {
        return Err(e);
    }
    if !ok {
        return Err(StratoError::Resolution(format!(
            "kernel quadrature did not converge at ξ_h={xh}, x₃={x3}"
        )));
    }
    Ok(v / (2.0 * std::f64::consts::PI))
}

/// The same kernel in the rescaled height `x₃ = σβ`, `σ = (t−t′)/ε`.
pub fn eval_i_scaled(spec: &KernelSpec, beta: f64) -> Result<Complex64> {
    let sigma = (spec.t - spec.t_prime) / spec.params.eps;
    eval_i(&KernelSpec {
        x3: sigma * beta,
        ..spec.clone()
    })
}

/// One point of a kernel sweep.
#[derive(Clone, Debug, Serialize)]
pub struct KernelPoint {
    pub sigma: f64,
    pub beta: f64,
    pub modulus: f64,
    /// `|I| / (R e^{−(ν+ν′)(t+t′)r²/16})`, bounded by a fixed constant.
    pub linf_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelStudy {
    pub points: Vec<KernelPoint>,
    /// Fit of `sup_{x₃}|I|` against `σ`.
    pub fit: RateFit,
}

/// For each `σ`, takes `t′ = 0`, `t = σε` and maximises `|I|` over heights
/// around the degenerate stationary point (`β` near `max f_{|ξ_h|}`, searched
/// on a grid of the Airy width `σ^{-2/3}` and refined by golden section).
pub fn kernel_study(
    xi_h: f64,
    truncation: &TruncationSpec,
    params: &PhysParams,
    sigmas: &[f64],
) -> Result<KernelStudy> {
    let (_, b0) = f_alpha_peak(xi_h);
    let points: Vec<KernelPoint> = sigmas
        .par_iter()
        .map(|&sigma| -> Result<KernelPoint> {
            let spec = KernelSpec {
                xi_h,
                x3: 0.0,
                t: sigma * params.eps,
                t_prime: 0.0,
                params: *params,
                truncation: truncation.clone(),
            };
            let m = |b: f64| eval_i_scaled(&spec, b).map(|z| z.norm());
            let w = sigma.powf(-2.0 / 3.0) / xi_h;
            let grid: Vec<f64> = (0..=48)
                .map(|i| b0 - 8.0 * w + 10.0 * w * i as f64 / 48.0)
                .collect();
            let vals: Vec<f64> = grid.iter().map(|&b| m(b)).collect::<Result<_>>()?;
            let ib = (0..vals.len())
                .max_by(|&a, &b| vals[a].total_cmp(&vals[b]))
                .unwrap();
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let step = 10.0 * w / 48.0;
            let (mut lo, mut hi) = (grid[ib] - step, grid[ib] + step);
            let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            let (mut f1, mut f2) = (m(x1)?, m(x2)?);
            while hi - lo > 1e-4 * step {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = m(x2)?;
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = m(x1)?;
                }
            }
            let (beta, modulus) = [(grid[ib], vals[ib]), (x1, f1), (x2, f2)]
                .into_iter()
                .fold((0.0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            let env = truncation.big_r
                * (-(params.nu + params.nu_prime) * spec.t * truncation.r * truncation.r / 16.0)
                    .exp();
            Ok(KernelPoint {
                sigma,
                beta,
                modulus,
                linf_ratio: modulus / env,
            })
        })
        .collect::<Result<_>>()?;
    let fit = RateFit::loglog(
        sigmas,
        &points.iter().map(|p| p.modulus).collect::<Vec<_>>(),
    )
    .ok_or_else(|| StratoError::InvalidParam("need at least two σ values".into()))?;
    Ok(KernelStudy { points, fit })
}
