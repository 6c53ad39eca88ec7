//! The real integral `I^R_{α,β}(σ) = ∫₀^{√(R²−α²)} dx / (1 + σ(f_α(x) − β)²)`
//! with `f_α(x) = αx/(α²+x²)^{3/2}`, its supremum over `β` and its decay in `σ`.

use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::integrate_adaptive;
use crate::fit::RateFit;
use crate::{Result, StratoError};

/// Absolute tolerance of [`eval_i_alpha_beta`].
pub const PHASE_ABS_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseIntegralSpec {
    /// `α = |ξ_h| > 0`.
    pub alpha: f64,
    /// `β`, the rescaled height.
    pub beta: f64,
    /// `R ≥ 2α/√3`.
    pub big_r: f64,
    /// `σ = |t−t′|/ε ≥ 0`.
    pub sigma: f64,
}

impl PhaseIntegralSpec {
    pub fn new(alpha: f64, beta: f64, big_r: f64, sigma: f64) -> Result<Self> {
        let s = PhaseIntegralSpec {
            alpha,
            beta,
            big_r,
            sigma,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(StratoError::InvalidParam(format!(
                "α = {} must be positive",
                self.alpha
            )));
        }
        if self.big_r < 2.0 * self.alpha / 3f64.sqrt() {
            return Err(StratoError::InvalidParam(format!(
                "R = {} below 2α/√3 = {}",
                self.big_r,
                2.0 * self.alpha / 3f64.sqrt()
            )));
        }
        if !(self.sigma >= 0.0) || !self.beta.is_finite() {
            return Err(StratoError::InvalidParam(
                "σ must be nonnegative and β finite".into(),
            ));
        }
        Ok(())
    }

    /// Upper limit `√(R²−α²)`.
    pub fn length(&self) -> f64 {
        (self.big_r * self.big_r - self.alpha * self.alpha).sqrt()
    }
}

pub fn f_alpha(alpha: f64, x: f64) -> f64 {
    alpha * x / (alpha * alpha + x * x).powf(1.5)
}

/// The critical point `α/√2` of `f_α` and the maximum `f_α(α/√2)`.
pub fn f_alpha_peak(alpha: f64) -> (f64, f64) {
    let x = alpha / 2f64.sqrt();
    (x, f_alpha(alpha, x))
}

/// Root of the monotone `g` on `[a, b]` (sign change assumed), by bisection.
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Breakpoints: the ends, the critical point and the roots of `f_α = β`,
/// where the integrand peaks.
fn breakpoints(s: &PhaseIntegralSpec) -> Vec<f64> {
    let l = s.length();
    let (xs, _) = f_alpha_peak(s.alpha);
    let g = |x: f64| f_alpha(s.alpha, x) - s.beta;
    let mut pts = vec![0.0, l];
    if xs < l {
        pts.push(xs);
    }
    let xm = xs.min(l);
    if g(0.0) * g(xm) < 0.0 {
        pts.push(bisect(g, 0.0, xm));
    }
    if xs < l && g(xs) * g(l) < 0.0 {
        pts.push(bisect(g, xs, l));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `I^R_{α,β}(σ)` by adaptive Gauss–Kronrod quadrature, absolute tolerance 1e−10.
pub fn eval_i_alpha_beta(spec: &PhaseIntegralSpec) -> Result<f64> {
    spec.validate()?;
    if spec.sigma == 0.0 {
        return Ok(spec.length());
    }
    let (a, b, s) = (spec.alpha, spec.beta, spec.sigma);
    let q = integrate_adaptive(
        |x| 1.0 / (1.0 + s * (f_alpha(a, x) - b).powi(2)),
        &breakpoints(spec),
        PHASE_ABS_TOL,
        1e-13,
        200_000,
    );
    if !q.converged {
        return Err(StratoError::Resolution(format!(
            "quadrature did not converge for {spec:?} (error {:e})",
            q.error
        )));
    }
    Ok(q.value)
}

fn eval(alpha: f64, beta: f64, big_r: f64, sigma: f64) -> Result<f64> {
    eval_i_alpha_beta(&PhaseIntegralSpec::new(alpha, beta, big_r, sigma)?)
}

/// Golden-section maximisation of `I` over `β ∈ [lo, hi]`.
fn golden_max(
    alpha: f64,
    big_r: f64,
    sigma: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval(alpha, x1, big_r, sigma)?;
    let mut f2 = eval(alpha, x2, big_r, sigma)?;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(alpha, x2, big_r, sigma)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(alpha, x1, big_r, sigma)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// A maximiser `β*` and the value `I(β*)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupPoint {
    pub beta: f64,
    pub value: f64,
}

/// `sup_{β ≥ 0} I^R_{α,β}(σ)`: a β-grid over `[0, max f_α + 3σ^{-1/2}]` with
/// spacing at most `σ^{-1/2}/2` (the width of the integrand's peaks), the
/// special heights `0`, `f_α(√(R²−α²))` and `max f_α` added, then
/// golden-section refinement around the best grid point.
pub fn sup_over_beta(alpha: f64, big_r: f64, sigma: f64) -> Result<SupPoint> {
    PhaseIntegralSpec::new(alpha, 0.0, big_r, sigma)?;
    if sigma == 0.0 {
        return Ok(SupPoint {
            beta: 0.0,
            value: eval(alpha, 0.0, big_r, 0.0)?,
        });
    }
    let w = sigma.powf(-0.5);
    let l = (big_r * big_r - alpha * alpha).sqrt();
    let (xs, fmax) = f_alpha_peak(alpha);
    let top = if xs < l { fmax } else { f_alpha(alpha, l) };
    let hi = top + 3.0 * w;
    let n = ((hi / (0.5 * w)).ceil() as usize).clamp(64, 200_000);
    let mut betas: Vec<f64> = (0..=n).map(|i| hi * i as f64 / n as f64).collect();
    betas.extend([f_alpha(alpha, l), top]);
    let vals: Vec<f64> = betas
        .par_iter()
        .map(|&b| eval(alpha, b, big_r, sigma))
        .collect::<Result<_>>()?;
    let (ib, _) = vals.iter().enumerate().fold(
        (0, f64::MIN),
        |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
    );
    let b0 = betas[ib];
    let step = hi / n as f64;
    let (b, v) = golden_max(
        alpha,
        big_r,
        sigma,
        (b0 - step).max(0.0),
        b0 + step,
        1e-6 * w,
    )?;
    Ok(if v >= vals[ib] {
        SupPoint { beta: b, value: v }
    } else {
        SupPoint {
            beta: b0,
            value: vals[ib],
        }
    })
}

/// Local maximum of `I` near the degenerate height `β₀ = max f_α`, searched on
/// `[β₀ − 2σ^{-1/2}, β₀ + σ^{-1/2}]`: the witness for the optimality of the
/// `σ^{-1/4}` rate.
pub fn witness_near_peak(alpha: f64, big_r: f64, sigma: f64) -> Result<SupPoint> {
    PhaseIntegralSpec::new(alpha, 0.0, big_r, sigma)?;
    let (xs, b0) = f_alpha_peak(alpha);
    if xs > (big_r * big_r - alpha * alpha).sqrt() {
        return Err(StratoError::InvalidParam(
            "critical point outside the integration range (need R ≥ √(3/2)α)".into(),
        ));
    }
    if sigma == 0.0 {
        return Ok(SupPoint {
            beta: b0,
            value: eval(alpha, b0, big_r, 0.0)?,
        });
    }
    let w = sigma.powf(-0.5);
    let (b, v) = golden_max(
        alpha,
        big_r,
        sigma,
        (b0 - 2.0 * w).max(0.0),
        b0 + w,
        1e-6 * w,
    )?;
    Ok(SupPoint { beta: b, value: v })
}

/// Outcome of a σ-sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ProptechStudy {
    pub alpha: f64,
    pub big_r: f64,
    pub sigmas: Vec<f64>,
    pub sup: Vec<SupPoint>,
    pub witness: Vec<SupPoint>,
    /// Log–log fit of `sup_β I` against `σ`.
    pub sup_fit: RateFit,
    /// Log–log fit of the witness against `σ`.
    pub witness_fit: RateFit,
}

/// Log-spaced σ values from `lo` to `hi`, `per_decade` per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

pub fn proptech_study(alpha: f64, big_r: f64, sigmas: &[f64]) -> Result<ProptechStudy> {
    let sup: Vec<SupPoint> = sigmas
        .iter()
        .map(|&s| sup_over_beta(alpha, big_r, s))
        .collect::<Result<_>>()?;
    let witness: Vec<SupPoint> = sigmas
        .par_iter()
        .map(|&s| witness_near_peak(alpha, big_r, s))
        .collect::<Result<_>>()?;
    let fit = |v: &[SupPoint]| {
        RateFit::loglog(sigmas, &v.iter().map(|p| p.value).collect::<Vec<_>>())
            .ok_or_else(|| StratoError::InvalidParam("need at least two positive σ".into()))
    };
    Ok(ProptechStudy {
        alpha,
        big_r,
        sigmas: sigmas.to_vec(),
        sup_fit: fit(&sup)?,
        witness_fit: fit(&witness)?,
        sup,
        witness,
    })
}

/// Fit of the witness value against `α` at fixed `σ`: the exponent should be
/// close to `3/2`.
pub fn witness_alpha_scaling(alphas: &[f64], big_r: f64, sigma: f64) -> Result<RateFit> {
    let v: Vec<f64> = alphas
        .par_iter()
        .map(|&a| witness_near_peak(a, big_r, sigma).map(|p| p.value))
        .collect::<Result<_>>()?;
    RateFit::loglog(alphas, &v)
        .ok_or_else(|| StratoError::InvalidParam("need at least two α values".into()))
}

/// `sup I·α^{11/2}σ^{1/4}/R⁷` over a lattice (with `min(1, σ^{-1/4})` in
/// place of `σ^{-1/4}`): the empirical constant of the upper bound.
pub fn upper_bound_constant(
    alphas: &[f64],
    betas: &[f64],
    big_rs: &[f64],
    sigmas: &[f64],
) -> Result<f64> {
    let mut pts = Vec::new();
    for &a in alphas {
        for &r in big_rs {
            if r < 2.0 * a / 3f64.sqrt() {
                continue;
            }
            for &b in betas {
                for &s in sigmas {
                    pts.push((a, b, r, s));
                }
            }
        }
    }
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&(a, b, r, s)| {
            eval(a, b, r, s).map(|v| v * a.powf(5.5) / (r.powi(7) * 1f64.min(s.powf(-0.25))))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_zero_gives_length() {
        let s = PhaseIntegralSpec::new(1.0, 0.2, 10.0, 0.0).unwrap();
        assert_eq!(eval_i_alpha_beta(&s).unwrap(), 99f64.sqrt());
    }

    #[test]
    fn small_r_rejected() {
        assert!(PhaseIntegralSpec::new(1.0, 0.0, 1.1, 1.0).is_err());
    }

    #[test]
    fn large_beta_limit() {
        let (a, r, s, b) = (1.0, 10.0, 50.0, 1e3);
        let v = eval(a, b, r, s).unwrap();
        let approx = 99f64.sqrt() / (s * b * b);
        assert!((v / approx - 1.0).abs() < 1e-2);
    }
}
