//! Empirical constants for the harmonic-analysis inequalities used along the
//! way: heat flow on an annulus, Bernstein (isotropic and anisotropic) and
//! Besov/Sobolev interpolation. Each check returns the supremum of the ratio
//! `lhs / rhs` over a sample set; the inequality "holds" when that supremum is
//! finite and stays put when the sample set or grid is refined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::spectral_core::{chi, hom_sobolev, norm, transform_forward, Field4, GridSpec, NormSpec};
use crate::{Result, StratoError};

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub samples: usize,
    /// `sup lhs/rhs`: the smallest constant that works on the samples.
    pub constant: f64,
    pub min_ratio: f64,
}

impl InequalityReport {
    fn new(name: impl Into<String>) -> Self {
        InequalityReport {
            name: name.into(),
            samples: 0,
            constant: 0.0,
            min_ratio: f64::INFINITY,
        }
    }

    fn push(&mut self, ratio: f64) {
        self.samples += 1;
        self.constant = self.constant.max(ratio);
        self.min_ratio = self.min_ratio.min(ratio);
    }

    pub fn finite(&self) -> bool {
        self.samples > 0 && self.constant.is_finite()
    }
}

/// A random real scalar (slot 3 of a [`Field4`]) whose spectrum is the
/// restriction of white noise to `keep(ξ)`. Returns `None` if nothing survives.
pub fn random_band_limited(
    grid: &GridSpec,
    seed: u64,
    keep: impl Fn([f64; 3]) -> bool + Sync,
) -> Result<Option<Field4>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..grid.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let zero = vec![0.0; grid.len()];
    let mut f = transform_forward(grid, &[zero.clone(), zero.clone(), zero, samples])?;
    f.dealias();
    let f = f.map_modes(|_, xi, m| {
        if keep(xi) {
            m
        } else {
            [num_complex::Complex64::new(0.0, 0.0); 4]
        }
    });
    Ok((f.coefficient_energy() > 0.0).then_some(f))
}

fn annulus(r: f64, big_r: f64) -> impl Fn([f64; 3]) -> bool + Sync {
    move |xi: [f64; 3]| {
        let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        k >= r && k <= big_r
    }
}

fn check_annulus(r: f64, big_r: f64) -> Result<()> {
    if !(r > 0.0 && big_r > r) {
        return Err(StratoError::InvalidTruncation { r, big_r });
    }
    Ok(())
}

/// `‖e^{tΔ}u‖_p ≤ C (R³/r⁴) e^{−t r²/2} ‖u‖_p` for `û` supported in
/// `r ≤ |ξ| ≤ R`: reports `C = sup ‖e^{tΔ}u‖_p / ‖u‖_p · e^{t r²/2} r⁴/R³`.
pub fn check_heat_annulus(
    grid: &GridSpec,
    r: f64,
    big_r: f64,
    p: f64,
    times: &[f64],
    fields: &[Field4],
) -> Result<InequalityReport> {
    check_annulus(r, big_r)?;
    let spec = NormSpec::Lebesgue { p };
    let mut rep = InequalityReport::new(format!("heat annulus p={p}"));
    for f in fields {
        grid.ensure_same(f.grid())?;
        let base = norm(f, &spec)?;
        if base == 0.0 {
            continue;
        }
        for &t in times {
            if t < 0.0 {
                return Err(StratoError::NegativeTime(t));
            }
            let g = f.map_modes(|_, xi, m| {
                let d = (-t * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])).exp();
                m.map(|v| v * d)
            });
            rep.push(norm(&g, &spec)? / base * (0.5 * t * r * r).exp() * r.powi(4) / big_r.powi(3));
        }
    }
    Ok(rep)
}

/// `‖|D|^a u‖_p ≤ C R^a ‖u‖_p` for `û` supported in `r ≤ |ξ| ≤ R`.
pub fn bernstein_constant(
    grid: &GridSpec,
    r: f64,
    big_r: f64,
    a: f64,
    p: f64,
    seeds: std::ops::Range<u64>,
) -> Result<InequalityReport> {
    check_annulus(r, big_r)?;
    let spec = NormSpec::Lebesgue { p };
    let mut rep = InequalityReport::new(format!("bernstein a={a} p={p}"));
    for seed in seeds {
        let Some(f) = random_band_limited(grid, seed, annulus(r, big_r))? else {
            continue;
        };
        let g = f.map_modes(|_, xi, m| {
            let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            m.map(|v| v * k.powf(a))
        });
        rep.push(norm(&g, &spec)? / (big_r.powf(a) * norm(&f, &spec)?));
    }
    Ok(rep)
}

/// `‖χ(|D|/R) χ(|D_h|/r) f‖_p ≤ C (R r²)^{1/q − 1/p} ‖f‖_q` over random
/// dealiased `f`.
pub fn aniso_bernstein_constant(
    grid: &GridSpec,
    r: f64,
    big_r: f64,
    p: f64,
    q: f64,
    seeds: std::ops::Range<u64>,
) -> Result<InequalityReport> {
    check_annulus(r, big_r)?;
    let mut rep = InequalityReport::new(format!("aniso bernstein p={p} q={q}"));
    let gain = (big_r * r * r).powf(1.0 / q - 1.0 / p);
    for seed in seeds {
        let Some(f) = random_band_limited(grid, seed, |_| true)? else {
            continue;
        };
        let g = f.map_modes(|_, xi, m| {
            let kh = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            let k = (kh * kh + xi[2] * xi[2]).sqrt();
            let w = chi(k / big_r) * chi(kh / r);
            m.map(|v| v * w)
        });
        let lhs = norm(&g, &NormSpec::Lebesgue { p })?;
        let rhs = gain * norm(&f, &NormSpec::Lebesgue { p: q })?;
        rep.push(lhs / rhs);
    }
    Ok(rep)
}

/// `‖u‖_{Ḃ^s_{2,1}} ≤ C ‖u‖_{Ḣ^{s−α}}^{β/(α+β)} ‖u‖_{Ḣ^{s+β}}^{α/(α+β)}` over
/// random band-limited `u` supported in `r ≤ |ξ| ≤ R`.
pub fn interpolation_constant(
    grid: &GridSpec,
    s: f64,
    alpha: f64,
    beta: f64,
    r: f64,
    big_r: f64,
    seeds: std::ops::Range<u64>,
) -> Result<InequalityReport> {
    check_annulus(r, big_r)?;
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(StratoError::InvalidParam(
            "interpolation needs α, β > 0".into(),
        ));
    }
    let mut rep = InequalityReport::new(format!("interpolation s={s} α={alpha} β={beta}"));
    let w = alpha + beta;
    for seed in seeds {
        let Some(u) = random_band_limited(grid, seed, annulus(r, big_r))? else {
            continue;
        };
        let lhs = norm(&u, &NormSpec::Besov { s, p: 2.0, q: 1.0 })?;
        let rhs =
            hom_sobolev(&u, s - alpha).powf(beta / w) * hom_sobolev(&u, s + beta).powf(alpha / w);
        rep.push(lhs / rhs);
    }
    Ok(rep)
}
