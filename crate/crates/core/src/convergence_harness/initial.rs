//! Seeded initial data for the ε-sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{DataRecipe, Preparation};
use crate::pde_solvers::InitialData;
use crate::spectral_core::{
    hom_sobolev, leray_project, norm, scalar_forward, scalar_inverse, stratified_part,
    transform_forward, transform_inverse, Field1, Field4, GridSpec, NormSpec, Scalar3,
};
use crate::{Result, StratoError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest share of the packet's `Ḣ^{1/2+δ}` energy that may fall outside
/// the dealiased set before the data counts as unresolved.
pub const RESOLUTION_TOL: f64 = 0.05;

/// Band-limited random real coefficients on `0 < |ξ| ≤ kmax` with amplitude
/// `|ξ|^{-decay}` (Hermitian, so the field is real).
pub(crate) fn random_band(
    grid: &GridSpec,
    rng: &mut ChaCha8Rng,
    kmax: f64,
    decay: f64,
) -> Result<Vec<Complex64>> {
    let mut c = vec![ZERO; grid.len()];
    for (i, v) in c.iter_mut().enumerate() {
        let xi = grid.xi(i);
        let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if k > 0.0 && k <= kmax && grid.kept(i) {
            *v = Complex64::new(a, b) * k.powf(-decay);
        }
    }
    // the real part in physical space has a Hermitian spectrum
    let s = scalar_inverse(&Scalar3::from_coeffs(grid.clone(), c));
    Ok(scalar_forward(grid, &s)?.coeffs().to_vec())
}

/// `∇_h^⊥ψ` for a random band-limited stream function, in slots 0 and 1.
fn random_stratified(grid: &GridSpec, rng: &mut ChaCha8Rng, kmax: f64) -> Result<Field4> {
    let psi = random_band(grid, rng, kmax, 2.0)?;
    let i = Complex64::new(0.0, 1.0);
    let mut u = vec![ZERO; grid.len()];
    let mut v = vec![ZERO; grid.len()];
    for idx in 0..grid.len() {
        let xi = grid.xi(idx);
        u[idx] = -i * xi[1] * psi[idx];
        v[idx] = i * xi[0] * psi[idx];
    }
    let mut f = Field4::from_components(
        grid.clone(),
        [u, v, vec![ZERO; grid.len()], vec![ZERO; grid.len()]],
    );
    f.dealias();
    Ok(f)
}

/// A random vertical profile with `|ξ₃|^{-1}` weights on `1 ≤ |k₃| ≤ kmax`,
/// normalised to unit `Ḣ^{−1/4+δ}` norm.
fn random_profile(grid: &GridSpec, rng: &mut ChaCha8Rng, kmax: f64, delta: f64) -> Result<Field1> {
    let n3 = grid.n[2];
    let mut th = Field1::for_grid(grid);
    for k in 1..n3 {
        let ks = GridSpec::signed(k, n3);
        if ks <= 0 || !grid.keeps(2, k) {
            continue;
        }
        let kk = th.wavenumber(k).abs();
        if kk > kmax {
            continue;
        }
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) / kk;
        th.coeffs_mut()[k] = c;
        th.coeffs_mut()[GridSpec::unsigned(-ks, n3)] = c.conj();
    }
    let s = th.hom_sobolev(delta - 0.25);
    if s == 0.0 {
        return Err(StratoError::Resolution(
            "no vertical mode available for the temperature profile".into(),
        ));
    }
    for c in th.coeffs_mut() {
        *c /= s;
    }
    Ok(th)
}

/// A localized oscillating packet: random divergence-free carrier times a
/// Gaussian envelope, with its stratified part and `ξ_h = 0` modes removed.
fn oscillating_packet(
    grid: &GridSpec,
    rng: &mut ChaCha8Rng,
    recipe: &DataRecipe,
) -> Result<Field4> {
    let s = 0.5 + recipe.delta;
    let carrier: [Vec<Complex64>; 4] = [
        random_band(grid, rng, recipe.kmax, 0.0)?,
        random_band(grid, rng, recipe.kmax, 0.0)?,
        random_band(grid, rng, recipe.kmax, 0.0)?,
        random_band(grid, rng, recipe.kmax, 0.0)?,
    ];
    let phys = transform_inverse(&Field4::from_components(grid.clone(), carrier));
    let w2 = 2.0 * recipe.width * recipe.width;
    let env: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let ijk = grid.unravel(idx);
            let r2: f64 = (0..3)
                .map(|a| (grid.coordinate(a, ijk[a]) - 0.5 * grid.lengths[a]).powi(2))
                .sum();
            (-r2 / w2).exp()
        })
        .collect();
    let samples: [Vec<f64>; 4] =
        std::array::from_fn(|c| phys[c].iter().zip(&env).map(|(a, e)| a * e).collect());
    let raw = transform_forward(grid, &samples)?;
    let raw = leray_project(&raw);
    let raw = raw.sub(&stratified_part(&raw)).map_modes(|_, xi, m| {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            [ZERO; 4]
        } else {
            m
        }
    });
    let mut f = raw.clone();
    f.dealias();
    let (kept, total) = (hom_sobolev(&f, s), hom_sobolev(&raw, s));
    if kept == 0.0 {
        return Err(StratoError::Resolution(
            "the oscillating packet vanishes on this grid".into(),
        ));
    }
    let lost = 1.0 - (kept / total).powi(2);
    if lost > RESOLUTION_TOL {
        return Err(StratoError::Resolution(format!(
            "packet of width {} loses {lost:.2e} of its Ḣ^{s} energy to dealiasing (limit {RESOLUTION_TOL:e}); refine the grid or widen the packet",
            recipe.width
        )));
    }
    Ok(f)
}

/// Initial data for a given `ε`. Every random draw is taken from one
/// ChaCha8 stream seeded by `recipe.seed`, in a fixed order, so the result is
/// bit-reproducible and the ε-dependence enters only through the amplitudes:
///
/// * `ṽ₀^h = ∇_h^⊥ψ` with `‖ṽ₀^h‖_{H^{1/2+δ}} = 𝔠₀`;
/// * `U₀_S^h = ṽ₀^h + 𝔠₀ε^{α₀} ∇_h^⊥ψ′` (normalised the same way);
/// * `U₀_osc` a localized packet with `‖U₀_osc‖_{Ḣ^{1/2+δ}} = 𝔠₀ε^{−γ}`;
/// * `θ̃₀` with unit `Ḣ^{−1/4+δ}` norm times `𝔠₀`, `θ̃₀ε = θ̃₀ + 𝔠₀ε^{α₀}θ′`.
///
/// Well-prepared recipes drop the oscillating part and both defects.
pub fn generate_initial_data(
    recipe: &DataRecipe,
    grid: &GridSpec,
    eps: f64,
) -> Result<InitialData> {
    recipe
        .validate()
        .map_err(|e| StratoError::InvalidParam(e.to_string()))?;
    if !(eps > 0.0) {
        return Err(StratoError::InvalidParam(format!(
            "eps = {eps} must be positive"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let s = 0.5 + recipe.delta;
    let inhom = NormSpec::Sobolev { s };
    let unit = |f: Field4| -> Result<Field4> {
        let n = norm(&f, &inhom)?;
        if n == 0.0 {
            return Err(StratoError::Resolution(
                "random stratified field vanishes on this grid".into(),
            ));
        }
        Ok(f.scale(1.0 / n))
    };
    let v0_h = unit(random_stratified(grid, &mut rng, recipe.kmax)?)?.scale(recipe.c0);
    let defect = unit(random_stratified(grid, &mut rng, recipe.kmax)?)?;
    let mut theta0 = random_profile(grid, &mut rng, recipe.kmax, recipe.delta)?;
    for c in theta0.coeffs_mut() {
        *c *= recipe.c0;
    }
    let theta_defect = random_profile(grid, &mut rng, recipe.kmax, recipe.delta)?;
    let packet = oscillating_packet(grid, &mut rng, recipe)?;

    if recipe.prepared == Preparation::Well {
        return Ok(InitialData {
            u0_s: v0_h.clone(),
            u0_osc: Field4::zeros(grid),
            theta0_eps: theta0.clone(),
            v0_h,
            theta0,
        });
    }
    let rate = recipe.c0 * eps.powf(recipe.alpha0);
    let mut u0_s = v0_h.clone();
    u0_s.axpy(rate, &defect);
    let mut theta0_eps = theta0.clone();
    theta0_eps.axpy(rate, &theta_defect);
    let u0_osc = packet.scale(recipe.c0 * eps.powf(-recipe.gamma) / hom_sobolev(&packet, s));
    Ok(InitialData {
        u0_s,
        u0_osc,
        theta0_eps,
        v0_h,
        theta0,
    })
}
