//! Quadratic terms in conservative form, evaluated pseudospectrally with the
//! 2/3 rule. Because all products are dealiased the truncated system keeps the
//! exact energy identity of the continuous one.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectral_core::{
    dealias_in_place, forward_real, inverse_real, leray_mode, Field4, GridSpec, Scalar3,
};
use crate::Result;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn velocity_samples(u: &Field4, slots: usize) -> Vec<Vec<f64>> {
    let g = u.grid();
    (0..slots)
        .into_par_iter()
        .map(|c| inverse_real(g, u.comp(c)))
        .collect()
}

fn max_speed(vel: &[Vec<f64>]) -> f64 {
    let n = vel[0].len();
    (0..n)
        .into_par_iter()
        .map(|p| vel.iter().map(|v| v[p] * v[p]).sum::<f64>().sqrt())
        .reduce(|| 0.0, f64::max)
}

fn dealiased_product(g: &GridSpec, a: &[f64], b: &[f64]) -> Result<Vec<Complex64>> {
    let prod: Vec<f64> = a.par_iter().zip(b.par_iter()).map(|(x, y)| x * y).collect();
    let mut c = forward_real(g, &prod)?;
    dealias_in_place(g, &mut c);
    Ok(c)
}

/// `−ℙ div(v ⊗ U)` for the full system, plus `max |v|`.
pub(crate) fn stratified_nonlinearity(u: &Field4) -> Result<(Field4, f64)> {
    let g = u.grid();
    let phys = velocity_samples(u, 4);
    let vmax = max_speed(&phys[..3]);
    // flux[j][c] = (v^j U^c)^, symmetric in the velocity slots
    let pairs: Vec<(usize, usize)> = (0..3).flat_map(|j| (j..4).map(move |c| (j, c))).collect();
    let prods: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(j, c)| dealiased_product(g, &phys[j], &phys[c]))
        .collect::<Result<_>>()?;
    let lookup = |j: usize, c: usize| -> &Vec<Complex64> {
        let (a, b) = if c < 3 && c < j { (c, j) } else { (j, c) };
        &prods[pairs.iter().position(|&p| p == (a, b)).unwrap()]
    };
    let flux: Vec<Vec<&Vec<Complex64>>> = (0..3)
        .map(|j| (0..4).map(|c| lookup(j, c)).collect())
        .collect();
    let w = g.wavenumbers();
    let (n2, n3) = (g.n[1], g.n[2]);
    let modes: Vec<[Complex64; 4]> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let kd = [
                w.kd[0][idx / (n2 * n3)],
                w.kd[1][(idx / n3) % n2],
                w.kd[2][idx % n3],
            ];
            let m: [Complex64; 4] = std::array::from_fn(|c| {
                -I * (0..3).map(|j| flux[j][c][idx] * kd[j]).sum::<Complex64>()
            });
            leray_mode(g.xi(idx), m)
        })
        .collect();
    Ok((Field4::from_modes(g, &modes), vmax))
}

/// Dealiased `(ṽ¹ṽ¹, ṽ¹ṽ², ṽ²ṽ²)^` for a horizontal field stored in slots 0, 1,
/// plus `max |ṽ^h|`.
pub(crate) fn horizontal_products(u: &Field4) -> Result<([Vec<Complex64>; 3], f64)> {
    let g = u.grid();
    let phys = velocity_samples(u, 2);
    let vmax = max_speed(&phys);
    let p11 = dealiased_product(g, &phys[0], &phys[0])?;
    let p12 = dealiased_product(g, &phys[0], &phys[1])?;
    let p22 = dealiased_product(g, &phys[1], &phys[1])?;
    Ok(([p11, p12, p22], vmax))
}

/// `Ŝ = (Σ ∂ᵢ∂ⱼ(ṽⁱṽʲ))^ = −Σ ξᵢξⱼ P̂ᵢⱼ` at one mode.
#[inline]
fn source_s(xi: [f64; 3], p: &[Vec<Complex64>; 3], idx: usize) -> Complex64 {
    -(p[0][idx] * (xi[0] * xi[0]) + p[1][idx] * (2.0 * xi[0] * xi[1]) + p[2][idx] * (xi[1] * xi[1]))
}

/// `−ℙ_h div_h(ṽ^h ⊗ ṽ^h)` where `ℙ_h` is the horizontal Leray projector
/// (identity on modes with `ξ_h = 0`).
pub(crate) fn horizontal_nonlinearity(g: &GridSpec, p: &[Vec<Complex64>; 3]) -> Field4 {
    let modes: Vec<[Complex64; 4]> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let xi = g.xi(idx);
            let a = -I * (p[0][idx] * xi[0] + p[1][idx] * xi[1]);
            let b = -I * (p[1][idx] * xi[0] + p[2][idx] * xi[1]);
            let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
            if kh2 == 0.0 {
                return [a, b, ZERO, ZERO];
            }
            let d = (a * xi[0] + b * xi[1]) / kh2;
            [a - d * xi[0], b - d * xi[1], ZERO, ZERO]
        })
        .collect();
    Field4::from_modes(g, &modes)
}

/// `π̂⁰ = Ŝ / |ξ_h|²`, zero where `ξ_h = 0`.
pub(crate) fn pressure_from_products(g: &GridSpec, p: &[Vec<Complex64>; 3]) -> Scalar3 {
    let data: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let xi = g.xi(idx);
            let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
            if kh2 == 0.0 {
                ZERO
            } else {
                source_s(xi, p, idx) / kh2
            }
        })
        .collect();
    Scalar3::from_coeffs(g.clone(), data)
}

/// `G̃ = ℙ(∂₁π̃⁰, ∂₂π̃⁰, 0, 0)`, computed by applying the Leray projector to the
/// horizontal pressure gradient.
pub(crate) fn g_tilde_from_products(g: &GridSpec, p: &[Vec<Complex64>; 3]) -> Field4 {
    let pi = pressure_from_products(g, p);
    let modes: Vec<[Complex64; 4]> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let xi = g.xi(idx);
            let q = pi.coeffs()[idx];
            leray_mode(xi, [I * xi[0] * q, I * xi[1] * q, ZERO, ZERO])
        })
        .collect();
    Field4::from_modes(g, &modes)
}
