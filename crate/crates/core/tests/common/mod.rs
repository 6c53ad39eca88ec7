#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strato::spectral_core::{
    leray_project, scalar_forward, scalar_inverse, transform_inverse, Scalar3,
};
use strato::{Field4, GridSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real scalar with coefficients on `0 < |k| ≤ kmax`, decaying like `|k|^{-decay}`.
pub fn random_scalar(g: &GridSpec, r: &mut ChaCha8Rng, kmax: f64, decay: f64) -> Scalar3 {
    let mut data = vec![Complex64::new(0.0, 0.0); g.len()];
    for (i, d) in data.iter_mut().enumerate() {
        let xi = g.xi(i);
        let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        if k > 0.0 && k <= kmax && g.kept(i) {
            let amp = k.powf(-decay);
            *d = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)) * amp;
        }
    }
    // real part in physical space gives a Hermitian spectrum
    let s = Scalar3::from_coeffs(g.clone(), data);
    scalar_forward(g, &scalar_inverse(&s)).unwrap()
}

/// Random divergence-free dealiased field, all four slots populated,
/// normalised to unit peak speed.
pub fn random_field(g: &GridSpec, seed: u64, kmax: f64) -> Field4 {
    let mut r = rng(seed);
    let comps: [Vec<Complex64>; 4] =
        std::array::from_fn(|_| random_scalar(g, &mut r, kmax, 1.0).coeffs().to_vec());
    let mut f = leray_project(&Field4::from_components(g.clone(), comps));
    f.dealias();
    let s = max_speed(&f);
    f.scale(1.0 / s)
}

/// Largest pointwise velocity magnitude.
pub fn max_speed(f: &Field4) -> f64 {
    let p = transform_inverse(f);
    (0..p[0].len())
        .map(|i| (p[0][i].powi(2) + p[1][i].powi(2) + p[2][i].powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// Random horizontal field `∇_h^⊥ψ` in slots 0 and 1.
pub fn random_horizontal(g: &GridSpec, seed: u64, kmax: f64) -> Field4 {
    let mut r = rng(seed);
    let psi = random_scalar(g, &mut r, kmax, 2.0);
    let i = Complex64::new(0.0, 1.0);
    let zero = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut v1 = zero.clone();
    let mut v2 = zero.clone();
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        v1[idx] = -i * xi[1] * psi.coeffs()[idx];
        v2[idx] = i * xi[0] * psi.coeffs()[idx];
    }
    let f = Field4::from_components(g.clone(), [v1, v2, zero.clone(), zero]);
    let s = max_speed(&f);
    f.scale(1.0 / s)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `G̃` from its Fourier multipliers.
pub fn g_oracle(vh: &Field4) -> Field4 {
    // Ŝ from the advective form Σᵢ∂ᵢ(ṽ^h·∇_hṽⁱ), then the Fourier multipliers
    //   (iξ₁ξ₃²/(|ξ_h|²|ξ|²), iξ₂ξ₃²/(|ξ_h|²|ξ|²), −iξ₃/|ξ|², 0) · Ŝ
    let g = vh.grid();
    let i = Complex64::new(0.0, 1.0);
    let d = |c: &[Complex64], axis: usize| -> Vec<Complex64> {
        (0..g.len())
            .map(|idx| i * g.xi(idx)[axis] * c[idx])
            .collect()
    };
    let phys = |c: Vec<Complex64>| {
        strato::spectral_core::scalar_inverse(&strato::Scalar3::from_coeffs(g.clone(), c))
    };
    let v: Vec<Vec<f64>> = (0..2).map(|c| phys(vh.comp(c).to_vec())).collect();
    let mut s = vec![Complex64::new(0.0, 0.0); g.len()];
    for comp in 0..2 {
        let dx = phys(d(vh.comp(comp), 0));
        let dy = phys(d(vh.comp(comp), 1));
        let adv: Vec<f64> = (0..g.len())
            .map(|p| v[0][p] * dx[p] + v[1][p] * dy[p])
            .collect();
        let mut a = strato::spectral_core::scalar_forward(g, &adv)
            .unwrap()
            .coeffs()
            .to_vec();
        for (idx, x) in a.iter_mut().enumerate() {
            if !g.kept(idx) {
                *x = Complex64::new(0.0, 0.0);
            }
        }
        let da = d(&a, comp);
        s.iter_mut().zip(da).for_each(|(x, y)| *x += y);
    }
    vh.map_modes(|idx, xi, _| {
        let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
        let k2 = kh2 + xi[2] * xi[2];
        if kh2 == 0.0 {
            return [Complex64::new(0.0, 0.0); 4];
        }
        let q = s[idx];
        [
            i * xi[0] * xi[2] * xi[2] / (kh2 * k2) * q,
            i * xi[1] * xi[2] * xi[2] / (kh2 * k2) * q,
            -i * xi[2] / k2 * q,
            Complex64::new(0.0, 0.0),
        ]
    })
}
