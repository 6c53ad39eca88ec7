//! Exact linear propagation: `e^{t𝔹}` and the φ-functions used by the
//! exponential integrators, built mode by mode.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::{check_validity, numeric_eigendecomposition};
use super::params::PhysParams;
use super::symbol::symbol_real;
use crate::spectral_core::{Field4, TruncationSpec};
use crate::{Result, StratoError};

/// A mode-wise linear generator.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `L − ε⁻¹ℙℬ`; the optional spec marks where the eigen-expansion is trusted.
    Stratified {
        params: PhysParams,
        spec: Option<TruncationSpec>,
    },
    /// Pure diffusion: rate `ν|ξ|²` on the velocity slots and `ν′|ξ|²` on θ.
    Heat { nu: f64, nu_prime: f64 },
}

/// `[φ₀(z), φ₁(z), φ₂(z), φ₃(z)]` with `φ₀ = e^z`, `φ_{k+1}(z) = (φ_k(z) − 1/k!)/z`.
pub fn phi_scalar(z: Complex64) -> [Complex64; 4] {
    if z.norm() < 1.0 {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (k, o) in out.iter_mut().enumerate() {
            // Σ_m z^m / (m+k)!
            let mut term = Complex64::new(1.0, 0.0);
            for j in 1..=k {
                term /= j as f64;
            }
            let mut acc = term;
            for m in 1..30 {
                term *= z / (m + k) as f64;
                acc += term;
            }
            *o = acc;
        }
        return out;
    }
    let e = z.exp();
    let p1 = (e - 1.0) / z;
    let p2 = (p1 - 1.0) / z;
    let p3 = (p2 - 0.5) / z;
    [e, p1, p2, p3]
}

/// Does this mode go through the eigen-expansion (true) or a direct matrix
/// exponential (false)?
fn use_expansion(xi: [f64; 3], p: &PhysParams, spec: Option<&TruncationSpec>) -> bool {
    if xi[0] == 0.0 && xi[1] == 0.0 {
        return false;
    }
    match spec {
        Some(s) if !p.equal_diffusion() => check_validity(xi, p, Some(s)).is_ok(),
        _ => true,
    }
}

/// `[e^{A}, φ₁(A), φ₂(A), φ₃(A)]` for `A = h·𝔹(ξ)`.
fn dense_phis(b: &Matrix4<f64>, h: f64, expansion: bool) -> [Matrix4<f64>; 4] {
    if expansion {
        let ne = numeric_eigendecomposition(&b.map(|x| Complex64::new(x, 0.0)));
        if !ne.defective && !ne.labels_ambiguous {
            let mut out = [Matrix4::<Complex64>::zeros(); 4];
            for k in 0..4 {
                let ph = phi_scalar(ne.eigenvalues[k] * h);
                for (o, f) in out.iter_mut().zip(ph) {
                    *o += ne.projectors[k] * f;
                }
            }
            return out.map(|m| m.map(|z| z.re));
        }
    }
    augmented_phis(b, h)
}

/// φ-functions from the exponential of the block matrix
/// `[[A, I, 0, 0], [0, 0, I, 0], [0, 0, 0, I], [0, 0, 0, 0]]`.
fn augmented_phis(b: &Matrix4<f64>, h: f64) -> [Matrix4<f64>; 4] {
    let mut m = DMatrix::<f64>::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = h * b[(i, j)];
        }
        m[(i, 4 + i)] = 1.0;
        m[(4 + i, 8 + i)] = 1.0;
        m[(8 + i, 12 + i)] = 1.0;
    }
    let e = m.exp();
    std::array::from_fn(|blk| Matrix4::from_fn(|i, j| e[(i, 4 * blk + j)]))
}

/// Direct `e^{t𝔹}` by scaling and squaring (the fallback route).
pub fn matrix_exponential(b: &Matrix4<f64>, t: f64) -> Matrix4<f64> {
    (b * t).exp()
}

fn mode_generator(gen: &Generator, xi: [f64; 3]) -> (Matrix4<f64>, bool) {
    match gen {
        Generator::Stratified { params, spec } => (
            symbol_real(xi, params),
            use_expansion(xi, params, spec.as_ref()),
        ),
        Generator::Heat { nu, nu_prime } => {
            let k2 = xi.iter().map(|x| x * x).sum::<f64>();
            (
                Matrix4::from_diagonal(&nalgebra::Vector4::new(
                    -nu * k2,
                    -nu * k2,
                    -nu * k2,
                    -nu_prime * k2,
                )),
                false,
            )
        }
    }
}

/// `e^{t𝔹(ξ)}` for one mode.
pub fn mode_exponential(gen: &Generator, xi: [f64; 3], t: f64) -> Matrix4<f64> {
    let (b, expansion) = mode_generator(gen, xi);
    if let Generator::Heat { .. } = gen {
        return Matrix4::from_diagonal(&b.diagonal().map(|d| (d * t).exp()));
    }
    if expansion {
        let ne = numeric_eigendecomposition(&b.map(|x| Complex64::new(x, 0.0)));
        if !ne.defective && !ne.labels_ambiguous {
            let mut acc = Matrix4::<Complex64>::zeros();
            for k in 0..4 {
                acc += ne.projectors[k] * (ne.eigenvalues[k] * t).exp();
            }
            return acc.map(|z| z.re);
        }
    }
    matrix_exponential(&b, t)
}

/// φ-functions of `h𝔹(ξ)` for one mode.
pub fn mode_phis(gen: &Generator, xi: [f64; 3], h: f64) -> [Matrix4<f64>; 4] {
    let (b, expansion) = mode_generator(gen, xi);
    if let Generator::Heat { .. } = gen {
        let d = b.diagonal();
        let mut out = [Matrix4::zeros(); 4];
        for i in 0..4 {
            let ph = phi_scalar(Complex64::new(d[i] * h, 0.0));
            for (o, f) in out.iter_mut().zip(ph) {
                o[(i, i)] = f.re;
            }
        }
        return out;
    }
    dense_phis(&b, h, expansion)
}

/// Applies per-mode real matrices to a field.
pub fn apply_mode_matrices(mats: &[Matrix4<f64>], f: &Field4) -> Field4 {
    let g = f.grid();
    let out: Vec<[Complex64; 4]> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let m = &mats[i];
            let v = f.mode(i);
            std::array::from_fn(|r| {
                v[0] * m[(r, 0)] + v[1] * m[(r, 1)] + v[2] * m[(r, 2)] + v[3] * m[(r, 3)]
            })
        })
        .collect();
    Field4::from_modes(g, &out)
}

/// Divergence tolerance for fields handed to the exact propagator.
pub const DIV_FREE_TOL: f64 = 1e-10;

/// `f̂(t,ξ) = Σ_k e^{tλ_k}𝒫_k f̂(0,ξ)` (matrix exponential where the expansion
/// is not available).
pub fn propagate_semigroup(
    f: &Field4,
    t: f64,
    params: &PhysParams,
    spec: Option<&TruncationSpec>,
) -> Result<Field4> {
    if t < 0.0 {
        return Err(StratoError::NegativeTime(t));
    }
    let res = f.divergence_residual();
    if res > DIV_FREE_TOL {
        return Err(StratoError::NotDivergenceFree(res));
    }
    let gen = Generator::Stratified {
        params: *params,
        spec: spec.cloned(),
    };
    Ok(propagate_with(&gen, f, t))
}

pub(crate) fn propagate_with(gen: &Generator, f: &Field4, t: f64) -> Field4 {
    let g = f.grid();
    let mats: Vec<Matrix4<f64>> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            if f.mode(i).iter().all(|v| v.re == 0.0 && v.im == 0.0) {
                Matrix4::zeros()
            } else {
                mode_exponential(gen, g.xi(i), t)
            }
        })
        .collect();
    apply_mode_matrices(&mats, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_series_and_closed_form_agree_at_switch() {
        for z in [
            Complex64::new(0.999, 0.0),
            Complex64::new(-0.3, 0.94),
            Complex64::new(0.0, -0.99),
        ] {
            let s = phi_scalar(z);
            let zz = z * (1.0 + 1e-9);
            let e = zz.exp();
            let p1 = (e - 1.0) / zz;
            let p2 = (p1 - 1.0) / zz;
            let p3 = (p2 - 0.5) / zz;
            for (a, b) in s.iter().zip([e, p1, p2, p3]) {
                assert!((a - b).norm() < 1e-7, "{a} vs {b}");
            }
        }
        let zero = phi_scalar(Complex64::new(0.0, 0.0));
        assert!((zero[3].re - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn expansion_and_augmented_routes_agree() {
        let p = PhysParams::new(0.3, 0.3, 0.05).unwrap();
        let b = symbol_real([1.0, -2.0, 1.5], &p);
        let a = dense_phis(&b, 0.01, true);
        let c = augmented_phis(&b, 0.01);
        for k in 0..4 {
            assert!((a[k] - c[k]).norm() < 1e-10 * (1.0 + c[k].norm()), "phi{k}");
        }
        let e = mode_exponential(
            &Generator::Stratified {
                params: p,
                spec: None,
            },
            [1.0, -2.0, 1.5],
            0.7,
        );
        assert!((e - matrix_exponential(&b, 0.7)).norm() < 1e-10);
    }

    #[test]
    fn mean_mode_rotates() {
        let p = PhysParams::new(1.0, 1.0, 0.5).unwrap();
        let e = mode_exponential(
            &Generator::Stratified {
                params: p,
                spec: None,
            },
            [0.0; 3],
            0.25,
        );
        let th = 0.5f64; // t/ε
        assert!((e[(2, 2)] - th.cos()).abs() < 1e-14);
        assert!((e[(3, 2)] - th.sin()).abs() < 1e-14);
    }
}
