//! Differential and projection operators acting mode by mode.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Field4, Scalar3};
use super::grid::GridSpec;
use super::transform::{forward_real, inverse_real};
use crate::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Leray projection of one mode: `v̂ − ξ(ξ·v̂)/|ξ|²`, θ rides along.
#[inline]
pub fn leray_mode(xi: [f64; 3], m: [Complex64; 4]) -> [Complex64; 4] {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if k2 == 0.0 {
        return m;
    }
    let d = (m[0] * xi[0] + m[1] * xi[1] + m[2] * xi[2]) / k2;
    [m[0] - d * xi[0], m[1] - d * xi[1], m[2] - d * xi[2], m[3]]
}

/// Orthogonal projection of the velocity slots onto divergence-free fields.
pub fn leray_project(f: &Field4) -> Field4 {
    f.map_modes(|_, xi, m| leray_mode(xi, m))
}

/// Stratified part of one mode: `e_a (e_a·v̂_h)` with `e_a = ξ_h^⊥/|ξ_h|`.
///
/// This is `(∇_h^⊥ Δ_h^{-1} ω(f), 0, 0)` written mode-wise; modes with
/// `ξ_h = 0` carry no vorticity and get a zero stratified part.
#[inline]
pub fn stratified_mode(xi: [f64; 3], m: [Complex64; 4]) -> [Complex64; 4] {
    let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
    if kh2 == 0.0 {
        return [ZERO; 4];
    }
    let dot = (m[1] * xi[0] - m[0] * xi[1]) / kh2;
    [-dot * xi[1], dot * xi[0], ZERO, ZERO]
}

/// `ℙ₂ f`, the stratified part.
pub fn stratified_part(f: &Field4) -> Field4 {
    f.map_modes(|_, xi, m| stratified_mode(xi, m))
}

/// Splits `f = f_S + f_osc`.
pub fn decompose_stratified_oscillating(f: &Field4) -> (Field4, Field4) {
    let fs = stratified_part(f);
    let fo = f.sub(&fs);
    (fs, fo)
}

/// `ω(f) = ∂₁f² − ∂₂f¹`.
pub fn vorticity(f: &Field4) -> Scalar3 {
    let g = f.grid();
    let w = g.wavenumbers();
    let n = g.len();
    let data: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let [a, b, _] = g.unravel(idx);
            I * (f.comp(1)[idx] * w.kd[0][a] - f.comp(0)[idx] * w.kd[1][b])
        })
        .collect();
    Scalar3::from_coeffs(g.clone(), data)
}

/// `div v = ∂ᵢvⁱ` over the three velocity slots.
pub fn divergence(f: &Field4) -> Scalar3 {
    let g = f.grid();
    let w = g.wavenumbers();
    let data: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let [a, b, c] = g.unravel(idx);
            I * (f.comp(0)[idx] * w.kd[0][a]
                + f.comp(1)[idx] * w.kd[1][b]
                + f.comp(2)[idx] * w.kd[2][c])
        })
        .collect();
    Scalar3::from_coeffs(g.clone(), data)
}

/// Spectral derivative `∂_axis` of one coefficient array.
pub(crate) fn derivative(g: &GridSpec, data: &[Complex64], axis: usize) -> Vec<Complex64> {
    let w = g.wavenumbers();
    let (n2, n3) = (g.n[1], g.n[2]);
    data.par_iter()
        .enumerate()
        .map(|(idx, &v)| {
            let k = match axis {
                0 => w.kd[0][idx / (n2 * n3)],
                1 => w.kd[1][(idx / n3) % n2],
                _ => w.kd[2][idx % n3],
            };
            I * k * v
        })
        .collect()
}

pub fn scalar_derivative(s: &Scalar3, axis: usize) -> Scalar3 {
    Scalar3::from_coeffs(s.grid().clone(), derivative(s.grid(), s.coeffs(), axis))
}

pub(crate) fn dealias_in_place(g: &GridSpec, data: &mut [Complex64]) {
    let (n2, n3) = (g.n[1], g.n[2]);
    let keep: [Vec<bool>; 3] = [0, 1, 2].map(|a| (0..g.n[a]).map(|k| g.keeps(a, k)).collect());
    data.par_iter_mut().enumerate().for_each(|(idx, v)| {
        if !(keep[0][idx / (n2 * n3)] && keep[1][(idx / n3) % n2] && keep[2][idx % n3]) {
            *v = ZERO;
        }
    });
}

/// Pseudospectral `f·∇g = Σᵢ fⁱ ∂ᵢ g` for all four slots of `g`, dealiased.
pub fn advect(f: &Field4, g: &Field4) -> Result<Field4> {
    f.grid().ensure_same(g.grid())?;
    let grid = f.grid();
    let vel: Vec<Vec<f64>> = (0..3).map(|i| inverse_real(grid, f.comp(i))).collect();
    let mut out = Field4::zeros(grid);
    for c in 0..4 {
        let mut acc = vec![0.0; grid.len()];
        for (i, vi) in vel.iter().enumerate() {
            let d = inverse_real(grid, &derivative(grid, g.comp(c), i));
            acc.par_iter_mut()
                .zip(d.par_iter().zip(vi.par_iter()))
                .for_each(|(a, (dv, v))| *a += v * dv);
        }
        let mut spec = forward_real(grid, &acc)?;
        dealias_in_place(grid, &mut spec);
        out.comp_mut(c).copy_from_slice(&spec);
    }
    Ok(out)
}

/// Pointwise product of two scalar fields, dealiased.
pub fn product(a: &Scalar3, b: &Scalar3) -> Result<Scalar3> {
    a.grid().ensure_same(b.grid())?;
    let g = a.grid();
    let pa = inverse_real(g, a.coeffs());
    let pb = inverse_real(g, b.coeffs());
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let mut c = forward_real(g, &prod)?;
    dealias_in_place(g, &mut c);
    Ok(Scalar3::from_coeffs(g.clone(), c))
}

/// The constant matrix `ℬ` (only `ℬ₃₄ = 1`, `ℬ₄₃ = −1`) applied slot-wise.
pub fn apply_b(f: &Field4) -> Field4 {
    f.map_modes(|_, _, m| [ZERO, ZERO, m[3], -m[2]])
}

fn comp_scalar(f: &Field4, c: usize) -> Scalar3 {
    Scalar3::from_coeffs(f.grid().clone(), f.comp(c).to_vec())
}

fn rel_residual(lhs: &Scalar3, terms: &[(f64, Scalar3)]) -> f64 {
    let mut diff: Vec<Complex64> = lhs.coeffs().to_vec();
    let mut scale = lhs.energy().sqrt();
    for (sign, t) in terms {
        for (d, v) in diff.iter_mut().zip(t.coeffs()) {
            *d -= *sign * v;
        }
        scale = scale.max(t.energy().sqrt());
    }
    let r: f64 = diff.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        0.0
    } else {
        r / scale
    }
}

/// Relative residual of
/// `ω(f·∇f) = −∂₃f³ ω(f) + ∂₁f³ ∂₃f² − ∂₂f³ ∂₃f¹ + f·∇ω(f)`
/// for divergence-free `f`, all products dealiased.
pub fn vorticity_identity_residual(f: &Field4) -> Result<f64> {
    let w = vorticity(f);
    let lhs = vorticity(&advect(f, f)?);
    let d = |c: usize, axis: usize| scalar_derivative(&comp_scalar(f, c), axis);
    let mut terms = vec![
        (-1.0, product(&d(2, 2), &w)?),
        (1.0, product(&d(2, 0), &d(1, 2))?),
        (-1.0, product(&d(2, 1), &d(0, 2))?),
    ];
    for i in 0..3 {
        terms.push((1.0, product(&comp_scalar(f, i), &scalar_derivative(&w, i))?));
    }
    Ok(rel_residual(&lhs, &terms))
}

/// Relative residual of `ω(f·∇f) = f·∇ω(f)` (stratified `f`).
pub fn stratified_advection_residual(f: &Field4) -> Result<f64> {
    let w = vorticity(f);
    let lhs = vorticity(&advect(f, f)?);
    let terms = (0..3)
        .map(|i| Ok((1.0, product(&comp_scalar(f, i), &scalar_derivative(&w, i))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(rel_residual(&lhs, &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::transform::{scalar_forward, transform_forward};

    fn grid() -> GridSpec {
        GridSpec::cubic(16).unwrap()
    }

    fn samples(g: &GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        (0..g.len())
            .map(|i| {
                let [a, b, c] = g.unravel(i);
                f(g.coordinate(0, a), g.coordinate(1, b), g.coordinate(2, c))
            })
            .collect()
    }

    #[test]
    fn gradients_are_annihilated() {
        let g = grid();
        let phi = |x: f64, y: f64, z: f64| (x + 2.0 * y).sin() * z.cos();
        let d = [
            samples(&g, |x, y, z| (x + 2.0 * y).cos() * z.cos()),
            samples(&g, |x, y, z| 2.0 * (x + 2.0 * y).cos() * z.cos()),
            samples(&g, |x, y, z| -(x + 2.0 * y).sin() * z.sin()),
            samples(&g, phi),
        ];
        let f = transform_forward(&g, &d).unwrap();
        let p = leray_project(&f);
        for c in 0..3 {
            assert!(p.comp(c).iter().all(|v| v.norm() < 1e-13));
        }
        assert_eq!(p.comp(3), f.comp(3));
    }

    #[test]
    fn parallel_mode_projects_to_zero() {
        let one = Complex64::new(1.0, 0.0);
        let out = leray_mode([1.0, 0.0, 0.0], [one, ZERO, ZERO, ZERO]);
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn vorticity_of_shear() {
        let g = grid();
        let f = transform_forward(
            &g,
            &[
                samples(&g, |_, y, _| y.sin()),
                vec![0.0; g.len()],
                vec![0.0; g.len()],
                vec![0.0; g.len()],
            ],
        )
        .unwrap();
        let w = vorticity(&f);
        let expect = scalar_forward(&g, &samples(&g, |_, y, _| -y.cos())).unwrap();
        for (a, b) in w.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_transport() {
        let g = grid();
        let mut f = Field4::zeros(&g);
        let c = [0.3, -1.2, 0.7];
        for (i, ci) in c.iter().enumerate() {
            f.comp_mut(i)[0] = Complex64::new(*ci, 0.0);
        }
        let mut h = Field4::zeros(&g);
        let v = [
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.3, 0.0),
            Complex64::new(1.0, -1.0),
        ];
        h.set_mode_real([2, -1, 3], v);
        let out = advect(&f, &h).unwrap();
        let idx = g.index(2, 15, 3);
        let xi = g.xi(idx);
        let factor = I * (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]);
        for k in 0..4 {
            assert!((out.comp(k)[idx] - factor * v[k]).norm() < 1e-12);
        }
    }
}
