use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::GridSpec;
use crate::{Result, StratoError};

/// Four real arrays of physical samples, one per component.
pub type Physical4 = [Vec<f64>; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// State `U = (v¹, v², v³, θ)` as Fourier coefficients on a periodic grid.
///
/// Components are stored as four separate arrays so that scalar kernels can
/// work on one slot at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct Field4 {
    grid: GridSpec,
    data: [Vec<Complex64>; 4],
}

impl Field4 {
    pub fn zeros(grid: &GridSpec) -> Self {
        let n = grid.len();
        Field4 {
            grid: grid.clone(),
            data: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    pub fn from_components(grid: GridSpec, data: [Vec<Complex64>; 4]) -> Self {
        for d in &data {
            assert_eq!(d.len(), grid.len(), "component length does not match grid");
        }
        Field4 { grid, data }
    }

    /// Sets the four coefficients at the mode `(k1,k2,k3)` (signed) and the
    /// conjugates at `−k`, producing a real field.
    pub fn set_mode_real(&mut self, k: [i64; 3], value: [Complex64; 4]) {
        let g = &self.grid;
        let idx = g.index(
            GridSpec::unsigned(k[0], g.n[0]),
            GridSpec::unsigned(k[1], g.n[1]),
            GridSpec::unsigned(k[2], g.n[2]),
        );
        let jdx = g.index(
            GridSpec::unsigned(-k[0], g.n[0]),
            GridSpec::unsigned(-k[1], g.n[1]),
            GridSpec::unsigned(-k[2], g.n[2]),
        );
        for c in 0..4 {
            self.data[c][idx] = value[c];
            self.data[c][jdx] = value[c].conj();
        }
        if idx == jdx {
            for c in 0..4 {
                self.data[c][idx] = Complex64::new(value[c].re, 0.0);
            }
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.data[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 4] {
        &self.data
    }

    pub fn into_components(self) -> [Vec<Complex64>; 4] {
        self.data
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; 4] {
        [
            self.data[0][idx],
            self.data[1][idx],
            self.data[2][idx],
            self.data[3][idx],
        ]
    }

    #[inline]
    pub fn set_mode(&mut self, idx: usize, v: [Complex64; 4]) {
        for c in 0..4 {
            self.data[c][idx] = v[c];
        }
    }

    /// Applies `op(idx, ξ, mode)` to every mode in parallel.
    pub fn map_modes<F>(&self, op: F) -> Field4
    where
        F: Fn(usize, [f64; 3], [Complex64; 4]) -> [Complex64; 4] + Sync,
    {
        let g = &self.grid;
        let out: Vec<[Complex64; 4]> = (0..g.len())
            .into_par_iter()
            .map(|i| op(i, g.xi(i), self.mode(i)))
            .collect();
        Field4::from_modes(g, &out)
    }

    pub(crate) fn from_modes(grid: &GridSpec, modes: &[[Complex64; 4]]) -> Field4 {
        let mut f = Field4::zeros(grid);
        for c in 0..4 {
            f.data[c]
                .par_iter_mut()
                .zip(modes.par_iter())
                .for_each(|(d, m)| *d = m[c]);
        }
        f
    }

    pub fn scale(&self, a: f64) -> Field4 {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    pub fn scale_mut(&mut self, a: f64) {
        for d in &mut self.data {
            d.par_iter_mut().for_each(|v| *v *= a);
        }
    }

    /// `self += a · other`
    pub fn axpy(&mut self, a: f64, other: &Field4) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for c in 0..4 {
            self.data[c]
                .par_iter_mut()
                .zip(other.data[c].par_iter())
                .for_each(|(x, y)| *x += a * *y);
        }
    }

    pub fn add(&self, other: &Field4) -> Field4 {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Field4) -> Field4 {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Zeroes every mode removed by the dealiasing rule.
    pub fn dealias(&mut self) {
        let g = self.grid.clone();
        let mask: Vec<bool> = (0..g.len()).map(|i| g.kept(i)).collect();
        for d in &mut self.data {
            d.par_iter_mut().zip(mask.par_iter()).for_each(|(v, &m)| {
                if !m {
                    *v = ZERO;
                }
            });
        }
    }

    pub fn is_dealiased(&self) -> bool {
        let g = &self.grid;
        (0..g.len()).all(|i| g.kept(i) || self.mode(i).iter().all(|v| *v == ZERO))
    }

    /// `Σ_ξ Σ_c |f̂_c(ξ)|²`, the coefficient energy without the volume factor.
    pub fn coefficient_energy(&self) -> f64 {
        self.data
            .iter()
            .map(|d| d.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|d| d.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest mode-wise `|ξ·v̂| / (|ξ| |v̂|)`; zero for a divergence-free field.
    pub fn divergence_residual(&self) -> f64 {
        let g = &self.grid;
        let scale = (0..g.len())
            .map(|i| {
                let m = self.mode(i);
                (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr()).sqrt()
            })
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..g.len())
            .map(|i| {
                let xi = g.xi(i);
                let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                if k == 0.0 {
                    return 0.0;
                }
                let m = self.mode(i);
                let d = m[0] * xi[0] + m[1] * xi[1] + m[2] * xi[2];
                d.norm() / (k * scale)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.divergence_residual() <= tol
    }

    /// Largest `|f̂(ξ) − conj f̂(−ξ)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let scale = self.max_abs_coefficient();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let [a, b, c] = g.unravel(idx);
            let j = g.index(
                (g.n[0] - a) % g.n[0],
                (g.n[1] - b) % g.n[1],
                (g.n[2] - c) % g.n[2],
            );
            for comp in 0..4 {
                worst = worst.max((self.data[comp][idx] - self.data[comp][j].conj()).norm());
            }
        }
        worst / scale
    }

    /// Field with the `θ` slot of every horizontal-mean mode set from `theta`.
    pub fn with_vertical_profile(&self, theta: &Field1) -> Result<Field4> {
        if theta.n3() != self.grid.n[2] || theta.length() != self.grid.lengths[2] {
            return Err(StratoError::GridMismatch(
                "vertical profile does not match grid".into(),
            ));
        }
        let mut out = self.clone();
        for k3 in 0..theta.n3() {
            let idx = self.grid.index(0, 0, k3);
            out.data[3][idx] += theta.coeffs()[k3];
        }
        Ok(out)
    }

    /// Relative distance `‖a − b‖ / max(‖a‖, ‖b‖)` in coefficient ℓ².
    pub fn relative_distance(&self, other: &Field4) -> f64 {
        let d = self.sub(other).coefficient_energy().sqrt();
        let s = self
            .coefficient_energy()
            .sqrt()
            .max(other.coefficient_energy().sqrt());
        if s == 0.0 {
            d
        } else {
            d / s
        }
    }
}

/// A scalar spectral field on the 3D grid (vorticity, pressure, divergence).
#[derive(Clone, Debug, PartialEq)]
pub struct Scalar3 {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl Scalar3 {
    pub fn zeros(grid: &GridSpec) -> Self {
        Scalar3 {
            grid: grid.clone(),
            data: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), grid.len());
        Scalar3 { grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// A profile depending on `x₃` only, stored by vertical wavenumber.
#[derive(Clone, Debug, PartialEq)]
pub struct Field1 {
    length: f64,
    data: Vec<Complex64>,
}

impl Field1 {
    pub fn zeros(n3: usize, length: f64) -> Self {
        Field1 {
            length,
            data: vec![ZERO; n3],
        }
    }

    pub fn from_coeffs(length: f64, data: Vec<Complex64>) -> Self {
        Field1 { length, data }
    }

    /// Matches the vertical axis of `grid`.
    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::zeros(grid.n[2], grid.lengths[2])
    }

    pub fn from_samples(length: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let data = (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for (j, &s) in samples.iter().enumerate() {
                    acc += s * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64);
                }
                acc / n as f64
            })
            .collect();
        Field1 { length, data }
    }

    pub fn to_samples(&self) -> Vec<f64> {
        let n = self.data.len();
        (0..n)
            .map(|j| {
                let mut acc = ZERO;
                for (k, c) in self.data.iter().enumerate() {
                    acc += c * Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64);
                }
                acc.re
            })
            .collect()
    }

    pub fn n3(&self) -> usize {
        self.data.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * GridSpec::signed(k, self.n3()) as f64 / self.length
    }

    /// `(L₃ Σ_{ξ₃≠0} |ξ₃|^{2s} |θ̂|²)^{1/2}`
    pub fn hom_sobolev(&self, s: f64) -> f64 {
        let sum: f64 = (0..self.n3())
            .filter(|&k| k != 0)
            .map(|k| self.wavenumber(k).abs().powf(2.0 * s) * self.data[k].norm_sqr())
            .sum();
        (self.length * sum).sqrt()
    }

    pub fn axpy(&mut self, a: f64, other: &Field1) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * *y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_mode_setter_is_hermitian() {
        let g = GridSpec::cubic(8).unwrap();
        let mut f = Field4::zeros(&g);
        f.set_mode_real([1, -2, 3], [Complex64::new(1.0, 2.0); 4]);
        assert_eq!(f.hermitian_defect(), 0.0);
        assert!(f.coefficient_energy() > 0.0);
    }

    #[test]
    fn field1_sample_round_trip() {
        let s: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin() + 0.2).collect();
        let f = Field1::from_samples(3.0, &s);
        for (a, b) in f.to_samples().iter().zip(&s) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_residual_detects_compressible_mode() {
        let g = GridSpec::cubic(8).unwrap();
        let mut f = Field4::zeros(&g);
        f.set_mode_real([1, 0, 0], [Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]);
        assert!((f.divergence_residual() - 1.0).abs() < 1e-14);
        let mut h = Field4::zeros(&g);
        h.set_mode_real([1, 0, 0], [ZERO, Complex64::new(1.0, 0.0), ZERO, ZERO]);
        assert_eq!(h.divergence_residual(), 0.0);
    }
}
