//! Three-dimensional complex FFTs built from rustfft line transforms.
//!
//! Spectral coefficients are normalised so that `f(x) = Σ_ξ f̂(ξ) e^{iξ·x}`,
//! i.e. the forward transform divides by the number of samples.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::field::{Field4, Physical4, Scalar3};
use super::grid::GridSpec;
use crate::{Result, StratoError};

struct Plans {
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

fn plans(n: [usize; 3]) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<[usize; 3], Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::<f64>::new();
            Arc::new(Plans {
                fwd: n.map(|m| planner.plan_fft_forward(m)),
                inv: n.map(|m| planner.plan_fft_inverse(m)),
            })
        })
        .clone()
}

/// In-place unnormalised 3D transform.
pub(crate) fn fft3(n: [usize; 3], data: &mut [Complex64], inverse: bool) {
    let p = plans(n);
    let set = if inverse { &p.inv } else { &p.fwd };
    let [n1, n2, n3] = n;
    let plane = n2 * n3;

    // last axis: contiguous lines
    data.par_chunks_mut(plane)
        .for_each(|chunk| set[2].process(chunk));

    // middle axis: transpose each plane, transform, transpose back
    data.par_chunks_mut(plane).for_each(|chunk| {
        let mut t = vec![Complex64::new(0.0, 0.0); plane];
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                t[i3 * n2 + i2] = chunk[i2 * n3 + i3];
            }
        }
        set[1].process(&mut t);
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                chunk[i2 * n3 + i3] = t[i3 * n2 + i2];
            }
        }
    });

    // first axis: gather lines of stride n2*n3
    let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
    {
        let src = &*data;
        tmp.par_chunks_mut(n1).enumerate().for_each(|(l, line)| {
            for (i1, v) in line.iter_mut().enumerate() {
                *v = src[i1 * plane + l];
            }
        });
    }
    tmp.par_chunks_mut(n1 * n3.max(1))
        .for_each(|chunk| set[0].process(chunk));
    data.par_chunks_mut(plane)
        .enumerate()
        .for_each(|(i1, chunk)| {
            for (l, v) in chunk.iter_mut().enumerate() {
                *v = tmp[l * n1 + i1];
            }
        });
}

fn check_len(grid: &GridSpec, got: usize) -> Result<()> {
    if got != grid.len() {
        return Err(StratoError::SizeMismatch {
            expected: grid.len(),
            got,
        });
    }
    Ok(())
}

pub(crate) fn forward_real(grid: &GridSpec, samples: &[f64]) -> Result<Vec<Complex64>> {
    check_len(grid, samples.len())?;
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft3(grid.n, &mut buf, false);
    let inv_n = 1.0 / grid.len() as f64;
    buf.par_iter_mut().for_each(|c| *c *= inv_n);
    Ok(buf)
}

pub(crate) fn inverse_real(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    fft3(grid.n, &mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

/// Physical samples (four real arrays) to spectral coefficients.
pub fn transform_forward(grid: &GridSpec, samples: &Physical4) -> Result<Field4> {
    let mut comps: [Vec<Complex64>; 4] = Default::default();
    for (c, s) in comps.iter_mut().zip(samples) {
        *c = forward_real(grid, s)?;
    }
    Ok(Field4::from_components(grid.clone(), comps))
}

/// Spectral coefficients to physical samples (real part; fields are Hermitian).
pub fn transform_inverse(f: &Field4) -> Physical4 {
    let g = f.grid();
    [0, 1, 2, 3].map(|c| inverse_real(g, f.comp(c)))
}

pub fn scalar_forward(grid: &GridSpec, samples: &[f64]) -> Result<Scalar3> {
    Ok(Scalar3::from_coeffs(
        grid.clone(),
        forward_real(grid, samples)?,
    ))
}

pub fn scalar_inverse(s: &Scalar3) -> Vec<f64> {
    inverse_real(s.grid(), s.coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(n: [usize; 3], x: &[Complex64]) -> Vec<Complex64> {
        let g = GridSpec::new(n, [1.0; 3], 1.0).unwrap();
        (0..g.len())
            .map(|k| {
                let kk = g.unravel(k);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..g.len() {
                    let jj = g.unravel(j);
                    let ph: f64 = (0..3).map(|a| (kk[a] * jj[a]) as f64 / n[a] as f64).sum();
                    acc += x[j] * Complex64::from_polar(1.0, -2.0 * PI * ph);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_on_anisotropic_grid() {
        let n = [4, 6, 2];
        let x: Vec<Complex64> = (0..48)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut y = x.clone();
        fft3(n, &mut y, false);
        let z = naive_dft(n, &x);
        for (a, b) in y.iter().zip(&z) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_field_has_only_mean() {
        let g = GridSpec::cubic(8).unwrap();
        let s = vec![2.5; g.len()];
        let c = forward_real(&g, &s).unwrap();
        assert!((c[0].re - 2.5).abs() < 1e-14);
        assert!(c[1..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn sine_mode_coefficients() {
        let g = GridSpec::cubic(8).unwrap();
        let s: Vec<f64> = (0..g.len())
            .map(|i| g.coordinate(0, g.unravel(i)[0]).sin())
            .collect();
        let c = forward_real(&g, &s).unwrap();
        let plus = c[g.index(1, 0, 0)];
        let minus = c[g.index(7, 0, 0)];
        let half_over_i = Complex64::new(0.0, -0.5);
        assert!((plus - half_over_i).norm() < 1e-14);
        assert!((minus - half_over_i.conj()).norm() < 1e-14);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let g = GridSpec::cubic(8).unwrap();
        assert!(matches!(
            forward_real(&g, &[0.0; 7]),
            Err(StratoError::SizeMismatch { .. })
        ));
    }
}
