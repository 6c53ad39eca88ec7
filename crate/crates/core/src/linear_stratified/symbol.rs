use nalgebra::Matrix4;
use num_complex::Complex64;

use super::params::PhysParams;
use crate::{Result, StratoError};

/// The Fourier symbol `𝔹(ξ,ε)` of `L − ε⁻¹ℙℬ` (real entries), including the
/// mean mode, where no pressure acts and `ℬ/ε` rotates `(v³, θ)`.
pub(crate) fn symbol_real(xi: [f64; 3], p: &PhysParams) -> Matrix4<f64> {
    let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
    let k2 = kh2 + xi[2] * xi[2];
    let mut b = Matrix4::<f64>::zeros();
    if k2 == 0.0 {
        b[(2, 3)] = -1.0 / p.eps;
        b[(3, 2)] = 1.0 / p.eps;
        return b;
    }
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { k2 } else { 0.0 };
            b[(i, j)] = -p.nu * (delta - xi[i] * xi[j]);
        }
    }
    let s = 1.0 / (p.eps * k2);
    b[(0, 3)] = xi[0] * xi[2] * s;
    b[(1, 3)] = xi[1] * xi[2] * s;
    b[(2, 3)] = -kh2 * s;
    b[(3, 2)] = 1.0 / p.eps;
    b[(3, 3)] = -p.nu_prime * k2;
    b
}

/// Exact entries of `𝔹(ξ,ε)`; undefined at `ξ = 0`.
pub fn assemble_symbol(xi: [f64; 3], p: &PhysParams) -> Result<Matrix4<Complex64>> {
    if xi.iter().all(|&x| x == 0.0) {
        return Err(StratoError::ZeroWavevector);
    }
    Ok(symbol_real(xi, p).map(|x| Complex64::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_example() {
        let p = PhysParams::new(1.0, 1.0, 1.0).unwrap();
        let b = symbol_real([1.0, 0.0, 0.0], &p);
        let expect = Matrix4::new(
            0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 1.0, -1.0,
        );
        assert_eq!(b, expect);
    }

    #[test]
    fn horizontal_zero_mode() {
        let p = PhysParams::new(0.5, 0.7, 0.1).unwrap();
        let b = symbol_real([0.0, 0.0, 1.0], &p);
        for i in 0..3 {
            assert_eq!(b[(i, 3)], 0.0);
        }
        assert!((b[(3, 2)] - 10.0).abs() < 1e-15);
    }

    #[test]
    fn zero_wavevector_is_an_error() {
        let p = PhysParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            assemble_symbol([0.0; 3], &p),
            Err(StratoError::ZeroWavevector)
        ));
    }
}
