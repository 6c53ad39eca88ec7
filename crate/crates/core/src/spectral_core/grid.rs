use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Result, StratoError};

/// Periodic box `[0,L1) × [0,L2) × [0,L3)` sampled on `n1 × n2 × n3` points.
///
/// Spectral arrays are stored row-major with the first axis slowest, and the
/// wavenumber of index `k` on axis `i` is `2π k_signed / L_i` with
/// `k_signed ∈ [−n_i/2, n_i/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: [usize; 3],
    pub lengths: [f64; 3],
    /// Fraction of the half-spectrum kept by dealiasing (2/3 rule by default).
    pub dealias: f64,
}

impl GridSpec {
    pub fn new(n: [usize; 3], lengths: [f64; 3], dealias: f64) -> Result<Self> {
        for (&ni, &li) in n.iter().zip(&lengths) {
            if ni == 0 || ni % 2 != 0 {
                return Err(StratoError::InvalidGrid(format!(
                    "axis size {ni} must be a positive even integer"
                )));
            }
            if !(li > 0.0 && li.is_finite()) {
                return Err(StratoError::InvalidGrid(format!(
                    "period {li} must be positive"
                )));
            }
        }
        if !(dealias > 0.0 && dealias <= 1.0) {
            return Err(StratoError::InvalidGrid(format!(
                "dealias fraction {dealias} not in (0,1]"
            )));
        }
        Ok(GridSpec {
            n,
            lengths,
            dealias,
        })
    }

    /// `n³` points on the `2π`-periodic box with the 2/3 rule.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n; 3], [2.0 * PI; 3], 2.0 / 3.0)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.lengths[a] / self.n[a] as f64)
    }

    pub fn dx_min(&self) -> f64 {
        self.spacing().into_iter().fold(f64::INFINITY, f64::min)
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n[1] + i2) * self.n[2] + i3
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.n[2];
        let i2 = (idx / self.n[2]) % self.n[1];
        [idx / (self.n[1] * self.n[2]), i2, i3]
    }

    #[inline]
    pub fn signed(k: usize, n: usize) -> i64 {
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Index of the signed wavenumber `ks` on an axis of size `n`.
    pub fn unsigned(ks: i64, n: usize) -> usize {
        ks.rem_euclid(n as i64) as usize
    }

    pub fn wavenumber(&self, axis: usize, k: usize) -> f64 {
        2.0 * PI * Self::signed(k, self.n[axis]) as f64 / self.lengths[axis]
    }

    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unravel(idx);
        [
            self.wavenumber(0, a),
            self.wavenumber(1, b),
            self.wavenumber(2, c),
        ]
    }

    /// Strict inequality: with the 2/3 rule the cutoff `K` must satisfy
    /// `3K < n` for quadratic products to be alias-free.
    pub fn keeps(&self, axis: usize, k: usize) -> bool {
        let ks = Self::signed(k, self.n[axis]).unsigned_abs() as f64;
        ks < self.dealias * self.n[axis] as f64 / 2.0 || self.dealias >= 1.0
    }

    pub fn kept(&self, idx: usize) -> bool {
        let [a, b, c] = self.unravel(idx);
        self.keeps(0, a) && self.keeps(1, b) && self.keeps(2, c)
    }

    pub fn wavenumbers(&self) -> Wavenumbers {
        let mk = |axis: usize| -> (Vec<f64>, Vec<f64>, Vec<bool>) {
            let n = self.n[axis];
            let k: Vec<f64> = (0..n).map(|i| self.wavenumber(axis, i)).collect();
            // the Nyquist line has no odd partner, so derivatives vanish there
            let d = (0..n)
                .map(|i| if i == n / 2 { 0.0 } else { k[i] })
                .collect();
            let m = (0..n).map(|i| self.keeps(axis, i)).collect();
            (k, d, m)
        };
        let (k1, d1, m1) = mk(0);
        let (k2, d2, m2) = mk(1);
        let (k3, d3, m3) = mk(2);
        Wavenumbers {
            k: [k1, k2, k3],
            kd: [d1, d2, d3],
            mask: [m1, m2, m3],
        }
    }

    /// Smallest nonzero and largest `|ξ|` (or `|ξ_h|`) present on the grid.
    pub fn frequency_span(&self, horizontal: bool) -> (f64, f64) {
        let kmin_axis = |a: usize| 2.0 * PI / self.lengths[a];
        let kmax_axis = |a: usize| PI * self.n[a] as f64 / self.lengths[a];
        let axes: &[usize] = if horizontal { &[0, 1] } else { &[0, 1, 2] };
        let lo = axes
            .iter()
            .map(|&a| kmin_axis(a))
            .fold(f64::INFINITY, f64::min);
        let hi = axes
            .iter()
            .map(|&a| kmax_axis(a).powi(2))
            .sum::<f64>()
            .sqrt();
        (lo, hi)
    }

    /// Physical coordinate of sample `i` on `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.lengths[axis] / self.n[axis] as f64
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(StratoError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Per-axis wavenumber tables.
#[derive(Clone, Debug)]
pub struct Wavenumbers {
    /// Full wavenumbers, used by multipliers that are even in `ξ`.
    pub k: [Vec<f64>; 3],
    /// Wavenumbers for odd multipliers (derivatives), zero on the Nyquist line.
    pub kd: [Vec<f64>; 3],
    pub mask: [Vec<bool>; 3],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_sizes() {
        assert!(GridSpec::new([8, 7, 8], [1.0; 3], 0.5).is_err());
        assert!(GridSpec::new([8, 8, 8], [1.0, -1.0, 1.0], 0.5).is_err());
        assert!(GridSpec::new([8, 8, 8], [1.0; 3], 0.0).is_err());
    }

    #[test]
    fn signed_wavenumbers() {
        let g = GridSpec::cubic(8).unwrap();
        assert_eq!(g.wavenumber(0, 3), 3.0);
        assert_eq!(g.wavenumber(0, 4), -4.0);
        assert_eq!(g.wavenumber(0, 7), -1.0);
        assert_eq!(GridSpec::unsigned(-1, 8), 7);
    }

    #[test]
    fn two_thirds_rule() {
        let g = GridSpec::cubic(32).unwrap();
        assert!(g.keeps(0, 10));
        assert!(!g.keeps(0, 11));
        assert!(g.keeps(0, 22)); // k = -10
        assert!(!g.keeps(0, 21)); // k = -11
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new([4, 6, 8], [1.0; 3], 1.0).unwrap();
        for idx in 0..g.len() {
            let [a, b, c] = g.unravel(idx);
            assert_eq!(g.index(a, b, c), idx);
        }
    }
}
