//! Smooth cutoffs: the truncation multiplier `f_{r,R}` and dyadic blocks.

use serde::{Deserialize, Serialize};

use super::field::Field4;
use crate::{Result, StratoError};

/// `C^∞` transition from 0 (x ≤ 0) to 1 (x ≥ 1).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

const CHI_FLAT: f64 = 0.55;
const CHI_EDGE: f64 = 0.95;

/// Even cutoff: `χ ≡ 1` on `[−0.55, 0.55]` (a neighbourhood of `[−½, ½]`),
/// supported in `[−0.95, 0.95] ⊂ [−1, 1]`.
pub fn chi(x: f64) -> f64 {
    1.0 - smooth_step((x.abs() - CHI_FLAT) / (CHI_EDGE - CHI_FLAT))
}

/// Low-pass profile of the Littlewood–Paley decomposition: 1 on `[0, 3/4]`,
/// 0 beyond `4/3`.
pub fn lp_low(r: f64) -> f64 {
    1.0 - smooth_step((r - 0.75) / (4.0 / 3.0 - 0.75))
}

/// Dyadic profile `φ(r) = ϕ(r/2) − ϕ(r)`, supported in `[3/4, 8/3]`.
pub fn lp_block(r: f64) -> f64 {
    lp_low(r / 2.0) - lp_low(r)
}

/// Frequency truncation on `𝒞_{r,R} = {|ξ| ≤ R, |ξ_h| ≥ r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub r: f64,
    pub big_r: f64,
    /// `(m, M, ε)` when built from `r = ε^m`, `R = ε^{−M}`.
    pub exponents: Option<(f64, f64, f64)>,
}

impl TruncationSpec {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(StratoError::InvalidTruncation { r, big_r });
        }
        Ok(TruncationSpec {
            r,
            big_r,
            exponents: None,
        })
    }

    pub fn from_exponents(m: f64, big_m: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 && m > 0.0 && big_m > 0.0) {
            return Err(StratoError::InvalidParam(format!(
                "truncation exponents need 0<ε<1, m,M>0 (got ε={eps}, m={m}, M={big_m})"
            )));
        }
        let mut s = Self::new(eps.powf(m), eps.powf(-big_m))?;
        s.exponents = Some((m, big_m, eps));
        Ok(s)
    }

    /// `f_{r,R}(ξ) = χ(|ξ|/R) (1 − χ(|ξ_h|/2r))`
    pub fn multiplier(&self, xi: [f64; 3]) -> f64 {
        let kh = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let k = (kh * kh + xi[2] * xi[2]).sqrt();
        chi(k / self.big_r) * (1.0 - chi(kh / (2.0 * self.r)))
    }

    pub fn contains(&self, xi: [f64; 3]) -> bool {
        let kh = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let k = (kh * kh + xi[2] * xi[2]).sqrt();
        k <= self.big_r && kh >= self.r
    }

    /// Widened spec `(r/2, 2R)`, equal to one on the support of `self`.
    pub fn widened(&self) -> TruncationSpec {
        TruncationSpec {
            r: self.r / 2.0,
            big_r: 2.0 * self.big_r,
            exponents: None,
        }
    }
}

/// `𝒫_{r,R} f = f_{r,R}(D) f`
pub fn truncate(f: &Field4, spec: &TruncationSpec) -> Result<Field4> {
    if !(spec.r > 0.0 && spec.r < spec.big_r) {
        return Err(StratoError::InvalidTruncation {
            r: spec.r,
            big_r: spec.big_r,
        });
    }
    Ok(f.map_modes(|_, xi, m| {
        let w = spec.multiplier(xi);
        m.map(|v| v * w)
    }))
}

/// Which modulus the dyadic block localises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockAxis {
    Full,
    Horizontal,
}

pub fn block_weight(xi: [f64; 3], j: i32, axis: BlockAxis) -> f64 {
    let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
    let k = match axis {
        BlockAxis::Full => (kh2 + xi[2] * xi[2]).sqrt(),
        BlockAxis::Horizontal => kh2.sqrt(),
    };
    if k == 0.0 {
        return 0.0;
    }
    lp_block(k * 2f64.powi(-j))
}

/// `Δ̇_j f` (full) or `Δ̇_j^h f` (horizontal).
pub fn dyadic_block(f: &Field4, j: i32, axis: BlockAxis) -> Field4 {
    f.map_modes(|_, xi, m| {
        let w = block_weight(xi, j, axis);
        m.map(|v| v * w)
    })
}

/// Block indices whose support meets the grid's frequency span.
pub fn dyadic_range(
    grid: &super::grid::GridSpec,
    axis: BlockAxis,
) -> std::ops::RangeInclusive<i32> {
    let (lo, hi) = grid.frequency_span(axis == BlockAxis::Horizontal);
    let jmin = (3.0 * lo / 8.0).log2().floor() as i32;
    let jmax = (4.0 * hi / 3.0).log2().ceil() as i32;
    jmin..=jmax
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(-0.55), 1.0);
        assert_eq!(chi(0.95), 0.0);
        assert_eq!(chi(1.0), 0.0);
        assert!(chi(0.75) > 0.0 && chi(0.75) < 1.0);
    }

    #[test]
    fn block_partition_of_unity() {
        for &r in &[0.01, 0.3, 1.0, 2.5, 17.0, 1234.5] {
            let s: f64 = (-20..=20).map(|j| lp_block(r * 2f64.powi(-j))).sum();
            assert!((s - 1.0).abs() < 1e-14, "r = {r}: {s}");
        }
    }

    #[test]
    fn block_support() {
        assert_eq!(lp_block(0.75), 0.0);
        assert_eq!(lp_block(8.0 / 3.0), 0.0);
        assert!(lp_block(1.0) > 0.0);
        // |ξ| = 1 lives only in blocks j = -1, 0
        let live: Vec<i32> = (-5..=5)
            .filter(|&j| lp_block(2f64.powi(-j)) > 0.0)
            .collect();
        assert_eq!(live, vec![-1, 0]);
    }

    #[test]
    fn truncation_multiplier_regions() {
        let s = TruncationSpec::new(1.0, 8.0).unwrap();
        assert_eq!(s.multiplier([2.0, 1.0, 3.0]), 1.0); // in C_{2r,R/2}
        assert_eq!(s.multiplier([0.6, 0.0, 1.0]), 0.0); // |ξ_h| ≤ r
        assert_eq!(s.multiplier([8.0, 0.0, 0.0]), 0.0); // |ξ| ≥ R
        assert!(TruncationSpec::new(2.0, 1.0).is_err());
    }
}
