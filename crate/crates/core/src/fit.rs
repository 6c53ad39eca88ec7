//! Least-squares fits on log–log data.

use serde::{Deserialize, Serialize};

/// Result of fitting `log y = slope · log x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
    /// Smallest and largest abscissa used.
    pub range: (f64, f64),
    pub points: usize,
}

impl RateFit {
    /// Fits positive samples; non-positive or non-finite pairs are rejected.
    pub fn loglog(x: &[f64], y: &[f64]) -> Option<RateFit> {
        let pts: Vec<(f64, f64)> = x
            .iter()
            .zip(y)
            .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
            .map(|(a, b)| (a.ln(), b.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 {
            1.0
        } else {
            (sxy * sxy) / (sxx * syy)
        };
        let lo = x
            .iter()
            .cloned()
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(RateFit {
            slope,
            intercept,
            r_squared,
            range: (lo, hi),
            points: pts.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let x: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-0.25)).collect();
        let f = RateFit::loglog(&x, &y).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(RateFit::loglog(&[1.0], &[1.0]).is_none());
        assert!(RateFit::loglog(&[2.0, 2.0], &[1.0, 3.0]).is_none());
    }
}
