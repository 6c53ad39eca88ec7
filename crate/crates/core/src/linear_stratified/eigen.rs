//! Per-wavevector eigenstructure of the symbol.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use super::params::PhysParams;
use super::symbol::{assemble_symbol, symbol_real};
use crate::spectral_core::TruncationSpec;
use crate::{Result, StratoError};

/// Projector norms above this flag a mode as numerically defective.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Eigenvalues and spectral projectors from a numeric decomposition.
#[derive(Clone, Debug)]
pub struct NumericEigen {
    /// Labelled: λ₁ nearest zero, λ₂ the most nearly real of the rest,
    /// λ₃ the remaining one with positive imaginary part, λ₄ its partner.
    pub eigenvalues: [Complex64; 4],
    pub projectors: [Matrix4<Complex64>; 4],
    /// `max_k ‖𝒫_k‖_F`, a proxy for the eigenvector condition number.
    pub conditioning: f64,
    pub defective: bool,
    /// True when the λ₃/λ₄ pair is real, so the labels are only conventional.
    pub labels_ambiguous: bool,
}

fn label(mut ev: Vec<Complex64>) -> ([Complex64; 4], bool) {
    let pick = |v: &mut Vec<Complex64>, key: &dyn Fn(&Complex64) -> f64| -> Complex64 {
        let (i, _) = v
            .iter()
            .enumerate()
            .min_by(|a, b| key(a.1).total_cmp(&key(b.1)))
            .expect("non-empty");
        v.remove(i)
    };
    let l1 = pick(&mut ev, &|z| z.norm());
    let l2 = pick(&mut ev, &|z| z.im.abs());
    let (a, b) = (ev[0], ev[1]);
    let (l3, l4) = if a.im >= b.im { (a, b) } else { (b, a) };
    let scale = 1.0 + l1.norm().max(l2.norm()).max(l3.norm()).max(l4.norm());
    let ambiguous = l3.im.abs() <= 1e-12 * scale;
    ([l1, l2, l3, l4], ambiguous)
}

/// Eigenvalues via complex Schur form, projectors via Sylvester's formula
/// `𝒫_k = Π_{j≠k} (M − λ_j)/(λ_k − λ_j)`.
pub fn numeric_eigendecomposition(m: &Matrix4<Complex64>) -> NumericEigen {
    let (_, t) = m.clone().schur().unpack();
    let ev: Vec<Complex64> = (0..4).map(|i| t[(i, i)]).collect();
    let (eigenvalues, labels_ambiguous) = label(ev);
    let scale = 1.0 + eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let id = Matrix4::<Complex64>::identity();
    let mut defective = false;
    let projectors: [Matrix4<Complex64>; 4] = std::array::from_fn(|k| {
        let mut p = id;
        for j in 0..4 {
            if j == k {
                continue;
            }
            let gap = eigenvalues[k] - eigenvalues[j];
            if gap.norm() <= 1e-12 * scale {
                defective = true;
                return id * Complex64::new(f64::NAN, 0.0);
            }
            p = p * (m - id * eigenvalues[j]) / gap;
        }
        p
    });
    let conditioning = projectors.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if !(conditioning <= CONDITION_LIMIT) {
        defective = true;
    }
    NumericEigen {
        eigenvalues,
        projectors,
        conditioning,
        defective,
        labels_ambiguous,
    }
}

/// Eigenstructure of `𝔹(ξ,ε)` at one wavevector.
#[derive(Clone, Debug)]
pub struct ModeEigenSystem {
    pub xi: [f64; 3],
    pub eigenvalues: [Complex64; 4],
    pub projectors: [Matrix4<Complex64>; 4],
    /// Remainder `D(ε,ξ)` in `λ₃ = −(ν+ν′)|ξ|²/2 + i|ξ_h|/(ε|ξ|) − iεD`.
    pub remainder_d: f64,
    pub conditioning: f64,
    pub defective: bool,
}

impl ModeEigenSystem {
    pub fn compute(xi: [f64; 3], p: &PhysParams) -> Result<Self> {
        let m = assemble_symbol(xi, p)?;
        let ne = numeric_eigendecomposition(&m);
        let omega = oscillation_frequency(xi, p.eps);
        let d = (omega - ne.eigenvalues[2].im) / p.eps;
        Ok(ModeEigenSystem {
            xi,
            eigenvalues: ne.eigenvalues,
            projectors: ne.projectors,
            remainder_d: d,
            conditioning: ne.conditioning,
            defective: ne.defective || ne.labels_ambiguous,
        })
    }
}

/// `|ξ_h| / (ε|ξ|)`
pub fn oscillation_frequency(xi: [f64; 3], eps: f64) -> f64 {
    let kh = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let k = (kh * kh + xi[2] * xi[2]).sqrt();
    kh / (eps * k)
}

fn domain(xi: [f64; 3], reason: impl Into<String>) -> StratoError {
    StratoError::Domain {
        xi,
        reason: reason.into(),
    }
}

/// Checks where the eigen-expansion is guaranteed.
pub fn check_validity(xi: [f64; 3], p: &PhysParams, spec: Option<&TruncationSpec>) -> Result<()> {
    if xi.iter().all(|&x| x == 0.0) {
        return Err(StratoError::ZeroWavevector);
    }
    if xi[0] == 0.0 && xi[1] == 0.0 {
        return Err(domain(xi, "horizontal frequency vanishes"));
    }
    if p.equal_diffusion() {
        return Ok(());
    }
    let spec = spec.ok_or_else(|| domain(xi, "ν ≠ ν′ needs a frequency truncation"))?;
    if !spec.contains(xi) {
        return Err(domain(
            xi,
            format!("outside C(r={}, R={})", spec.r, spec.big_r),
        ));
    }
    match spec.exponents {
        Some((m, big_m, _)) => {
            if 3.0 * big_m + m >= 1.0 {
                return Err(domain(xi, "3M + m must stay below 1"));
            }
            let e1 = p.eps1(m, big_m).expect("ν ≠ ν′ and 3M+m < 1");
            if p.eps > e1 {
                return Err(domain(xi, format!("ε = {} exceeds ε₁ = {e1}", p.eps)));
            }
        }
        None => {
            let lhs = (p.nu - p.nu_prime).abs() * p.eps * spec.big_r * spec.big_r;
            if lhs > 2f64.sqrt() * spec.r {
                return Err(domain(xi, format!("|ν−ν′| ε R² = {lhs} exceeds √2 r")));
            }
        }
    }
    Ok(())
}

/// Analytic eigenvalues and the remainder `D`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnalyticEigen {
    pub lambdas: [Complex64; 4],
    pub d: f64,
}

/// `λ₁ = 0`, `λ₂ = −ν|ξ|²`, `λ₃ = conj λ₄ = −(ν+ν′)|ξ|²/2 + iω − iεD` with
/// `D = 0` when ν = ν′ and otherwise read off the numeric spectrum.
pub fn analytic_eigenvalues(
    xi: [f64; 3],
    p: &PhysParams,
    spec: Option<&TruncationSpec>,
) -> Result<AnalyticEigen> {
    check_validity(xi, p, spec)?;
    let k2 = xi.iter().map(|x| x * x).sum::<f64>();
    let omega = oscillation_frequency(xi, p.eps);
    let d = if p.equal_diffusion() {
        0.0
    } else {
        remainder_d(xi, p)?
    };
    let l3 = Complex64::new(-(p.nu + p.nu_prime) * k2 / 2.0, omega - p.eps * d);
    Ok(AnalyticEigen {
        lambdas: [
            Complex64::new(0.0, 0.0),
            Complex64::new(-p.nu * k2, 0.0),
            l3,
            l3.conj(),
        ],
        d,
    })
}

/// `D(ε,ξ) = (|ξ_h|/(ε|ξ|) − Im λ₃)/ε` from the numeric spectrum.
pub fn remainder_d(xi: [f64; 3], p: &PhysParams) -> Result<f64> {
    let ne = numeric_eigendecomposition(&assemble_symbol(xi, p)?);
    if ne.labels_ambiguous {
        return Err(domain(xi, "no oscillating eigenvalue pair"));
    }
    Ok((oscillation_frequency(xi, p.eps) - ne.eigenvalues[2].im) / p.eps)
}

/// The three printed remainder bounds at `ξ`: `(|D|, |∂_{ξ_h}D|, |∂_{ξ₃}D|)`.
pub fn remainder_bounds(xi: [f64; 3], p: &PhysParams) -> [f64; 3] {
    let kh = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let k = (kh * kh + xi[2] * xi[2]).sqrt();
    let g = (p.nu - p.nu_prime).powi(2);
    let s2 = 2f64.sqrt();
    [
        g / (4.0 * s2) * k.powi(5) / kh,
        g * 9.0 / (2.0 * s2) * k.powi(5) / (kh * kh),
        g * 15.0 / (4.0 * s2) * k.powi(4) / kh,
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub xi: [f64; 3],
    /// 0: |D|, 1: |∂₁D|, 2: |∂₂D|, 3: |∂₃D|
    pub which: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemainderReport {
    pub samples: usize,
    /// Largest `value / bound` for D, ∂_{ξ_h}D (k = 1, 2) and ∂_{ξ₃}D.
    pub max_ratio: [f64; 3],
    pub violations: Vec<BoundViolation>,
}

impl RemainderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tolerance on `value / bound` for the remainder checks.
pub const BOUND_TOLERANCE: f64 = 1.0 + 1e-6;

/// Verifies the remainder bounds, derivatives by central differences with
/// step `1e−4|ξ|`.
pub fn check_remainder_bounds(
    samples: &[[f64; 3]],
    p: &PhysParams,
    spec: Option<&TruncationSpec>,
) -> Result<RemainderReport> {
    let mut report = RemainderReport {
        samples: samples.len(),
        max_ratio: [0.0; 3],
        violations: Vec::new(),
    };
    if p.equal_diffusion() {
        return Ok(report);
    }
    for &xi in samples {
        check_validity(xi, p, spec)?;
        let bounds = remainder_bounds(xi, p);
        let k = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-4 * k;
        let d = remainder_d(xi, p)?;
        let mut values = [d.abs(), 0.0, 0.0, 0.0];
        for axis in 0..3 {
            let mut a = xi;
            let mut b = xi;
            a[axis] += h;
            b[axis] -= h;
            values[axis + 1] = ((remainder_d(a, p)? - remainder_d(b, p)?) / (2.0 * h)).abs();
        }
        let ratios = [
            values[0] / bounds[0],
            values[1] / bounds[1],
            values[2] / bounds[1],
            values[3] / bounds[2],
        ];
        for (which, &r) in ratios.iter().enumerate() {
            let slot = match which {
                0 => 0,
                1 | 2 => 1,
                _ => 2,
            };
            report.max_ratio[slot] = report.max_ratio[slot].max(r);
            if !(r <= BOUND_TOLERANCE) {
                report.violations.push(BoundViolation {
                    xi,
                    which,
                    ratio: r,
                });
            }
        }
    }
    Ok(report)
}

/// Closed-form `ℙ₂(ξ) = e_a e_aᵀ` with `e_a = (ξ_h^⊥/|ξ_h|, 0, 0)`.
pub(crate) fn stratified_projector(xi: [f64; 3]) -> Matrix4<f64> {
    let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
    let mut m = Matrix4::zeros();
    if kh2 == 0.0 {
        return m;
    }
    let e = [-xi[1], xi[0]];
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = e[i] * e[j] / kh2;
        }
    }
    m
}

/// `ℙ_k(ξ)` for `k ∈ {1,2,3,4}`.
pub fn spectral_projector(
    k: usize,
    xi: [f64; 3],
    p: &PhysParams,
    spec: Option<&TruncationSpec>,
) -> Result<Matrix4<Complex64>> {
    if !(1..=4).contains(&k) {
        return Err(StratoError::InvalidParam(format!(
            "projector index {k} not in 1..=4"
        )));
    }
    check_validity(xi, p, spec)?;
    if k == 2 {
        return Ok(stratified_projector(xi).map(|x| Complex64::new(x, 0.0)));
    }
    let ne = numeric_eigendecomposition(&symbol_real(xi, p).map(|x| Complex64::new(x, 0.0)));
    if ne.defective || ne.labels_ambiguous {
        return Err(domain(
            xi,
            format!(
                "defective eigenstructure (conditioning {:e})",
                ne.conditioning
            ),
        ));
    }
    Ok(ne.projectors[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let d = [
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ];
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(d[2], d[0], d[3], d[1]));
        let ne = numeric_eigendecomposition(&m);
        for k in 0..4 {
            assert!(close(ne.eigenvalues[k], d[k], 1e-14));
        }
    }

    #[test]
    fn printed_symbol_spectrum() {
        let p = PhysParams::new(1.0, 1.0, 1.0).unwrap();
        let ne = numeric_eigendecomposition(&assemble_symbol([1.0, 0.0, 0.0], &p).unwrap());
        let expect = [
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ];
        for k in 0..4 {
            assert!(
                close(ne.eigenvalues[k], expect[k], 1e-12),
                "{k}: {}",
                ne.eigenvalues[k]
            );
        }
    }

    #[test]
    fn analytic_examples() {
        let p = PhysParams::new(2.0, 2.0, 0.3).unwrap();
        let a = analytic_eigenvalues([1.0, 1.0, 1.0], &p, None).unwrap();
        assert_eq!(a.lambdas[0], Complex64::new(0.0, 0.0));
        assert_eq!(a.lambdas[1], Complex64::new(-6.0, 0.0));
        let q = PhysParams::new(1.0, 1.0, 0.1).unwrap();
        let b = analytic_eigenvalues([1.0, 0.0, 0.0], &q, None).unwrap();
        assert!(close(b.lambdas[2], Complex64::new(-1.0, 10.0), 1e-14));
        assert!(analytic_eigenvalues([0.0, 0.0, 1.0], &q, None).is_err());
    }

    #[test]
    fn unequal_diffusion_needs_region() {
        let p = PhysParams::new(1.0, 1.2, 0.01).unwrap();
        assert!(analytic_eigenvalues([1.0, 0.0, 1.0], &p, None).is_err());
        let s = TruncationSpec::new(0.5, 4.0).unwrap();
        assert!(analytic_eigenvalues([1.0, 0.0, 1.0], &p, Some(&s)).is_ok());
        assert!(analytic_eigenvalues([0.1, 0.0, 1.0], &p, Some(&s)).is_err());
    }

    #[test]
    fn remainder_matches_closed_form_oracle() {
        // On the (e_b, θ) block the oscillating pair is −(ν+ν′)|ξ|²/2 ± i√(ω²−δ²),
        // δ = (ν−ν′)|ξ|²/2, hence D = (ω − √(ω²−δ²))/ε.
        let p = PhysParams::new(1.0, 1.2, 0.01).unwrap();
        for xi in [[1.0, 0.5, 2.0], [0.3, -0.6, 3.1], [2.0, 1.0, -0.5]] {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            let omega = oscillation_frequency(xi, p.eps);
            let delta = (p.nu - p.nu_prime) * k2 / 2.0;
            let oracle = (omega - (omega * omega - delta * delta).sqrt()) / p.eps;
            let d = remainder_d(xi, &p).unwrap();
            assert!(
                (d - oracle).abs() < 1e-9 * (1.0 + oracle.abs()),
                "{d} vs {oracle}"
            );
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let p = PhysParams::new(0.7, 0.7, 0.05).unwrap();
        let ne = numeric_eigendecomposition(&assemble_symbol([1.0, 2.0, -1.0], &p).unwrap());
        let s = ne.projectors.iter().fold(Matrix4::zeros(), |a, b| a + b);
        assert!((s - Matrix4::identity()).norm() < 1e-12);
        for k in 0..4 {
            for l in 0..4 {
                let prod = ne.projectors[k] * ne.projectors[l];
                let expect = if k == l {
                    ne.projectors[k]
                } else {
                    Matrix4::zeros()
                };
                assert!((prod - expect).norm() < 1e-11);
            }
        }
    }
}
