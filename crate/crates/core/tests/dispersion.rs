mod common;

use num_complex::Complex64;
use strato::dispersion_lab::*;
use strato::linear_stratified::propagate_semigroup;
use strato::spectral_core::{chi, stratified_part};
use strato::{GridSpec, PhysParams, StratoError, TruncationSpec};

fn f_alpha_ref(a: f64, x: f64) -> f64 {
    a * x / (a * a + x * x).powf(1.5)
}

/// Composite Simpson on a fine uniform grid.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[test]
fn phase_integral_matches_simpson() {
    for &(a, b, r, s) in &[
        (1.0, 0.2, 10.0, 50.0),
        (0.5, 1.0, 3.0, 1e3),
        (2.0, 0.05, 10.0, 10.0),
    ] {
        let l = (r * r - a * a as f64).sqrt();
        let want = simpson(
            |x| 1.0 / (1.0 + s * (f_alpha_ref(a, x) - b).powi(2)),
            0.0,
            l,
            400_000,
        );
        let got = eval_i_alpha_beta(&PhaseIntegralSpec::new(a, b, r, s).unwrap()).unwrap();
        assert!(
            (got - want).abs() < 1e-9 * want.max(1.0),
            "α={a} β={b}: {got} vs {want}"
        );
    }
}

#[test]
fn phase_integral_monotone_in_sigma() {
    let mut prev = f64::INFINITY;
    for s in log_grid(1e-2, 1e5, 3) {
        let v = eval_i_alpha_beta(&PhaseIntegralSpec::new(1.0, 0.3, 10.0, s).unwrap()).unwrap();
        assert!(v <= prev + 1e-10, "σ={s}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn phase_integral_rejects_small_radius() {
    assert!(matches!(
        PhaseIntegralSpec::new(2.0, 0.0, 2.0, 1.0),
        Err(StratoError::InvalidParam(_))
    ));
}

#[test]
fn upper_bound_constant_is_stable_under_refinement() {
    let coarse = upper_bound_constant(
        &[0.5, 1.0, 2.0],
        &[0.0, 0.2, 0.4],
        &[4.0, 10.0],
        &[1.0, 1e2, 1e4],
    )
    .unwrap();
    let fine = upper_bound_constant(
        &[0.5, 0.75, 1.0, 1.5, 2.0],
        &[0.0, 0.1, 0.2, 0.3, 0.4],
        &[4.0, 7.0, 10.0],
        &log_grid(1.0, 1e4, 2),
    )
    .unwrap();
    assert!(coarse.is_finite() && fine.is_finite());
    assert!(fine < 2.0 * coarse, "{coarse} → {fine}");
}

#[test]
fn witness_scales_with_alpha_three_halves() {
    let fit = witness_alpha_scaling(&[0.5, 0.7, 1.0, 1.4, 2.0], 10.0, 1e4).unwrap();
    assert!((fit.slope - 1.5).abs() < 0.1, "{fit:?}");
}

// Remainder written directly from its definition.
fn d_ref(xh: f64, z: f64, p: &PhysParams) -> f64 {
    let k2 = xh * xh + z * z;
    let om = xh / (p.eps * k2.sqrt());
    let del = (p.nu - p.nu_prime) * k2 / 2.0;
    (om - (om * om - del * del).sqrt()) / p.eps
}

fn kernel_oracle(s: &KernelSpec, n: usize) -> Complex64 {
    let p = &s.params;
    let half = ((1.9 * s.truncation.big_r).powi(2) - s.xi_h * s.xi_h).sqrt();
    let h = 2.0 * half / n as f64;
    let dt = s.t - s.t_prime;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let z = -half + h * i as f64;
        let k = (s.xi_h * s.xi_h + z * z).sqrt();
        let amp = (-(p.nu + p.nu_prime) * (s.t + s.t_prime) / 4.0 * k * k).exp()
            * chi(k / (2.0 * s.truncation.big_r))
            * (1.0 - chi(s.xi_h / s.truncation.r));
        let ph = s.x3 * z + dt / p.eps * s.xi_h / k - dt * p.eps * d_ref(s.xi_h, z, p);
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(w * amp, ph);
    }
    acc * h / (2.0 * std::f64::consts::PI)
}

fn kernel_spec() -> KernelSpec {
    KernelSpec {
        xi_h: 1.0,
        x3: 0.3,
        t: 1.0,
        t_prime: 0.0,
        params: PhysParams::new(0.2, 0.1, 0.1).unwrap(),
        truncation: TruncationSpec::new(0.5, 2.0).unwrap(),
    }
}

#[test]
fn kernel_matches_trapezoid_oracle() {
    for x3 in [0.0, 0.3, -2.0] {
        let s = KernelSpec {
            x3,
            ..kernel_spec()
        };
        let got = eval_i(&s).unwrap();
        let want = kernel_oracle(&s, 200_000);
        assert!(
            (got - want).norm() < 1e-8 * want.norm().max(1e-3),
            "x₃={x3}: {got} vs {want}"
        );
    }
}

#[test]
fn kernel_trivial_cases() {
    let s = KernelSpec {
        xi_h: 5.0,
        ..kernel_spec()
    };
    assert_eq!(eval_i(&s).unwrap(), Complex64::new(0.0, 0.0));
    let s = KernelSpec {
        t: 0.0,
        ..kernel_spec()
    };
    let half = (3.8f64 * 3.8 - 1.0).sqrt();
    assert!(eval_i(&s).unwrap().norm() <= 2.0 * half / (2.0 * std::f64::consts::PI));
}

#[test]
fn kernel_decays_in_sigma() {
    let p = PhysParams::new(1e-6, 1e-6, 1e-3).unwrap();
    let tr = TruncationSpec::new(0.5, 2.0).unwrap();
    let st = kernel_study(1.0, &tr, &p, &log_grid(1e1, 1e4, 2)).unwrap();
    eprintln!("kernel slope {:.3}", st.fit.slope);
    // a degenerate (cubic) stationary point: the decay is at least σ^{-1/5}
    assert!(st.fit.slope <= -0.2, "slope {}", st.fit.slope);
    let c = st.points.iter().map(|q| q.linf_ratio).fold(0.0, f64::max);
    assert!(c.is_finite() && c < 10.0);
}

#[test]
fn equal_diffusion_flow_matches_semigroup() {
    let g = GridSpec::cubic(12).unwrap();
    let f = common::random_field(&g, 5, 4.0);
    let p = PhysParams::new(0.3, 0.3, 0.05).unwrap();
    for t in [0.0, 0.1, 0.7] {
        let a = equal_diffusion_flow(&f, t, &p).unwrap();
        let b = propagate_semigroup(&f, t, &p, None).unwrap();
        assert!(
            a.relative_distance(&b) < 1e-10,
            "t={t}: {}",
            a.relative_distance(&b)
        );
    }
    assert!(equal_diffusion_flow(&f, 0.1, &PhysParams::new(0.3, 0.2, 0.05).unwrap()).is_err());
}

#[test]
fn gaussian_data_is_oscillating() {
    let g = GridSpec::cubic(16).unwrap();
    let f = gaussian_theta_data(&g, 0.3).unwrap();
    assert!(f.coefficient_energy() > 0.0);
    assert!(
        stratified_part(&f).coefficient_energy().sqrt() < 1e-12 * f.coefficient_energy().sqrt()
    );
}

#[test]
fn strichartz_no_gain_at_r_two() {
    let g = GridSpec::cubic(16).unwrap();
    let f = gaussian_theta_data(&g, 0.3).unwrap();
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let spec = StrichartzSpec {
        time_exponent: 4.0,
        mode: StrichartzMode::Isotropic { r: 2.0 },
        theta: 1.0,
        t_end: 5.0,
        time_samples: 60,
    };
    let rep = measure_strichartz_scaling(&f, &p, &[1e-1, 1e-2, 1e-3, 1e-4], &spec).unwrap();
    assert_eq!(rep.theoretical_exponent, 0.0);
    assert!(rep.passed && rep.measured_exponent >= -0.05, "{rep:?}");
    assert!(measure_strichartz_scaling(&f, &p, &[1e-1, 1e-2, 1e-3], &spec).is_err());
}

#[test]
fn theoretical_exponents() {
    assert!(
        (StrichartzMode::Isotropic { r: 6.0 }.theoretical_exponent(1.0) - 1.0 / 6.0).abs() < 1e-15
    );
    assert!(
        (StrichartzMode::Anisotropic { m: f64::INFINITY }.theoretical_exponent(1.0) - 0.125).abs()
            < 1e-15
    );
}

#[test]
fn heat_annulus_constants() {
    let (r, big_r) = (2.0, 5.0);
    let times: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
    let fields = |g: &GridSpec| -> Vec<_> {
        (0..20)
            .filter_map(|s| {
                random_band_limited(g, s, |xi| {
                    let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                    k >= r && k <= big_r
                })
                .unwrap()
            })
            .collect()
    };
    let g = GridSpec::cubic(16).unwrap();
    let l2 = check_heat_annulus(&g, r, big_r, 2.0, &times, &fields(&g)).unwrap();
    // Parseval: the ratio is at most e^{-t r²/2} ≤ 1
    assert!(
        l2.finite() && l2.constant <= r.powi(4) / big_r.powi(3) + 1e-12,
        "{l2:?}"
    );
    let inf16 = check_heat_annulus(&g, r, big_r, f64::INFINITY, &times, &fields(&g)).unwrap();
    let g32 = GridSpec::cubic(32).unwrap();
    let inf32 = check_heat_annulus(&g32, r, big_r, f64::INFINITY, &times, &fields(&g32)).unwrap();
    assert!(inf16.finite() && inf32.finite());
    assert!(
        inf32.constant < 2.0 * inf16.constant && inf16.constant < 2.0 * inf32.constant,
        "{inf16:?} {inf32:?}"
    );
}

#[test]
fn bernstein_and_interpolation_constants() {
    let g = GridSpec::cubic(16).unwrap();
    let b2 = bernstein_constant(&g, 1.0, 4.0, 1.5, 2.0, 0..20).unwrap();
    assert!(b2.constant <= 1.0 + 1e-12 && b2.samples == 20);
    let binf = bernstein_constant(&g, 1.0, 4.0, 1.0, f64::INFINITY, 0..20).unwrap();
    assert!(binf.finite());
    let an = aniso_bernstein_constant(&g, 2.0, 5.0, f64::INFINITY, 2.0, 0..20).unwrap();
    assert!(an.finite() && an.constant > 0.0);
    let ip = interpolation_constant(&g, 0.5, 0.5, 1.0, 1.0, 6.0, 0..100).unwrap();
    assert!(ip.finite() && ip.samples == 100, "{ip:?}");
}
