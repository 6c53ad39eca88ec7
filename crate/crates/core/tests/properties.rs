mod common;

use proptest::prelude::*;
use strato::convergence_harness::{DataRecipe, ExperimentConfig, Preparation, WaveFilter};
use strato::dispersion_lab::{eval_i_alpha_beta, PhaseIntegralSpec};
use strato::linear_stratified::propagate_semigroup;
use strato::pde_solvers::{heat_estimate, Scheme};
use strato::spectral_core::{
    apply_b, decompose_stratified_oscillating, leray_project, scalar_forward, scalar_inverse,
    stratified_part, vorticity, NormSpec, SpaceTimeNorm,
};
use strato::{Field1, GridSpec, PhysParams, RateFit};

fn small_grid() -> GridSpec {
    GridSpec::cubic(8).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leray_is_an_idempotent_divergence_free_projection(seed in any::<u64>(), kmax in 1.0f64..3.0) {
        let g = small_grid();
        let f = common::random_field(&g, seed, kmax);
        let p = leray_project(&f);
        prop_assert!(p.divergence_residual() < 1e-12);
        prop_assert!(leray_project(&p).relative_distance(&p) < 1e-13);
    }

    #[test]
    fn stratified_oscillating_split(seed in any::<u64>(), kmax in 1.0f64..3.0) {
        let g = small_grid();
        let f = common::random_field(&g, seed, kmax);
        let (s, o) = decompose_stratified_oscillating(&f);
        let scale = f.coefficient_energy().sqrt();
        prop_assert!(s.add(&o).relative_distance(&f) < 1e-13);
        prop_assert!(stratified_part(&s).relative_distance(&s) < 1e-13);
        prop_assert!(stratified_part(&o).coefficient_energy().sqrt() < 1e-13 * scale);
        prop_assert!(apply_b(&s).coefficient_energy() == 0.0);
        prop_assert!(s.divergence_residual() < 1e-12 && o.divergence_residual() < 1e-12);
        prop_assert!(vorticity(&o).energy().sqrt() < 1e-12 * scale * 8.0);
    }

    #[test]
    fn semigroup_contracts_and_composes(
        seed in any::<u64>(),
        nu in 0.01f64..1.0,
        nup in 0.01f64..1.0,
        eps in 0.01f64..1.0,
        t1 in 0.0f64..0.5,
        t2 in 0.0f64..0.5,
    ) {
        let g = small_grid();
        let f = common::random_field(&g, seed, 3.0);
        let p = PhysParams::new(nu, nup, eps).unwrap();
        let a = propagate_semigroup(&f, t1, &p, None).unwrap();
        let ab = propagate_semigroup(&a, t2, &p, None).unwrap();
        let direct = propagate_semigroup(&f, t1 + t2, &p, None).unwrap();
        prop_assert!(ab.relative_distance(&direct) < 1e-10);
        prop_assert!(a.coefficient_energy() <= f.coefficient_energy() * (1.0 + 1e-12));
        prop_assert!(a.divergence_residual() < 1e-10);
    }

    #[test]
    fn scalar_transform_round_trip(seed in any::<u64>()) {
        let g = GridSpec::new([8, 6, 10], [1.0, 2.0, 3.0], 2.0 / 3.0).unwrap();
        let mut r = common::rng(seed);
        let s = common::random_scalar(&g, &mut r, 3.0, 0.5);
        let back = scalar_forward(&g, &scalar_inverse(&s)).unwrap();
        let err: f64 = back.coeffs().iter().zip(s.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-13);
    }

    #[test]
    fn phase_integral_decreases_in_sigma(
        alpha in 0.3f64..3.0,
        beta in 0.0f64..1.0,
        extra in 0.01f64..8.0,
        s1 in 0.0f64..1e4,
        ds in 1e-3f64..1e4,
    ) {
        let r = 2.0 * alpha / 3f64.sqrt() + extra;
        let a = eval_i_alpha_beta(&PhaseIntegralSpec::new(alpha, beta, r, s1).unwrap()).unwrap();
        let b = eval_i_alpha_beta(&PhaseIntegralSpec::new(alpha, beta, r, s1 + ds).unwrap()).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-9), "{a} {b}");
        prop_assert!(a <= (r * r - alpha * alpha).sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn heat_estimate_never_violated(seed in any::<u64>(), nup in 0.0f64..2.0, s in -0.4f64..1.5) {
        let mut r = common::rng(seed);
        let samples: Vec<f64> = (0..24).map(|_| rand::Rng::random_range(&mut r, -1.0..1.0)).collect();
        let th = Field1::from_samples(2.0 * std::f64::consts::PI, &samples);
        let times: Vec<f64> = (0..30).map(|i| 0.1 * i as f64).collect();
        prop_assert!(heat_estimate(&th, nup, s, &times).unwrap().slack >= 0.0);
    }

    #[test]
    fn power_laws_are_recovered(slope in -3.0f64..3.0, c in 0.01f64..100.0, x0 in 1e-4f64..1.0) {
        let x: Vec<f64> = (0..6).map(|i| x0 * 2f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|v| c * v.powf(slope)).collect();
        let fit = RateFit::loglog(&x, &y).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-9 || slope.abs() < 1e-6);
    }

    #[test]
    fn norm_ids_round_trip(
        t in prop_oneof![Just(f64::INFINITY), 1.0f64..8.0],
        which in 0usize..5,
        s in -1.0f64..2.0,
        p in prop_oneof![Just(f64::INFINITY), 1.0f64..8.0],
        cl in any::<bool>(),
    ) {
        let space = match which {
            0 => NormSpec::HomSobolev { s },
            1 => NormSpec::Sobolev { s },
            2 => NormSpec::Besov { s, p, q: 2.0 },
            3 => NormSpec::Lebesgue { p },
            _ => NormSpec::Aniso { vertical: p, horizontal: 2.0 },
        };
        let n = SpaceTimeNorm { time_exponent: t, space, chemin_lerner: cl };
        prop_assert_eq!(SpaceTimeNorm::parse(&n.id()).unwrap(), n);
    }

    #[test]
    fn config_text_round_trips(
        half_n in 4usize..24,
        nu in 0.001f64..1.0,
        nup in 0.001f64..1.0,
        eps0 in 0.05f64..0.9,
        ratio in 0.1f64..0.9,
        delta in 0.01f64..0.4,
        seed in any::<u64>(),
        well in any::<bool>(),
        full in any::<bool>(),
        etd2 in any::<bool>(),
    ) {
        let cfg = ExperimentConfig {
            n: 2 * half_n,
            nu,
            nu_prime: nup,
            eps: (0..5).map(|i| eps0 * ratio.powi(i)).collect(),
            data: DataRecipe {
                delta,
                gamma: DataRecipe::default_gamma(delta, 0.5),
                seed,
                prepared: if well { Preparation::Well } else { Preparation::Ill },
                ..DataRecipe::default()
            },
            wave: if full { WaveFilter::Full } else { WaveFilter::Truncated { m: 0.01, big_m: 0.002 } },
            scheme: if etd2 { Scheme::Etd2 } else { Scheme::Etd4 },
            ..ExperimentConfig::default()
        };
        prop_assert!(cfg.validate().is_ok());
        prop_assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
