//! `strato verify`: every module's invariant suite on small fixed samples,
//! reported as data (failures do not abort the run).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::DataRecipe;
use super::initial::{generate_initial_data, random_band};
use super::theory::k_of_q;
use crate::dispersion_lab::{
    bernstein_constant, check_heat_annulus, eval_i, eval_i_alpha_beta, random_band_limited,
    KernelSpec, PhaseIntegralSpec,
};
use crate::linear_stratified::{
    analytic_eigenvalues, apply_projector, assemble_symbol, check_remainder_bounds,
    numeric_eigendecomposition, propagate_semigroup, PhysParams,
};
use crate::pde_solvers::{
    boussinesq_to_stratif, compute_G_tilde, heat_estimate, solve_coupled, solve_heat_1d,
    stationary_residual, stratif_to_boussinesq, Background, BoussinesqFields, FilterWave,
    InitialData, SolverConfig,
};
use crate::spectral_core::{
    apply_b, divergence, dyadic_block, dyadic_range, hom_sobolev, leray_project, norm,
    stratified_advection_residual, stratified_part, transform_forward, transform_inverse,
    vorticity, vorticity_identity_residual, BlockAxis, Field1, Field4, GridSpec, NormSpec,
    TruncationSpec,
};
use crate::Result;

/// Deliberate defects, used to check that the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// Flip the sign of the analytic `λ₂ = −ν|ξ|²`.
    FlipLambda2,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub module: String,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    /// `tolerance − measured`; negative means failure.
    pub slack: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub mutation: Option<Mutation>,
    pub checks: Vec<InvariantCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn module_passed(&self, module: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.module == module)
            .all(|c| c.passed)
    }
}

struct Suite {
    checks: Vec<InvariantCheck>,
}

impl Suite {
    /// Records `measured ≤ tolerance`.
    fn check(&mut self, module: &str, name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        let (measured, error) = match f() {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let passed = measured <= tolerance;
        self.checks.push(InvariantCheck {
            module: module.into(),
            name: name.into(),
            measured,
            tolerance,
            slack: tolerance - measured,
            passed,
            error,
        });
    }
}

fn random_div_free(g: &GridSpec, seed: u64, kmax: f64) -> Result<Field4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: [Vec<Complex64>; 4] = [
        random_band(g, &mut rng, kmax, 1.0)?,
        random_band(g, &mut rng, kmax, 1.0)?,
        random_band(g, &mut rng, kmax, 1.0)?,
        random_band(g, &mut rng, kmax, 1.0)?,
    ];
    let mut f = leray_project(&Field4::from_components(g.clone(), comps));
    f.dealias();
    Ok(f)
}

fn coeff_norm(f: &Field4) -> f64 {
    f.coefficient_energy().sqrt()
}

fn rel(a: &Field4, b: &Field4) -> f64 {
    let s = coeff_norm(b).max(coeff_norm(a));
    if s == 0.0 {
        0.0
    } else {
        coeff_norm(&a.sub(b)) / s
    }
}

/// Uniform sample of `𝒞_{r,R} = {|ξ_h| ≥ r, |ξ| ≤ R}`.
fn random_xi(rng: &mut ChaCha8Rng, r: f64, big_r: f64) -> [f64; 3] {
    loop {
        let xi = [
            rng.random_range(-big_r..big_r),
            rng.random_range(-big_r..big_r),
            rng.random_range(-big_r..big_r),
        ];
        if (TruncationSpec {
            r,
            big_r,
            exponents: None,
        })
        .contains(xi)
        {
            return xi;
        }
    }
}

fn spectral_core_suite(s: &mut Suite) {
    let m = "spectral_core";
    let g = GridSpec::cubic(16).unwrap();
    let fields: Vec<Field4> = (0..4)
        .filter_map(|k| random_div_free(&g, 1000 + k, 5.0).ok())
        .collect();
    s.check(m, "fft_round_trip", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| Ok(rel(&transform_forward(&g, &transform_inverse(f))?, f)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max))
    });
    s.check(m, "leray_divergence_free", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| f.divergence_residual())
            .fold(0.0, f64::max))
    });
    s.check(m, "leray_idempotent", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| rel(&leray_project(f), f))
            .fold(0.0, f64::max))
    });
    s.check(m, "decomposition_complete", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| {
                let fs = stratified_part(f);
                rel(&fs.add(&f.sub(&fs)), f)
            })
            .fold(0.0, f64::max))
    });
    s.check(m, "p2_idempotent", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| rel(&stratified_part(&stratified_part(f)), &stratified_part(f)))
            .fold(0.0, f64::max))
    });
    s.check(m, "b_kills_stratified", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| coeff_norm(&apply_b(&stratified_part(f))) / coeff_norm(f))
            .fold(0.0, f64::max))
    });
    s.check(m, "oscillating_part_has_no_vorticity", 1e-12, || {
        Ok(fields
            .iter()
            .map(|f| {
                let osc = f.sub(&stratified_part(f));
                vorticity(&osc).energy().sqrt() / (8.0 * coeff_norm(f))
            })
            .fold(0.0, f64::max))
    });
    s.check(m, "stratified_oscillating_orthogonal", 1e-12, || {
        let mut worst: f64 = 0.0;
        for f in &fields {
            let fs = stratified_part(f);
            let fo = f.sub(&fs);
            for sexp in [0.0, 0.5] {
                let mut ip = Complex64::new(0.0, 0.0);
                for i in 0..g.len() {
                    let xi = g.xi(i);
                    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let (a, b) = (fs.mode(i), fo.mode(i));
                    ip += (0..4).map(|c| a[c] * b[c].conj()).sum::<Complex64>() * k2.powf(sexp);
                }
                worst = worst.max(
                    ip.norm()
                        / (hom_sobolev(&fs, sexp) * hom_sobolev(&fo, sexp) / g.volume())
                            .max(f64::MIN_POSITIVE),
                );
            }
        }
        Ok(worst)
    });
    s.check(m, "dyadic_partition_of_unity", 1e-10, || {
        Ok(fields
            .iter()
            .map(|f| {
                let mut acc = Field4::zeros(&g);
                for j in dyadic_range(&g, BlockAxis::Full) {
                    acc.axpy(1.0, &dyadic_block(f, j, BlockAxis::Full));
                }
                rel(&acc, f)
            })
            .fold(0.0, f64::max))
    });
    s.check(m, "parseval_l2", 1e-12, || {
        let mut worst: f64 = 0.0;
        for f in &fields {
            let a = norm(f, &NormSpec::Lebesgue { p: 2.0 })?;
            worst = worst.max((a - hom_sobolev(f, 0.0)).abs() / a);
        }
        Ok(worst)
    });
    s.check(m, "vorticity_identity", 1e-8, || {
        let mut worst: f64 = 0.0;
        for f in &fields {
            worst = worst.max(vorticity_identity_residual(f)?);
        }
        Ok(worst)
    });
    s.check(m, "stratified_advection", 1e-8, || {
        let mut worst: f64 = 0.0;
        for f in &fields {
            worst = worst.max(stratified_advection_residual(&stratified_part(f))?);
        }
        Ok(worst)
    });
}

fn linear_suite(s: &mut Suite, mutation: Option<Mutation>) {
    let m = "linear_stratified";
    let p = PhysParams::new(1.0, 1.2, 0.01).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let xis: Vec<[f64; 3]> = (0..200).map(|_| random_xi(&mut rng, 0.5, 4.0)).collect();
    let spec = TruncationSpec::new(0.5, 4.0).unwrap();
    s.check(m, "eigenvalues_analytic_vs_numeric", 1e-9, || {
        let mut worst: f64 = 0.0;
        for &xi in &xis {
            let mut a = analytic_eigenvalues(xi, &p, Some(&spec))?.lambdas;
            if mutation == Some(Mutation::FlipLambda2) {
                a[1] = -a[1];
            }
            let ne = numeric_eigendecomposition(&assemble_symbol(xi, &p)?);
            for k in 0..4 {
                worst = worst
                    .max((a[k] - ne.eigenvalues[k]).norm() / ne.eigenvalues[k].norm().max(1.0));
            }
        }
        Ok(worst)
    });
    s.check(m, "eigenvalues_conjugate_pair", 1e-12, || {
        let mut worst: f64 = 0.0;
        for &xi in &xis {
            let a = analytic_eigenvalues(xi, &p, Some(&spec))?.lambdas;
            worst = worst.max((a[2] - a[3].conj()).norm() / a[2].norm());
        }
        Ok(worst)
    });
    s.check(m, "oscillating_real_part", 1e-9, || {
        let mut worst: f64 = 0.0;
        for &xi in &xis {
            let ne = numeric_eigendecomposition(&assemble_symbol(xi, &p)?);
            let k2 = xi.iter().map(|x| x * x).sum::<f64>();
            let want = -(p.nu + p.nu_prime) * k2 / 2.0;
            worst = worst.max((ne.eigenvalues[2].re - want).abs() / want.abs());
        }
        Ok(worst)
    });
    s.check(m, "remainder_bounds", 1.0, || {
        let r = check_remainder_bounds(&xis[..50], &p, Some(&spec))?;
        Ok(r.max_ratio.iter().cloned().fold(0.0, f64::max))
    });
    let g = GridSpec::cubic(12).unwrap();
    let f = random_div_free(&g, 77, 4.0).unwrap();
    let pe = PhysParams::new(0.3, 0.2, 0.05).unwrap();
    s.check(m, "semigroup_group_property", 1e-11, || {
        let a = propagate_semigroup(&propagate_semigroup(&f, 0.2, &pe, None)?, 0.3, &pe, None)?;
        Ok(rel(&a, &propagate_semigroup(&f, 0.5, &pe, None)?))
    });
    s.check(m, "semigroup_preserves_divergence_free", 1e-10, || {
        Ok(propagate_semigroup(&f, 0.7, &pe, None)?.divergence_residual())
    });
    s.check(m, "semigroup_energy_decay", 0.0, || {
        Ok(coeff_norm(&propagate_semigroup(&f, 0.7, &pe, None)?) - coeff_norm(&f))
    });
    s.check(m, "projectors_sum_to_identity", 1e-10, || {
        let pq = PhysParams::new(0.4, 0.4, 0.1).unwrap();
        let mut acc = Field4::zeros(&g);
        for k in 1..=4 {
            acc.axpy(
                1.0,
                &apply_projector(
                    k,
                    &f.map_modes(|_, xi, mm| {
                        if xi[0] == 0.0 && xi[1] == 0.0 {
                            [Complex64::new(0.0, 0.0); 4]
                        } else {
                            mm
                        }
                    }),
                    &pq,
                    None,
                )?,
            );
        }
        let target = f.map_modes(|_, xi, mm| {
            if xi[0] == 0.0 && xi[1] == 0.0 {
                [Complex64::new(0.0, 0.0); 4]
            } else {
                mm
            }
        });
        Ok(rel(&acc, &target))
    });
}

fn solver_suite(s: &mut Suite) {
    let m = "pde_solvers";
    let g = GridSpec::cubic(12).unwrap();
    s.check(m, "heat_single_mode_exact", 1e-12, || {
        let n = 32;
        let samples: Vec<f64> = (0..n)
            .map(|i| (3.0 * 2.0 * PI * i as f64 / n as f64).cos())
            .collect();
        let out = solve_heat_1d(&Field1::from_samples(2.0 * PI, &samples), 0.5, 0.3)?.to_samples();
        let f = (-0.5 * 9.0 * 0.3f64).exp();
        Ok(out
            .iter()
            .zip(&samples)
            .map(|(a, b)| (a - f * b).abs())
            .fold(0.0, f64::max))
    });
    s.check(m, "heat_estimate_slack", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let th = Field1::from_samples(2.0 * PI, &samples);
        let times: Vec<f64> = (0..40).map(|k| 0.05 * k as f64).collect();
        Ok(-heat_estimate(&th, 0.3, 0.5, &times)?.slack)
    });
    let pb = PhysParams::new(0.1, 0.1, 0.5)
        .unwrap()
        .with_kappa(1.5)
        .unwrap();
    let bg = Background { rho0: 0.7, p0: 1.1 };
    s.check(m, "stationary_boussinesq_residual", 1e-12, || {
        let r = stationary_residual(&pb, &bg, 1.0, 5, 0.25)?;
        Ok(r.momentum.max(r.transport) / r.scale.max(1.0))
    });
    s.check(m, "boussinesq_round_trip", 1e-13, || {
        let x3: Vec<f64> = (0..20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rv = || {
            (0..20)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect::<Vec<f64>>()
        };
        let v = BoussinesqFields {
            v: [rv(), rv(), rv()],
            rho: rv(),
            pressure: rv(),
        };
        let back =
            stratif_to_boussinesq(&boussinesq_to_stratif(&v, &x3, &pb, &bg)?, &x3, &pb, &bg)?;
        Ok(v.rho
            .iter()
            .zip(&back.rho)
            .chain(v.pressure.iter().zip(&back.pressure))
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max))
    });
    s.check(m, "g_tilde_structure", 1e-10, || {
        let f = random_div_free(&g, 5, 4.0)?;
        let vh = stratified_part(&f);
        let gt = compute_G_tilde(&vh)?;
        let sc = gt.max_abs_coefficient().max(f64::MIN_POSITIVE);
        let w = vorticity(&gt)
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let d = divergence(&gt)
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        Ok((w / (6.0 * sc))
            .max(d / (6.0 * sc))
            .max(stratified_part(&gt).max_abs_coefficient() / sc))
    });
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.1,
        ..SolverConfig::default()
    };
    let p = PhysParams::new(0.2, 0.2, 0.1).unwrap();
    s.check(m, "linear_run_equals_semigroup", 1e-10, || {
        let f = random_div_free(&g, 8, 4.0)?;
        let (fs, fo) = (stratified_part(&f), f.sub(&stratified_part(&f)));
        let mut data = InitialData::zeros(&g);
        data.u0_s = fs;
        data.u0_osc = fo;
        let lin = SolverConfig {
            nonlinear: false,
            ..cfg.clone()
        };
        let run = solve_coupled(&data, &p, &lin, &FilterWave::Off)?;
        Ok(rel(
            run.full.final_state().unwrap(),
            &propagate_semigroup(&data.combined()?, 0.1, &p, None)?,
        ))
    });
    s.check(m, "energy_identity", 1e-4, || {
        let f = random_div_free(&g, 9, 4.0)?;
        let mut data = InitialData::zeros(&g);
        data.u0_s = stratified_part(&f);
        data.u0_osc = f.sub(&data.u0_s);
        Ok(solve_coupled(&data, &p, &cfg, &FilterWave::Off)?
            .full
            .energy_balance_defect())
    });
    s.check(m, "blow_up_monitor_finite", 0.0, || {
        let d = generate_initial_data(
            &DataRecipe {
                kmax: 2.0,
                width: 0.8,
                ..DataRecipe::default()
            },
            &g,
            0.1,
        )?;
        let run = solve_coupled(&d, &p, &cfg, &FilterWave::Off)?;
        Ok(if run.full.monitor_finite() { 0.0 } else { 1.0 })
    });
    s.check(m, "well_prepared_d0_vanishes", 0.0, || {
        let d = generate_initial_data(
            &DataRecipe {
                prepared: super::config::Preparation::Well,
                kmax: 2.0,
                width: 0.8,
                ..DataRecipe::default()
            },
            &g,
            0.1,
        )?;
        Ok(coeff_norm(&d.d0()))
    });
}

fn dispersion_suite(s: &mut Suite) {
    let m = "dispersion_lab";
    s.check(m, "phase_integral_sigma_zero", 0.0, || {
        let v = eval_i_alpha_beta(&PhaseIntegralSpec::new(1.0, 0.3, 10.0, 0.0)?)?;
        Ok((v - 99f64.sqrt()).abs())
    });
    s.check(m, "phase_integral_monotone_in_sigma", 1e-10, || {
        let mut prev = f64::INFINITY;
        let mut worst: f64 = 0.0;
        for k in 0..12 {
            let v = eval_i_alpha_beta(&PhaseIntegralSpec::new(
                1.0,
                0.3,
                10.0,
                10f64.powf(-1.0 + 0.5 * k as f64),
            )?)?;
            worst = worst.max(v - prev);
            prev = v;
        }
        Ok(worst)
    });
    s.check(m, "kernel_modulus_bound_at_equal_times", 0.0, || {
        let spec = KernelSpec {
            xi_h: 1.0,
            x3: 0.4,
            t: 0.5,
            t_prime: 0.5,
            params: PhysParams::new(0.1, 0.1, 0.1)?,
            truncation: TruncationSpec::new(0.5, 2.0)?,
        };
        let half = ((3.8f64).powi(2) - 1.0).sqrt();
        Ok(eval_i(&spec)?.norm() - 2.0 * half / (2.0 * PI))
    });
    let g = GridSpec::cubic(16).unwrap();
    s.check(m, "heat_annulus_l2", 0.0, || {
        let (r, big_r) = (2.0, 5.0);
        let fields: Vec<Field4> = (0..5)
            .filter_map(|k| {
                random_band_limited(&g, k, |xi| {
                    let q = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                    q >= r && q <= big_r
                })
                .ok()
                .flatten()
            })
            .collect();
        let times: Vec<f64> = (0..11).map(|i| 0.5 * i as f64).collect();
        Ok(
            check_heat_annulus(&g, r, big_r, 2.0, &times, &fields)?.constant
                - r.powi(4) / big_r.powi(3) * (1.0 + 1e-12),
        )
    });
    s.check(m, "bernstein_l2", 1e-12, || {
        Ok(bernstein_constant(&g, 1.0, 4.0, 1.0, 2.0, 0..5)?.constant - 1.0)
    });
}

fn harness_suite(s: &mut Suite) {
    let m = "convergence_harness";
    let g = GridSpec::cubic(16).unwrap();
    let recipe = DataRecipe {
        gamma: 0.05,
        ..DataRecipe::default()
    };
    s.check(m, "oscillating_norm_target", 1e-10, || {
        let eps = 0.05;
        let d = generate_initial_data(&recipe, &g, eps)?;
        let target = recipe.c0 * eps.powf(-recipe.gamma);
        Ok((norm(
            &d.u0_osc,
            &NormSpec::HomSobolev {
                s: 0.5 + recipe.delta,
            },
        )? - target)
            .abs()
            / target)
    });
    s.check(m, "data_bit_reproducible", 0.0, || {
        let a = generate_initial_data(&recipe, &g, 0.05)?;
        let b = generate_initial_data(&recipe, &g, 0.05)?;
        Ok(
            if a.u0_osc == b.u0_osc && a.u0_s == b.u0_s && a.theta0_eps == b.theta0_eps {
                0.0
            } else {
                1.0
            },
        )
    });
    s.check(m, "data_structure", 1e-10, || {
        generate_initial_data(&recipe, &g, 0.05)?.validate(1e-10)?;
        Ok(0.0)
    });
    s.check(m, "k_of_q_at_4", 1e-15, || {
        Ok((k_of_q(4.0).unwrap_or(f64::NAN) - 0.5).abs())
    });
}

/// Runs every suite. `mutation` injects a known defect.
pub fn run_verify(mutation: Option<Mutation>) -> VerifyReport {
    let mut s = Suite { checks: Vec::new() };
    spectral_core_suite(&mut s);
    linear_suite(&mut s, mutation);
    solver_suite(&mut s);
    dispersion_suite(&mut s);
    harness_suite(&mut s);
    VerifyReport {
        mutation,
        checks: s.checks,
    }
}
