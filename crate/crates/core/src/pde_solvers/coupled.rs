//! Shared machinery for runs that advance several fields together (the full
//! system, its limit, and the filtering wave) on one time grid.

use super::nonlinear::{
    g_tilde_from_products, horizontal_nonlinearity, horizontal_products, stratified_nonlinearity,
};
use super::stepper::NonlinearEval;
use crate::linear_stratified::{Generator, PhysParams};
use crate::spectral_core::{Field4, TruncationSpec};
use crate::Result;

#[derive(Clone, Debug)]
pub(crate) enum WaveForcing {
    None,
    Constant(Field4),
    /// `G̃` built from the limit block of the same run.
    FromLimit,
}

#[derive(Clone, Debug)]
pub(crate) enum BlockKind {
    /// `U_ε` under `L − ε⁻¹ℙℬ` and `−ℙ div(v⊗U)`.
    Full,
    /// `(ṽ^h, 0, θ̃)` under plain diffusion and the horizontal Navier–Stokes term.
    Limit,
    /// A linear wave under `L − ε⁻¹ℙℬ`, optionally truncated.
    Wave {
        spec: Option<TruncationSpec>,
        forcing: WaveForcing,
    },
}

pub(crate) struct Blocks {
    pub kinds: Vec<BlockKind>,
    pub params: PhysParams,
    pub nonlinear: bool,
}

impl Blocks {
    pub(crate) fn generators(&self) -> Vec<Generator> {
        self.kinds
            .iter()
            .map(|k| match k {
                BlockKind::Full => Generator::Stratified {
                    params: self.params,
                    spec: None,
                },
                BlockKind::Limit => Generator::Heat {
                    nu: self.params.nu,
                    nu_prime: self.params.nu_prime,
                },
                BlockKind::Wave { spec, .. } => Generator::Stratified {
                    params: self.params,
                    spec: spec.clone(),
                },
            })
            .collect()
    }

    fn limit_index(&self) -> Option<usize> {
        self.kinds
            .iter()
            .position(|k| matches!(k, BlockKind::Limit))
    }

    fn needs_g(&self) -> bool {
        self.kinds.iter().any(|k| {
            matches!(
                k,
                BlockKind::Wave {
                    forcing: WaveForcing::FromLimit,
                    ..
                }
            )
        })
    }

    pub(crate) fn evaluate(&self, state: &[Field4]) -> Result<NonlinearEval> {
        let mut vmax: f64 = 0.0;
        let li = self.limit_index();
        let products = match li {
            Some(i) if self.nonlinear || self.needs_g() => {
                let (p, v) = horizontal_products(&state[i])?;
                vmax = vmax.max(v);
                Some(p)
            }
            _ => None,
        };
        let mut g_cache: Option<Field4> = None;
        let mut terms = Vec::with_capacity(state.len());
        for (b, kind) in self.kinds.iter().enumerate() {
            let grid = state[b].grid();
            let t = match kind {
                BlockKind::Full if self.nonlinear => {
                    let (n, v) = stratified_nonlinearity(&state[b])?;
                    vmax = vmax.max(v);
                    n
                }
                BlockKind::Limit if self.nonlinear => {
                    horizontal_nonlinearity(grid, products.as_ref().unwrap())
                }
                BlockKind::Wave { spec, forcing } => {
                    let g = match forcing {
                        WaveForcing::None => Field4::zeros(grid),
                        WaveForcing::Constant(f) => f.clone(),
                        WaveForcing::FromLimit => g_cache
                            .get_or_insert_with(|| {
                                g_tilde_from_products(grid, products.as_ref().unwrap())
                            })
                            .clone(),
                    };
                    match spec {
                        Some(s) => g.map_modes(|_, xi, m| m.map(|v| v * s.multiplier(xi))),
                        None => g,
                    }
                }
                _ => Field4::zeros(grid),
            };
            terms.push(t);
        }
        Ok(NonlinearEval { terms, vmax })
    }
}
