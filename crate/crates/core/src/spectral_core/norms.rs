//! The norm suite: homogeneous Sobolev, Besov, Lebesgue, anisotropic
//! `L^{m,q}_{v,h}`, and their time compositions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cutoff::{block_weight, dyadic_block, dyadic_range, BlockAxis};
use super::field::Field4;
use super::grid::GridSpec;
use super::transform::inverse_real;
use crate::{Result, StratoError};

/// A spatial norm. Exponents may be `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormSpec {
    /// `Ḣ^s`, the ξ = 0 mode excluded.
    HomSobolev {
        s: f64,
    },
    /// `H^s` with weight `(1+|ξ|²)^s`.
    Sobolev {
        s: f64,
    },
    /// `Ḃ^s_{p,q}` over the dyadic blocks representable on the grid.
    Besov {
        s: f64,
        p: f64,
        q: f64,
    },
    Lebesgue {
        p: f64,
    },
    /// `L^{m,q}_{v,h}`: `L^q` in `x_h` inside, `L^m` in `x₃` outside.
    Aniso {
        vertical: f64,
        horizontal: f64,
    },
}

impl NormSpec {
    /// Short identifier used as a CSV column name.
    pub fn id(&self) -> String {
        let e = |x: f64| {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                format!("{x}")
            }
        };
        match self {
            NormSpec::HomSobolev { s } => format!("Hdot{}", e(*s)),
            NormSpec::Sobolev { s } => format!("H{}", e(*s)),
            NormSpec::Besov { s, p, q } => format!("Bdot{}_{}_{}", e(*s), e(*p), e(*q)),
            NormSpec::Lebesgue { p } => format!("L{}", e(*p)),
            NormSpec::Aniso {
                vertical,
                horizontal,
            } => format!("L{}_{}vh", e(*vertical), e(*horizontal)),
        }
    }

    /// Parses the identifiers produced by [`NormSpec::id`].
    pub fn parse(s: &str) -> Result<NormSpec> {
        let num = |t: &str| -> Result<f64> {
            if t == "inf" {
                Ok(f64::INFINITY)
            } else {
                t.parse::<f64>()
                    .map_err(|_| StratoError::Config(format!("bad number '{t}' in norm '{s}'")))
            }
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("Hdot") {
            return Ok(NormSpec::HomSobolev { s: num(rest)? });
        }
        if let Some(rest) = s.strip_prefix("Bdot") {
            let parts: Vec<&str> = rest.split('_').collect();
            if parts.len() == 3 {
                return Ok(NormSpec::Besov {
                    s: num(parts[0])?,
                    p: num(parts[1])?,
                    q: num(parts[2])?,
                });
            }
        }
        if let Some(rest) = s.strip_prefix('H') {
            return Ok(NormSpec::Sobolev { s: num(rest)? });
        }
        if let Some(rest) = s.strip_prefix('L') {
            if let Some(body) = rest.strip_suffix("vh") {
                let parts: Vec<&str> = body.split('_').collect();
                if parts.len() == 2 {
                    return Ok(NormSpec::Aniso {
                        vertical: num(parts[0])?,
                        horizontal: num(parts[1])?,
                    });
                }
            } else {
                return Ok(NormSpec::Lebesgue { p: num(rest)? });
            }
        }
        Err(StratoError::Config(format!("unknown norm '{s}'")))
    }
}

/// Pointwise Euclidean magnitude `|U(x)|` over the four slots.
pub fn pointwise_magnitude(f: &Field4) -> Vec<f64> {
    let g = f.grid();
    let mut acc = vec![0.0; g.len()];
    for c in 0..4 {
        if f.comp(c).iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        let p = inverse_real(g, f.comp(c));
        acc.par_iter_mut()
            .zip(p.par_iter())
            .for_each(|(a, x)| *a += x * x);
    }
    acc.into_par_iter().map(f64::sqrt).collect()
}

fn lp_of_samples(g: &GridSpec, mag: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return mag.iter().cloned().fold(0.0, f64::max);
    }
    let cell = g.volume() / g.len() as f64;
    (cell * mag.iter().map(|m| m.powf(p)).sum::<f64>()).powf(1.0 / p)
}

fn aniso_of_samples(g: &GridSpec, mag: &[f64], vertical: f64, horizontal: f64) -> f64 {
    let [n1, n2, n3] = g.n;
    let sp = g.spacing();
    let inner: Vec<f64> = (0..n3)
        .map(|i3| {
            let vals = (0..n1)
                .flat_map(|a| (0..n2).map(move |b| (a, b)))
                .map(|(a, b)| mag[(a * n2 + b) * n3 + i3]);
            if horizontal.is_infinite() {
                vals.fold(0.0, f64::max)
            } else {
                (sp[0] * sp[1] * vals.map(|m| m.powf(horizontal)).sum::<f64>())
                    .powf(1.0 / horizontal)
            }
        })
        .collect();
    if vertical.is_infinite() {
        inner.into_iter().fold(0.0, f64::max)
    } else {
        (sp[2] * inner.iter().map(|m| m.powf(vertical)).sum::<f64>()).powf(1.0 / vertical)
    }
}

fn sobolev_sum(f: &Field4, weight: impl Fn([f64; 3]) -> f64 + Sync) -> f64 {
    let g = f.grid();
    // collected then summed in order so the result is bit-reproducible
    let terms: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let m = f.mode(i);
            let e: f64 = m.iter().map(|v| v.norm_sqr()).sum();
            if e == 0.0 {
                0.0
            } else {
                weight(g.xi(i)) * e
            }
        })
        .collect();
    (g.volume() * terms.iter().sum::<f64>()).sqrt()
}

pub fn hom_sobolev(f: &Field4, s: f64) -> f64 {
    sobolev_sum(f, |xi| {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(s)
        }
    })
}

/// `‖Δ̇_j f‖_{Ḣ^s}` computed directly from the block weights.
fn block_hom_sobolev(f: &Field4, j: i32, s: f64) -> f64 {
    sobolev_sum(f, |xi| {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let w = block_weight(xi, j, BlockAxis::Full);
        if k2 == 0.0 || w == 0.0 {
            0.0
        } else {
            k2.powf(s) * w * w
        }
    })
}

fn lq_sum(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

pub fn norm(f: &Field4, spec: &NormSpec) -> Result<f64> {
    let g = f.grid();
    if g.is_empty() {
        return Err(StratoError::EmptyField);
    }
    Ok(match *spec {
        NormSpec::HomSobolev { s } => hom_sobolev(f, s),
        NormSpec::Sobolev { s } => sobolev_sum(f, |xi| {
            (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powf(s)
        }),
        NormSpec::Lebesgue { p } => lp_of_samples(g, &pointwise_magnitude(f), p),
        NormSpec::Aniso {
            vertical,
            horizontal,
        } => aniso_of_samples(g, &pointwise_magnitude(f), vertical, horizontal),
        NormSpec::Besov { s, p, q } => {
            let blocks: Vec<f64> = dyadic_range(g, BlockAxis::Full)
                .map(|j| {
                    let b = dyadic_block(f, j, BlockAxis::Full);
                    2f64.powf(j as f64 * s) * lp_of_samples(g, &pointwise_magnitude(&b), p)
                })
                .collect();
            lq_sum(blocks.into_iter(), q)
        }
    })
}

/// Trapezoidal `L^p` norm in time of sampled values.
pub fn time_lp(times: &[f64], values: &[f64], p: f64) -> f64 {
    assert_eq!(times.len(), values.len());
    if p.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        acc += 0.5 * dt * (values[k].powf(p) + values[k - 1].powf(p));
    }
    acc.powf(1.0 / p)
}

/// A space-time norm `L^a_T X` or its Chemin–Lerner variant `L̃^a_T X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeNorm {
    pub time_exponent: f64,
    pub space: NormSpec,
    /// Integrate each dyadic block in time before summing the blocks
    /// (only meaningful for Besov and homogeneous Sobolev spaces).
    pub chemin_lerner: bool,
}

impl SpaceTimeNorm {
    pub fn new(time_exponent: f64, space: NormSpec) -> Self {
        SpaceTimeNorm {
            time_exponent,
            space,
            chemin_lerner: false,
        }
    }

    pub fn id(&self) -> String {
        let t = if self.time_exponent.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", self.time_exponent)
        };
        format!(
            "{}L{}t_{}",
            if self.chemin_lerner { "CL" } else { "" },
            t,
            self.space.id()
        )
    }

    /// Parses the identifiers produced by [`SpaceTimeNorm::id`], e.g. `L2t_Linf`.
    pub fn parse(s: &str) -> Result<SpaceTimeNorm> {
        let s = s.trim();
        let (cl, body) = match s.strip_prefix("CL") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (time, space) = body
            .strip_prefix('L')
            .and_then(|r| r.split_once("t_"))
            .ok_or_else(|| {
                StratoError::Config(format!(
                    "space-time norm '{s}' is not of the form L<a>t_<space>"
                ))
            })?;
        let a = if time == "inf" {
            f64::INFINITY
        } else {
            time.parse::<f64>()
                .map_err(|_| StratoError::Config(format!("bad time exponent in '{s}'")))?
        };
        if !(a >= 1.0) {
            return Err(StratoError::Config(format!(
                "time exponent must be at least 1 in '{s}'"
            )));
        }
        Ok(SpaceTimeNorm {
            time_exponent: a,
            space: NormSpec::parse(space)?,
            chemin_lerner: cl,
        })
    }
}

pub fn space_time_norm(times: &[f64], fields: &[Field4], spec: &SpaceTimeNorm) -> Result<f64> {
    if times.len() != fields.len() {
        return Err(StratoError::SizeMismatch {
            expected: times.len(),
            got: fields.len(),
        });
    }
    if fields.is_empty() {
        return Err(StratoError::EmptyField);
    }
    let a = spec.time_exponent;
    if spec.chemin_lerner {
        let g = fields[0].grid();
        match spec.space {
            NormSpec::HomSobolev { s } => {
                let per_block: Vec<f64> = dyadic_range(g, BlockAxis::Full)
                    .map(|j| {
                        let vals: Vec<f64> =
                            fields.iter().map(|f| block_hom_sobolev(f, j, s)).collect();
                        time_lp(times, &vals, a)
                    })
                    .collect();
                return Ok(lq_sum(per_block.into_iter(), 2.0));
            }
            NormSpec::Besov { s, p, q } => {
                let per_block: Vec<f64> = dyadic_range(g, BlockAxis::Full)
                    .map(|j| {
                        let vals: Vec<f64> = fields
                            .iter()
                            .map(|f| {
                                lp_of_samples(
                                    g,
                                    &pointwise_magnitude(&dyadic_block(f, j, BlockAxis::Full)),
                                    p,
                                )
                            })
                            .collect();
                        2f64.powf(j as f64 * s) * time_lp(times, &vals, a)
                    })
                    .collect();
                return Ok(lq_sum(per_block.into_iter(), q));
            }
            _ => {}
        }
    }
    let vals = fields
        .iter()
        .map(|f| norm(f, &spec.space))
        .collect::<Result<Vec<f64>>>()?;
    Ok(time_lp(times, &vals, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn single_mode_sobolev_value() {
        let g = GridSpec::cubic(8).unwrap();
        let mut f = Field4::zeros(&g);
        let a = Complex64::new(0.3, -0.4);
        let idx = g.index(2, 0, 0); // |ξ| = 2
        f.comp_mut(0)[idx] = a;
        let expect = 2f64.sqrt() * a.norm() * g.volume().sqrt();
        assert!((hom_sobolev(&f, 0.5) - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = GridSpec::cubic(8).unwrap();
        let mut f = Field4::zeros(&g);
        f.set_mode_real(
            [1, 2, -1],
            [
                Complex64::new(0.2, 0.1),
                Complex64::new(-0.3, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(1.0, 1.0),
            ],
        );
        f.set_mode_real([0, 0, 0], [Complex64::new(0.7, 0.0); 4]);
        let spec = norm(&f, &NormSpec::Sobolev { s: 0.0 }).unwrap();
        let quad = norm(&f, &NormSpec::Lebesgue { p: 2.0 }).unwrap();
        assert!((spec - quad).abs() < 1e-12 * spec);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = GridSpec::cubic(8).unwrap();
        let f = Field4::zeros(&g);
        for spec in [
            NormSpec::HomSobolev { s: 0.5 },
            NormSpec::Sobolev { s: 1.0 },
            NormSpec::Besov {
                s: 0.0,
                p: 2.0,
                q: 1.0,
            },
            NormSpec::Lebesgue { p: f64::INFINITY },
            NormSpec::Aniso {
                vertical: f64::INFINITY,
                horizontal: 2.0,
            },
        ] {
            assert_eq!(norm(&f, &spec).unwrap(), 0.0);
        }
    }

    #[test]
    fn norm_ids_round_trip() {
        for spec in [
            NormSpec::HomSobolev { s: 0.5 },
            NormSpec::Sobolev { s: 0.625 },
            NormSpec::Besov {
                s: 0.0,
                p: f64::INFINITY,
                q: 1.0,
            },
            NormSpec::Lebesgue { p: 6.0 },
            NormSpec::Aniso {
                vertical: f64::INFINITY,
                horizontal: 2.0,
            },
        ] {
            assert_eq!(NormSpec::parse(&spec.id()).unwrap(), spec);
        }
    }

    #[test]
    fn trapezoid_in_time() {
        let t: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let v: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
        // ∫ x dx = 1/2
        assert!((time_lp(&t, &v, 2.0) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(time_lp(&t, &v, f64::INFINITY), 1.0);
    }
}
