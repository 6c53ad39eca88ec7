//! Experiment configuration and its `key = value` text format.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::linear_stratified::PhysParams;
use crate::pde_solvers::{FilterWave, Scheme, SolverConfig};
use crate::spectral_core::{GridSpec, NormSpec, SpaceTimeNorm, TruncationSpec};
use crate::{Result, StratoError};

/// Whether the initial data is adapted to the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Preparation {
    /// `U₀_osc = 0`, `U₀_S^h = ṽ₀^h`, `θ̃₀ε = θ̃₀`: `D_ε(0) = 0`.
    Well,
    /// Oscillating part of size `𝔠₀ε^{−γ}`, stratified and thermal parts
    /// off the limit by `𝔠₀ε^{α₀}`.
    Ill,
}

/// Recipe for [`generate_initial_data`](super::generate_initial_data).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataRecipe {
    pub delta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub alpha0: f64,
    /// `𝔠₀`: the common amplitude of every component.
    pub c0: f64,
    pub seed: u64,
    pub prepared: Preparation,
    /// Gaussian envelope width of the oscillating packet.
    pub width: f64,
    /// Band limit of the stream function and of the packet carrier.
    pub kmax: f64,
}

impl DataRecipe {
    /// `γ = δ(1−η)/2784`, the choice made in the general-case theorem.
    pub fn default_gamma(delta: f64, eta: f64) -> f64 {
        delta * (1.0 - eta) / 2784.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(StratoError::Config(m));
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("data.delta = {} must lie in (0, 1]", self.delta));
        }
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            return bad(format!("data.eta = {} must lie in (0, 1/2]", self.eta));
        }
        if self.eta * self.delta > 1.0 / 3.0 {
            return bad(format!(
                "data.eta * data.delta = {} exceeds 1/3",
                self.eta * self.delta
            ));
        }
        if !(self.gamma >= 0.0) || !(self.alpha0 > 0.0) || !(self.c0 > 0.0) {
            return bad("need gamma ≥ 0, alpha0 > 0 and c0 > 0".into());
        }
        if !(self.width > 0.0) || !(self.kmax >= 1.0) {
            return bad("need width > 0 and kmax ≥ 1".into());
        }
        Ok(())
    }
}

impl Default for DataRecipe {
    fn default() -> Self {
        DataRecipe {
            delta: 0.125,
            eta: 0.5,
            gamma: Self::default_gamma(0.125, 0.5),
            alpha0: 1.0,
            c0: 1.0,
            seed: 7,
            prepared: Preparation::Ill,
            width: 0.5,
            kmax: 3.0,
        }
    }
}

/// How the filtering wave used for `δ_ε = D_ε − W` is built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WaveFilter {
    /// `W_ε^T` with cutoffs `r = ε^m`, `R = ε^{−M}`.
    Truncated {
        m: f64,
        big_m: f64,
    },
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub length: f64,
    pub nu: f64,
    pub nu_prime: f64,
    pub kappa: f64,
    /// Strictly decreasing, at least four values.
    pub eps: Vec<f64>,
    pub data: DataRecipe,
    pub wave: WaveFilter,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub record_every: usize,
    pub norms: Vec<SpaceTimeNorm>,
    /// Also run the well-prepared counterpart for comparison.
    pub compare_well: bool,
    /// Froude number of a single `simulate` run; the first sweep value if unset.
    pub sim_eps: Option<f64>,
    /// Write field snapshots of the full solution (`simulate` only).
    pub snapshots: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 32,
            length: 2.0 * std::f64::consts::PI,
            nu: 0.1,
            nu_prime: 0.1,
            kappa: 1.0,
            eps: vec![0.1, 0.05, 0.025, 0.0125],
            data: DataRecipe::default(),
            wave: WaveFilter::Truncated {
                m: 1.0 / 259.0,
                big_m: 1.0 / 1554.0,
            },
            dt: 5e-3,
            t_end: 0.5,
            scheme: Scheme::Etd4,
            record_every: 1,
            norms: ["L2t_Linf", "L2t_L2", "Linft_L2"]
                .iter()
                .map(|s| SpaceTimeNorm::parse(s).unwrap())
                .collect(),
            compare_well: true,
            sim_eps: None,
            snapshots: false,
            out_dir: None,
        }
    }
}

/// Keys accepted by [`ExperimentConfig::parse`].
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("grid.n", "points per direction (cubic grid)"),
    ("grid.length", "box side, default 2π"),
    ("params.nu", "kinematic viscosity ν"),
    ("params.nuprime", "thermal diffusivity ν′"),
    (
        "params.kappa",
        "Boussinesq κ (only used by the change of variables)",
    ),
    (
        "params.eps",
        "Froude number of a single simulate run (default: first sweep value)",
    ),
    (
        "sweep.eps",
        "comma-separated Froude numbers, strictly decreasing",
    ),
    ("data.delta", "regularity excess δ"),
    ("data.eta", "η in (0, 1/2]"),
    ("data.gamma", "blow-up exponent γ of the oscillating data"),
    ("data.alpha0", "rate α₀ of the well-preparedness defect"),
    ("data.c0", "amplitude 𝔠₀"),
    ("data.seed", "RNG seed"),
    ("data.prepared", "ill | well"),
    ("data.width", "Gaussian width of the oscillating packet"),
    ("data.kmax", "band limit of the random data"),
    ("wave.filter", "truncated | full"),
    ("wave.m", "exponent m of r = ε^m"),
    ("wave.M", "exponent M of R = ε^{−M}"),
    ("run.dt", "time step"),
    ("run.t_end", "horizon T"),
    ("run.scheme", "etd2 | etd4"),
    ("run.record_every", "record every k-th step"),
    (
        "run.compare_well",
        "also run well-prepared data (true | false)",
    ),
    (
        "norms",
        "comma-separated space-time norms, e.g. L2t_Linf,Linft_L2",
    ),
    ("out.dir", "output directory"),
    (
        "out.snapshots",
        "write spectral snapshots of the full solution in simulate (true | false)",
    ),
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| StratoError::Config(format!("{key}: cannot parse '{v}'")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut gamma_set = false;
        let (mut m, mut big_m, mut filter) = (1.0 / 259.0, 1.0 / 1554.0, "truncated".to_string());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                StratoError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "grid.n" => c.n = num(k, v)?,
                "grid.length" => c.length = num(k, v)?,
                "params.nu" => c.nu = num(k, v)?,
                "params.nuprime" => c.nu_prime = num(k, v)?,
                "params.kappa" => c.kappa = num(k, v)?,
                "params.eps" => c.sim_eps = Some(num(k, v)?),
                "sweep.eps" => {
                    c.eps = v
                        .split(',')
                        .map(|x| num(k, x.trim()))
                        .collect::<Result<_>>()?
                }
                "data.delta" => c.data.delta = num(k, v)?,
                "data.eta" => c.data.eta = num(k, v)?,
                "data.gamma" => {
                    c.data.gamma = num(k, v)?;
                    gamma_set = true;
                }
                "data.alpha0" => c.data.alpha0 = num(k, v)?,
                "data.c0" => c.data.c0 = num(k, v)?,
                "data.seed" => c.data.seed = num(k, v)?,
                "data.prepared" => {
                    c.data.prepared = match v {
                        "ill" => Preparation::Ill,
                        "well" => Preparation::Well,
                        _ => {
                            return Err(StratoError::Config(format!(
                                "data.prepared must be ill or well, got '{v}'"
                            )))
                        }
                    }
                }
                "data.width" => c.data.width = num(k, v)?,
                "data.kmax" => c.data.kmax = num(k, v)?,
                "wave.filter" => filter = v.to_string(),
                "wave.m" => m = num(k, v)?,
                "wave.M" => big_m = num(k, v)?,
                "run.dt" => c.dt = num(k, v)?,
                "run.t_end" => c.t_end = num(k, v)?,
                "run.scheme" => {
                    c.scheme = match v {
                        "etd2" => Scheme::Etd2,
                        "etd4" => Scheme::Etd4,
                        _ => {
                            return Err(StratoError::Config(format!(
                                "run.scheme must be etd2 or etd4, got '{v}'"
                            )))
                        }
                    }
                }
                "run.record_every" => c.record_every = num(k, v)?,
                "run.compare_well" => c.compare_well = num(k, v)?,
                "norms" => {
                    c.norms = v
                        .split(',')
                        .map(SpaceTimeNorm::parse)
                        .collect::<Result<_>>()?
                }
                "out.dir" => c.out_dir = Some(PathBuf::from(v)),
                "out.snapshots" => c.snapshots = num(k, v)?,
                _ => {
                    return Err(StratoError::Config(format!(
                        "line {}: unknown key '{k}'",
                        lineno + 1
                    )))
                }
            }
        }
        if !gamma_set {
            c.data.gamma = DataRecipe::default_gamma(c.data.delta, c.data.eta);
        }
        c.wave = match filter.as_str() {
            "truncated" => WaveFilter::Truncated { m, big_m },
            "full" => WaveFilter::Full,
            _ => {
                return Err(StratoError::Config(format!(
                    "wave.filter must be truncated or full, got '{filter}'"
                )))
            }
        };
        c.validate()?;
        Ok(c)
    }

    /// The larger scenario: 48³ and six Froude numbers.
    pub fn stretch() -> Self {
        ExperimentConfig {
            n: 48,
            eps: vec![0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125],
            ..ExperimentConfig::default()
        }
    }

    /// The filtering wave for the member at `eps`.
    pub fn filter_wave(&self, eps: f64) -> Result<FilterWave> {
        Ok(match self.wave {
            WaveFilter::Full => FilterWave::Full,
            WaveFilter::Truncated { m, big_m } => {
                FilterWave::Truncated(TruncationSpec::from_exponents(m, big_m, eps)?)
            }
        })
    }

    /// ε used by a single simulation.
    pub fn simulation_eps(&self) -> f64 {
        self.sim_eps.unwrap_or(self.eps[0])
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The configuration as `key = value` text that [`parse`](Self::parse) reads back.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        put("grid.n", self.n.to_string());
        put("grid.length", self.length.to_string());
        put("params.nu", self.nu.to_string());
        put("params.nuprime", self.nu_prime.to_string());
        put("params.kappa", self.kappa.to_string());
        if let Some(e) = self.sim_eps {
            put("params.eps", e.to_string());
        }
        put("sweep.eps", list(&self.eps));
        let d = &self.data;
        put("data.delta", d.delta.to_string());
        put("data.eta", d.eta.to_string());
        put("data.gamma", d.gamma.to_string());
        put("data.alpha0", d.alpha0.to_string());
        put("data.c0", d.c0.to_string());
        put("data.seed", d.seed.to_string());
        put(
            "data.prepared",
            if d.prepared == Preparation::Well {
                "well"
            } else {
                "ill"
            }
            .into(),
        );
        put("data.width", d.width.to_string());
        put("data.kmax", d.kmax.to_string());
        match self.wave {
            WaveFilter::Truncated { m, big_m } => {
                put("wave.filter", "truncated".into());
                put("wave.m", m.to_string());
                put("wave.M", big_m.to_string());
            }
            WaveFilter::Full => put("wave.filter", "full".into()),
        }
        put("run.dt", self.dt.to_string());
        put("run.t_end", self.t_end.to_string());
        put(
            "run.scheme",
            if self.scheme == Scheme::Etd2 {
                "etd2"
            } else {
                "etd4"
            }
            .into(),
        );
        put("run.record_every", self.record_every.to_string());
        put("run.compare_well", self.compare_well.to_string());
        put(
            "norms",
            self.norms
                .iter()
                .map(|n| n.id())
                .collect::<Vec<_>>()
                .join(","),
        );
        if let Some(d) = &self.out_dir {
            put("out.dir", d.display().to_string());
        }
        if self.snapshots {
            put("out.snapshots", "true".into());
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.len() < 4 {
            return Err(StratoError::Config(format!(
                "sweep.eps needs at least 4 values, got {}",
                self.eps.len()
            )));
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(StratoError::Config("every ε must lie in (0, 1)".into()));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(StratoError::Config(
                "sweep.eps must be strictly decreasing".into(),
            ));
        }
        if self.norms.is_empty() {
            return Err(StratoError::Config("at least one norm is required".into()));
        }
        if let Some(n) = self.norms.iter().find(|n| n.chemin_lerner) {
            return Err(StratoError::Config(format!(
                "{}: Chemin–Lerner norms need snapshots and are not supported in sweeps",
                n.id()
            )));
        }
        if let Some(e) = self.sim_eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(StratoError::Config(format!(
                    "params.eps = {e} must be positive"
                )));
            }
        }
        self.data.validate()?;
        self.grid()?;
        self.params(self.eps[0])?;
        self.solver_config().validate()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new([self.n; 3], [self.length; 3], 2.0 / 3.0)
    }

    pub fn params(&self, eps: f64) -> Result<PhysParams> {
        PhysParams::new(self.nu, self.nu_prime, eps)?.with_kappa(self.kappa)
    }

    /// Solver settings: the spatial parts of the configured norms are
    /// recorded along the run, snapshots are not kept.
    pub fn solver_config(&self) -> SolverConfig {
        let mut norms: Vec<NormSpec> = Vec::new();
        for n in &self.norms {
            if !norms.contains(&n.space) {
                norms.push(n.space.clone());
            }
        }
        SolverConfig {
            dt: self.dt,
            t_end: self.t_end,
            scheme: self.scheme,
            record_every: self.record_every,
            keep_snapshots: false,
            norms,
            ..SolverConfig::default()
        }
    }
}
