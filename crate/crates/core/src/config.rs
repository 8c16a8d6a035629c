//! Experiment configuration files.
//!
//! ```json
//! {
//!   "oscillator": {"preset": "harmonic"},
//!   "dim": 1,
//!   "T": 1.0,
//!   "initial_data": {"kind": "mixture", "centers": [[0.0], [0.5]], "coeffs": [1.0, 0.5]},
//!   "domain": {"diam_omega": 2.0, "R0": 1.0, "R": 2.0},
//!   "N": 3,
//!   "eps0": 0.05,
//!   "grid": {"n": 4096},
//!   "outputs": {"dir": "out"}
//! }
//! ```
//!
//! Only `oscillator` and `T` are required everywhere; each subcommand checks
//! for the sections it needs. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::{decompose_with, step_extension, DecomposeOptions, GaussianMixture, StepExtension};
use crate::error::{Error, Result};
use crate::hermite::HermiteCoeffs;
use crate::io::read_mixture;
use crate::observability::DomainSpec;
use crate::oscillator::OscillatorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub oscillator: OscillatorSpec,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(rename = "T")]
    pub t_max: f64,
    #[serde(default)]
    pub initial_data: Option<InitialData>,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(rename = "N", default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub eps0: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Split-step steps per unit time.
    #[serde(default)]
    pub steps_per_unit: Option<usize>,
    /// Output times for `propagate`.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub certificate: Option<CertificateConfig>,
    #[serde(default)]
    pub counterexample: Option<CounterexampleConfig>,
    #[serde(default)]
    pub outputs: Option<OutputConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Relative ODE tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Mixture {
        centers: Vec<Vec<f64>>,
        coeffs: Vec<f64>,
    },
    /// Mixture JSON file, relative to the config file.
    MixtureFile { path: PathBuf },
    StepExtension {
        #[serde(rename = "M")]
        m: f64,
        dx: f64,
        #[serde(default)]
        shift: Option<Vec<f64>>,
    },
    /// One-dimensional Hermite coefficients `dₙ`; in higher dimension the
    /// datum is the tensor power of the one-dimensional function.
    HermiteList { d: Vec<f64> },
    /// Positive coefficients in `[0.1, 1)` and centers uniform in
    /// `[-max_center, max_center]ᵈ`, drawn from the configured seed.
    RandomMixture {
        count: usize,
        #[serde(default = "default_max_center")]
        max_center: f64,
    },
}

fn default_max_center() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(alias = "diam_Omega")]
    pub diam_omega: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half width; sized from the data when absent.
    #[serde(rename = "L", default)]
    pub half_width: Option<f64>,
    /// Points per dimension (power of two).
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// Mixture spacing tested by the admissibility condition; defaults to `eps0`.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Radius tested by the radius condition.
    #[serde(rename = "R1", default)]
    pub r1: Option<f64>,
    /// `α_N`; defaults to the largest center norm of the initial mixture.
    #[serde(rename = "alpha_N", default)]
    pub alpha_n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(default = "default_shift_max")]
    pub shift_max: f64,
    #[serde(default = "default_shift_step")]
    pub shift_step: f64,
    /// Evaluation time; defaults to `T`.
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(rename = "R", default)]
    pub r: f64,
}

fn default_shift_max() -> f64 {
    20.0
}

fn default_shift_step() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Parses and validates; `base` resolves relative paths inside the file.
    pub fn from_json_str(text: &str, base: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: match e.path().to_string() {
                p if p == "." => "<root>".into(),
                p => p,
            },
            message: e.inner().to_string(),
        })?;
        if let Some(InitialData::MixtureFile { path }) = &mut cfg.initial_data {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(OutputConfig { dir: Some(dir) }) = &mut cfg.outputs {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("<file>", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json_str(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        self.oscillator
            .validate()
            .map_err(|e| config_error("oscillator", e.to_string()))?;
        if !(1..=3).contains(&self.dim) {
            return Err(config_error("dim", format!("must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(config_error("T", format!("must be positive, got {}", self.t_max)));
        }
        if let Some(eps0) = self.eps0 {
            if !(eps0 > 0.0 && eps0 < 1.0) {
                return Err(config_error("eps0", format!("must lie in (0, 1), got {eps0}")));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1e-2) {
                return Err(config_error("tol", format!("must lie in (0, 1e-2), got {tol}")));
            }
        }
        if let Some(d) = &self.domain {
            DomainSpec::new(d.diam_omega, d.r0, d.r, self.dim).map_err(|e| config_error("domain", e.to_string()))?;
        }
        if let Some(g) = &self.grid {
            if let Some(n) = g.n {
                if n < 4 || !n.is_power_of_two() {
                    return Err(config_error("grid.n", format!("must be a power of two ≥ 4, got {n}")));
                }
            }
            if let Some(l) = g.half_width {
                if !(l > 0.0) || !l.is_finite() {
                    return Err(config_error("grid.L", format!("must be positive, got {l}")));
                }
            }
        }
        if let Some(times) = &self.times {
            if let Some(t) = times.iter().find(|&&t| !(t >= 0.0 && t <= self.t_max)) {
                return Err(config_error("times", format!("{t} is outside [0, T]")));
            }
        }
        if let Some(c) = &self.counterexample {
            if !(c.shift_step > 0.0) || !(c.shift_max >= 0.0) || !(c.r >= 0.0) {
                return Err(config_error("counterexample", "shift_step must be positive, shift_max and R nonnegative"));
            }
            if let Some(t) = c.t {
                if !(t >= 0.0 && t <= self.t_max) {
                    return Err(config_error("counterexample.t", format!("{t} is outside [0, T]")));
                }
            }
        }
        match &self.initial_data {
            Some(InitialData::Mixture { centers, coeffs }) => {
                GaussianMixture::from_parts(self.dim, centers.clone(), coeffs.clone())
                    .map_err(|e| config_error("initial_data", e.to_string()))?;
            }
            Some(InitialData::MixtureFile { path }) => {
                if !path.is_file() {
                    return Err(config_error(
                        "initial_data.path",
                        format!("{} does not exist", path.display()),
                    ));
                }
            }
            Some(InitialData::StepExtension { m, dx, shift }) => {
                if !(*m >= 2.0) || !(*dx > 0.0 && *dx < 1.0) {
                    return Err(config_error("initial_data", "step extension needs M ≥ 2 and 0 < dx < 1"));
                }
                if shift.as_ref().is_some_and(|s| s.len() != self.dim) {
                    return Err(config_error("initial_data.shift", "length must equal dim"));
                }
            }
            Some(InitialData::HermiteList { d }) => {
                if d.is_empty() || d.iter().any(|v| !v.is_finite()) {
                    return Err(config_error("initial_data.d", "needs at least one finite coefficient"));
                }
            }
            Some(InitialData::RandomMixture { count, max_center }) => {
                if *count == 0 || *count > 10_000 || !(*max_center >= 0.0) {
                    return Err(config_error("initial_data", "count must be in 1..=10000 and max_center ≥ 0"));
                }
            }
            None => {}
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        let d = self
            .domain
            .ok_or_else(|| config_error("domain", "this subcommand needs a domain section"))?;
        DomainSpec::new(d.diam_omega, d.r0, d.r, self.dim)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-10)
    }

    pub fn eps0(&self) -> f64 {
        self.eps0.unwrap_or(0.05)
    }

    pub fn points_per_dim(&self) -> usize {
        self.grid
            .and_then(|g| g.n)
            .unwrap_or(if self.dim == 1 { 1 << 12 } else { 1 << 8 })
    }

    pub fn steps_per_unit(&self) -> usize {
        self.steps_per_unit.unwrap_or(crate::reference::DEFAULT_STEPS_PER_UNIT)
    }

    pub fn output_dir(&self) -> Option<&Path> {
        self.outputs.as_ref().and_then(|o| o.dir.as_deref())
    }

    /// Builds the initial mixture and remembers what it approximates.
    pub fn prepare_initial(&self, seed: Option<u64>) -> Result<PreparedInitial> {
        let data = self
            .initial_data
            .as_ref()
            .ok_or_else(|| config_error("initial_data", "this subcommand needs initial data"))?;
        match data {
            InitialData::Mixture { centers, coeffs } => Ok(PreparedInitial {
                mixture: GaussianMixture::from_parts(self.dim, centers.clone(), coeffs.clone())?,
                source: Source::Mixture,
            }),
            InitialData::MixtureFile { path } => {
                let mixture = read_mixture(path)?;
                if mixture.dim != self.dim {
                    return Err(config_error("initial_data.path", "mixture dimension differs from dim"));
                }
                Ok(PreparedInitial {
                    mixture,
                    source: Source::Mixture,
                })
            }
            InitialData::StepExtension { m, dx, shift } => {
                let shift = shift.clone().unwrap_or_else(|| vec![0.0; self.dim]);
                let st = step_extension(*m, *dx, &shift, self.dim)?;
                Ok(PreparedInitial {
                    mixture: st.mixture.clone(),
                    source: Source::Step(st),
                })
            }
            InitialData::HermiteList { d } => {
                let base = HermiteCoeffs::from_list(d.clone())?;
                let mut coeffs = HermiteCoeffs::zeros(base.order, self.dim);
                for flat in 0..coeffs.len() {
                    coeffs.d[flat] = coeffs.multi_index(flat).iter().map(|&n| base.d[n]).product();
                }
                let order = self.order.unwrap_or(base.order.max(3));
                let f = |x: &[f64]| coeffs.reconstruct(x);
                let dec = decompose_with(&f, order, self.eps0(), self.dim, &DecomposeOptions::default())?;
                Ok(PreparedInitial {
                    mixture: dec.mixture,
                    source: Source::Hermite(coeffs),
                })
            }
            InitialData::RandomMixture { count, max_center } => {
                let seed = seed.or(self.seed).ok_or_else(|| {
                    config_error("seed", "random_mixture needs a seed (config `seed` or --seed)")
                })?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let centers = (0..*count)
                    .map(|_| (0..self.dim).map(|_| rng.gen_range(-*max_center..=*max_center)).collect())
                    .collect();
                let coeffs = (0..*count).map(|_| rng.gen_range(0.1..1.0)).collect();
                Ok(PreparedInitial {
                    mixture: GaussianMixture::from_parts(self.dim, centers, coeffs)?,
                    source: Source::Mixture,
                })
            }
        }
    }
}

/// What a prepared mixture approximates.
#[derive(Debug, Clone)]
pub enum Source {
    /// The mixture is the datum itself.
    Mixture,
    Step(StepExtension),
    Hermite(HermiteCoeffs),
}

#[derive(Debug, Clone)]
pub struct PreparedInitial {
    pub mixture: GaussianMixture,
    pub source: Source,
}

impl PreparedInitial {
    /// The datum the mixture approximates, at `x`.
    pub fn source_value(&self, x: &[f64]) -> f64 {
        match &self.source {
            Source::Mixture => self.mixture.eval(x),
            Source::Step(st) => st.phi(x),
            Source::Hermite(c) => c.reconstruct(x),
        }
    }
}
