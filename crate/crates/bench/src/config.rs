//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use hasimoto_core::grid::Grid;
use hasimoto_core::params::FlowParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{BackendSpec, MAX_N0};
use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Equiv,
    Run,
    Convergence,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Equiv => "equiv",
            Self::Run => "run",
            Self::Convergence => "convergence",
        }
    }
}

/// Flow coefficients, either directly or through energy weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    Energy { alpha: f64, beta: f64, gamma: f64 },
    Direct { a: f64, b: f64, c: f64, lambda: f64 },
}

impl ParamSpec {
    pub fn flow_params(&self) -> Result<FlowParams> {
        Ok(match *self {
            Self::Energy { alpha, beta, gamma } => FlowParams::from_energy(alpha, beta, gamma)?,
            Self::Direct { a, b, c, lambda } => FlowParams::new(a, b, c, lambda)?,
        })
    }
}

/// Named initial profiles `Q(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    GaussianEnvelope { amplitude: f64, width: f64, carrier: f64 },
    GreatCircleBump { amplitude: f64, width: f64 },
    RandomSmooth {
        seed: u64,
        #[serde(default = "default_random_amplitude")]
        amplitude: f64,
    },
}

fn default_random_amplitude() -> f64 {
    0.3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Geo,
    Q,
}

/// Time steps: `cfl Δx⁴ / |a|` for the geometric flow, `q_factor Δx²` for
/// the transformed system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtPolicy {
    pub cfl: f64,
    pub q_factor: f64,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self { cfl: 0.2, q_factor: 0.05 }
    }
}

impl DtPolicy {
    pub fn geo(&self, grid: &Grid, params: &FlowParams) -> f64 {
        self.cfl * grid.dx().powi(4) / params.a.abs()
    }

    pub fn q(&self, grid: &Grid) -> f64 {
        self.q_factor * grid.dx().powi(2)
    }
}

/// Pass thresholds. Absolute tolerances are multiplied by `--tol-scale`;
/// the minimum refinement ratios are not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub closed_form: f64,
    pub contraction: f64,
    pub specialization: f64,
    pub equivalence: f64,
    pub energy_drift: f64,
    pub unitarity: f64,
    pub trace: f64,
    pub gauge_modulus: f64,
    /// Smallest error ratio per grid halving accepted as second order.
    pub min_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            closed_form: 1e-10,
            contraction: 1e-10,
            specialization: 1e-12,
            equivalence: 1e-2,
            energy_drift: 1e-3,
            unitarity: 1e-10,
            trace: 1e-12,
            gauge_modulus: 1e-12,
            min_ratio: 3.0,
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            identity: self.identity * s,
            closed_form: self.closed_form * s,
            contraction: self.contraction * s,
            specialization: self.specialization * s,
            equivalence: self.equivalence * s,
            energy_drift: self.energy_drift * s,
            unitarity: self.unitarity * s,
            trace: self.trace * s,
            gauge_modulus: self.gauge_modulus * s,
            min_ratio: self.min_ratio,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub backend: BackendSpec,
    /// Backends covered by `verify`.
    #[serde(default = "default_verify_backends")]
    pub verify_backends: Vec<BackendSpec>,
    pub grid: Grid,
    pub params: ParamSpec,
    pub initial: InitialSpec,
    pub horizon: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub dt: DtPolicy,
    #[serde(default = "default_system")]
    pub system: SystemKind,
    /// Grid levels `M, 2M - 1, ...` for refinement studies.
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Random profiles per specialization check in `verify`.
    #[serde(default = "default_random_profiles")]
    pub random_profiles: usize,
    /// Random triples per backend in the contraction check.
    #[serde(default = "default_triples")]
    pub contraction_triples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Perturbation added to one slot of a closed-form `S` in `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_verify_backends() -> Vec<BackendSpec> {
    vec![
        BackendSpec::Sphere2,
        BackendSpec::Grassmann { n0: 2, k0: 1 },
        BackendSpec::Grassmann { n0: 3, k0: 1 },
        BackendSpec::Grassmann { n0: 4, k0: 2 },
        BackendSpec::ConstK { n: 3, k: 4.0 },
    ]
}

fn default_samples() -> usize {
    4
}

fn default_system() -> SystemKind {
    SystemKind::Geo
}

fn default_levels() -> usize {
    3
}

fn default_random_profiles() -> usize {
    100
}

fn default_triples() -> usize {
    1000
}

impl ExperimentConfig {
    /// Built-in configuration used when no `--config` is given.
    pub fn default_for(command: Command) -> Self {
        let base = Self {
            backend: BackendSpec::Grassmann { n0: 2, k0: 1 },
            verify_backends: default_verify_backends(),
            grid: Grid { l: 20.0, m: 65 },
            params: ParamSpec::Energy {
                alpha: 1.0,
                beta: 1.0,
                gamma: -0.125,
            },
            initial: InitialSpec::GaussianEnvelope {
                amplitude: 0.3,
                width: 3.0,
                carrier: 0.5,
            },
            horizon: 0.2,
            samples: default_samples(),
            dt: DtPolicy::default(),
            system: default_system(),
            levels: default_levels(),
            random_profiles: default_random_profiles(),
            contraction_triples: default_triples(),
            seed: 0,
            tolerances: Tolerances::default(),
            perturbation: None,
            output: None,
        };
        match command {
            Command::Verify => Self {
                grid: Grid { l: 8.0, m: 129 },
                initial: InitialSpec::RandomSmooth {
                    seed: 0,
                    amplitude: 0.5,
                },
                ..base
            },
            Command::Run => Self { levels: 1, ..base },
            Command::Equiv | Command::Convergence => base,
        }
    }

    /// Reads a JSON object whose top-level keys replace those of
    /// [`Self::default_for`] `command`.
    pub fn load(path: &Path, command: Command) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text, command).map_err(|e| match e {
            BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str, command: Command) -> Result<Self> {
        let bad = |e: serde_json::Error| BenchError::Config(e.to_string());
        let overrides: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
        let serde_json::Value::Object(overrides) = overrides else {
            return Err(BenchError::Config("configuration must be a JSON object".into()));
        };
        let mut merged = serde_json::to_value(Self::default_for(command)).map_err(bad)?;
        let fields = merged.as_object_mut().expect("config serializes to an object");
        fields.extend(overrides);
        serde_json::from_value(merged).map_err(bad)
    }

    /// Applies `--seed` and `--tol-scale`.
    pub fn with_overrides(mut self, seed: Option<u64>, tol_scale: Option<f64>) -> Result<Self> {
        if let Some(s) = seed {
            self.seed = s;
            if let InitialSpec::RandomSmooth { seed, .. } = &mut self.initial {
                *seed = s;
            }
        }
        if let Some(s) = tol_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(BenchError::Config(format!("tolerance scale must be positive, got {s}")));
            }
            self.tolerances = self.tolerances.scaled(s);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        Grid::new(self.grid.l, self.grid.m)?;
        for b in std::iter::once(&self.backend).chain(&self.verify_backends) {
            match *b {
                BackendSpec::Sphere2 => {}
                BackendSpec::Grassmann { n0, k0 } => {
                    if !(2..=MAX_N0).contains(&n0) || k0 == 0 || k0 >= n0 {
                        return bad(format!("unsupported Grassmannian G({n0},{k0})"));
                    }
                }
                BackendSpec::ConstK { n, k } => {
                    if !(1..MAX_N0).contains(&n) || !k.is_finite() {
                        return bad(format!("unsupported ConstK(n={n}, K={k})"));
                    }
                }
            }
        }
        self.params.flow_params()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.samples == 0 || self.levels == 0 {
            return bad("samples and levels must be at least 1".into());
        }
        if !(self.dt.cfl > 0.0 && self.dt.q_factor > 0.0) {
            return bad("time-step factors must be positive".into());
        }
        let (amplitude, width) = match self.initial {
            InitialSpec::GaussianEnvelope { amplitude, width, .. } | InitialSpec::GreatCircleBump { amplitude, width } => (amplitude, width),
            InitialSpec::RandomSmooth { amplitude, .. } => (amplitude, 1.0),
        };
        if !(amplitude >= 0.0 && amplitude.is_finite() && width > 0.0 && width.is_finite()) {
            return bad("profile amplitude must be non-negative and width positive".into());
        }
        Ok(())
    }

    /// Grids `M, 2M - 1, 4M - 3, ...` over `levels` levels.
    pub fn grids(&self) -> Vec<Grid> {
        let mut out = vec![self.grid];
        for _ in 1..self.levels {
            out.push(out.last().expect("non-empty").refined());
        }
        out
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_value(self).expect("config serializes").to_string();
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
