//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": { "zeta": 3, "beta": 1.5, "tau": 2, "nu": 1.4, "d1": 0.1, "delta": 2.7,
//!              "lam1": { "kind": "turning_law", "amp": 0.25, "exponent": 0.6666666666666666 } },
//!   "mesh": { "nx": 40, "ny": 40 },
//!   "solver": { "dt": 0.01, "t_final": 200 },
//!   "kinetic": { "epsilon": 0.05 }
//! }
//! ```
//!
//! Every model scalar is required. Coefficient laws default to unit speeds
//! and no turning; the other blocks default field by field.

use std::fmt;
use std::path::Path;

use phyllo_core::fem::{build_mesh, Mesh};
use phyllo_core::kinetic::{KineticGrid, KineticRunConfig, KineticState, TransportScheme};
use phyllo_core::model::CoefficientCase;
use phyllo_core::timestepper::SolverConfig;
use phyllo_core::{CoeffSpec, DeltaRatio, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Tagged form of [`CoeffSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffConfig {
    Constant { value: f64 },
    SpeedLaw { base: f64, amp: f64, exponent: f64 },
    TurningLaw { amp: f64, exponent: f64 },
}

impl From<CoeffConfig> for CoeffSpec {
    fn from(c: CoeffConfig) -> Self {
        match c {
            CoeffConfig::Constant { value } => CoeffSpec::Constant(value),
            CoeffConfig::SpeedLaw {
                base,
                amp,
                exponent,
            } => CoeffSpec::SpeedLaw {
                base,
                amp,
                exponent,
            },
            CoeffConfig::TurningLaw { amp, exponent } => CoeffSpec::TurningLaw { amp, exponent },
        }
    }
}

impl From<CoeffSpec> for CoeffConfig {
    fn from(c: CoeffSpec) -> Self {
        match c {
            CoeffSpec::Constant(value) => CoeffConfig::Constant { value },
            CoeffSpec::SpeedLaw {
                base,
                amp,
                exponent,
            } => CoeffConfig::SpeedLaw {
                base,
                amp,
                exponent,
            },
            CoeffSpec::TurningLaw { amp, exponent } => CoeffConfig::TurningLaw { amp, exponent },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRatioConfig {
    #[default]
    Linearized,
    Base,
}

fn one() -> CoeffConfig {
    CoeffConfig::Constant { value: 1.0 }
}

fn zero() -> CoeffConfig {
    CoeffConfig::Constant { value: 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub zeta: f64,
    pub beta: f64,
    pub tau: f64,
    pub nu: f64,
    pub d1: f64,
    pub delta: f64,
    #[serde(default)]
    pub delta_ratio: DeltaRatioConfig,
    #[serde(default = "one")]
    pub c1: CoeffConfig,
    #[serde(default = "one")]
    pub c2: CoeffConfig,
    #[serde(default = "zero")]
    pub lam1: CoeffConfig,
    #[serde(default = "zero")]
    pub lam2: CoeffConfig,
}

impl ModelConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            zeta: self.zeta,
            beta: self.beta,
            tau: self.tau,
            nu: self.nu,
            d1: self.d1,
            delta: self.delta,
            delta_ratio: match self.delta_ratio {
                DeltaRatioConfig::Linearized => DeltaRatio::Linearized,
                DeltaRatioConfig::Base => DeltaRatio::Base,
            },
            c1: self.c1.into(),
            c2: self.c2.into(),
            lam1: self.lam1.into(),
            lam2: self.lam2.into(),
        }
    }

    pub fn from_params(p: &ModelParams) -> Self {
        ModelConfig {
            zeta: p.zeta,
            beta: p.beta,
            tau: p.tau,
            nu: p.nu,
            d1: p.d1,
            delta: p.delta,
            delta_ratio: match p.delta_ratio {
                DeltaRatio::Linearized => DeltaRatioConfig::Linearized,
                DeltaRatio::Base => DeltaRatioConfig::Base,
            },
            c1: p.c1.into(),
            c2: p.c2.into(),
            lam1: p.lam1.into(),
            lam2: p.lam2.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            nx: 40,
            ny: 40,
            lx: std::f64::consts::PI,
            ly: std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    pub dt: f64,
    pub t_final: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub linear_tol: f64,
    pub snapshot_every: f64,
    pub seed: u64,
    pub noise_rel: f64,
    pub reactions: bool,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock::from(SolverConfig::default())
    }
}

impl From<SolverConfig> for SolverBlock {
    fn from(c: SolverConfig) -> Self {
        SolverBlock {
            dt: c.dt,
            t_final: c.t_final,
            picard_tol: c.picard_tol,
            picard_max_iters: c.picard_max_iters,
            linear_tol: c.linear_solver_tol,
            snapshot_every: c.snapshot_every,
            seed: c.seed,
            noise_rel: c.noise_rel,
            reactions: c.reactions,
        }
    }
}

impl SolverBlock {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            t_final: self.t_final,
            picard_tol: self.picard_tol,
            picard_max_iters: self.picard_max_iters,
            linear_solver_tol: self.linear_tol,
            snapshot_every: self.snapshot_every,
            seed: self.seed,
            noise_rel: self.noise_rel,
            reactions: self.reactions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    Upwind,
    #[default]
    Muscl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KineticConfig {
    pub epsilon: f64,
    pub eta: f64,
    pub c: f64,
    pub nx: usize,
    pub ntheta: usize,
    pub nu_nodes: usize,
    pub length: f64,
    /// Defaults to one e-folding time `1 / (D (π/L)²)` of the cosine mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    pub cfl: f64,
    pub scheme: SchemeConfig,
    pub records: usize,
}

impl Default for KineticConfig {
    fn default() -> Self {
        KineticConfig {
            epsilon: 0.05,
            eta: 1.0,
            c: 1.0,
            nx: 200,
            ntheta: 8,
            nu_nodes: 64,
            length: 1.0,
            t_final: None,
            cfl: 0.9,
            scheme: SchemeConfig::Muscl,
            records: 100,
        }
    }
}

impl KineticConfig {
    pub fn grid(&self) -> phyllo_core::Result<KineticGrid> {
        KineticGrid::new(self.nx, self.ntheta, self.nu_nodes, self.length)
    }

    pub fn initial_state(&self, grid: &KineticGrid) -> phyllo_core::Result<KineticState> {
        KineticState::cosine(grid, self.epsilon, self.eta, self.c)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or_else(|| {
            let k = std::f64::consts::PI / self.length;
            1.0 / (phyllo_core::kinetic::predicted_diffusivity(self.eta, self.c) * k * k)
        })
    }

    pub fn run_config(&self) -> KineticRunConfig {
        KineticRunConfig {
            t_final: self.t_final(),
            cfl: self.cfl,
            scheme: match self.scheme {
                SchemeConfig::Upwind => TransportScheme::Upwind,
                SchemeConfig::Muscl => TransportScheme::Muscl,
            },
            records: self.records,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.grid().map_err(invalid("kinetic"))?;
        self.initial_state(&grid).map_err(invalid("kinetic"))?;
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "kinetic: t_final must be positive, got {t}"
                )));
            }
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "kinetic: cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if self.records == 0 {
            return Err(ConfigError::Invalid(
                "kinetic: records must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub kinetic: KineticConfig,
}

fn invalid(block: &'static str) -> impl Fn(phyllo_core::Error) -> ConfigError {
    move |e| ConfigError::Invalid(format!("{block}: {e}"))
}

impl RunConfig {
    /// Reference parameters with one of the four coefficient cases.
    pub fn reference(zeta: f64, delta: f64, case: CoefficientCase) -> Self {
        RunConfig {
            model: ModelConfig::from_params(&ModelParams::reference(zeta, delta, case)),
            mesh: MeshConfig::default(),
            solver: SolverBlock::default(),
            kinetic: KineticConfig::default(),
        }
    }

    pub fn params(&self) -> ModelParams {
        self.model.params()
    }

    pub fn mesh(&self) -> phyllo_core::Result<Mesh> {
        build_mesh(self.mesh.nx, self.mesh.ny, self.mesh.lx, self.mesh.ly)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params().validate().map_err(invalid("model"))?;
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return Err(ConfigError::Invalid(
                "mesh: nx and ny must be at least 1".into(),
            ));
        }
        if !(self.mesh.lx > 0.0
            && self.mesh.lx.is_finite()
            && self.mesh.ly > 0.0
            && self.mesh.ly.is_finite())
        {
            return Err(ConfigError::Invalid(
                "mesh: lx and ly must be positive".into(),
            ));
        }
        self.solver
            .solver_config()
            .validate()
            .map_err(invalid("solver"))?;
        self.kinetic.validate()
    }

    pub fn from_value(v: Value) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_value(v).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        if overrides.is_empty() {
            // Direct parse keeps line and column in the error.
            let cfg: RunConfig =
                serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
            cfg.validate()?;
            return Ok(cfg);
        }
        let mut v: Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut v, o)?;
        }
        Self::from_value(v)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, overrides).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Normalized JSON with every default spelled out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Applies `block.key=value` (or a deeper dotted path). The value is read as
/// JSON when possible and as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| {
        ConfigError::Parse(format!(
            "override `{assignment}` is not of the form key=value"
        ))
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError::Parse(format!(
            "override key `{path}` is malformed"
        )));
    }
    let mut node = root;
    for key in &keys[..keys.len() - 1] {
        let obj = node.as_object_mut().ok_or_else(|| {
            ConfigError::Parse(format!(
                "override `{path}`: `{key}` is not inside an object"
            ))
        })?;
        node = obj
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node.as_object_mut().ok_or_else(|| {
        ConfigError::Parse(format!(
            "override `{path}` does not address an object field"
        ))
    })?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
