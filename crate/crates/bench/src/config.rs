//! Declarative benchmark configuration (TOML).
//!
//! ```toml
//! run_seed = 7
//! repetitions = 5
//!
//! [[application]]
//! name = "tsp"          # tsp | pvc | maxsat
//! sizes = [4, 5]
//! seeds = [0, 1]
//!
//! [[mapping]]
//! name = "qubo"         # direct | qubo | dinneen | choi
//!
//! [[solver]]
//! name = "sa"           # greedy | reverse_greedy | random | exact | brute_force | sa | qaoa
//! reads = 100
//!
//! [[device]]
//! name = "cpu"
//! threads = 1
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplicationKind {
    Tsp,
    Pvc,
    Maxsat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingKind {
    /// No QUBO; the solver works on the application itself.
    Direct,
    /// Native one-hot QUBO of the tour problems.
    Qubo,
    Dinneen,
    Choi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Greedy,
    ReverseGreedy,
    Random,
    Exact,
    BruteForce,
    Sa,
    Qaoa,
}

macro_rules! snake_display {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let v = serde_json::to_value(self).map_err(|_| fmt::Error)?;
                f.write_str(v.as_str().ok_or(fmt::Error)?)
            }
        }
    )*};
}
snake_display!(ApplicationKind, MappingKind, SolverKind);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplicationSpec {
    pub name: ApplicationKind,
    #[serde(default)]
    pub label: Option<String>,
    /// Nodes (tsp), seams (pvc) or features (maxsat).
    pub sizes: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// TSPLIB, robot path JSON or WCNF file instead of the generator.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub configs: Option<usize>,
    #[serde(default)]
    pub tools: Option<usize>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpec {
    pub name: MappingKind,
    #[serde(default)]
    pub label: Option<String>,
    /// Penalty weight; each encoding has its own default.
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: Option<SolverKind>,
    #[serde(default)]
    pub label: Option<String>,
    pub reads: Option<usize>,
    pub sweeps: Option<usize>,
    pub beta_hot: Option<f64>,
    pub beta_cold: Option<f64>,
    pub layers: Option<usize>,
    pub iterations: Option<usize>,
    pub stepsize: Option<f64>,
    pub momentum: Option<f64>,
    pub samples: Option<usize>,
    pub max_vars: Option<usize>,
    pub max_nodes: Option<u64>,
    pub time_limit_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub name: String,
    #[serde(default = "one")]
    pub threads: usize,
    /// Extra seed stream mixed into every cell run on this device.
    #[serde(default)]
    pub stream: u64,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    run_seed: u64,
    #[serde(default = "default_repetitions")]
    repetitions: usize,
    #[serde(default)]
    application: Vec<ApplicationSpec>,
    #[serde(default)]
    mapping: Vec<MappingSpec>,
    #[serde(default)]
    solver: Vec<SolverSpec>,
    #[serde(default)]
    device: Vec<DeviceSpec>,
}

fn default_repetitions() -> usize {
    5
}

/// Validated configuration with defaults applied and a label on every entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub run_seed: u64,
    pub repetitions: usize,
    pub applications: Vec<ApplicationSpec>,
    pub mappings: Vec<MappingSpec>,
    pub solvers: Vec<SolverSpec>,
    pub devices: Vec<DeviceSpec>,
}

impl ApplicationSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.to_string())
    }
}

impl MappingSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.to_string())
    }
}

impl SolverSpec {
    pub fn kind(&self) -> SolverKind {
        self.name.expect("validated solver has a name")
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind().to_string())
    }

    fn set_params(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut check = |name, set: bool| {
            if set {
                out.push(name);
            }
        };
        check("reads", self.reads.is_some());
        check("sweeps", self.sweeps.is_some());
        check("beta_hot", self.beta_hot.is_some());
        check("beta_cold", self.beta_cold.is_some());
        check("layers", self.layers.is_some());
        check("iterations", self.iterations.is_some());
        check("stepsize", self.stepsize.is_some());
        check("momentum", self.momentum.is_some());
        check("samples", self.samples.is_some());
        check("max_vars", self.max_vars.is_some());
        check("max_nodes", self.max_nodes.is_some());
        check("time_limit_s", self.time_limit_s.is_some());
        out
    }
}

fn allowed_params(kind: SolverKind) -> &'static [&'static str] {
    match kind {
        SolverKind::Greedy | SolverKind::ReverseGreedy | SolverKind::Random => &[],
        SolverKind::Exact => &["max_vars", "max_nodes", "time_limit_s"],
        SolverKind::BruteForce => &["max_nodes"],
        SolverKind::Sa => &["reads", "sweeps", "beta_hot", "beta_cold"],
        SolverKind::Qaoa => &["layers", "iterations", "stepsize", "momentum", "samples"],
    }
}

fn unique<'a>(what: &str, labels: impl Iterator<Item = String> + 'a) -> Result<(), ConfigError> {
    let mut seen = std::collections::BTreeSet::new();
    for (i, l) in labels.enumerate() {
        if !seen.insert(l.clone()) {
            return Err(ConfigError::new(
                format!("{what}[{i}].label"),
                format!("duplicate label `{l}`; set distinct labels"),
            ));
        }
    }
    Ok(())
}

fn positive(path: String, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(ConfigError::new(path, format!("must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn nonzero(path: String, v: Option<usize>) -> Result<(), ConfigError> {
    match v {
        Some(0) => Err(ConfigError::new(path, "must be at least 1")),
        _ => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<BenchConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("<document>", e.to_string()))?;
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::new(path, e.into_inner().message().to_string())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<BenchConfig, ConfigError> {
    if raw.repetitions == 0 {
        return Err(ConfigError::new("repetitions", "must be at least 1"));
    }
    for (i, a) in raw.application.iter().enumerate() {
        if a.sizes.is_empty() {
            return Err(ConfigError::new(format!("application[{i}].sizes"), "needs at least one size"));
        }
        if a.seeds.is_empty() {
            return Err(ConfigError::new(format!("application[{i}].seeds"), "needs at least one seed"));
        }
        for (k, &s) in a.sizes.iter().enumerate() {
            let min = match a.name {
                ApplicationKind::Tsp | ApplicationKind::Maxsat => 3,
                ApplicationKind::Pvc => 1,
            };
            if s < min {
                return Err(ConfigError::new(
                    format!("application[{i}].sizes[{k}]"),
                    format!("size must be at least {min}, got {s}"),
                ));
            }
        }
        if a.name != ApplicationKind::Pvc && (a.configs.is_some() || a.tools.is_some()) {
            return Err(ConfigError::new(
                format!("application[{i}]"),
                "configs and tools apply to pvc only",
            ));
        }
        nonzero(format!("application[{i}].configs"), a.configs)?;
        nonzero(format!("application[{i}].tools"), a.tools)?;
    }
    for (i, m) in raw.mapping.iter().enumerate() {
        if m.name == MappingKind::Direct && m.lambda.is_some() {
            return Err(ConfigError::new(format!("mapping[{i}].lambda"), "direct mapping takes no lambda"));
        }
        positive(format!("mapping[{i}].lambda"), m.lambda)?;
    }
    for (i, s) in raw.solver.iter().enumerate() {
        let Some(kind) = s.name else {
            return Err(ConfigError::new(format!("solver[{i}].name"), "missing field `name`"));
        };
        for p in s.set_params() {
            if !allowed_params(kind).contains(&p) {
                return Err(ConfigError::new(
                    format!("solver[{i}].{p}"),
                    format!("parameter does not apply to solver `{kind}`"),
                ));
            }
        }
        nonzero(format!("solver[{i}].reads"), s.reads)?;
        nonzero(format!("solver[{i}].sweeps"), s.sweeps)?;
        nonzero(format!("solver[{i}].layers"), s.layers)?;
        nonzero(format!("solver[{i}].samples"), s.samples)?;
        positive(format!("solver[{i}].beta_hot"), s.beta_hot)?;
        positive(format!("solver[{i}].beta_cold"), s.beta_cold)?;
        positive(format!("solver[{i}].stepsize"), s.stepsize)?;
        positive(format!("solver[{i}].time_limit_s"), s.time_limit_s)?;
        if let (Some(h), Some(c)) = (s.beta_hot, s.beta_cold) {
            if h >= c {
                return Err(ConfigError::new(format!("solver[{i}].beta_cold"), "must exceed beta_hot"));
            }
        }
        if let Some(m) = s.momentum {
            if !(0.0..1.0).contains(&m) {
                return Err(ConfigError::new(format!("solver[{i}].momentum"), "must lie in [0, 1)"));
            }
        }
    }
    let mut devices = raw.device;
    if devices.is_empty() {
        devices.push(DeviceSpec {
            name: "cpu".into(),
            threads: 1,
            stream: 0,
        });
    }
    for (i, d) in devices.iter().enumerate() {
        if d.threads == 0 {
            return Err(ConfigError::new(format!("device[{i}].threads"), "must be at least 1"));
        }
    }
    unique("application", raw.application.iter().map(ApplicationSpec::label))?;
    unique("mapping", raw.mapping.iter().map(MappingSpec::label))?;
    unique("solver", raw.solver.iter().map(SolverSpec::label))?;
    unique("device", devices.iter().map(|d| d.name.clone()))?;
    Ok(BenchConfig {
        run_seed: raw.run_seed,
        repetitions: raw.repetitions,
        applications: raw.application,
        mappings: raw.mapping,
        solvers: raw.solver,
        devices,
    })
}
