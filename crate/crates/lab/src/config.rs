//! Run configuration, persisted as TOML.
//!
//! ```toml
//! master_seed = 7
//! omega = 1.0
//! output_dir = "out"
//!
//! [instance]
//! n = 10            # generate with a seed derived from master_seed ...
//! # seed = 3        # ... or with an explicit seed
//! # file = "a.ec3"  # or read from disk
//!
//! [path]
//! algorithm = "xy"  # x | xyz | xy | ising
//! kind = "straight" # straight | nonlinear | clause_by_clause
//!
//! [search]
//! t_start = 1.0
//! growth = 2.0
//! rel_tol = 0.05
//! t_cap = 1000.0
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use aqcsim::paths::Algorithm;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub instance: InstanceSource,
    #[serde(default)]
    pub path: PathSpec,
    /// Path variants compared by `gap` and the runtime sweep; empty means
    /// just `path`.
    #[serde(default)]
    pub variants: Vec<PathSpec>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub search: SearchConfig,
    /// Runtimes `omega T` of the final-energy sweep.
    #[serde(default)]
    pub runtimes: Vec<f64>,
    #[serde(default)]
    pub scaling: ScalingConfig,
    /// Rows of the `evolve` time series, including both ends.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Try every Hamming weight instead of the known solution's.
    #[serde(default)]
    pub scan_hamming: bool,
    /// Worker threads; `AQCLAB_THREADS` overrides.
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    pub file: Option<PathBuf>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    #[default]
    Straight,
    Nonlinear,
    ClauseByClause,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    X,
    Xyz,
    #[default]
    Xy,
    Ising,
}

impl From<AlgorithmName> for Algorithm {
    fn from(a: AlgorithmName) -> Self {
        match a {
            AlgorithmName::X => Algorithm::X,
            AlgorithmName::Xyz => Algorithm::Xyz,
            AlgorithmName::Xy => Algorithm::Xy,
            AlgorithmName::Ising => Algorithm::Ising,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    #[serde(default)]
    pub algorithm: AlgorithmName,
    #[serde(default)]
    pub kind: PathKind,
    /// Bump coupling of the nonlinear path.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Clause dropped from the bump operator; defaults to the first removable one.
    #[serde(default)]
    pub removed_clause: Option<[usize; 3]>,
    /// Clause positions for the clause-by-clause path; defaults to file order.
    #[serde(default)]
    pub clause_order: Option<Vec<usize>>,
    /// Shuffle the clause order with this seed; ignored if `clause_order` is set.
    #[serde(default)]
    pub clause_order_seed: Option<u64>,
    /// Column value in CSV output; derived from the other fields if absent.
    #[serde(default)]
    pub label: Option<String>,
}

impl Default for PathSpec {
    fn default() -> Self {
        PathSpec {
            algorithm: AlgorithmName::default(),
            kind: PathKind::default(),
            alpha: default_alpha(),
            removed_clause: None,
            clause_order: None,
            clause_order_seed: None,
            label: None,
        }
    }
}

impl PathSpec {
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let alg = Algorithm::from(self.algorithm).label();
        match self.kind {
            PathKind::Straight => format!("{alg}-straight"),
            PathKind::Nonlinear => match self.removed_clause {
                Some([i, j, k]) => format!("{alg}-nonlinear-a{}-{i}.{j}.{k}", self.alpha),
                None => format!("{alg}-nonlinear-a{}", self.alpha),
            },
            PathKind::ClauseByClause => match self.clause_order_seed {
                Some(seed) if self.clause_order.is_none() => format!("{alg}-clause-by-clause-seed{seed}"),
                _ => format!("{alg}-clause-by-clause"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step in units of `1/omega`; the default rule applies if absent.
    pub dt: Option<f64>,
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
    #[serde(default)]
    pub renormalize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt: None, norm_tolerance: default_norm_tolerance(), renormalize: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "one")]
    pub t_start: f64,
    #[serde(default = "two")]
    pub growth: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_cap")]
    pub t_cap: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { t_start: 1.0, growth: 2.0, rel_tol: default_rel_tol(), t_cap: default_cap() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default = "one_usize")]
    pub instances_per_n: usize,
    /// Leave censored runs out of the quartiles.
    #[serde(default)]
    pub exclude_censored: bool,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn one_usize() -> usize {
    1
}
fn default_alpha() -> f64 {
    8.0
}
fn default_rel_tol() -> f64 {
    0.05
}
fn default_cap() -> f64 {
    1000.0
}
fn default_samples() -> usize {
    101
}
fn default_norm_tolerance() -> f64 {
    aqcsim::integrator::DEFAULT_NORM_TOLERANCE
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// Read a config; a relative `output_dir` or instance file is resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        if let Some(f) = &cfg.instance.file {
            if f.is_relative() {
                cfg.instance.file = Some(base.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        let s = &self.search;
        if !(s.t_start > 0.0 && s.growth > 1.0 && s.rel_tol > 0.0 && s.t_cap >= s.t_start) {
            return bad("search needs t_start > 0, growth > 1, rel_tol > 0 and t_cap >= t_start".into());
        }
        if let Some(dt) = self.integrator.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("integrator.dt must be positive, got {dt}"));
            }
        }
        if self.runtimes.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("runtimes must be finite and non-negative".into());
        }
        if self.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        if self.instance.file.is_some() && (self.instance.n.is_some() || self.instance.seed.is_some()) {
            return bad("instance takes either `file` or `n`/`seed`, not both".into());
        }
        Ok(())
    }

    /// `variants`, or `[path]` when none are listed.
    pub fn path_variants(&self) -> Vec<PathSpec> {
        if self.variants.is_empty() {
            vec![self.path.clone()]
        } else {
            self.variants.clone()
        }
    }

    /// Worker count: `AQCLAB_THREADS`, then `threads`, then 1.
    pub fn worker_threads(&self) -> usize {
        std::env::var("AQCLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .or(self.threads)
            .unwrap_or(1)
            .max(1)
    }
}
