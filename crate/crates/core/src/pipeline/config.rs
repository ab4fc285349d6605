use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::DatasetSummary;
use crate::optimizer::{Backend, BoConfig, ObjectiveSpec, PsoConfig, SweepConfig};
use crate::surrogate::{GbtParams, HyperParams, KrrParams, DEFAULT_FOLDS};

/// Where performance records come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BackendChoice {
    Proxy,
    Surrogate,
    /// External CSV in the dataset schema.
    Dataset(PathBuf),
}

impl FromStr for BackendChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proxy" => Ok(BackendChoice::Proxy),
            "surrogate" => Ok(BackendChoice::Surrogate),
            _ => match s.strip_prefix("dataset:") {
                Some(path) if !path.is_empty() => Ok(BackendChoice::Dataset(PathBuf::from(path))),
                _ => Err(Error::Config(format!(
                    "unknown backend `{s}` (expected proxy, surrogate or dataset:<csv>)"
                ))),
            },
        }
    }
}

impl TryFrom<String> for BackendChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BackendChoice> for String {
    fn from(b: BackendChoice) -> String {
        b.to_string()
    }
}

impl fmt::Display for BackendChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendChoice::Proxy => f.write_str("proxy"),
            BackendChoice::Surrogate => f.write_str("surrogate"),
            BackendChoice::Dataset(p) => write!(f, "dataset:{}", p.display()),
        }
    }
}

impl BackendChoice {
    /// Backend usable as an optimization objective.
    pub fn objective_backend(&self) -> Result<Backend> {
        match self {
            BackendChoice::Proxy => Ok(Backend::Proxy),
            BackendChoice::Surrogate => Ok(Backend::Surrogate),
            BackendChoice::Dataset(_) => Err(Error::Config(
                "a dataset backend cannot drive optimization; use proxy or surrogate".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Pso,
    Bo,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pso" => Ok(Algorithm::Pso),
            "bo" => Ok(Algorithm::Bo),
            _ => Err(Error::Config(format!("unknown algorithm `{s}` (expected pso or bo)"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Pso => "pso",
            Algorithm::Bo => "bo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KrrGrid {
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub degree: Vec<u32>,
}

impl Default for KrrGrid {
    fn default() -> Self {
        Self {
            alpha: vec![1e-3, 1e-2, 1e-1, 1.0],
            gamma: vec![0.01, 0.05, 0.1],
            degree: vec![2, 3],
        }
    }
}

impl KrrGrid {
    pub fn expand(&self) -> Vec<HyperParams> {
        let mut out = Vec::new();
        for &alpha in &self.alpha {
            for &gamma in &self.gamma {
                for &degree in &self.degree {
                    out.push(HyperParams::KernelRidge(KrrParams { alpha, gamma, degree }));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtGrid {
    pub learning_rate: Vec<f64>,
    pub n_estimators: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub l1: Vec<f64>,
}

impl Default for GbtGrid {
    fn default() -> Self {
        Self {
            learning_rate: vec![0.05, 0.1, 0.2],
            n_estimators: vec![100, 150, 300],
            max_depth: vec![2, 3],
            l1: vec![0.0],
        }
    }
}

impl GbtGrid {
    pub fn expand(&self) -> Vec<HyperParams> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rate {
            for &n_estimators in &self.n_estimators {
                for &max_depth in &self.max_depth {
                    for &l1 in &self.l1 {
                        out.push(HyperParams::BoostedTrees(GbtParams {
                            learning_rate,
                            n_estimators,
                            max_depth,
                            l1,
                        }));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub folds: usize,
    pub krr: KrrGrid,
    pub gbt: GbtGrid,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            krr: KrrGrid::default(),
            gbt: GbtGrid::default(),
        }
    }
}

/// Campaign settings, read from TOML. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub design_count: usize,
    /// Defaults to an 80/20 split of the available designs.
    pub split: Option<Split>,
    pub objective: String,
    pub algo: Algorithm,
    pub backend: BackendChoice,
    pub pso: PsoConfig,
    pub bo: BoConfig,
    pub sweep: SweepConfig,
    pub train: TrainConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            out: PathBuf::from("campaign"),
            design_count: 250,
            split: None,
            objective: "max:rft".into(),
            algo: Algorithm::Pso,
            backend: BackendChoice::Proxy,
            pso: PsoConfig::default(),
            bo: BoConfig::default(),
            sweep: SweepConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(split) = self.split {
            if split.train + split.test != self.design_count {
                return Err(Error::Config(format!(
                    "split {}/{} does not sum to design_count {}",
                    split.train, split.test, self.design_count
                )));
            }
        }
        if let BackendChoice::Dataset(path) = &self.backend {
            if !path.is_file() {
                return Err(Error::Config(format!("dataset {} does not exist", path.display())));
            }
        }
        if self.train.folds < 2 {
            return Err(Error::Config("cross-validation needs at least two folds".into()));
        }
        self.pso.validate()?;
        self.objective_spec()?;
        Ok(())
    }

    /// Parsed objective; the backend tag follows `backend` when it can drive
    /// optimization and defaults to the proxy otherwise.
    pub fn objective_spec(&self) -> Result<ObjectiveSpec> {
        let spec: ObjectiveSpec = self.objective.parse()?;
        Ok(spec.with_backend(self.backend.objective_backend().unwrap_or(Backend::Proxy)))
    }

    /// Train/test sizes for `rows` available designs.
    pub fn split_for(&self, rows: usize) -> Result<Split> {
        match self.split {
            Some(s) if s.train + s.test == rows => Ok(s),
            Some(s) => Err(Error::Config(format!(
                "split {}/{} does not match the {rows} designs available",
                s.train, s.test
            ))),
            None => {
                let d = DatasetSummary::for_rows(rows);
                Ok(Split {
                    train: d.train,
                    test: d.test,
                })
            }
        }
    }
}
