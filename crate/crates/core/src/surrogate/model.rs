//! Trained predictors and their self-describing JSON files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::OutputKind;
use crate::geometry::FeatureVector;

use super::cv::{grid_search_cv, CvReport, HyperParams};
use super::gbt::BoostedTreeModel;
use super::krr::KernelRidgeModel;
use super::{Matrix, Scaler};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    KernelRidge,
    BoostedTrees,
}

impl ModelFamily {
    /// Kernel ridge for the stiffness outputs, boosted trees for durability
    /// and vibration.
    pub fn default_for(output: OutputKind) -> Self {
        match output {
            OutputKind::Rfc | OutputKind::Rft => ModelFamily::KernelRidge,
            _ => ModelFamily::BoostedTrees,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedModel {
    KernelRidge(KernelRidgeModel),
    BoostedTrees(BoostedTreeModel),
}

impl FittedModel {
    pub fn family(&self) -> ModelFamily {
        match self {
            FittedModel::KernelRidge(_) => ModelFamily::KernelRidge,
            FittedModel::BoostedTrees(_) => ModelFamily::BoostedTrees,
        }
    }

    fn predict_one(&self, z: &[f64]) -> f64 {
        match self {
            FittedModel::KernelRidge(m) => m.predict_one(z),
            FittedModel::BoostedTrees(m) => m.predict_one(z),
        }
    }
}

/// A scaler plus a fitted predictor for one output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub schema_version: u32,
    pub output: OutputKind,
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub model: FittedModel,
}

impl SurrogateModel {
    /// Standardizes `x` and fits the predictor described by `params`.
    pub fn fit(output: OutputKind, x: &Matrix, y: &[f64], params: &HyperParams) -> Result<Self> {
        let names: Vec<String> = FeatureVector::names().to_vec();
        let names = (x.first().map(Vec::len) == Some(names.len())).then_some(names);
        let scaler = Scaler::fit_named(x, names.as_deref())?;
        let z = scaler.transform(x);
        let model = match params {
            HyperParams::KernelRidge(p) => FittedModel::KernelRidge(KernelRidgeModel::fit(&z, y, *p)?),
            HyperParams::BoostedTrees(p) => FittedModel::BoostedTrees(BoostedTreeModel::fit(&z, y, *p)?),
        };
        Ok(Self {
            schema_version: MODEL_SCHEMA_VERSION,
            output,
            feature_names: names.unwrap_or_default(),
            scaler,
            model,
        })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.model.predict_one(&self.scaler.transform_row(x))
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.iter().map(|r| self.predict_one(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if m.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::Data(format!(
                "model schema version {} is not supported (expected {MODEL_SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Grid search on the training data, then refit the winner on all of it.
pub fn train_surrogate(
    output: OutputKind,
    x: &Matrix,
    y: &[f64],
    grid: &[HyperParams],
    folds: usize,
    seed: u64,
) -> Result<(SurrogateModel, CvReport)> {
    let report = grid_search_cv(x, y, grid, folds, seed)?;
    let model = SurrogateModel::fit(output, x, y, &report.best().params)?;
    Ok((model, report))
}
