use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluator::{proxy_evaluate, OutputKind, PerformanceRecord, ProxyCalibration};
use crate::geometry::{base_profile, extract_features, generate_profile, DesignGenotype, GeneratedProfile, SpokeProfile};
use crate::optimizer::Backend;
use crate::surrogate::SurrogateModel;

/// Model file for one output inside a models directory.
pub fn model_path(models_dir: &Path, output: OutputKind) -> std::path::PathBuf {
    models_dir.join(format!("{}.json", output.name()))
}

/// Loads the five per-output models from `models_dir`.
pub fn load_models(models_dir: &Path) -> Result<Vec<SurrogateModel>> {
    OutputKind::ALL
        .iter()
        .map(|&k| {
            let path = model_path(models_dir, k);
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "surrogate model {} is missing; run `train` first",
                    path.display()
                )));
            }
            let m = SurrogateModel::load(&path)?;
            if m.output != k {
                return Err(Error::Data(format!("{} holds a model for {}", path.display(), m.output)));
            }
            Ok(m)
        })
        .collect()
}

/// Maps genotypes to performance records through the proxy or trained
/// surrogates.
#[derive(Debug, Clone)]
pub struct DesignEvaluator {
    base: SpokeProfile,
    calibration: ProxyCalibration,
    models: Option<Vec<SurrogateModel>>,
}

impl DesignEvaluator {
    pub fn proxy() -> Result<Self> {
        let base = base_profile();
        Ok(Self {
            calibration: ProxyCalibration::from_base(&base)?,
            base,
            models: None,
        })
    }

    /// `models` must hold one model per output in canonical order.
    pub fn surrogate(models: Vec<SurrogateModel>) -> Result<Self> {
        if models.len() != 5 || models.iter().zip(OutputKind::ALL).any(|(m, k)| m.output != k) {
            return Err(Error::Config("surrogate backend needs one model per output".into()));
        }
        let mut e = Self::proxy()?;
        e.models = Some(models);
        Ok(e)
    }

    pub fn for_backend(backend: Backend, models_dir: &Path) -> Result<Self> {
        match backend {
            Backend::Proxy => Self::proxy(),
            Backend::Surrogate => Self::surrogate(load_models(models_dir)?),
        }
    }

    pub fn backend(&self) -> Backend {
        if self.models.is_some() {
            Backend::Surrogate
        } else {
            Backend::Proxy
        }
    }

    pub fn base(&self) -> &SpokeProfile {
        &self.base
    }

    pub fn calibration(&self) -> &ProxyCalibration {
        &self.calibration
    }

    /// Record for an already generated profile.
    pub fn evaluate_profile(&self, profile: &SpokeProfile, genotype: &DesignGenotype) -> Result<PerformanceRecord> {
        match &self.models {
            None => proxy_evaluate(profile, &self.calibration),
            Some(models) => {
                let x = extract_features(profile, genotype).to_array();
                let mut y = [0.0; 5];
                for (v, m) in y.iter_mut().zip(models) {
                    *v = m.predict_one(&x);
                }
                Ok(PerformanceRecord::from_array_unchecked(y))
            }
        }
    }

    /// Generates the profile and evaluates it. Infeasible genotypes give an
    /// error from the area correction.
    pub fn evaluate(&self, genotype: &DesignGenotype) -> Result<(GeneratedProfile, PerformanceRecord)> {
        let generated = generate_profile(&self.base, genotype)?;
        let record = self.evaluate_profile(&generated.profile, genotype)?;
        Ok((generated, record))
    }

    /// Record from an optimizer position, `None` if infeasible or the
    /// prediction is not a usable record.
    pub fn evaluate_position(&self, position: &[f64]) -> Option<PerformanceRecord> {
        let g = DesignGenotype::from_slice(position).ok()?;
        let (_, r) = self.evaluate(&g).ok()?;
        r.to_array().iter().all(|v| v.is_finite()).then_some(r)
    }
}
