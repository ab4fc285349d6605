//! Performance surrogates: standardization, kernel ridge regression,
//! gradient-boosted regression trees and k-fold grid search.

mod cv;
mod gbt;
mod krr;
mod metrics;
mod model;
mod scaler;

pub use cv::{grid_search_cv, kfold_indices, CvEntry, CvReport, HyperParams, DEFAULT_FOLDS};
pub use gbt::{BoostedTreeModel, GbtParams, RegressionTree, TreeNode};
pub use krr::{polynomial_kernel, KernelRidgeModel, KrrParams};
pub use metrics::{mse, r2_score};
pub use model::{train_surrogate, FittedModel, ModelFamily, SurrogateModel, MODEL_SCHEMA_VERSION};
pub use scaler::Scaler;

/// Row-major feature matrix.
pub type Matrix = [Vec<f64>];

pub(crate) fn check_shape(x: &Matrix, y: &[f64]) -> crate::Result<usize> {
    if x.len() != y.len() {
        return Err(crate::Error::Domain(format!(
            "{} input rows but {} targets",
            x.len(),
            y.len()
        )));
    }
    let width = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != width) {
        return Err(crate::Error::Domain("ragged feature matrix".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(crate::Error::Domain("non-finite training data".into()));
    }
    Ok(width)
}
