use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::gbt::{BoostedTreeModel, GbtParams};
use super::krr::{KernelRidgeModel, KrrParams};
use super::metrics::r2_score;
use super::{check_shape, Matrix, Scaler};

pub const DEFAULT_FOLDS: usize = 5;

/// One point of a hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HyperParams {
    KernelRidge(KrrParams),
    BoostedTrees(GbtParams),
}

impl HyperParams {
    pub fn describe(&self) -> String {
        match self {
            HyperParams::KernelRidge(p) => format!(
                "KRR (kernel: 'poly', alpha = {}, gamma = {}, degree = {})",
                p.alpha, p.gamma, p.degree
            ),
            HyperParams::BoostedTrees(p) => format!(
                "Boosted trees (learning rate = {}, n_estimators = {}, max_depth = {})",
                p.learning_rate, p.n_estimators, p.max_depth
            ),
        }
    }

    /// Fits on already standardized inputs and returns predictions for `test`.
    pub(crate) fn fit_predict(&self, x: &Matrix, y: &[f64], test: &Matrix) -> Result<Vec<f64>> {
        Ok(match self {
            HyperParams::KernelRidge(p) => KernelRidgeModel::fit(x, y, *p)?.predict(test),
            HyperParams::BoostedTrees(p) => BoostedTreeModel::fit(x, y, *p)?.predict(test),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEntry {
    pub params: HyperParams,
    /// Validation R² per fold; `None` where a fold's targets are constant.
    pub fold_r2: Vec<Option<f64>>,
    pub mean_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    pub seed: u64,
    pub entries: Vec<CvEntry>,
    /// Index into `entries` of the selected combination.
    pub selected: usize,
}

impl CvReport {
    pub fn best(&self) -> &CvEntry {
        &self.entries[self.selected]
    }
}

/// Shuffles `0..n` with a seeded generator and cuts it into `k` contiguous
/// folds; the first `n % k` folds hold one extra sample.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < k {
        return Err(Error::Domain(format!("cannot make {k} folds from {n} samples")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// K-fold grid search on raw (unscaled) inputs. Each fold fits its own
/// scaler on the training part. The selected combination maximizes mean
/// validation R², the first in grid order on ties.
pub fn grid_search_cv(x: &Matrix, y: &[f64], grid: &[HyperParams], k: usize, seed: u64) -> Result<CvReport> {
    if grid.is_empty() {
        return Err(Error::Config("hyperparameter grid is empty".into()));
    }
    check_shape(x, y)?;
    let folds = kfold_indices(x.len(), k, seed)?;

    // Standardize once per fold, shared by every grid point.
    let prepared: Vec<_> = folds
        .iter()
        .enumerate()
        .map(|(f, valid)| -> Result<_> {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let scaler = Scaler::fit(&xt)?;
            let xv: Vec<Vec<f64>> = valid.iter().map(|&i| x[i].clone()).collect();
            Ok((
                scaler.transform(&xt),
                train.iter().map(|&i| y[i]).collect::<Vec<_>>(),
                scaler.transform(&xv),
                valid.iter().map(|&i| y[i]).collect::<Vec<_>>(),
            ))
        })
        .collect::<Result<_>>()?;

    let entries: Vec<CvEntry> = grid
        .par_iter()
        .map(|params| -> Result<CvEntry> {
            let mut fold_r2 = Vec::with_capacity(k);
            let mut pooled_true = Vec::new();
            let mut pooled_pred = Vec::new();
            for (xt, yt, xv, yv) in &prepared {
                let pred = params.fit_predict(xt, yt, xv)?;
                fold_r2.push(r2_score(yv, &pred).ok());
                pooled_true.extend_from_slice(yv);
                pooled_pred.extend(pred);
            }
            let defined: Vec<f64> = fold_r2.iter().flatten().copied().collect();
            let mean_r2 = if defined.is_empty() {
                // Single-sample folds: score the pooled out-of-fold predictions.
                r2_score(&pooled_true, &pooled_pred).unwrap_or(f64::NEG_INFINITY)
            } else {
                defined.iter().sum::<f64>() / defined.len() as f64
            };
            Ok(CvEntry {
                params: *params,
                fold_r2,
                mean_r2,
            })
        })
        .collect::<Result<_>>()?;

    let mut selected = 0;
    for (i, e) in entries.iter().enumerate() {
        if e.mean_r2 > entries[selected].mean_r2 {
            selected = i;
        }
    }
    Ok(CvReport {
        folds: k,
        seed,
        entries,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::krr::polynomial_kernel;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fold_arithmetic() {
        let folds = kfold_indices(5, 5, 1).unwrap();
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 1));
        let folds = kfold_indices(12, 5, 1).unwrap();
        assert_eq!(folds.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 2, 2, 2]);
        let mut all: Vec<usize> = folds.into_iter().flatten().collect();
        all.sort();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        assert_eq!(kfold_indices(12, 5, 7).unwrap(), kfold_indices(12, 5, 7).unwrap());
        assert!(kfold_indices(3, 5, 0).is_err());
        assert!(kfold_indices(3, 1, 0).is_err());
    }

    fn synthetic(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        (x, Vec::new())
    }

    #[test]
    fn single_point_grid() {
        let (x, _) = synthetic(30, 1);
        let y: Vec<f64> = x.iter().map(|r| r[0] - r[1]).collect();
        let grid = [HyperParams::BoostedTrees(GbtParams::new(0.1, 20, 2))];
        let rep = grid_search_cv(&x, &y, &grid, 5, 0).unwrap();
        assert_eq!(rep.selected, 0);
        assert_eq!(rep.entries[0].fold_r2.len(), 5);
        assert!(grid_search_cv(&x, &y, &[], 5, 0).is_err());
    }

    #[test]
    fn recovers_generating_kernel() {
        // Targets from a degree-3 polynomial-kernel expansion around random centres.
        let (x, _) = synthetic(80, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let centres: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let coef: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| {
                centres
                    .iter()
                    .zip(&coef)
                    .map(|(c, w)| w * polynomial_kernel(c, r, 0.5, 3))
                    .sum()
            })
            .collect();
        let grid: Vec<HyperParams> = [1u32, 2, 3]
            .iter()
            .map(|&degree| {
                HyperParams::KernelRidge(KrrParams {
                    alpha: 1e-3,
                    gamma: 0.5,
                    degree,
                })
            })
            .collect();
        let rep = grid_search_cv(&x, &y, &grid, 5, 11).unwrap();
        assert_eq!(rep.best().params, grid[2]);
        let best = rep.best().mean_r2;
        assert!(rep.entries.iter().all(|e| e.mean_r2 <= best));
    }

    #[test]
    fn leave_one_out_uses_pooled_score() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 2.0 * i as f64 + 1.0).collect();
        let grid = [HyperParams::KernelRidge(KrrParams {
            alpha: 1e-6,
            gamma: 0.1,
            degree: 1,
        })];
        let rep = grid_search_cv(&x, &y, &grid, 5, 2).unwrap();
        assert!(rep.entries[0].fold_r2.iter().all(Option::is_none));
        assert!(rep.entries[0].mean_r2 > 0.9);
    }
}
