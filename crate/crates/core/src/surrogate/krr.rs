use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_shape, Matrix};

/// Constant offset of the polynomial kernel.
const KERNEL_OFFSET: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrrParams {
    pub alpha: f64,
    pub gamma: f64,
    pub degree: u32,
}

impl KrrParams {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.gamma > 0.0) || self.degree < 1 {
            return Err(Error::Domain(format!("invalid kernel ridge parameters {self:?}")));
        }
        Ok(())
    }
}

/// `(gamma <u, v> + 1)^degree`
pub fn polynomial_kernel(u: &[f64], v: &[f64], gamma: f64, degree: u32) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    (gamma * dot + KERNEL_OFFSET).powi(degree as i32)
}

/// Kernel ridge regression in dual form with a polynomial kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRidgeModel {
    pub params: KrrParams,
    pub weights: Vec<f64>,
    pub train_x: Vec<Vec<f64>>,
}

impl KernelRidgeModel {
    /// Solves `(K + alpha I) w = y` by Cholesky factorization.
    pub fn fit(x: &Matrix, y: &[f64], params: KrrParams) -> Result<Self> {
        params.validate()?;
        check_shape(x, y)?;
        let n = x.len();
        if n < 2 {
            return Err(Error::Domain("kernel ridge needs at least two samples".into()));
        }
        let mut k = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = polynomial_kernel(&x[i], &x[j], params.gamma, params.degree);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] += params.alpha;
        }
        let chol = k.cholesky().ok_or_else(|| {
            Error::Numerical(format!(
                "kernel matrix is not positive definite with alpha = {}",
                params.alpha
            ))
        })?;
        let w = chol.solve(&DVector::from_column_slice(y));
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("kernel ridge weights are not finite".into()));
        }
        Ok(Self {
            params,
            weights: w.as_slice().to_vec(),
            train_x: x.to_vec(),
        })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.train_x
            .iter()
            .zip(&self.weights)
            .map(|(xi, w)| w * polynomial_kernel(xi, x, self.params.gamma, self.params.degree))
            .sum()
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.iter().map(|r| self.predict_one(r)).collect()
    }
}
