use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower limit on the noise standard deviation.
pub const MIN_NOISE_STD: f64 = 1e-8;

/// Squared-exponential kernel hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub length_scale: f64,
    pub signal_std: f64,
    pub noise_std: f64,
}

impl GpParams {
    fn validate(&self) -> Result<()> {
        if !(self.length_scale > 0.0 && self.signal_std > 0.0)
            || !self.length_scale.is_finite()
            || !self.signal_std.is_finite()
            || !self.noise_std.is_finite()
        {
            return Err(Error::Domain(format!("invalid GP hyperparameters {self:?}")));
        }
        Ok(())
    }

    fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        self.signal_std.powi(2) * (-0.5 * d2 / self.length_scale.powi(2)).exp()
    }
}

/// Zero-mean GP regression posterior.
#[derive(Debug, Clone)]
pub struct GaussianSurrogate {
    params: GpParams,
    noise_var: f64,
    x: Vec<Vec<f64>>,
    y: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl GaussianSurrogate {
    /// Factorizes `K + σ_n² I`, retrying once with ten times the noise
    /// variance if the factorization fails.
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: GpParams) -> Result<Self> {
        params.validate()?;
        crate::surrogate::check_shape(x, y)?;
        let n = x.len();
        let base = DMatrix::from_fn(n, n, |i, j| params.kernel(&x[i], &x[j]));
        let mut noise_var = params.noise_std.max(MIN_NOISE_STD).powi(2);
        let mut attempt = 0;
        let chol = loop {
            let k = &base + DMatrix::identity(n, n) * noise_var;
            match Cholesky::new(k) {
                Some(c) => break c,
                None if attempt == 0 => {
                    attempt += 1;
                    noise_var *= 10.0;
                }
                None => {
                    return Err(Error::Numerical(
                        "GP covariance is not positive definite".into(),
                    ))
                }
            }
        };
        let y = DVector::from_column_slice(y);
        let alpha = chol.solve(&y);
        Ok(Self {
            params,
            noise_var,
            x: x.to_vec(),
            y,
            chol,
            alpha,
        })
    }

    pub fn params(&self) -> GpParams {
        self.params
    }

    /// Noise variance actually used, after jitter.
    pub fn noise_variance(&self) -> f64 {
        self.noise_var
    }

    /// Posterior mean and standard deviation at `q`.
    pub fn posterior(&self, q: &[f64]) -> (f64, f64) {
        let k = DVector::from_iterator(self.x.len(), self.x.iter().map(|xi| self.params.kernel(xi, q)));
        let mean = k.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&k)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.params.signal_std.powi(2) - v.norm_squared()).max(0.0);
        (mean, var.sqrt())
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.y.len() as f64;
        let log_det: f64 = self.chol.l_dirty().diagonal().iter().take(self.y.len()).map(|d| d.ln()).sum();
        -0.5 * self.y.dot(&self.alpha) - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_posterior_matches_explicit_solve() {
        let x = vec![vec![0.0], vec![1.0], vec![3.0]];
        let y = [1.0, -0.5, 2.0];
        let p = GpParams {
            length_scale: 1.3,
            signal_std: 1.7,
            noise_std: 0.1,
        };
        let gp = GaussianSurrogate::fit(&x, &y, p).unwrap();
        let k = |a: f64, b: f64| 1.7f64.powi(2) * (-(a - b).powi(2) / (2.0 * 1.3f64.powi(2))).exp();
        let pts = [0.0, 1.0, 3.0];
        let kmat = DMatrix::from_fn(3, 3, |i, j| k(pts[i], pts[j]) + if i == j { 0.01 } else { 0.0 });
        let inv = kmat.clone().try_inverse().unwrap();
        let q = 1.8;
        let ks = DVector::from_iterator(3, pts.iter().map(|&a| k(a, q)));
        let yv = DVector::from_column_slice(&y);
        let mean = (ks.transpose() * &inv * &yv)[0];
        let var = k(q, q) - (ks.transpose() * &inv * &ks)[0];
        let (m, s) = gp.posterior(&[q]);
        assert!((m - mean).abs() < 1e-12);
        assert!((s - var.sqrt()).abs() < 1e-12);
        let lml = -0.5 * (yv.transpose() * &inv * &yv)[0]
            - 0.5 * kmat.determinant().ln()
            - 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((gp.log_marginal_likelihood() - lml).abs() < 1e-10);
    }

    #[test]
    fn interpolates_and_reverts_to_prior() {
        let x = vec![vec![0.2, 0.1], vec![0.7, 0.4], vec![0.5, 0.9]];
        let y = [0.3, -1.2, 0.8];
        let p = GpParams {
            length_scale: 0.5,
            signal_std: 1.0,
            noise_std: 1e-8,
        };
        let gp = GaussianSurrogate::fit(&x, &y, p).unwrap();
        for (xi, yi) in x.iter().zip(y) {
            let (m, s) = gp.posterior(xi);
            assert!((m - yi).abs() < 1e-6);
            assert!(s <= 1e-8 + 1e-6);
        }
        let (m, s) = gp.posterior(&[50.0, -50.0]);
        assert!(m.abs() < 1e-12);
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_inputs_survive_with_jitter() {
        let x = vec![vec![0.5]; 4];
        let gp = GaussianSurrogate::fit(&x, &[1.0, 1.0, 1.0, 1.0], GpParams {
            length_scale: 1.0,
            signal_std: 1.0,
            noise_std: 0.0,
        })
        .unwrap();
        assert!(gp.posterior(&[0.5]).0.is_finite());
        assert!(GaussianSurrogate::fit(&x, &[1.0; 3], gp.params()).is_err());
    }
}
