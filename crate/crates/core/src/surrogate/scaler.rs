use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Matrix;

/// Per-feature standardization with population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &Matrix) -> Result<Self> {
        Self::fit_named(x, None)
    }

    /// Like [`Scaler::fit`], naming offending columns with `names`.
    pub fn fit_named(x: &Matrix, names: Option<&[String]>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Domain("scaler needs at least two rows".into()));
        }
        let width = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; width];
        let mut std = vec![0.0; width];
        for j in 0..width {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
            let s = var.sqrt();
            if !(s > 0.0) {
                let name = names
                    .and_then(|n| n.get(j).cloned())
                    .unwrap_or_else(|| format!("column {j}"));
                return Err(Error::Data(format!("feature `{name}` is constant")));
            }
            mean[j] = m;
            std[j] = s;
        }
        Ok(Self { mean, std })
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &Matrix) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }

    pub fn inverse_transform(&self, z: &Matrix) -> Vec<Vec<f64>> {
        z.iter()
            .map(|r| {
                r.iter()
                    .zip(self.mean.iter().zip(&self.std))
                    .map(|(v, (m, s))| v * s + m)
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_column() {
        let x = vec![vec![0.0], vec![2.0]];
        let s = Scaler::fit(&x).unwrap();
        assert_eq!(s.transform(&x), vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn standardized_data_refits_to_identity() {
        let x = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        let s = Scaler::fit(&x).unwrap();
        assert_eq!(s.mean, vec![0.0, 0.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
    }

    #[test]
    fn moments_of_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..19).map(|j| rng.random_range(-5.0..5.0) * (j + 1) as f64 + j as f64).collect())
            .collect();
        let s = Scaler::fit(&x).unwrap();
        for j in 0..19 {
            // Independent two-pass moments in a different summation order.
            let col: Vec<f64> = x.iter().rev().map(|r| r[j]).collect();
            let m = col.iter().fold(0.0, |a, v| a + v / 100.0);
            let sd = (col.iter().fold(0.0, |a, v| a + (v - m) * (v - m)) / 100.0).sqrt();
            assert!((s.mean[j] - m).abs() < 1e-10);
            assert!((s.std[j] - sd).abs() < 1e-10);
        }
        let z = s.transform(&x);
        for j in 0..19 {
            let m = z.iter().map(|r| r[j]).sum::<f64>() / 100.0;
            let sd = (z.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / 100.0).sqrt();
            assert!(m.abs() < 1e-10);
            assert!((sd - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_column_named() {
        let x = vec![vec![1.0, 3.0], vec![2.0, 3.0]];
        let names = vec!["b1".to_string(), "t4".to_string()];
        let err = Scaler::fit_named(&x, Some(&names)).unwrap_err();
        assert!(err.to_string().contains("t4"));
        assert!(Scaler::fit(&[vec![1.0]]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 3), 2..20)) {
            prop_assume!(Scaler::fit(&rows).is_ok());
            let s = Scaler::fit(&rows).unwrap();
            let back = s.inverse_transform(&s.transform(&rows));
            for (a, b) in rows.iter().flatten().zip(back.iter().flatten()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
