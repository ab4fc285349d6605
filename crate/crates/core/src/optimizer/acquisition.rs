use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::Result;

use super::hypervolume_improvement;
use super::GaussianSurrogate;

/// Expected improvement below `best` for a Gaussian with mean `mu` and
/// standard deviation `sigma`.
pub fn expected_improvement(mu: f64, sigma: f64, best: f64) -> f64 {
    if !(sigma > 0.0) {
        return (best - mu).max(0.0);
    }
    let z = (best - mu) / sigma;
    let n = Normal::standard();
    ((best - mu) * n.cdf(z) + sigma * n.pdf(z)).max(0.0)
}

/// Monte-Carlo expected hypervolume improvement at `candidate`, drawing each
/// objective independently from its GP posterior.
pub fn ehvi_mc(
    models: &[GaussianSurrogate],
    front: &[Vec<f64>],
    reference: &[f64],
    candidate: &[f64],
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let posterior: Vec<(f64, f64)> = models.iter().map(|m| m.posterior(candidate)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    let mut point = vec![0.0; models.len()];
    for _ in 0..draws {
        for (p, (mu, sigma)) in point.iter_mut().zip(&posterior) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *p = mu + sigma * z;
        }
        total += hypervolume_improvement(front, &point, reference)?;
    }
    Ok(if draws == 0 { 0.0 } else { total / draws as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::GpParams;
    use rand::Rng;

    #[test]
    fn closed_form_values() {
        let n = Normal::standard();
        assert!((n.pdf(0.0) - 0.3989422804).abs() < 1e-10);
        assert!((expected_improvement(0.0, 1.0, 0.0) - 0.3989422804014327).abs() < 1e-12);
        assert_eq!(expected_improvement(1.0, 0.0, 3.0), 2.0);
        assert_eq!(expected_improvement(4.0, 0.0, 3.0), 0.0);
        assert!((expected_improvement(1.0, 1e-300, 3.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_sigma_and_nonnegative() {
        for &gap in &[-2.0, -0.3, 0.0, 0.5, 3.0] {
            let mut last = expected_improvement(0.0, 0.0, gap);
            for k in 1..60 {
                let e = expected_improvement(0.0, k as f64 * 0.1, gap);
                assert!(e >= last - 1e-15 && e >= 0.0);
                last = e;
            }
        }
    }

    #[test]
    fn agrees_with_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 1_000_000;
        for &(mu, sigma, best) in &[(0.0, 1.0, 0.0), (1.0, 0.5, 1.2), (1.0, 0.5, 0.2), (-0.3, 2.0, 0.4)] {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..draws {
                let z: f64 = rng.sample(StandardNormal);
                let imp = (best - (mu + sigma * z)).max(0.0);
                sum += imp;
                sum_sq += imp * imp;
            }
            let mean = sum / draws as f64;
            let se = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
            let ei = expected_improvement(mu, sigma, best);
            assert!((ei - mean).abs() < 3.0 * se, "{ei} vs {mean} ± {se}");
        }
    }

    #[test]
    fn ehvi_positive_where_front_improves() {
        let x = vec![vec![0.0], vec![1.0]];
        let p = GpParams {
            length_scale: 0.5,
            signal_std: 1.0,
            noise_std: 1e-6,
        };
        let f1 = GaussianSurrogate::fit(&x, &[1.0, 2.0], p).unwrap();
        let f2 = GaussianSurrogate::fit(&x, &[2.0, 1.0], p).unwrap();
        let front = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let reference = [3.0, 3.0];
        let models = [f1, f2];
        let at_observed = ehvi_mc(&models, &front, &reference, &[0.0], 256, 1).unwrap();
        let between = ehvi_mc(&models, &front, &reference, &[0.5], 256, 1).unwrap();
        assert!(at_observed < 1e-3);
        assert!(between > at_observed);
        assert_eq!(ehvi_mc(&models, &front, &reference, &[0.5], 256, 1).unwrap(), between);
    }
}
