use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_bounds, Bounds, ParetoArchive, PsoConfig, Sense, SwarmState};

/// Weight vectors on the simplex with step `1/divisions`, in lexicographic
/// order. Two objectives at 20 divisions give 21 vectors, three at 10 give 66.
pub fn simplex_weights(objectives: usize, divisions: usize) -> Vec<Vec<f64>> {
    fn fill(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            fill(left - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    if objectives == 0 || divisions == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    fill(divisions, objectives, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|w| w.into_iter().map(|k| k as f64 / divisions as f64).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub pso: PsoConfig,
    /// Simplex divisions; `None` picks 20 for two objectives and 10 otherwise.
    pub divisions: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            pso: PsoConfig {
                particles: 20,
                iterations: 40,
                ..PsoConfig::default()
            },
            divisions: None,
        }
    }
}

/// Evaluated point kept by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub position: Vec<f64>,
    pub payload: T,
    /// Index of the weight vector whose run produced the point.
    pub sweep: usize,
    /// Cumulative swarm iteration across all runs.
    pub iteration: usize,
}

/// Weighted-sum sweep: one swarm run per simplex weight vector, each
/// minimizing `Σ w_k f_k / scale_k`. Every feasible evaluation is offered to
/// a shared Pareto archive. `evaluate` returns the minimization-form
/// objective vector and a payload, or `None` when infeasible.
pub fn weighted_sum_sweep<T, F>(
    evaluate: F,
    bounds: &Bounds,
    scales: &[f64],
    config: &SweepConfig,
) -> Result<ParetoArchive<SweepPoint<T>>>
where
    T: Clone + Send,
    F: Fn(&[f64]) -> Option<(Vec<f64>, T)> + Sync,
{
    check_bounds(bounds)?;
    let m = scales.len();
    if m < 2 {
        return Err(Error::Config("a sweep needs two or more objectives".into()));
    }
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Config("sweep scales must be positive".into()));
    }
    let divisions = config.divisions.unwrap_or(if m == 2 { 20 } else { 10 });
    let weights = simplex_weights(m, divisions);
    let mut archive = ParetoArchive::new(vec![Sense::Minimize; m]);
    let per_run = config.pso.iterations + 1;
    for (sweep, w) in weights.iter().enumerate() {
        let pso = PsoConfig {
            seed: config.pso.seed.wrapping_add(sweep as u64),
            ..config.pso
        };
        let mut swarm = SwarmState::new(bounds, pso)?;
        loop {
            let evaluated: Vec<Option<(Vec<f64>, T)>> = swarm
                .positions()
                .par_iter()
                .map(|p| evaluate(p).filter(|(o, _)| o.len() == m && o.iter().all(|v| v.is_finite())))
                .collect();
            let values: Vec<f64> = evaluated
                .iter()
                .map(|e| {
                    e.as_ref().map_or(f64::INFINITY, |(o, _)| {
                        o.iter().zip(w).zip(scales).map(|((v, wk), s)| wk * v / s).sum()
                    })
                })
                .collect();
            let iteration = sweep * per_run + swarm.iteration();
            for (position, e) in swarm.positions().iter().zip(evaluated) {
                if let Some((objectives, payload)) = e {
                    archive.insert(
                        objectives,
                        SweepPoint {
                            position: position.clone(),
                            payload,
                            sweep,
                            iteration,
                        },
                    )?;
                }
            }
            swarm.tell(&values)?;
            if swarm.iteration() == pso.iterations {
                break;
            }
            swarm.advance()?;
        }
    }
    Ok(archive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::dominates;

    #[test]
    fn weight_counts() {
        let two = simplex_weights(2, 20);
        assert_eq!(two.len(), 21);
        assert_eq!(two[0], vec![1.0, 0.0]);
        assert_eq!(simplex_weights(3, 10).len(), 66);
        for w in simplex_weights(3, 10) {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_traces_convex_front() {
        // Front is x0 in [0, 1] with f = (x0², (1-x0)²).
        let f = |x: &[f64]| Some((vec![x[0] * x[0] + x[1] * x[1], (1.0 - x[0]).powi(2) + x[1] * x[1]], x[0]));
        let cfg = SweepConfig {
            pso: PsoConfig {
                particles: 10,
                iterations: 15,
                seed: 1,
                ..PsoConfig::default()
            },
            divisions: Some(10),
        };
        let archive = weighted_sum_sweep(f, &[(-1.0, 2.0), (-1.0, 1.0)], &[1.0, 1.0], &cfg).unwrap();
        assert!(archive.len() >= 11);
        let objs = archive.objectives();
        for a in &objs {
            for b in &objs {
                assert!(!dominates(a, b, &[Sense::Minimize; 2]));
            }
        }
        let spread = archive.members().iter().map(|(_, p)| p.payload).fold(f64::NAN, f64::max);
        assert!(spread > 0.9);
    }
}
