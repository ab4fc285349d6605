use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{
    check_bounds, ehvi_mc, expected_improvement, Bounds, GaussianSurrogate, GpParams, ParetoArchive, Sense,
    TraceEntry,
};

/// Length scales tried on the unit box; the one with the highest log
/// marginal likelihood wins.
pub const LENGTH_SCALE_GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoConfig {
    pub n_init: usize,
    pub iterations: usize,
    /// Random candidates scored per iteration with expected improvement.
    pub candidates: usize,
    /// Candidates scored per iteration in the multi-objective loop.
    pub ehvi_candidates: usize,
    pub ehvi_draws: usize,
    pub seed: u64,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            n_init: 10,
            iterations: 30,
            candidates: 2048,
            ehvi_candidates: 256,
            ehvi_draws: 256,
            seed: 42,
        }
    }
}

impl BoConfig {
    fn validate(&self) -> Result<()> {
        if self.n_init < 2 || self.candidates == 0 || self.ehvi_candidates == 0 {
            return Err(Error::Config(
                "n_init must be at least 2 and candidate counts positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Best so far after the initial design (iteration 0) and each query.
    pub trace: Vec<TraceEntry>,
    pub positions: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Chosen length scale per iteration.
    pub length_scales: Vec<f64>,
    pub non_finite: usize,
}

struct UnitBox<'a>(&'a Bounds);

impl UnitBox<'_> {
    fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.0)
            .map(|(v, (lo, hi))| (lo + v * (hi - lo)).clamp(*lo, *hi))
            .collect()
    }

    fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..self.0.len()).map(|_| rng.random::<f64>()).collect()).collect()
    }
}

/// Mean and population std; a zero spread maps to one.
fn standardizer(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    (mean, if std > 0.0 { std } else { 1.0 })
}

/// Sample standard deviation, falling back to one for a constant or single
/// value.
fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 1.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let s = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

/// Fits a GP to standardized targets, picking the length scale by marginal
/// likelihood.
fn fit_standardized(unit_x: &[Vec<f64>], z: &[f64]) -> Result<GaussianSurrogate> {
    let signal_std = sample_std(z);
    let mut best: Option<(f64, GaussianSurrogate)> = None;
    for &length_scale in &LENGTH_SCALE_GRID {
        let params = GpParams {
            length_scale,
            signal_std,
            noise_std: 1e-6 * signal_std * signal_std,
        };
        match GaussianSurrogate::fit(unit_x, z, params) {
            Ok(gp) => {
                let lml = gp.log_marginal_likelihood();
                if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                    best = Some((lml, gp));
                }
            }
            Err(e) => debug!("length scale {length_scale} rejected: {e}"),
        }
    }
    best.map(|(_, gp)| gp)
        .ok_or_else(|| Error::Numerical("no length scale gave a valid GP".into()))
}

/// Replaces non-finite values with the worst finite one.
fn impute(values: &[f64]) -> Option<Vec<f64>> {
    let worst = values.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    worst
        .is_finite()
        .then(|| values.iter().map(|&v| if v.is_finite() { v } else { worst }).collect())
}

/// Minimizes `objective` with a GP surrogate and expected improvement.
///
/// Inputs are mapped to the unit box and targets standardized before each
/// fit. Non-finite evaluations are imputed with the worst finite value for
/// fitting but never become the incumbent.
pub fn bo_run<F>(objective: F, bounds: &Bounds, config: &BoConfig) -> Result<BoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_bounds(bounds)?;
    config.validate()?;
    let space = UnitBox(bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut unit: Vec<Vec<f64>> = space.sample(&mut rng, config.n_init);
    let mut positions: Vec<Vec<f64>> = unit.iter().map(|u| space.denormalize(u)).collect();
    let mut values: Vec<f64> = positions.par_iter().map(|p| objective(p)).collect();
    let mut trace = vec![incumbent(0, &positions, &values)];
    let mut length_scales = Vec::with_capacity(config.iterations);

    for iteration in 1..=config.iterations {
        let candidates = space.sample(&mut rng, config.candidates);
        let pick = match impute(&values) {
            Some(filled) => {
                let (mean, std) = standardizer(&filled);
                let z: Vec<f64> = filled.iter().map(|v| (v - mean) / std).collect();
                let best = z.iter().copied().fold(f64::INFINITY, f64::min);
                let gp = fit_standardized(&unit, &z)?;
                length_scales.push(gp.params().length_scale);
                let scored: Vec<(f64, f64)> = candidates
                    .par_iter()
                    .map(|c| {
                        let (mu, sigma) = gp.posterior(c);
                        (expected_improvement(mu, sigma, best), sigma)
                    })
                    .collect();
                let by_ei = argmax(scored.iter().map(|s| s.0));
                if scored[by_ei].0 > 0.0 {
                    by_ei
                } else {
                    argmax(scored.iter().map(|s| s.1))
                }
            }
            None => 0,
        };
        let u = candidates[pick].clone();
        let x = space.denormalize(&u);
        let y = objective(&x);
        unit.push(u);
        positions.push(x);
        values.push(y);
        trace.push(incumbent(iteration, &positions, &values));
    }

    let non_finite = values.iter().filter(|v| !v.is_finite()).count();
    if non_finite > 0 {
        warn!("{non_finite} BO evaluations returned a non-finite objective");
    }
    let last = trace.last().expect("trace has the initial entry").clone();
    Ok(BoResult {
        best_position: last.best_position,
        best_value: last.best_value,
        trace,
        positions,
        values,
        length_scales,
        non_finite,
    })
}

fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best.0
}

fn incumbent(iteration: usize, positions: &[Vec<f64>], values: &[f64]) -> TraceEntry {
    let mut best = (0, f64::INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    TraceEntry {
        iteration,
        best_value: best.1,
        best_position: positions[best.0].clone(),
    }
}

#[derive(Debug, Clone)]
pub struct BoMultiResult {
    pub positions: Vec<Vec<f64>>,
    /// Minimization-form objective vectors; `None` for failed evaluations.
    pub objectives: Vec<Option<Vec<f64>>>,
    /// BO iteration that produced each evaluation; 0 is the initial design.
    pub iteration: Vec<usize>,
    /// Non-dominated evaluations, payload is the evaluation index.
    pub archive: ParetoArchive<usize>,
}

/// Multi-objective BO: one GP per objective and Monte-Carlo expected
/// hypervolume improvement. The reference point sits 10% beyond the worst
/// observed value of each objective.
pub fn bo_multi_run<F>(objective: F, bounds: &Bounds, n_objectives: usize, config: &BoConfig) -> Result<BoMultiResult>
where
    F: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    check_bounds(bounds)?;
    config.validate()?;
    if n_objectives < 2 {
        return Err(Error::Config("multi-objective BO needs two or more objectives".into()));
    }
    let space = UnitBox(bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut unit = space.sample(&mut rng, config.n_init);
    let mut positions: Vec<Vec<f64>> = unit.iter().map(|u| space.denormalize(u)).collect();
    let mut objectives: Vec<Option<Vec<f64>>> = positions
        .par_iter()
        .map(|p| objective(p).filter(|v| v.len() == n_objectives && v.iter().all(|x| x.is_finite())))
        .collect();
    let mut iteration = vec![0; positions.len()];

    for it in 1..=config.iterations {
        let candidates = space.sample(&mut rng, config.ehvi_candidates);
        let pick = match standardized_objectives(&objectives, n_objectives) {
            Some((columns, reference)) => {
                let models = columns
                    .iter()
                    .map(|z| fit_standardized(&unit, z))
                    .collect::<Result<Vec<_>>>()?;
                let mut archive = ParetoArchive::new(vec![Sense::Minimize; n_objectives]);
                for (i, o) in objectives.iter().enumerate() {
                    if o.is_some() {
                        archive.insert(columns.iter().map(|c| c[i]).collect(), ())?;
                    }
                }
                let front = archive.objectives();
                let seed = config.seed.wrapping_add(it as u64);
                let scores = candidates
                    .par_iter()
                    .map(|c| ehvi_mc(&models, &front, &reference, c, config.ehvi_draws, seed))
                    .collect::<Result<Vec<f64>>>()?;
                let best = argmax(scores.iter().copied());
                if scores[best] > 0.0 {
                    best
                } else {
                    let spread = candidates.iter().map(|c| models.iter().map(|m| m.posterior(c).1).sum::<f64>());
                    argmax(spread)
                }
            }
            None => 0,
        };
        let u = candidates[pick].clone();
        let x = space.denormalize(&u);
        let y = objective(&x).filter(|v| v.len() == n_objectives && v.iter().all(|x| x.is_finite()));
        unit.push(u);
        positions.push(x);
        objectives.push(y);
        iteration.push(it);
    }

    let mut archive = ParetoArchive::new(vec![Sense::Minimize; n_objectives]);
    for (i, o) in objectives.iter().enumerate() {
        if let Some(o) = o {
            archive.insert(o.clone(), i)?;
        }
    }
    Ok(BoMultiResult {
        positions,
        objectives,
        iteration,
        archive,
    })
}

/// Per-objective standardized columns (failures imputed with the worst
/// value) and the reference point in the same scale.
fn standardized_objectives(objectives: &[Option<Vec<f64>>], m: usize) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut columns = Vec::with_capacity(m);
    let mut reference = Vec::with_capacity(m);
    for k in 0..m {
        let raw: Vec<f64> = objectives
            .iter()
            .map(|o| o.as_ref().map_or(f64::NAN, |v| v[k]))
            .collect();
        let filled = impute(&raw)?;
        let (mean, std) = standardizer(&filled);
        let worst = filled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best = filled.iter().copied().fold(f64::INFINITY, f64::min);
        let mut margin = 0.1 * worst.abs();
        if margin <= 0.0 {
            margin = 0.1 * if worst > best { worst - best } else { 1.0 };
        }
        reference.push((worst + margin - mean) / std);
        columns.push(filled.iter().map(|v| (v - mean) / std).collect());
    }
    Some((columns, reference))
}
