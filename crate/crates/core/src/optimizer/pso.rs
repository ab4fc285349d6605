use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_bounds, Bounds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub particles: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            particles: 30,
            iterations: 200,
            seed: 42,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(Error::Config("swarm needs at least two particles".into()));
        }
        if [self.inertia, self.cognitive, self.social]
            .iter()
            .any(|c| !c.is_finite() || *c < 0.0)
        {
            return Err(Error::Config("swarm coefficients must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Global best after an iteration; iteration 0 is the initial swarm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub best_value: f64,
    pub best_position: Vec<f64>,
}

/// Swarm driven by ask/tell: read [`SwarmState::positions`], evaluate them,
/// then pass the values to [`SwarmState::tell`].
///
/// Random draws, in order: initial positions particle by particle and
/// coordinate by coordinate; then per iteration an `r1`, `r2` pair for each
/// particle and coordinate, particles in index order, all drawn before any
/// position moves.
#[derive(Debug, Clone)]
pub struct SwarmState {
    config: PsoConfig,
    bounds: Vec<(f64, f64)>,
    rng: ChaCha8Rng,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    personal_best: Vec<Vec<f64>>,
    personal_value: Vec<f64>,
    global_best: Option<(Vec<f64>, f64)>,
    iteration: usize,
    told: bool,
    non_finite: usize,
}

impl SwarmState {
    pub fn new(bounds: &Bounds, config: PsoConfig) -> Result<Self> {
        check_bounds(bounds)?;
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let positions: Vec<Vec<f64>> = (0..config.particles)
            .map(|_| bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect())
            .collect();
        let dim = bounds.len();
        Ok(Self {
            config,
            bounds: bounds.to_vec(),
            rng,
            velocities: vec![vec![0.0; dim]; config.particles],
            personal_best: positions.clone(),
            personal_value: vec![f64::INFINITY; config.particles],
            positions,
            global_best: None,
            iteration: 0,
            told: false,
            non_finite: 0,
        })
    }

    /// Positions awaiting evaluation.
    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    /// Iteration index of the current positions.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn non_finite_count(&self) -> usize {
        self.non_finite
    }

    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.global_best.as_ref().map(|(p, v)| (p.as_slice(), *v))
    }

    /// Records objective values for the current positions. Non-finite values
    /// count as `+inf`.
    pub fn tell(&mut self, values: &[f64]) -> Result<TraceEntry> {
        if values.len() != self.positions.len() {
            return Err(Error::Domain(format!(
                "got {} values for {} particles",
                values.len(),
                self.positions.len()
            )));
        }
        for (i, &raw) in values.iter().enumerate() {
            let value = if raw.is_finite() {
                raw
            } else {
                self.non_finite += 1;
                f64::INFINITY
            };
            if value < self.personal_value[i] || !self.told {
                self.personal_value[i] = value;
                self.personal_best[i].clone_from(&self.positions[i]);
            }
        }
        for i in 0..self.positions.len() {
            let better = match &self.global_best {
                None => true,
                Some((_, g)) => self.personal_value[i] < *g,
            };
            if better {
                self.global_best = Some((self.personal_best[i].clone(), self.personal_value[i]));
            }
        }
        self.told = true;
        let (best_position, best_value) = self.global_best.clone().expect("swarm is non-empty");
        Ok(TraceEntry {
            iteration: self.iteration,
            best_value,
            best_position,
        })
    }

    /// Moves every particle one step. Coordinates leaving the box are clamped
    /// and their velocity component zeroed.
    pub fn advance(&mut self) -> Result<()> {
        let (global, _) = self
            .global_best
            .clone()
            .ok_or_else(|| Error::Domain("advance called before the first tell".into()))?;
        let dim = self.bounds.len();
        let draws: Vec<Vec<(f64, f64)>> = (0..self.positions.len())
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let r1: f64 = self.rng.random();
                        let r2: f64 = self.rng.random();
                        (r1, r2)
                    })
                    .collect()
            })
            .collect();
        let PsoConfig {
            inertia,
            cognitive,
            social,
            ..
        } = self.config;
        for (i, pair) in draws.into_iter().enumerate() {
            for (k, (&(lo, hi), (r1, r2))) in self.bounds.iter().zip(pair).enumerate() {
                let x = self.positions[i][k];
                let mut v = inertia * self.velocities[i][k]
                    + cognitive * r1 * (self.personal_best[i][k] - x)
                    + social * r2 * (global[k] - x);
                let mut next = x + v;
                if next < lo {
                    next = lo;
                    v = 0.0;
                } else if next > hi {
                    next = hi;
                    v = 0.0;
                }
                self.positions[i][k] = next;
                self.velocities[i][k] = v;
            }
        }
        self.iteration += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<TraceEntry>,
    /// Evaluations that returned a non-finite value.
    pub non_finite: usize,
}

/// Minimizes `objective` over the box. Evaluations within an iteration run
/// in parallel; results do not depend on the thread count.
pub fn pso_run<F>(objective: F, bounds: &Bounds, config: &PsoConfig) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut swarm = SwarmState::new(bounds, *config)?;
    let mut trace = Vec::with_capacity(config.iterations + 1);
    loop {
        let values: Vec<f64> = swarm.positions().par_iter().map(|p| objective(p)).collect();
        trace.push(swarm.tell(&values)?);
        if swarm.iteration() == config.iterations {
            break;
        }
        swarm.advance()?;
    }
    if swarm.non_finite_count() > 0 {
        warn!("{} evaluations returned a non-finite objective", swarm.non_finite_count());
    }
    let last = trace.last().expect("trace has the initial entry");
    Ok(PsoResult {
        best_position: last.best_position.clone(),
        best_value: last.best_value,
        non_finite: swarm.non_finite_count(),
        trace,
    })
}
