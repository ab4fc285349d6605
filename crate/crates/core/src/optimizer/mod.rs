//! Search over the genotype box: particle swarm and Bayesian optimization,
//! Pareto archives, hypervolume and expected hypervolume improvement.

mod acquisition;
mod bo;
mod gp;
mod hypervolume;
mod multi;
mod objective;
mod pareto;
mod pso;

pub use acquisition::{ehvi_mc, expected_improvement};
pub use bo::{bo_multi_run, bo_run, BoConfig, BoMultiResult, BoResult, LENGTH_SCALE_GRID};
pub use gp::{GaussianSurrogate, GpParams, MIN_NOISE_STD};
pub use hypervolume::{hypervolume, hypervolume_2d, hypervolume_improvement};
pub use multi::{simplex_weights, weighted_sum_sweep, SweepConfig, SweepPoint};
pub use objective::{scalarize_targeted, Backend, Directive, ObjectiveSpec};
pub use pareto::{dominates, pareto_filter, ParetoArchive, Sense};
pub use pso::{pso_run, PsoConfig, PsoResult, SwarmState, TraceEntry};

/// Per-coordinate `(lower, upper)` box.
pub type Bounds = [(f64, f64)];

pub(crate) fn check_bounds(bounds: &Bounds) -> crate::Result<()> {
    if bounds.is_empty() {
        return Err(crate::Error::Domain("search box has no dimensions".into()));
    }
    if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(crate::Error::Domain(format!("invalid bound [{lo}, {hi}]")));
    }
    Ok(())
}
