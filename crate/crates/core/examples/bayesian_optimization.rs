//! Gaussian-process BO with expected improvement, first on a 1-D quartic,
//! then on the proxy with a 40-evaluation budget.
//!
//! ```text
//! cargo run --release --example bayesian_optimization
//! ```

use spokeforge::geometry::DesignGenotype;
use spokeforge::optimizer::{bo_run, scalarize_targeted, BoConfig, ObjectiveSpec};
use spokeforge::pipeline::DesignEvaluator;

fn main() -> spokeforge::Result<()> {
    let quartic = |p: &[f64]| {
        let x = p[0];
        (x - 1.3).powi(4) - 2.0 * (x - 1.3).powi(2) + 0.3 * (x - 2.3).powi(2)
    };
    let config = BoConfig {
        n_init: 5,
        iterations: 30,
        seed: 7,
        ..BoConfig::default()
    };
    let result = bo_run(quartic, &[(-4.0, 4.0)], &config)?;
    println!(
        "quartic: x = {:.4}, f = {:.5} after {} evaluations",
        result.best_position[0],
        result.best_value,
        result.values.len()
    );
    for (i, (p, l)) in result.positions.iter().zip(&result.length_scales).enumerate().skip(5).step_by(5) {
        println!("  eval {i:>2}  x = {:>7.4}  length scale {l}", p[0]);
    }

    let evaluator = DesignEvaluator::proxy()?;
    let (_, base) = evaluator.evaluate(&DesignGenotype::zero())?;
    let spec: ObjectiveSpec = "min:sedt".parse()?;
    let loss = |p: &[f64]| {
        evaluator
            .evaluate_position(p)
            .map_or(f64::INFINITY, |r| scalarize_targeted(&r, &spec, &base))
    };
    let config = BoConfig {
        n_init: 10,
        iterations: 30,
        ..BoConfig::default()
    };
    let result = bo_run(loss, &DesignGenotype::bounds(), &config)?;
    println!(
        "\nproxy min:sedt: best SEDT ratio {:.4} ({} infeasible of {})",
        result.best_value,
        result.non_finite,
        result.values.len()
    );
    Ok(())
}
