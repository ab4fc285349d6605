//! Particle swarm on the proxy: maximize tensile stiffness, then minimize
//! tensile strain energy.
//!
//! ```text
//! cargo run --release --example pso_single_objective
//! ```

use spokeforge::evaluator::OutputKind;
use spokeforge::geometry::DesignGenotype;
use spokeforge::optimizer::{pso_run, scalarize_targeted, ObjectiveSpec, PsoConfig};
use spokeforge::pipeline::DesignEvaluator;

fn main() -> spokeforge::Result<()> {
    let evaluator = DesignEvaluator::proxy()?;
    let (_, base) = evaluator.evaluate(&DesignGenotype::zero())?;
    let config = PsoConfig {
        particles: 30,
        iterations: 100,
        ..PsoConfig::default()
    };

    for (objective, kind) in [("max:rft", OutputKind::Rft), ("min:sedt", OutputKind::Sedt)] {
        let spec: ObjectiveSpec = objective.parse()?;
        let loss = |p: &[f64]| {
            evaluator
                .evaluate_position(p)
                .map_or(f64::INFINITY, |r| scalarize_targeted(&r, &spec, &base))
        };
        let result = pso_run(loss, &DesignGenotype::bounds(), &config)?;
        let best = DesignGenotype::from_slice(&result.best_position)?;
        let (_, record) = evaluator.evaluate(&best)?;
        println!(
            "{objective}: {} {:.2} -> {:.2} ({:+.2}%), {} infeasible evaluations",
            kind.name(),
            base.get(kind),
            record.get(kind),
            100.0 * (record.get(kind) - base.get(kind)) / base.get(kind),
            result.non_finite
        );
        for entry in result.trace.iter().step_by(20) {
            println!("  iter {:>3}  g_best {:.5}", entry.iteration, entry.best_value);
        }
        println!("  top offsets    {:?}", best.top_offsets.map(|v| (v * 100.0).round() / 100.0));
        println!("  bottom offsets {:?}\n", best.bottom_offsets.map(|v| (v * 100.0).round() / 100.0));
    }
    Ok(())
}
