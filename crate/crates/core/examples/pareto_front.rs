//! Weighted-sum PSO sweep for stiffness against durability, with the
//! resulting Pareto front and its hypervolume.
//!
//! ```text
//! cargo run --release --example pareto_front
//! ```

use spokeforge::geometry::DesignGenotype;
use spokeforge::optimizer::{hypervolume, weighted_sum_sweep, ObjectiveSpec, PsoConfig, SweepConfig};
use spokeforge::pipeline::DesignEvaluator;

fn main() -> spokeforge::Result<()> {
    let evaluator = DesignEvaluator::proxy()?;
    let (_, base) = evaluator.evaluate(&DesignGenotype::zero())?;
    let spec: ObjectiveSpec = "max:rft,min:sedt".parse()?;
    let scales: Vec<f64> = spec.objective_vector(&base).iter().map(|v| v.abs()).collect();

    let config = SweepConfig {
        pso: PsoConfig {
            particles: 15,
            iterations: 25,
            ..PsoConfig::default()
        },
        divisions: Some(10),
    };
    let archive = weighted_sum_sweep(
        |p| {
            let record = evaluator.evaluate_position(p)?;
            Some((spec.objective_vector(&record), record))
        },
        &DesignGenotype::bounds(),
        &scales,
        &config,
    )?;
    let front = archive.into_sorted();
    println!("{} nondominated designs", front.len());
    println!("{:>10} {:>10} {:>10} {:>6}", "rft", "sedt", "vib_rms", "sweep");
    for (_, point) in front.iter().step_by((front.len() / 15).max(1)) {
        let r = &point.payload;
        println!("{:>10.1} {:>10.4} {:>10.4} {:>6}", r.rft, r.sedt, r.vib_rms, point.sweep);
    }

    // Hypervolume in base-normalized minimization form.
    let normalized: Vec<Vec<f64>> = front
        .iter()
        .map(|(f, _)| f.iter().zip(&scales).map(|(v, s)| v / s).collect())
        .collect();
    let reference: Vec<f64> = (0..2)
        .map(|k| normalized.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + 0.1)
        .collect();
    println!("hypervolume vs {reference:?}: {:.4}", hypervolume(&normalized, &reference)?);
    Ok(())
}
