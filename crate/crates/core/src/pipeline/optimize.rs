use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{OutputKind, PerformanceRecord};
use crate::geometry::io::write_profile;
use crate::geometry::{DesignGenotype, GENOTYPE_DIM};
use crate::optimizer::{
    bo_multi_run, bo_run, pso_run, scalarize_targeted, weighted_sum_sweep, Backend, ObjectiveSpec, TraceEntry,
};

use super::commands::{create, models_dir, open_archive};
use super::backend::DesignEvaluator;
use super::config::{Algorithm, CampaignConfig};

pub const RUNS_DIR: &str = "runs";
pub const TRACE_FILE: &str = "trace.csv";
pub const PARETO_FILE: &str = "pareto.csv";

const GENOTYPE_COLUMNS: [&str; GENOTYPE_DIM] = ["t1", "t2", "t3", "t4", "t5", "b1", "b2", "b3", "b4", "b5"];

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Proxy => "proxy",
        Backend::Surrogate => "surrogate",
    }
}

fn run_dir(config: &CampaignConfig, spec: &ObjectiveSpec, suffix: &str) -> Result<PathBuf> {
    let dir = config.out.join(RUNS_DIR).join(format!(
        "{}-{}-{}{suffix}",
        spec.tag(),
        config.algo,
        backend_name(spec.backend)
    ));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

/// Result of a single-objective or targeted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub objective: String,
    pub algo: Algorithm,
    pub backend: Backend,
    pub run_dir: PathBuf,
    pub best_value: f64,
    pub genotype: DesignGenotype,
    pub record: PerformanceRecord,
    /// Proxy record of the optimum when the search ran on surrogates.
    pub proxy_record: Option<PerformanceRecord>,
    pub base_record: PerformanceRecord,
    /// `100 (y - y_base) / y_base` per output, canonical order.
    pub improvement_pct: [f64; 5],
    /// The search found no feasible design and the base design is reported.
    pub fallback: bool,
    pub non_finite: usize,
    pub trace: Vec<TraceEntry>,
}

impl OptimizeOutcome {
    pub fn improvement(&self, kind: OutputKind) -> f64 {
        self.improvement_pct[kind.index()]
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "objective {} via {} on {}: best loss {:.6}{}\n",
            self.objective,
            self.algo,
            backend_name(self.backend),
            self.best_value,
            if self.fallback { " (no feasible design found; base design reported)" } else { "" }
        );
        s.push_str(&format!("{:<8} {:>14} {:>14} {:>10}\n", "output", "base", "optimum", "change"));
        for k in OutputKind::ALL {
            s.push_str(&format!(
                "{:<8} {:>14.6} {:>14.6} {:>+9.2}%\n",
                k.name(),
                self.base_record.get(k),
                self.record.get(k),
                self.improvement(k)
            ));
        }
        s
    }
}

/// Minimizes the scalarized objective (targets, then base-normalized min and
/// max terms) with PSO or BO and writes the run bundle.
pub fn cmd_optimize(config: &CampaignConfig) -> Result<OptimizeOutcome> {
    let spec = config.objective_spec()?;
    config.backend.objective_backend()?;
    let mut archive = open_archive(config)?;
    let base = archive.base_record();
    let evaluator = DesignEvaluator::for_backend(spec.backend, &models_dir(config))?;
    let objective = |x: &[f64]| {
        evaluator
            .evaluate_position(x)
            .map_or(f64::INFINITY, |r| scalarize_targeted(&r, &spec, &base))
    };
    let bounds = DesignGenotype::bounds();
    let (best_position, best_value, trace, non_finite) = match config.algo {
        Algorithm::Pso => {
            let pso = crate::optimizer::PsoConfig {
                seed: config.seed,
                ..config.pso
            };
            let r = pso_run(objective, &bounds, &pso)?;
            (r.best_position, r.best_value, r.trace, r.non_finite)
        }
        Algorithm::Bo => {
            let bo = crate::optimizer::BoConfig {
                seed: config.seed,
                ..config.bo
            };
            let r = bo_run(objective, &bounds, &bo)?;
            (r.best_position, r.best_value, r.trace, r.non_finite)
        }
    };
    let fallback = !best_value.is_finite();
    let genotype = if fallback {
        warn!("no feasible design found; reporting the base design");
        DesignGenotype::zero()
    } else {
        DesignGenotype::from_slice(&best_position)?
    };
    let (generated, record) = evaluator.evaluate(&genotype)?;
    let proxy_record = match spec.backend {
        Backend::Surrogate => {
            let proxy = DesignEvaluator::proxy()?;
            Some(proxy.evaluate_profile(&generated.profile, &genotype)?)
        }
        Backend::Proxy => None,
    };
    let outcome = OptimizeOutcome {
        objective: spec.to_string(),
        algo: config.algo,
        backend: spec.backend,
        run_dir: run_dir(config, &spec, "")?,
        best_value: if fallback { scalarize_targeted(&record, &spec, &base) } else { best_value },
        genotype,
        record,
        proxy_record,
        base_record: base,
        improvement_pct: record.improvement_over(&base),
        fallback,
        non_finite,
        trace,
    };

    write_trace(&outcome.run_dir.join(TRACE_FILE), &outcome.trace)?;
    serde_json::to_writer_pretty(create(&outcome.run_dir.join("best.json"))?, &outcome_json(&outcome))?;
    write_profile(
        &generated.profile.clone().with_id("best"),
        create(&outcome.run_dir.join("best_profile.csv"))?,
    )?;
    create(&outcome.run_dir.join("summary.txt"))?
        .write_all(outcome.summary().as_bytes())
        .map_err(|e| Error::io(&outcome.run_dir, e))?;
    info!("{}", outcome.summary());
    archive.log_event(
        "optimize",
        format!("objective={} algo={} seed={} best={}", outcome.objective, config.algo, config.seed, outcome.best_value),
    );
    archive.save()?;
    Ok(outcome)
}

/// Bundle contents without the trace, which has its own CSV.
fn outcome_json(o: &OptimizeOutcome) -> serde_json::Value {
    serde_json::json!({
        "objective": o.objective,
        "algo": o.algo,
        "backend": o.backend,
        "best_value": o.best_value,
        "genotype": o.genotype,
        "record": o.record,
        "proxy_record": o.proxy_record,
        "base_record": o.base_record,
        "improvement_pct": o.improvement_pct,
        "fallback": o.fallback,
        "non_finite": o.non_finite,
    })
}

pub fn write_trace(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["iteration", "best_value"];
    header.extend(GENOTYPE_COLUMNS);
    w.write_record(&header)?;
    for e in trace {
        let mut row = vec![e.iteration.to_string(), e.best_value.to_string()];
        row.extend(e.best_position.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One non-dominated design from a multi-objective run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub design_id: String,
    pub genotype: DesignGenotype,
    pub record: PerformanceRecord,
    pub objectives: Vec<f64>,
    pub iteration_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoOutcome {
    pub objective: String,
    pub run_dir: PathBuf,
    pub rows: Vec<ParetoRow>,
}

/// Multi-objective search: weighted-sum PSO sweeps or EHVI-driven BO. All
/// feasible evaluations pass through a Pareto archive whose members are
/// written to `pareto.csv`.
pub fn cmd_pareto(config: &CampaignConfig) -> Result<ParetoOutcome> {
    let spec = config.objective_spec()?;
    config.backend.objective_backend()?;
    let m = spec.active().len();
    if m < 2 {
        return Err(Error::Config(format!(
            "pareto needs at least two objectives, `{}` has {m}",
            config.objective
        )));
    }
    let mut archive = open_archive(config)?;
    let base = archive.base_record();
    let evaluator = DesignEvaluator::for_backend(spec.backend, &models_dir(config))?;
    let bounds = DesignGenotype::bounds();

    let mut found: Vec<(Vec<f64>, Vec<f64>, PerformanceRecord, usize)> = match config.algo {
        Algorithm::Pso => {
            let scales: Vec<f64> = spec
                .objective_vector(&base)
                .into_iter()
                .map(|v| if v.abs() > 0.0 { v.abs() } else { 1.0 })
                .collect();
            let mut sweep = config.sweep;
            sweep.pso.seed = config.seed;
            let front = weighted_sum_sweep(
                |x| evaluator.evaluate_position(x).map(|r| (spec.objective_vector(&r), r)),
                &bounds,
                &scales,
                &sweep,
            )?;
            front
                .into_sorted()
                .into_iter()
                .map(|(o, p)| (o, p.position, p.payload, p.iteration))
                .collect()
        }
        Algorithm::Bo => {
            let bo = crate::optimizer::BoConfig {
                seed: config.seed,
                ..config.bo
            };
            let r = bo_multi_run(
                |x| evaluator.evaluate_position(x).map(|rec| spec.objective_vector(&rec)),
                &bounds,
                m,
                &bo,
            )?;
            r.archive
                .into_sorted()
                .into_iter()
                .map(|(o, i)| {
                    let rec = evaluator
                        .evaluate_position(&r.positions[i])
                        .ok_or_else(|| Error::Numerical("archived design became infeasible".into()))?;
                    Ok((o, r.positions[i].clone(), rec, r.iteration[i]))
                })
                .collect::<Result<_>>()?
        }
    };
    found.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let rows = found
        .into_iter()
        .enumerate()
        .map(|(i, (objectives, position, record, iteration_found))| {
            Ok(ParetoRow {
                design_id: format!("P{:04}", i + 1),
                genotype: DesignGenotype::from_slice(&position)?,
                record,
                objectives,
                iteration_found,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outcome = ParetoOutcome {
        objective: spec.to_string(),
        run_dir: run_dir(config, &spec, "-pareto")?,
        rows,
    };
    write_pareto(&outcome.run_dir.join(PARETO_FILE), &outcome.rows)?;
    info!("{} non-dominated designs for {}", outcome.rows.len(), outcome.objective);
    archive.log_event(
        "pareto",
        format!("objective={} algo={} seed={} front={}", outcome.objective, config.algo, config.seed, outcome.rows.len()),
    );
    archive.save()?;
    Ok(outcome)
}

pub fn write_pareto(path: &Path, rows: &[ParetoRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["design_id"];
    header.extend(GENOTYPE_COLUMNS);
    header.extend(OutputKind::ALL.map(OutputKind::name));
    header.push("iteration_found");
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![r.design_id.clone()];
        row.extend(r.genotype.to_array().iter().map(f64::to_string));
        row.extend(r.record.to_array().iter().map(f64::to_string));
        row.push(r.iteration_found.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
