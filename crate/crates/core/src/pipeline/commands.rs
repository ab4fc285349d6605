use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{ingest_dataset, DatasetRow, OutputKind, write_dataset};
use crate::geometry::{extract_features, generate_profile, DesignGenotype, GeneratedProfile};
use crate::surrogate::{r2_score, train_surrogate, CvReport, ModelFamily, SurrogateModel};

use super::archive::{DesignArchive, Provenance};
use super::backend::{load_models, model_path, DesignEvaluator};
use super::config::{BackendChoice, CampaignConfig, Split};

pub const MODELS_DIR: &str = "models";
pub const DATASET_FILE: &str = "dataset.csv";

/// Opens the campaign archive, creating it with the frozen base record.
pub fn open_archive(config: &CampaignConfig) -> Result<DesignArchive> {
    let proxy = DesignEvaluator::proxy()?;
    let base_record = crate::evaluator::proxy_evaluate(proxy.base(), proxy.calibration())?;
    DesignArchive::open_or_create(&config.out, base_record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub draws: usize,
}

/// Samples `design_count` feasible designs and archives genotype, profile
/// and features. Infeasible draws are resampled up to ten times the count.
pub fn cmd_generate(config: &CampaignConfig) -> Result<GenerateSummary> {
    let mut archive = open_archive(config)?;
    let count = config.design_count;
    let budget = 10 * count;
    let base = DesignEvaluator::proxy()?.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut accepted: Vec<(DesignGenotype, GeneratedProfile)> = Vec::with_capacity(count);
    let mut draws = 0;
    let mut rejected = 0;
    while accepted.len() < count {
        if draws >= budget {
            return Err(Error::Infeasible(format!(
                "resample budget of {budget} draws exhausted: {} feasible, {rejected} rejected ({:.1}% feasible)",
                accepted.len(),
                100.0 * accepted.len() as f64 / draws.max(1) as f64
            )));
        }
        let batch = (count - accepted.len()).min(budget - draws);
        let genotypes: Vec<DesignGenotype> = (0..batch).map(|_| DesignGenotype::sample(&mut rng)).collect();
        let results: Vec<Result<GeneratedProfile>> = genotypes.par_iter().map(|g| generate_profile(&base, g)).collect();
        for (g, r) in genotypes.into_iter().zip(results) {
            if accepted.len() == count {
                break;
            }
            draws += 1;
            match r {
                Ok(p) => accepted.push((g, p)),
                Err(Error::Infeasible(_) | Error::NonConvergence { .. }) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
    }

    let offset = archive.designs().iter().filter(|d| d.design_id.starts_with('D')).count();
    for (i, (g, p)) in accepted.iter().enumerate() {
        let id = format!("D{:04}", offset + i + 1);
        let profile = p.profile.clone().with_id(id.clone());
        let features = extract_features(&profile, g);
        archive.add_design(&id, Some(*g), features, Some(&profile))?;
    }
    let summary = GenerateSummary {
        accepted: count,
        rejected,
        draws,
    };
    info!("generated {count} designs ({rejected} infeasible draws rejected)");
    archive.log_event(
        "generate",
        format!("seed={} accepted={count} rejected={rejected}", config.seed),
    );
    archive.save()?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateSummary {
    pub backend: String,
    pub evaluated: usize,
    pub skipped: usize,
    /// Per-design failures, `(design_id, message)`.
    pub failures: Vec<(String, String)>,
}

/// Attaches records from the chosen backend to every archived design. With
/// `dataset:<csv>` the external rows are ingested: known ids gain an
/// ingested record, new ids become feature-only designs.
pub fn cmd_evaluate(config: &CampaignConfig) -> Result<EvaluateSummary> {
    let mut archive = open_archive(config)?;
    let summary = match &config.backend {
        BackendChoice::Dataset(path) => ingest(&mut archive, path)?,
        BackendChoice::Proxy => evaluate_with(&mut archive, DesignEvaluator::proxy()?, Provenance::Proxy)?,
        BackendChoice::Surrogate => {
            let models = load_models(&config.out.join(MODELS_DIR))?;
            evaluate_with(&mut archive, DesignEvaluator::surrogate(models)?, Provenance::SurrogatePredicted)?
        }
    };
    for (id, msg) in &summary.failures {
        warn!("{id}: {msg}");
    }
    archive.log_event(
        "evaluate",
        format!(
            "backend={} evaluated={} skipped={} failed={}",
            summary.backend,
            summary.evaluated,
            summary.skipped,
            summary.failures.len()
        ),
    );
    archive.save()?;
    Ok(summary)
}

fn evaluate_with(archive: &mut DesignArchive, evaluator: DesignEvaluator, provenance: Provenance) -> Result<EvaluateSummary> {
    let pending: Vec<(String, Option<DesignGenotype>)> = archive
        .designs()
        .iter()
        .filter(|d| d.record(provenance).is_none())
        .map(|d| (d.design_id.clone(), d.genotype))
        .collect();
    let skipped = archive.len() - pending.len();
    let results: Vec<(String, Result<_>)> = pending
        .into_par_iter()
        .map(|(id, genotype)| {
            let r = genotype
                .ok_or_else(|| Error::Data("design has no genotype or profile".into()))
                .and_then(|g| {
                    let profile = archive.read_profile(&id)?;
                    evaluator.evaluate_profile(&profile, &g)
                });
            (id, r)
        })
        .collect();
    let mut summary = EvaluateSummary {
        backend: provenance.to_string(),
        evaluated: 0,
        skipped,
        failures: Vec::new(),
    };
    for (id, r) in results {
        match r.and_then(|rec| archive.add_record(&id, rec, provenance)) {
            Ok(()) => summary.evaluated += 1,
            Err(e) => summary.failures.push((id, e.to_string())),
        }
    }
    Ok(summary)
}

fn ingest(archive: &mut DesignArchive, path: &Path) -> Result<EvaluateSummary> {
    let (rows, _) = ingest_dataset(path)?;
    let mut summary = EvaluateSummary {
        backend: Provenance::Ingested.to_string(),
        evaluated: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for row in rows {
        let result = match archive.get(&row.design_id) {
            Some(d) if d.record(Provenance::Ingested).is_some() => {
                summary.skipped += 1;
                continue;
            }
            Some(_) => archive.add_record(&row.design_id, row.record, Provenance::Ingested),
            None => archive
                .add_design(&row.design_id, None, row.features, None)
                .and_then(|()| archive.add_record(&row.design_id, row.record, Provenance::Ingested)),
        };
        match result {
            Ok(()) => summary.evaluated += 1,
            Err(e) => summary.failures.push((row.design_id, e.to_string())),
        }
    }
    Ok(summary)
}

/// Test-set quality of one trained output model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputReport {
    pub output: OutputKind,
    pub selected: String,
    pub cv_mean_r2: f64,
    pub test_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub split: Split,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub outputs: Vec<OutputReport>,
}

impl TrainReport {
    pub fn test_r2(&self, output: OutputKind) -> Option<f64> {
        self.outputs.iter().find(|o| o.output == output).map(|o| o.test_r2)
    }

    /// Plain-text table of the selected model per output.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<8} {:<78} {:>8} {:>8}\n",
            "output", "selected model", "cv R2", "test R2"
        );
        for o in &self.outputs {
            s.push_str(&format!(
                "{:<8} {:<78} {:>8.4} {:>8.4}\n",
                o.output.name(),
                o.selected,
                o.cv_mean_r2,
                o.test_r2
            ));
        }
        s
    }
}

/// Seeded train/test partition of designs with a ground-truth record.
pub fn split_dataset(archive: &DesignArchive, split: Split, seed: u64) -> (Vec<DatasetRow>, Vec<DatasetRow>) {
    let mut rows: Vec<DatasetRow> = archive
        .designs()
        .iter()
        .filter_map(|d| {
            d.training_record().map(|r| DatasetRow {
                design_id: d.design_id.clone(),
                features: d.features,
                record: *r,
            })
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rows.shuffle(&mut rng);
    let test = rows.split_off(split.train.min(rows.len()));
    (rows, test)
}

/// Trains one surrogate per output on the seeded training split, scores the
/// held-out split, and writes models, CV reports, parity data and a summary
/// table under `models/`.
pub fn cmd_train(config: &CampaignConfig) -> Result<TrainReport> {
    let archive = open_archive(config)?;
    let available = archive.designs().iter().filter(|d| d.training_record().is_some()).count();
    if available < 2 * config.train.folds.max(5) {
        return Err(Error::Data(format!(
            "{available} evaluated designs are too few to train on; run generate and evaluate first"
        )));
    }
    let split = config.split_for(available)?;
    if split.test < 2 || split.train < config.train.folds {
        return Err(Error::Data(format!("split {}/{} leaves too little data", split.train, split.test)));
    }
    let (train, test) = split_dataset(&archive, split, config.seed);
    let dir = config.out.join(MODELS_DIR);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_dataset(&train.iter().chain(&test).cloned().collect::<Vec<_>>(), create(&config.out.join(DATASET_FILE))?)?;

    let x_train: Vec<Vec<f64>> = train.iter().map(|r| r.features.to_array().to_vec()).collect();
    let x_test: Vec<Vec<f64>> = test.iter().map(|r| r.features.to_array().to_vec()).collect();
    let mut outputs = Vec::new();
    let mut parity = csv::Writer::from_writer(create(&dir.join("parity.csv"))?);
    parity.write_record(["output", "design_id", "y_true", "y_pred"])?;
    let mut reports: Vec<(OutputKind, CvReport)> = Vec::new();
    for kind in OutputKind::ALL {
        let y_train: Vec<f64> = train.iter().map(|r| r.record.get(kind)).collect();
        let y_test: Vec<f64> = test.iter().map(|r| r.record.get(kind)).collect();
        let grid = match ModelFamily::default_for(kind) {
            ModelFamily::KernelRidge => config.train.krr.expand(),
            ModelFamily::BoostedTrees => config.train.gbt.expand(),
        };
        let (model, report) = train_surrogate(kind, &x_train, &y_train, &grid, config.train.folds, config.seed)?;
        let pred = model.predict(&x_test);
        let test_r2 = r2_score(&y_test, &pred)?;
        for ((row, t), p) in test.iter().zip(&y_test).zip(&pred) {
            parity.write_record([kind.name(), &row.design_id, &t.to_string(), &p.to_string()])?;
        }
        model.save(model_path(&dir, kind))?;
        info!("{kind}: {} test R2 {test_r2:.4}", report.best().params.describe());
        outputs.push(OutputReport {
            output: kind,
            selected: report.best().params.describe(),
            cv_mean_r2: report.best().mean_r2,
            test_r2,
        });
        reports.push((kind, report));
    }
    parity.flush().map_err(|e| Error::io(&dir, e))?;
    let cv: serde_json::Map<String, serde_json::Value> = reports
        .iter()
        .map(|(k, r)| Ok((k.name().to_string(), serde_json::to_value(r)?)))
        .collect::<Result<_>>()?;
    serde_json::to_writer_pretty(create(&dir.join("cv_report.json"))?, &cv)?;

    let report = TrainReport {
        split,
        train_ids: train.iter().map(|r| r.design_id.clone()).collect(),
        test_ids: test.iter().map(|r| r.design_id.clone()).collect(),
        outputs,
    };
    serde_json::to_writer_pretty(create(&dir.join("train_report.json"))?, &report)?;
    let mut table = create(&dir.join("r2_report.txt"))?;
    table
        .write_all(report.table().as_bytes())
        .map_err(|e| Error::io(&dir, e))?;
    Ok(report)
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Models previously written by [`cmd_train`].
pub fn trained_models(config: &CampaignConfig) -> Result<Vec<SurrogateModel>> {
    load_models(&models_dir(config))
}

pub fn models_dir(config: &CampaignConfig) -> PathBuf {
    config.out.join(MODELS_DIR)
}
