use std::fs;
use std::path::Path;

use spokeforge::evaluator::OutputKind;
use spokeforge::pipeline::{
    cmd_evaluate, cmd_export, cmd_generate, cmd_optimize, cmd_pareto, cmd_train, open_archive, Algorithm,
    BackendChoice, CampaignConfig, DesignArchive, GbtGrid, KrrGrid, Provenance, TrainConfig, DATASET_FILE,
    MODELS_DIR,
};
use spokeforge::Error;

fn quick(dir: &Path, seed: u64, designs: usize) -> CampaignConfig {
    let mut c = CampaignConfig {
        seed,
        out: dir.to_path_buf(),
        design_count: designs,
        backend: BackendChoice::Proxy,
        train: TrainConfig {
            folds: 3,
            krr: KrrGrid {
                alpha: vec![1e-2],
                gamma: vec![0.05],
                degree: vec![2],
            },
            gbt: GbtGrid {
                learning_rate: vec![0.1],
                n_estimators: vec![40],
                max_depth: vec![2],
                l1: vec![0.0],
            },
        },
        ..CampaignConfig::default()
    };
    c.pso.particles = 8;
    c.pso.iterations = 10;
    c.sweep.pso.particles = 6;
    c.sweep.pso.iterations = 4;
    c.sweep.divisions = Some(3);
    c.bo.n_init = 4;
    c.bo.iterations = 3;
    c.bo.candidates = 128;
    c.bo.ehvi_candidates = 16;
    c.bo.ehvi_draws = 16;
    c
}

fn genotype_rows(dir: &Path) -> Vec<String> {
    fs::read_to_string(dir.join("genotypes.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.to_string())
        .collect()
}

#[test]
fn zero_designs_give_an_empty_archive() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick(tmp.path(), 1, 0);
    let summary = cmd_generate(&config).unwrap();
    assert_eq!(summary.accepted, 0);
    assert!(open_archive(&config).unwrap().is_empty());
    assert!(matches!(cmd_train(&config), Err(Error::Data(_))));
    // Nothing to plot: no files, no error.
    assert!(cmd_export(&config).unwrap().is_empty());
}

#[test]
fn seeds_control_the_sample() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, seed) in dirs.iter().zip([5, 5, 6]) {
        cmd_generate(&quick(dir.path(), seed, 12)).unwrap();
    }
    let rows: Vec<_> = dirs.iter().map(|d| genotype_rows(d.path())).collect();
    assert_eq!(rows[0].len(), 12);
    assert_eq!(rows[0], rows[1]);
    assert!(rows[0].iter().all(|r| !rows[2].contains(r)));
}

#[test]
fn generate_extends_existing_archive() {
    let tmp = tempfile::tempdir().unwrap();
    cmd_generate(&quick(tmp.path(), 3, 5)).unwrap();
    cmd_generate(&quick(tmp.path(), 3, 5)).unwrap();
    let archive = DesignArchive::open(tmp.path()).unwrap();
    assert_eq!(archive.len(), 10);
    let ids: Vec<_> = archive.designs().iter().map(|d| d.design_id.clone()).collect();
    assert_eq!(ids.first().unwrap(), "D0001");
    assert_eq!(ids.last().unwrap(), "D0010");
}

#[test]
fn archive_is_locked_while_open() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick(tmp.path(), 1, 3);
    cmd_generate(&config).unwrap();
    let held = open_archive(&config).unwrap();
    assert!(matches!(open_archive(&config), Err(Error::Config(_))));
    drop(held);
    assert_eq!(open_archive(&config).unwrap().len(), 3);
}

#[test]
fn retraining_a_reopened_archive_reproduces_models() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick(tmp.path(), 8, 40);
    cmd_generate(&config).unwrap();
    let eval = cmd_evaluate(&config).unwrap();
    assert_eq!(eval.evaluated, 40);
    assert!(eval.failures.is_empty());
    // A second evaluation finds nothing new to do.
    assert_eq!(cmd_evaluate(&config).unwrap().evaluated, 0);

    let first = cmd_train(&config).unwrap();
    let models = tmp.path().join(MODELS_DIR);
    let snapshot: Vec<_> = OutputKind::ALL
        .iter()
        .map(|k| fs::read(models.join(format!("{}.json", k.name()))).unwrap())
        .collect();
    let second = cmd_train(&config).unwrap();
    assert_eq!(first, second);
    for (k, bytes) in OutputKind::ALL.iter().zip(&snapshot) {
        assert_eq!(&fs::read(models.join(format!("{}.json", k.name()))).unwrap(), bytes);
    }
    assert_eq!(first.train_ids.len(), 32);
    assert_eq!(first.test_ids.len(), 8);
    assert!(first.test_ids.iter().all(|id| !first.train_ids.contains(id)));
}

#[test]
fn dataset_backend_ingests_records() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let source = quick(a.path(), 2, 20);
    cmd_generate(&source).unwrap();
    cmd_evaluate(&source).unwrap();
    cmd_train(&source).unwrap();

    let target = CampaignConfig {
        backend: BackendChoice::Dataset(a.path().join(DATASET_FILE)),
        ..quick(b.path(), 2, 20)
    };
    let summary = cmd_evaluate(&target).unwrap();
    assert_eq!(summary.evaluated, 20);
    let archive = open_archive(&target).unwrap();
    let ingested = archive
        .designs()
        .iter()
        .filter(|d| d.record(Provenance::Ingested).is_some())
        .count();
    assert_eq!(ingested, 20);
    // Ingested designs carry features but no genotype, so the proxy has nothing to evaluate.
    assert!(archive.designs().iter().all(|d| d.genotype.is_none()));
}

#[test]
fn surrogate_and_proxy_optimization_bundles() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = quick(tmp.path(), 4, 30);
    cmd_generate(&config).unwrap();
    cmd_evaluate(&config).unwrap();

    config.backend = BackendChoice::Surrogate;
    config.objective = "max:rft".into();
    assert!(cmd_optimize(&config).is_err(), "surrogates are not trained yet");
    cmd_train(&config).unwrap();
    let out = cmd_optimize(&config).unwrap();
    assert!(out.proxy_record.is_some());
    assert_eq!(out.trace.len(), 11);
    for name in ["trace.csv", "best.json", "best_profile.csv", "summary.txt"] {
        assert!(out.run_dir.join(name).is_file(), "{name}");
    }

    config.backend = BackendChoice::Proxy;
    config.algo = Algorithm::Bo;
    config.objective = "min:sedt".into();
    let bo = cmd_optimize(&config).unwrap();
    assert!(bo.improvement(OutputKind::Sedt) <= 0.0);
    assert!(bo.trace.windows(2).all(|w| w[1].best_value <= w[0].best_value));

    config.objective = "max:rft,min:sedt".into();
    for algo in [Algorithm::Pso, Algorithm::Bo] {
        config.algo = algo;
        let front = cmd_pareto(&config).unwrap();
        assert!(!front.rows.is_empty());
        assert!(front.run_dir.join("pareto.csv").is_file());
    }

    let written = cmd_export(&config).unwrap();
    assert!(written.iter().any(|p| p.to_string_lossy().contains("parity")));
    assert!(written.iter().all(|p| p.extension().is_some_and(|e| e == "svg")));
}
