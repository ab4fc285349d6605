//! Campaign orchestration behind the `spokeforge` command line: design
//! generation, evaluation, surrogate training, optimization runs and SVG
//! export, all persisted in a [`DesignArchive`] directory.

mod archive;
mod backend;
mod commands;
mod config;
mod optimize;
mod plots;

pub use archive::{
    ArchivedDesign, ArchivedRecord, DesignArchive, Manifest, ManifestEvent, Provenance, ARCHIVE_SCHEMA_VERSION,
    GENERATOR, PROFILES_DIR,
};
pub use backend::{load_models, model_path, DesignEvaluator};
pub use commands::{
    cmd_evaluate, cmd_generate, cmd_train, models_dir, open_archive, split_dataset, trained_models,
    EvaluateSummary, GenerateSummary, OutputReport, TrainReport, DATASET_FILE, MODELS_DIR,
};
pub use config::{Algorithm, BackendChoice, CampaignConfig, GbtGrid, KrrGrid, Split, TrainConfig};
pub use optimize::{
    cmd_optimize, cmd_pareto, write_pareto, write_trace, OptimizeOutcome, ParetoOutcome, ParetoRow, PARETO_FILE,
    RUNS_DIR, TRACE_FILE,
};
pub use plots::{cmd_export, PLOTS_DIR};
