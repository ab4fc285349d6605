//! Performance evaluation: the analytic proxy, the vibration spectrum
//! chain and ingestion of externally computed datasets.

pub mod dataset;
mod proxy;
mod record;
pub mod signal;

pub use dataset::{ingest_dataset, read_dataset, write_dataset, DatasetRow, DatasetSummary};
pub use proxy::{
    proxy_evaluate, proxy_evaluate_detailed, proxy_geometry_summaries, synthesize_vibration_signal,
    GeometrySummaries, ProxyCalibration, ProxyEvaluation, RawResponse, CURVATURE_WEIGHT,
};
pub use record::{OutputKind, PerformanceRecord, REFERENCE_RECORD};
pub use signal::{band_rms, fft_magnitudes, Spectrum, TimeSeries};
