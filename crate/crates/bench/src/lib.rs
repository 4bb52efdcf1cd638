//! Benchmark harness: seeded random instances, batch synthesis with
//! verification, CSV records and summaries, and SVG plots.

pub mod plot;
pub mod report;
pub mod runner;

use std::path::PathBuf;

use thiserror::Error;

pub use report::{BenchRecord, CellSummary};
pub use runner::{
    instance_seed, run_gadget_scaling, run_instance, run_qubit_scaling, BenchReport, CellFailure,
    GadgetScalingConfig, QubitScalingConfig,
};

/// Gadget counts used by the default gadget-scaling experiment.
pub const DEFAULT_GADGETS: [usize; 7] = [1, 5, 10, 50, 100, 500, 1000];

/// Architectures used by the default gadget-scaling experiment.
pub const DEFAULT_ARCHS: [&str; 3] = ["line_36", "square_36", "complete_36"];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Arch(#[from] phasesynth::ArchError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("plot: {0}")]
    Plot(String),
}

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
    let path = path.into();
    move |source| BenchError::Io { path, source }
}
