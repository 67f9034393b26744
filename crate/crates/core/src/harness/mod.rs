//! Synthetic datasets, experiment runs and decision-map rendering.

mod data;
mod experiment;
mod render;
pub mod seed;

pub use data::{gen_disks, gen_swiss, in_disks, Case, Spiral, C1, C2, DISK_RADIUS, ORIGIN};
pub use experiment::{
    evaluate, ours_spec, run_experiment, swiss_spec, ExperimentConfig, ExperimentOutcome, Init, RowResult, SwissConfig,
};
pub use render::{render_decision_map, DecisionMap};

use thiserror::Error;

use crate::compiler::CompileError;
use crate::dataset::DatasetError;
use crate::geometry::GeometryError;
use crate::metrics::MetricError;
use crate::network::NetworkError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training set has no positive samples to cover")]
    NoPositives,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
