//! Geometric descriptions to network weights.

mod convex;
mod ls1d;
mod params;

pub use convex::{
    compile_ball_cover, compile_ball_cover_with, compile_convex, compile_union, compile_union_with, in_gate_band,
    in_outer_band, FacetRule, UnionOptions,
};
pub use ls1d::{design_matrix, ls_initializer_1d, Basis, LsFit};
pub use params::{band_halfwidth, logit, margin_params, sharpness_for, GateParams, Margins};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::network::NetworkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no components to compile")]
    NoComponents,
    #[error("component {0} has no facets")]
    EmptyComponent(usize),
    #[error("component {0} is unbounded")]
    Unbounded(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("margin bounds violated: {0}")]
    MarginViolation(String),
    #[error("normal equations are ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
