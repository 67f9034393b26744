//! Half-space descriptions of convex sets, ball covers and grid distances.

mod cover;
mod facet;
mod hausdorff;

pub use cover::{ball_cover_from_positives, farthest_point_sampling, voxel_downsample, Ball, BallCover, FpsStart};
pub use facet::{
    ball_polytope, circumscribed_error, facet_count_for_tolerance, polygon_facets, ConvexComponent, Facet,
};
pub use hausdorff::{grid_hausdorff, grid_hausdorff_masks, rasterize};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex counter-clockwise at vertex {0}")]
    NotConvexCcw(usize),
    #[error("need at least {need} facets to bound a region in dimension {dim}, got {got}")]
    TooFewFacets { need: usize, got: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("indicator set is empty on the grid")]
    EmptySet,
    #[error("no positive points to cover")]
    EmptyCover,
    #[error("requested {k} samples from {n} points")]
    TooManySamples { k: usize, n: usize },
}
