//! Geometry-aware construction of sigmoidal classifiers.
//!
//! Target regions described as convex polygons, unions of polygons or ball
//! covers are compiled into the exact weights of small logistic MLPs. The
//! crate also contains the max-plus toolkit used to study piecewise-linear
//! decision functions, a from-scratch Adam trainer, evaluation metrics and an
//! experiment harness.

pub mod compiler;
pub mod dataset;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod tropical;
pub mod window;

pub use window::Window;
