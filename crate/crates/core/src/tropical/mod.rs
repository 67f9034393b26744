//! Max-plus polynomials, their corner loci and dual subdivisions.

mod curve;
mod duality;
mod hull;
mod poly;
mod semiring;
mod subdivision;

pub use curve::{curve_raster, enumerate_curve, CurveEdge, CurveVertex, EdgeKind, TropicalCurve};
pub use duality::{duality_report, DualityReport};
pub use hull::{convex_hull_2d, newton_polytope, twice_area, NewtonPolytope};
pub use poly::{trop_rational_eval, Monomial, TropicalPolynomial};
pub use semiring::{trop_add, trop_mul, MaxPlus};
pub use subdivision::{dual_subdivision, DualSubdivision};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropicalError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial dimension must be at least 1")]
    ZeroDimension,
    #[error("polynomial has no monomials")]
    Empty,
    #[error("coefficients must be finite (drop the monomial to encode -inf)")]
    NonFiniteCoefficient,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("operation requires a planar polynomial, got dimension {0}")]
    NotPlanar(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid window")]
    BadWindow,
    #[error("grid resolution must be at least {min}, got {got}")]
    BadGrid { min: usize, got: usize },
}
