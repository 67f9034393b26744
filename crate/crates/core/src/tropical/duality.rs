use std::collections::BTreeSet;

use serde::Serialize;

use super::curve::{enumerate_curve, region_labels, EdgeKind};
use super::subdivision::dual_subdivision;
use super::{TropicalError, TropicalPolynomial};
use crate::Window;

/// Paired counts between `Trop(F)` and its dual subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub curve_vertices: usize,
    pub polygons: usize,
    pub bounded_edges: usize,
    pub interior_edges: usize,
    pub rays: usize,
    pub boundary_edges: usize,
    pub lines: usize,
    pub segments: usize,
    pub regions: usize,
    pub used_points: usize,
    pub non_simplicial: bool,
    /// Curve vertices inside the window.
    pub vertices_in_window: usize,
    /// Distinct maximizing monomials seen on the window raster.
    pub regions_in_window: usize,
}

impl DualityReport {
    pub fn counts_match(&self) -> bool {
        self.curve_vertices == self.polygons
            && self.bounded_edges == self.interior_edges
            && self.rays == self.boundary_edges
            && self.lines == self.segments
            && self.regions == self.used_points
    }
}

pub fn duality_report(
    poly: &TropicalPolynomial,
    window: &Window,
    grid_n: usize,
) -> Result<DualityReport, TropicalError> {
    if poly.dim() != 2 {
        return Err(TropicalError::NotPlanar(poly.dim()));
    }
    if !window.is_valid() {
        return Err(TropicalError::BadWindow);
    }
    if grid_n < 64 {
        return Err(TropicalError::BadGrid { min: 64, got: grid_n });
    }
    let curve = enumerate_curve(poly)?;
    let sub = dual_subdivision(poly)?;
    let labels: BTreeSet<usize> = region_labels(poly, window, grid_n).into_iter().collect();
    Ok(DualityReport {
        curve_vertices: curve.vertices.len(),
        polygons: sub.polygons(),
        bounded_edges: curve.count(EdgeKind::Bounded),
        interior_edges: sub.interior_edges,
        rays: curve.count(EdgeKind::Ray),
        boundary_edges: sub.boundary_edges,
        lines: curve.count(EdgeKind::Line),
        segments: sub.segments,
        regions: curve.regions,
        used_points: sub.used_points,
        non_simplicial: sub.non_simplicial,
        vertices_in_window: curve.vertices.iter().filter(|v| window.contains(v.point)).count(),
        regions_in_window: labels.len(),
    })
}
