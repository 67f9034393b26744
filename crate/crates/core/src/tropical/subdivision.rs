use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::hull::{convex_hull_2d, twice_area};
use super::{TropicalError, TropicalPolynomial};

/// Regular subdivision of the Newton polygon induced by the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSubdivision {
    /// Cells as CCW vertex lists. Degenerate supports give a single cell with
    /// one or two vertices.
    pub cells: Vec<Vec<[i64; 2]>>,
    /// Newton polygon, CCW.
    pub support: Vec<[i64; 2]>,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    /// Exponents that are vertices of some cell.
    pub used_points: usize,
    /// Number of segments in the 1D subdivision of a collinear support.
    pub segments: usize,
    /// Set when some upper face carries more than three lifted points, i.e.
    /// coefficient ties make the subdivision non-simplicial.
    pub non_simplicial: bool,
}

impl DualSubdivision {
    /// Number of two-dimensional cells.
    pub fn polygons(&self) -> usize {
        self.cells.iter().filter(|c| c.len() >= 3).count()
    }

    pub fn cell_area_sum(&self) -> f64 {
        self.cells.iter().map(|c| twice_area(c) as f64 / 2.0).sum()
    }

    pub fn support_area(&self) -> f64 {
        twice_area(&self.support) as f64 / 2.0
    }
}

fn planar_points(poly: &TropicalPolynomial) -> Result<Vec<([i64; 2], f64)>, TropicalError> {
    if poly.dim() != 2 {
        return Err(TropicalError::NotPlanar(poly.dim()));
    }
    Ok(poly.monomials().iter().map(|m| ([m.exponent[0], m.exponent[1]], m.coeff)).collect())
}

#[inline]
fn orient(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> i128 {
    (b[0] - a[0]) as i128 * (c[1] - a[1]) as i128 - (b[1] - a[1]) as i128 * (c[0] - a[0]) as i128
}

/// Computes the regular subdivision dual to the tropical curve of `poly`.
///
/// Every non-collinear triple of lifted points `(u_k, c_k)` spans a plane; the
/// plane is an upper face when no lifted point lies above it (up to a
/// tolerance relative to the coefficient scale). The face's cell is the exact
/// lattice hull of the points lying on the plane.
pub fn dual_subdivision(poly: &TropicalPolynomial) -> Result<DualSubdivision, TropicalError> {
    let pts = planar_points(poly)?;
    let exps: Vec<[i64; 2]> = pts.iter().map(|p| p.0).collect();
    let support = convex_hull_2d(&exps);
    let tol = 1e-9 * poly.coeff_scale();

    if support.len() < 3 {
        return Ok(collinear_subdivision(&pts, support, tol));
    }

    let m = pts.len();
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let (a, b, c) = (exps[i], exps[j], exps[k]);
                let det = orient(a, b, c) as f64;
                if det == 0.0 {
                    continue;
                }
                // c(u) = c_a + g·(u − a) with g solving the 2×2 system.
                let (dbx, dby) = ((b[0] - a[0]) as f64, (b[1] - a[1]) as f64);
                let (dcx, dcy) = ((c[0] - a[0]) as f64, (c[1] - a[1]) as f64);
                let (rb, rc) = (pts[j].1 - pts[i].1, pts[k].1 - pts[i].1);
                let gx = (rb * dcy - rc * dby) / det;
                let gy = (dbx * rc - dcx * rb) / det;
                let plane = |u: [i64; 2]| pts[i].1 + gx * (u[0] - a[0]) as f64 + gy * (u[1] - a[1]) as f64;
                let mut on = Vec::new();
                let mut upper = true;
                for (l, &(u, cl)) in pts.iter().enumerate() {
                    let gap = cl - plane(u);
                    if gap > tol {
                        upper = false;
                        break;
                    }
                    if gap >= -tol {
                        on.push(l);
                    }
                }
                if upper {
                    faces.insert(on);
                }
            }
        }
    }

    let mut non_simplicial = false;
    let mut cells = Vec::with_capacity(faces.len());
    let mut used: BTreeSet<[i64; 2]> = BTreeSet::new();
    let mut edge_uses: BTreeMap<([i64; 2], [i64; 2]), usize> = BTreeMap::new();
    for face in &faces {
        if face.len() > 3 {
            non_simplicial = true;
        }
        let cell = convex_hull_2d(&face.iter().map(|&l| exps[l]).collect::<Vec<_>>());
        for (n, &v) in cell.iter().enumerate() {
            used.insert(v);
            let w = cell[(n + 1) % cell.len()];
            let key = if v < w { (v, w) } else { (w, v) };
            *edge_uses.entry(key).or_default() += 1;
        }
        cells.push(cell);
    }
    let interior_edges = edge_uses.values().filter(|&&c| c >= 2).count();
    let boundary_edges = edge_uses.values().filter(|&&c| c == 1).count();

    Ok(DualSubdivision {
        cells,
        support,
        interior_edges,
        boundary_edges,
        used_points: used.len(),
        segments: 0,
        non_simplicial,
    })
}

/// Collinear (or single-point) supports: the lifted points form a planar
/// chain whose upper hull splits the segment into pieces, each dual to a full
/// line of the curve.
fn collinear_subdivision(pts: &[([i64; 2], f64)], support: Vec<[i64; 2]>, tol: f64) -> DualSubdivision {
    if support.len() < 2 {
        return DualSubdivision {
            cells: vec![support.clone()],
            support,
            interior_edges: 0,
            boundary_edges: 0,
            used_points: 1,
            segments: 0,
            non_simplicial: false,
        };
    }
    let (a, b) = (support[0], support[1]);
    let dir = [(b[0] - a[0]) as f64, (b[1] - a[1]) as f64];
    let mut line: Vec<(f64, f64)> =
        pts.iter().map(|(u, c)| (((u[0] - a[0]) as f64) * dir[0] + ((u[1] - a[1]) as f64) * dir[1], *c)).collect();
    line.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Upper chain of (t, c) points.
    let mut chain: Vec<(f64, f64)> = Vec::new();
    for &p in &line {
        while chain.len() >= 2 {
            let (o, q) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            let turn = (q.0 - o.0) * (p.1 - o.1) - (q.1 - o.1) * (p.0 - o.0);
            if turn >= -tol * (p.0 - o.0).abs() {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    DualSubdivision {
        cells: vec![support.clone()],
        support,
        interior_edges: 0,
        boundary_edges: 0,
        used_points: chain.len(),
        segments: chain.len() - 1,
        non_simplicial: false,
    }
}
