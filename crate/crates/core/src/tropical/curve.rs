use std::collections::BTreeSet;

use serde::Serialize;

use super::{TropicalError, TropicalPolynomial};
use crate::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Bounded,
    Ray,
    /// A full line; only occurs for collinear supports.
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveVertex {
    pub point: [f64; 2],
    /// Monomial indices tied at the maximum.
    pub monomials: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEdge {
    /// The two monomials whose tie defines the edge (extreme along the edge normal).
    pub pair: (usize, usize),
    pub kind: EdgeKind,
    /// Base point on the edge and unit direction; the edge is
    /// `{base + t·dir : t ∈ [t_min, t_max]}` with infinite ends for rays and lines.
    pub base: [f64; 2],
    pub dir: [f64; 2],
    pub t_min: f64,
    pub t_max: f64,
}

impl CurveEdge {
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        [self.base[0] + t * self.dir[0], self.base[1] + t * self.dir[1]]
    }

    /// Segment endpoints clipped to a parameter range, for drawing.
    pub fn clipped(&self, reach: f64) -> ([f64; 2], [f64; 2]) {
        let lo = if self.t_min.is_finite() { self.t_min } else { -reach };
        let hi = if self.t_max.is_finite() { self.t_max } else { reach };
        (self.point_at(lo), self.point_at(hi))
    }
}

/// Corner locus of a planar polynomial, computed by exact tie solving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TropicalCurve {
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<CurveEdge>,
    /// Monomials that are the unique maximizer on an open region.
    pub regions: usize,
}

impl TropicalCurve {
    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }
}

fn tie_tol(poly: &TropicalPolynomial, x: [f64; 2]) -> f64 {
    let umax =
        poly.monomials().iter().flat_map(|m| m.exponent.iter()).map(|u| u.unsigned_abs() as f64).fold(0.0, f64::max);
    1e-9 * (poly.coeff_scale() + umax * x[0].abs().max(x[1].abs()))
}

fn exps(poly: &TropicalPolynomial) -> Vec<[f64; 2]> {
    poly.monomials().iter().map(|m| [m.exponent[0] as f64, m.exponent[1] as f64]).collect()
}

/// Enumerates the vertices, bounded edges, rays and regions of `Trop(F)`.
///
/// Vertices come from every triple of monomials with affinely independent
/// exponents: the 2×2 tie system is solved and kept when the tied value is the
/// global maximum. Edges come from every pair: the tie line is intersected
/// with the half-planes where the pair dominates each other monomial.
pub fn enumerate_curve(poly: &TropicalPolynomial) -> Result<TropicalCurve, TropicalError> {
    if poly.dim() != 2 {
        return Err(TropicalError::NotPlanar(poly.dim()));
    }
    let u = exps(poly);
    let c: Vec<f64> = poly.monomials().iter().map(|m| m.coeff).collect();
    let m = u.len();

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut vertices = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let (a1, a2) = (u[j][0] - u[i][0], u[j][1] - u[i][1]);
                let (b1, b2) = (u[k][0] - u[i][0], u[k][1] - u[i][1]);
                let det = a1 * b2 - a2 * b1;
                if det == 0.0 {
                    continue;
                }
                let (r1, r2) = (c[i] - c[j], c[i] - c[k]);
                let x = [(r1 * b2 - r2 * a2) / det, (a1 * r2 - b1 * r1) / det];
                let tol = tie_tol(poly, x);
                let top = poly.eval_unchecked(&x);
                let val = c[i] + u[i][0] * x[0] + u[i][1] * x[1];
                if top - val > tol {
                    continue;
                }
                let tied = poly.argmax_unchecked(&x, tol);
                if seen.insert(tied.clone()) {
                    vertices.push(CurveVertex { point: x, monomials: tied });
                }
            }
        }
    }

    let mut edges = Vec::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if let Some(e) = tie_edge(poly, &u, &c, i, j) {
                used.insert(i);
                used.insert(j);
                edges.push(e);
            }
        }
    }
    let regions = if edges.is_empty() { 1 } else { used.len() };
    Ok(TropicalCurve { vertices, edges, regions })
}

fn tie_edge(poly: &TropicalPolynomial, u: &[[f64; 2]], c: &[f64], i: usize, j: usize) -> Option<CurveEdge> {
    let n = [u[i][0] - u[j][0], u[i][1] - u[j][1]];
    let nn = n[0] * n[0] + n[1] * n[1];
    let s = (c[j] - c[i]) / nn;
    let base = [n[0] * s, n[1] * s];
    let norm = nn.sqrt();
    let dir = [-n[1] / norm, n[0] / norm];

    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let tol = tie_tol(poly, base);
    for l in 0..u.len() {
        if l == i || l == j {
            continue;
        }
        // c_l + u_l·x(t) ≤ c_i + u_i·x(t)  ⇔  a·t ≥ b
        let d = [u[i][0] - u[l][0], u[i][1] - u[l][1]];
        let a = d[0] * dir[0] + d[1] * dir[1];
        let b = c[l] - c[i] - (d[0] * base[0] + d[1] * base[1]);
        if a.abs() < 1e-12 {
            if b > tol {
                return None;
            }
        } else if a > 0.0 {
            lo = lo.max(b / a);
        } else {
            hi = hi.min(b / a);
        }
    }
    let span_tol = 1e-9 * (1.0 + lo.abs().min(hi.abs()).min(1e12));
    if !(hi - lo > span_tol) {
        return None;
    }
    let t = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    };
    let x = [base[0] + t * dir[0], base[1] + t * dir[1]];
    let tied = poly.argmax_unchecked(&x, tie_tol(poly, x));
    if !tied.contains(&i) || !tied.contains(&j) {
        return None;
    }
    // Other monomials tied along the whole line are collinear with i and j;
    // the pair must be the two extremes so each edge is counted once.
    let proj = |k: usize| u[k][0] * n[0] + u[k][1] * n[1];
    let (pmin, pmax) = (proj(i).min(proj(j)), proj(i).max(proj(j)));
    if tied.iter().any(|&k| proj(k) < pmin || proj(k) > pmax) {
        return None;
    }
    let kind = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => EdgeKind::Bounded,
        (false, false) => EdgeKind::Line,
        _ => EdgeKind::Ray,
    };
    Some(CurveEdge { pair: (i, j), kind, base, dir, t_min: lo, t_max: hi })
}

/// Marks grid cells whose unique maximizing monomial differs from a neighbour's.
///
/// The grid is `n × n` over `window`, row-major with row 0 at the bottom.
pub fn curve_raster(poly: &TropicalPolynomial, window: &Window, n: usize) -> Result<Vec<bool>, TropicalError> {
    if poly.dim() != 2 {
        return Err(TropicalError::NotPlanar(poly.dim()));
    }
    if !window.is_valid() {
        return Err(TropicalError::BadWindow);
    }
    if n < 2 {
        return Err(TropicalError::BadGrid { min: 2, got: n });
    }
    let label = region_labels(poly, window, n);
    let mut out = vec![false; n * n];
    for j in 0..n {
        for i in 0..n {
            let here = label[j * n + i];
            let right = i + 1 < n && label[j * n + i + 1] != here;
            let up = j + 1 < n && label[(j + 1) * n + i] != here;
            if right || up {
                out[j * n + i] = true;
            }
        }
    }
    Ok(out)
}

/// Index of the maximizing monomial at each cell center (lowest index on ties).
pub(crate) fn region_labels(poly: &TropicalPolynomial, window: &Window, n: usize) -> Vec<usize> {
    let mut labels = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x = window.cell_center(n, i, j);
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (k, m) in poly.monomials().iter().enumerate() {
                let v = m.value_at(&x);
                if v > best_v {
                    best_v = v;
                    best = k;
                }
            }
            labels.push(best);
        }
    }
    labels
}
