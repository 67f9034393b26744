use std::collections::BTreeSet;

use super::{TropicalError, TropicalPolynomial};

#[inline]
fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    let (ax, ay) = ((a[0] - o[0]) as i128, (a[1] - o[1]) as i128);
    let (bx, by) = ((b[0] - o[0]) as i128, (b[1] - o[1]) as i128);
    ax * by - ay * bx
}

/// Exact convex hull of lattice points (Andrew's monotone chain).
///
/// Returns the vertices counter-clockwise starting from the lexicographically
/// smallest point. Points lying in the relative interior of a hull edge are
/// not vertices and are dropped. Degenerate inputs give one or two points.
pub fn convex_hull_2d(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut pts: Vec<[i64; 2]> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<[i64; 2]> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.truncate(1);
    }
    hull
}

/// Twice the signed area of a polygon (positive for CCW order).
pub fn twice_area(poly: &[[i64; 2]]) -> i128 {
    if poly.len() < 3 {
        return 0;
    }
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a[0] as i128 * b[1] as i128 - b[0] as i128 * a[1] as i128
        })
        .sum()
}

/// Convex hull of the support of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolytope {
    pub dim: usize,
    /// Hull vertices. Planar polytopes are listed counter-clockwise; in other
    /// dimensions the list is sorted lexicographically and carries no face data.
    pub vertices: Vec<Vec<i64>>,
}

impl NewtonPolytope {
    pub fn planar_vertices(&self) -> Option<Vec<[i64; 2]>> {
        (self.dim == 2).then(|| self.vertices.iter().map(|v| [v[0], v[1]]).collect())
    }

    /// Euclidean area for planar polytopes, `None` otherwise.
    pub fn area(&self) -> Option<f64> {
        self.planar_vertices().map(|v| twice_area(&v) as f64 / 2.0)
    }
}

pub fn newton_polytope(poly: &TropicalPolynomial) -> Result<NewtonPolytope, TropicalError> {
    let support: Vec<&[i64]> = poly.monomials().iter().map(|m| m.exponent.as_slice()).collect();
    let vertices = match poly.dim() {
        1 => {
            let lo = support.iter().map(|u| u[0]).min().unwrap_or(0);
            let hi = support.iter().map(|u| u[0]).max().unwrap_or(0);
            if lo == hi {
                vec![vec![lo]]
            } else {
                vec![vec![lo], vec![hi]]
            }
        }
        2 => {
            let pts: Vec<[i64; 2]> = support.iter().map(|u| [u[0], u[1]]).collect();
            convex_hull_2d(&pts).into_iter().map(|p| p.to_vec()).collect()
        }
        3 => {
            let pts: Vec<[i64; 3]> = support.iter().map(|u| [u[0], u[1], u[2]]).collect();
            hull_vertices_3d(&pts).into_iter().map(|p| p.to_vec()).collect()
        }
        d => return Err(TropicalError::Unsupported(format!("Newton polytope vertices in dimension {d}"))),
    };
    Ok(NewtonPolytope { dim: poly.dim(), vertices })
}

fn sub3(a: [i64; 3], b: [i64; 3]) -> [i128; 3] {
    [(a[0] - b[0]) as i128, (a[1] - b[1]) as i128, (a[2] - b[2]) as i128]
}

fn cross3(a: [i128; 3], b: [i128; 3]) -> [i128; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [i128; 3], b: [i128; 3]) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Vertices of a planar point set embedded in 3D with normal `n`, found by
/// projecting along the dominant normal axis.
fn planar_hull_in_3d(pts: &[[i64; 3]], n: [i128; 3]) -> Vec<[i64; 3]> {
    let drop = (0..3).max_by_key(|&k| n[k].abs()).unwrap_or(2);
    let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
    let proj: Vec<[i64; 2]> = pts.iter().map(|p| [p[keep[0]], p[keep[1]]]).collect();
    let hull = convex_hull_2d(&proj);
    hull.iter().filter_map(|h| proj.iter().position(|q| q == h).map(|i| pts[i])).collect()
}

fn hull_vertices_3d(points: &[[i64; 3]]) -> Vec<[i64; 3]> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let a = pts[0];
    // A normal of the affine span, when the points are coplanar.
    let mut span_normal = None;
    let mut direction = None;
    for &b in &pts[1..] {
        let ab = sub3(b, a);
        if direction.is_none() {
            direction = Some(ab);
            continue;
        }
        let n = cross3(direction.unwrap_or(ab), ab);
        if n != [0, 0, 0] {
            span_normal = Some(n);
            break;
        }
    }
    let Some(n0) = span_normal else {
        // Collinear: the two extreme points along the line.
        let d = direction.unwrap_or([0, 0, 0]);
        let lo = pts.iter().min_by_key(|p| dot3(sub3(**p, a), d)).copied();
        let hi = pts.iter().max_by_key(|p| dot3(sub3(**p, a), d)).copied();
        return lo.into_iter().chain(hi).collect::<BTreeSet<_>>().into_iter().collect();
    };
    if pts.iter().all(|p| dot3(sub3(*p, a), n0) == 0) {
        let mut v = planar_hull_in_3d(&pts, n0);
        v.sort_unstable();
        return v;
    }

    let mut verts: BTreeSet<[i64; 3]> = BTreeSet::new();
    let m = pts.len();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let n = cross3(sub3(pts[j], pts[i]), sub3(pts[k], pts[i]));
                if n == [0, 0, 0] {
                    continue;
                }
                let s: Vec<i128> = pts.iter().map(|p| dot3(sub3(*p, pts[i]), n)).collect();
                let supporting = s.iter().all(|&v| v <= 0) || s.iter().all(|&v| v >= 0);
                if !supporting {
                    continue;
                }
                let on: Vec<[i64; 3]> = pts.iter().zip(&s).filter(|(_, &v)| v == 0).map(|(p, _)| *p).collect();
                verts.extend(planar_hull_in_3d(&on, n));
            }
        }
    }
    verts.into_iter().collect()
}
