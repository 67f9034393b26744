use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Half-space `{x : ⟨u, x⟩ ≤ h}` with unit outward normal `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub u: Vec<f64>,
    pub h: f64,
}

impl Facet {
    /// Signed distance to the supporting line, positive inside.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.h - self.u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Intersection of finitely many half-spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexComponent {
    pub dim: usize,
    pub facets: Vec<Facet>,
}

impl ConvexComponent {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self, GeometryError> {
        if facets.is_empty() {
            return Err(GeometryError::TooFewFacets { need: dim + 1, got: 0, dim });
        }
        for f in &facets {
            if f.u.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, got: f.u.len() });
            }
            let norm = f.u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 || !f.h.is_finite() {
                return Err(GeometryError::InvalidParameter(format!(
                    "facet normal must be unit length with finite support (|u| = {norm})"
                )));
            }
        }
        Ok(ConvexComponent { dim, facets })
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Smallest facet slack; positive strictly inside, negative outside.
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| f.slack(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.min_slack(x) >= 0.0
    }

    /// Whether the half-spaces cut out a bounded region.
    ///
    /// Exact for planar components (normals must leave no angular gap of π or
    /// more). In higher dimensions the normals are only checked to be at least
    /// `d + 1` in number.
    pub fn is_bounded(&self) -> bool {
        if self.dim != 2 {
            return self.facets.len() > self.dim;
        }
        let mut angles: Vec<f64> = self.facets.iter().map(|f| f.u[1].atan2(f.u[0])).collect();
        if angles.len() < 3 {
            return false;
        }
        angles.sort_by(|a, b| a.total_cmp(b));
        let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
        let max_gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
        max_gap < PI - 1e-12
    }
}

/// Facets of a convex polygon given by counter-clockwise vertices.
///
/// Edge `e_i = v_{i+1} − v_i` gets outward normal `(e_y, −e_x)/‖e‖` and support
/// `h_i = ⟨u_i, v_i⟩`.
pub fn polygon_facets(vertices: &[[f64; 2]]) -> Result<ConvexComponent, GeometryError> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::TooFewVertices(n));
    }
    let mut turning = 0.0;
    for i in 0..n {
        let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        if !(cross > 0.0) {
            return Err(GeometryError::NotConvexCcw((i + 1) % n));
        }
        turning += cross.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
    }
    // Star polygons turn left everywhere but wind more than once.
    if turning > 2.0 * PI + 1e-9 {
        return Err(GeometryError::NotConvexCcw(0));
    }
    let facets = (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let e = [b[0] - a[0], b[1] - a[1]];
            let len = e[0].hypot(e[1]);
            let u = vec![e[1] / len, -e[0] / len];
            let h = u[0] * a[0] + u[1] * a[1];
            Facet { u, h }
        })
        .collect();
    Ok(ConvexComponent { dim: 2, facets })
}

/// Circumscribed polytope of the ball `B(c, r)` with `m` facets.
///
/// Planar normals sit at angles `2πℓ/m`; in 3D they follow a Fibonacci
/// sphere; beyond that they are seeded Gaussian samples projected to the
/// sphere. Every support is `⟨u, c⟩ + r`.
pub fn ball_polytope(c: &[f64], r: f64, m: usize, d: usize, seed: u64) -> Result<ConvexComponent, GeometryError> {
    if c.len() != d {
        return Err(GeometryError::DimensionMismatch { expected: d, got: c.len() });
    }
    if d < 2 {
        return Err(GeometryError::InvalidParameter(format!("dimension must be at least 2, got {d}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeometryError::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if m < d + 1 {
        return Err(GeometryError::TooFewFacets { need: d + 1, got: m, dim: d });
    }
    let normals: Vec<Vec<f64>> = match d {
        2 => (0..m)
            .map(|l| {
                let t = 2.0 * PI * l as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m)
                .map(|_| loop {
                    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-8 {
                        break g.into_iter().map(|v| v / norm).collect();
                    }
                })
                .collect()
        }
    };
    let facets = normals
        .into_iter()
        .map(|u| {
            let h = u.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() + r;
            Facet { u, h }
        })
        .collect();
    Ok(ConvexComponent { dim: d, facets })
}

/// Hausdorff distance between a disk of radius `r` and its circumscribed
/// regular `m`-gon: `r·(sec(π/m) − 1)`.
pub fn circumscribed_error(m: usize, r: f64) -> f64 {
    r * (1.0 / (PI / m as f64).cos() - 1.0)
}

/// Number of facets needed so the polytope stays within `eps_poly` of the ball.
///
/// In the plane this is the smallest `m ≥ 3` meeting the exact circumscribed
/// error. For `d ≥ 3` it is `⌈π^{(d−1)/2} (r/eps_poly)^{(d−1)/2}⌉`, at least `d + 1`.
pub fn facet_count_for_tolerance(r: f64, eps_poly: f64, d: usize) -> Result<usize, GeometryError> {
    if !(r > 0.0) || !(eps_poly > 0.0) || !r.is_finite() || !eps_poly.is_finite() {
        return Err(GeometryError::InvalidParameter(format!(
            "radius and tolerance must be positive, got r = {r}, eps_poly = {eps_poly}"
        )));
    }
    if d < 2 {
        return Err(GeometryError::InvalidParameter(format!("dimension must be at least 2, got {d}")));
    }
    if d == 2 {
        // Error ≈ rπ²/(2m²); start the scan just below that estimate.
        let guess = (PI * (r / (2.0 * eps_poly)).sqrt()).floor() as usize;
        let mut m = guess.saturating_sub(2).max(3);
        while m > 3 && circumscribed_error(m - 1, r) <= eps_poly {
            m -= 1;
        }
        while circumscribed_error(m, r) > eps_poly {
            m += 1;
        }
        return Ok(m);
    }
    let e = (d as f64 - 1.0) / 2.0;
    let m = (PI.powf(e) * (r / eps_poly).powf(e)).ceil();
    if m > 1e9 {
        return Err(GeometryError::InvalidParameter(format!("facet count {m:e} is impractical")));
    }
    Ok((m as usize).max(d + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_facets_ok(vertices: &[[f64; 2]], comp: &ConvexComponent) {
        let n = vertices.len();
        for (i, f) in comp.facets.iter().enumerate() {
            for v in vertices {
                assert!(f.slack(v) >= -1e-12);
            }
            assert!(f.slack(&vertices[i]).abs() < 1e-12);
            assert!(f.slack(&vertices[(i + 1) % n]).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let comp = polygon_facets(&sq).unwrap();
        let got: Vec<(Vec<f64>, f64)> = comp.facets.iter().map(|f| (f.u.clone(), f.h)).collect();
        assert_eq!(
            got,
            vec![(vec![0.0, -1.0], 0.0), (vec![1.0, 0.0], 1.0), (vec![0.0, 1.0], 1.0), (vec![-1.0, 0.0], 0.0)]
        );
        oracle_facets_ok(&sq, &comp);
        assert!(comp.is_bounded());
    }

    #[test]
    fn triangle_hypotenuse() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let comp = polygon_facets(&tri).unwrap();
        assert_eq!(comp.len(), 3);
        let s = 0.5f64.sqrt();
        assert!((comp.facets[1].u[0] - s).abs() < 1e-15 && (comp.facets[1].u[1] - s).abs() < 1e-15);
        assert!((comp.facets[1].h - s).abs() < 1e-15);
        oracle_facets_ok(&tri, &comp);
    }

    #[test]
    fn rejects_bad_polygons() {
        let cw = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(polygon_facets(&cw), Err(GeometryError::NotConvexCcw(_))));
        let collinear = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0]];
        assert_eq!(polygon_facets(&collinear), Err(GeometryError::NotConvexCcw(1)));
        assert_eq!(polygon_facets(&[[0.0, 0.0], [1.0, 0.0]]), Err(GeometryError::TooFewVertices(2)));
        let star: Vec<[f64; 2]> = (0..5)
            .map(|k| {
                let t = 2.0 * PI * (2 * k) as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(polygon_facets(&star).is_err());
    }

    #[test]
    fn ball_square() {
        let comp = ball_polytope(&[0.0, 0.0], 1.0, 4, 2, 0).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (f, e) in comp.facets.iter().zip(expect) {
            assert!((f.u[0] - e[0]).abs() < 1e-15 && (f.u[1] - e[1]).abs() < 1e-15);
            assert!((f.h - 1.0).abs() < 1e-15);
        }
        let comp = ball_polytope(&[2.0, 0.0], 1.0, 4, 2, 0).unwrap();
        let hs: Vec<f64> = comp.facets.iter().map(|f| f.h).collect();
        for (h, e) in hs.iter().zip([3.0, 1.0, -1.0, 1.0]) {
            assert!((h - e).abs() < 1e-15);
        }
        assert!(matches!(ball_polytope(&[0.0, 0.0], 1.0, 2, 2, 0), Err(GeometryError::TooFewFacets { .. })));
    }

    #[test]
    fn ball_polytope_higher_dimensions() {
        for d in [3usize, 5] {
            let c = vec![0.5; d];
            let comp = ball_polytope(&c, 2.0, 64, d, 9).unwrap();
            assert_eq!(comp.dim, d);
            for f in &comp.facets {
                let norm: f64 = f.u.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!((f.slack(&c) - 2.0).abs() < 1e-12);
            }
        }
        let a = ball_polytope(&[0.0; 4], 1.0, 10, 4, 3).unwrap();
        let b = ball_polytope(&[0.0; 4], 1.0, 10, 4, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circumscribed_examples() {
        assert!((circumscribed_error(4, 1.0) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((circumscribed_error(6, 2.0) - 2.0 * (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(circumscribed_error(100_000, 1.0) < 1e-9);
    }

    #[test]
    fn facet_count_examples() {
        // brute-force scan oracle
        let scan = |r: f64, eps: f64| (3..).find(|&m| circumscribed_error(m, r) <= eps).unwrap();
        assert_eq!(scan(1.0, 0.01), 23);
        assert_eq!(facet_count_for_tolerance(1.0, 0.01, 2).unwrap(), 23);
        for &(r, eps) in &[(1.0, 0.5), (0.8, 0.003), (3.0, 1e-4), (1.0, 2f64.sqrt() - 1.0)] {
            assert_eq!(facet_count_for_tolerance(r, eps, 2).unwrap(), scan(r, eps));
        }
        assert!(facet_count_for_tolerance(1.0, 2f64.sqrt() - 1.0, 2).unwrap() <= 4);
        let m1 = facet_count_for_tolerance(1.0, 1e-4, 2).unwrap() as f64;
        let m2 = facet_count_for_tolerance(2.0, 1e-4, 2).unwrap() as f64;
        assert!((m2 / m1 - 2f64.sqrt()).abs() < 0.02);
        assert!(facet_count_for_tolerance(1.0, 0.0, 2).is_err());
        assert_eq!(facet_count_for_tolerance(1.0, 0.1, 3).unwrap(), (PI * 10.0).ceil() as usize);
    }

    #[test]
    fn boundedness() {
        let half = ConvexComponent::new(2, vec![Facet { u: vec![1.0, 0.0], h: 1.0 }]).unwrap();
        assert!(!half.is_bounded());
        let slab =
            ConvexComponent::new(2, vec![Facet { u: vec![1.0, 0.0], h: 1.0 }, Facet { u: vec![-1.0, 0.0], h: 1.0 }])
                .unwrap();
        assert!(!slab.is_bounded());
        assert!(ball_polytope(&[0.0, 0.0], 1.0, 3, 2, 0).unwrap().is_bounded());
        assert!(ConvexComponent::new(2, vec![Facet { u: vec![2.0, 0.0], h: 1.0 }]).is_err());
    }
}
