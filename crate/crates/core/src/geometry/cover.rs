use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::GeometryError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub c: Vec<f64>,
    pub r: f64,
}

/// Finite union of closed balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCover")]
pub struct BallCover {
    pub dim: usize,
    pub balls: Vec<Ball>,
}

#[derive(Deserialize)]
struct RawCover {
    dim: usize,
    balls: Vec<Ball>,
}

impl TryFrom<RawCover> for BallCover {
    type Error = GeometryError;

    fn try_from(raw: RawCover) -> Result<Self, Self::Error> {
        BallCover::new(raw.dim, raw.balls)
    }
}

impl BallCover {
    pub fn new(dim: usize, balls: Vec<Ball>) -> Result<Self, GeometryError> {
        for b in &balls {
            if b.c.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, got: b.c.len() });
            }
            if !(b.r > 0.0) || !b.r.is_finite() || b.c.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::InvalidParameter(format!(
                    "ball radius must be positive and center finite, got r = {}",
                    b.r
                )));
            }
        }
        Ok(BallCover { dim, balls })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.balls.iter().any(|b| b.c.iter().zip(x).map(|(c, v)| (c - v) * (c - v)).sum::<f64>() <= b.r * b.r)
    }
}

/// Keeps the first point of every occupied voxel `⌊p / v⌋`, in input order.
pub fn voxel_downsample<P: AsRef<[f64]> + Clone>(points: &[P], v: f64) -> Vec<P> {
    let mut seen: HashSet<Vec<i64>> = HashSet::with_capacity(points.len());
    points
        .iter()
        .filter(|p| {
            let key = p.as_ref().iter().map(|x| (x / v).floor() as i64).collect();
            seen.insert(key)
        })
        .cloned()
        .collect()
}

/// How farthest point sampling picks its first point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FpsStart {
    Index(usize),
    /// The point farthest from the centroid (lowest index on ties).
    #[default]
    FarthestFromCentroid,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Greedy k-center selection. Each step picks the unselected point with the
/// largest distance to the selected set, breaking ties by lowest index.
pub fn farthest_point_sampling<P: AsRef<[f64]>>(
    points: &[P],
    k: usize,
    start: FpsStart,
) -> Result<Vec<usize>, GeometryError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(GeometryError::TooManySamples { k, n });
    }
    let first = match start {
        FpsStart::Index(i) if i < n => i,
        FpsStart::Index(i) => return Err(GeometryError::InvalidParameter(format!("start index {i} out of range"))),
        FpsStart::FarthestFromCentroid => {
            let d = points[0].as_ref().len();
            let mut centroid = vec![0.0; d];
            for p in points {
                for (c, x) in centroid.iter_mut().zip(p.as_ref()) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= n as f64);
            let mut best = 0;
            let mut best_d = f64::NEG_INFINITY;
            for (i, p) in points.iter().enumerate() {
                let d = dist2(p.as_ref(), &centroid);
                if d > best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        }
    };

    let mut selected = vec![false; n];
    let mut min_d: Vec<f64> = points.iter().map(|p| dist2(p.as_ref(), points[first].as_ref())).collect();
    selected[first] = true;
    let mut order = Vec::with_capacity(k);
    order.push(first);
    while order.len() < k {
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for i in 0..n {
            if !selected[i] && min_d[i] > best_d {
                best_d = min_d[i];
                best = i;
            }
        }
        selected[best] = true;
        order.push(best);
        let q = points[best].as_ref();
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p.as_ref(), q);
            if d < min_d[i] {
                min_d[i] = d;
            }
        }
    }
    Ok(order)
}

/// Voxel downsampling at `eps · voxel_ratio` followed by farthest point
/// sampling of at most `budget` centers; every ball has radius `eps`.
pub fn ball_cover_from_positives(
    points: &[[f64; 2]],
    eps: f64,
    voxel_ratio: f64,
    budget: usize,
) -> Result<BallCover, GeometryError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GeometryError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !(voxel_ratio > 0.0 && voxel_ratio <= 1.0) {
        return Err(GeometryError::InvalidParameter(format!("voxel ratio must lie in (0, 1], got {voxel_ratio}")));
    }
    if budget == 0 {
        return Err(GeometryError::InvalidParameter("budget must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(GeometryError::EmptyCover);
    }
    let survivors = voxel_downsample(points, eps * voxel_ratio);
    let k = budget.min(survivors.len());
    let picked = farthest_point_sampling(&survivors, k, FpsStart::FarthestFromCentroid)?;
    let balls = picked.into_iter().map(|i| Ball { c: survivors[i].to_vec(), r: eps }).collect();
    BallCover::new(2, balls)
}
