use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::dataset::Dataset;
use crate::Window;

pub const DISK_RADIUS: f64 = 0.8;
pub const C1: [f64; 2] = [-0.6, 0.0];
pub const C2: [f64; 2] = [0.6, 0.0];
/// Center of the single-disk case.
pub const ORIGIN: [f64; 2] = [0.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Single,
    Double,
    Swiss,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Single => "single",
            Case::Double => "double",
            Case::Swiss => "swiss",
        }
    }

    /// Disk centers of the disk cases; empty for the swiss roll.
    pub fn centers(&self) -> &'static [[f64; 2]] {
        match self {
            Case::Single => &[ORIGIN],
            Case::Double => &[C1, C2],
            Case::Swiss => &[],
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Case::Single),
            "double" => Ok(Case::Double),
            "swiss" => Ok(Case::Swiss),
            _ => Err(HarnessError::Config(format!("unknown case '{s}' (expected single, double or swiss)"))),
        }
    }
}

fn uniform_points(window: &Window, n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [window.xmin + rng.random::<f64>() * window.width(), window.ymin + rng.random::<f64>() * window.height()]
        })
        .collect()
}

pub fn in_disks(case: Case, p: [f64; 2]) -> bool {
    case.centers().iter().any(|c| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) <= DISK_RADIUS * DISK_RADIUS)
}

/// `n` points uniform on `window`, labelled by membership in the disk(s) of `case`.
pub fn gen_disks(case: Case, window: &Window, n: usize, seed: u64) -> Result<Dataset, HarnessError> {
    if case == Case::Swiss {
        return Err(HarnessError::Config("gen_disks needs the single or double case".into()));
    }
    if n == 0 {
        return Err(HarnessError::Config("sample count must be at least 1".into()));
    }
    let pts = uniform_points(window, n, seed);
    let labels = pts.iter().map(|&p| in_disks(case, p)).collect();
    Ok(Dataset::from_points(&pts, labels)?)
}

/// Archimedean spiral band `r = a + bθ`, `θ ∈ [θ₀, θ₁]`, of half-thickness `half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Spiral {
    pub a: f64,
    pub b: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub half_width: f64,
}

impl Default for Spiral {
    fn default() -> Self {
        Spiral { a: 0.0, b: 1.0, theta0: 1.5 * PI, theta1: 4.5 * PI, half_width: 1.2 }
    }
}

/// Sampling step in θ for the coarse nearest-point search.
const THETA_STEP: f64 = 0.01;

impl Spiral {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let ok = [self.a, self.b, self.theta0, self.theta1, self.half_width].iter().all(|v| v.is_finite())
            && self.theta1 > self.theta0
            && self.half_width > 0.0;
        if ok {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("invalid spiral parameters {self:?}")))
        }
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        let r = self.a + self.b * theta;
        [r * theta.cos(), r * theta.sin()]
    }

    fn dist2(&self, p: [f64; 2], theta: f64) -> f64 {
        let q = self.point(theta);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    }

    /// Distance from `p` to the spiral centerline: a dense scan in θ refined
    /// by golden-section search around the best sample.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let steps = ((self.theta1 - self.theta0) / THETA_STEP).ceil() as usize;
        let h = (self.theta1 - self.theta0) / steps as f64;
        let (mut best_k, mut best) = (0, f64::INFINITY);
        for k in 0..=steps {
            let d = self.dist2(p, self.theta0 + h * k as f64);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        let t = self.theta0 + h * best_k as f64;
        let (mut lo, mut hi) = ((t - h).max(self.theta0), (t + h).min(self.theta1));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if self.dist2(p, m1) <= self.dist2(p, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best.min(self.dist2(p, 0.5 * (lo + hi))).sqrt()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.distance(p) <= self.half_width
    }
}

/// `n` points uniform on `window`, labelled by membership in the spiral band.
pub fn gen_swiss(window: &Window, n: usize, seed: u64, spiral: &Spiral) -> Result<Dataset, HarnessError> {
    spiral.validate()?;
    if n == 0 {
        return Err(HarnessError::Config("sample count must be at least 1".into()));
    }
    let pts = uniform_points(window, n, seed);
    let labels = pts.par_iter().map(|&p| spiral.contains(p)).collect();
    Ok(Dataset::from_points(&pts, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_labels() {
        assert!(in_disks(Case::Single, ORIGIN));
        assert!(!in_disks(Case::Single, [0.9, 0.0]));
        assert!(in_disks(Case::Double, C1));
        assert!(in_disks(Case::Double, C2));
        assert!(!in_disks(Case::Double, [2.0, 2.0]));
        let w = Window::square(2.0);
        let d = gen_disks(Case::Double, &w, 500, 3).unwrap();
        assert_eq!(d.len(), 500);
        assert!(d.points().all(|p| p.iter().all(|v| v.abs() <= 2.0)));
        assert_eq!(d, gen_disks(Case::Double, &w, 500, 3).unwrap());
        assert!(gen_disks(Case::Swiss, &w, 5, 0).is_err());
        assert!(gen_disks(Case::Single, &w, 0, 0).is_err());
    }

    #[test]
    fn double_positive_fraction() {
        // Two disks of radius r at distance d overlap in a lens of area
        // 2r²·acos(d/2r) − (d/2)·√(4r² − d²).
        let (r, d) = (DISK_RADIUS, 1.2f64);
        let lens = 2.0 * r * r * (d / (2.0 * r)).acos() - d / 2.0 * (4.0 * r * r - d * d).sqrt();
        let expected = (2.0 * PI * r * r - lens) / 16.0;
        let data = gen_disks(Case::Double, &Window::square(2.0), 1_000_000, 11).unwrap();
        let frac = data.positives() as f64 / data.len() as f64;
        assert!((frac / expected - 1.0).abs() < 0.01, "{frac} vs {expected}");
    }

    fn dense_distance(s: &Spiral, p: [f64; 2]) -> f64 {
        let n = 400_000;
        (0..=n)
            .map(|k| s.dist2(p, s.theta0 + (s.theta1 - s.theta0) * k as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    #[test]
    fn spiral_labels() {
        let s = Spiral::default();
        assert!(s.contains(s.point(2.0 * PI)));
        assert!(s.distance(s.point(3.3 * PI)) < 1e-9);
        let w = Window::square(16.0);
        for corner in [[16.0, 16.0], [-16.0, -16.0], [16.0, -16.0]] {
            assert!(!s.contains(corner));
            assert!((s.distance(corner) - dense_distance(&s, corner)).abs() < 1e-6);
        }
        let data = gen_swiss(&w, 300, 5, &s).unwrap();
        for (p, &y) in data.points().zip(data.labels()) {
            let d = dense_distance(&s, [p[0], p[1]]);
            if (d - s.half_width).abs() > 1e-6 {
                assert_eq!(y, d <= s.half_width);
            }
        }
        assert_eq!(data, gen_swiss(&w, 300, 5, &s).unwrap());
        let bad = Spiral { half_width: 0.0, ..s };
        assert!(gen_swiss(&w, 10, 0, &bad).is_err());
    }
}
