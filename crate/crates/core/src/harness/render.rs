use std::collections::HashMap;

use super::HarnessError;
use crate::network::NetworkSpec;
use crate::Window;

/// Probabilities sampled at the cell centers of an `n × n` grid.
///
/// `values[j * n + i]` belongs to column `i` (along x) and row `j` (along y,
/// row 0 at the bottom).
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMap {
    pub n: usize,
    pub window: Window,
    pub values: Vec<f64>,
    pub tau: f64,
}

pub fn render_decision_map(spec: &NetworkSpec, window: &Window, n: usize) -> Result<DecisionMap, HarnessError> {
    if spec.input_dim() != 2 {
        return Err(HarnessError::Config(format!(
            "decision maps need a 2D spec, got input dimension {}",
            spec.input_dim()
        )));
    }
    if n < 2 || !window.is_valid() {
        return Err(HarnessError::Config(format!("need a valid window and grid size ≥ 2, got {n}")));
    }
    let pts: Vec<[f64; 2]> = (0..n * n).map(|k| window.cell_center(n, k % n, k / n)).collect();
    let values = spec.forward_batch(&pts)?.into_iter().map(|o| o.prob).collect();
    Ok(DecisionMap { n, window: *window, values, tau: 0.5 })
}

/// A contour crossing on a grid edge: horizontal edges `(i, j)–(i+1, j)` and
/// vertical edges `(i, j)–(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    H(usize, usize),
    V(usize, usize),
}

impl DecisionMap {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    /// Binary PPM (P6), gray level `round(255·p)`, first image row at the top
    /// of the window.
    pub fn to_ppm(&self) -> Vec<u8> {
        let n = self.n;
        let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
        out.reserve(3 * n * n);
        for j in (0..n).rev() {
            for i in 0..n {
                let g = (255.0 * self.value(i, j).clamp(0.0, 1.0)).round() as u8;
                out.extend_from_slice(&[g, g, g]);
            }
        }
        out
    }

    fn crossing(&self, e: EdgeId) -> [f64; 2] {
        let (a, b) = match e {
            EdgeId::H(i, j) => ((i, j), (i + 1, j)),
            EdgeId::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (va, vb) = (self.value(a.0, a.1), self.value(b.0, b.1));
        let t = if va == vb { 0.5 } else { ((self.tau - va) / (vb - va)).clamp(0.0, 1.0) };
        let pa = self.window.cell_center(self.n, a.0, a.1);
        let pb = self.window.cell_center(self.n, b.0, b.1);
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    }

    /// Marching squares on the cell-center lattice at level `tau`, with
    /// samples `≥ tau` counted inside. Saddles are split by the mean of the
    /// four corners. Segments are chained into polylines; closed loops repeat
    /// their first point at the end.
    pub fn contours(&self) -> Vec<Vec<[f64; 2]>> {
        let n = self.n;
        let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let v = [self.value(i, j), self.value(i + 1, j), self.value(i + 1, j + 1), self.value(i, j + 1)];
                let inside = v.map(|x| x >= self.tau);
                let code = inside.iter().enumerate().fold(0u8, |c, (k, &b)| c | ((b as u8) << k));
                let (bottom, right, top, left) =
                    (EdgeId::H(i, j), EdgeId::V(i + 1, j), EdgeId::H(i, j + 1), EdgeId::V(i, j));
                let center_in = (v.iter().sum::<f64>() / 4.0) >= self.tau;
                let segs: &[(EdgeId, EdgeId)] = match code {
                    0 | 15 => &[],
                    1 | 14 => &[(left, bottom)],
                    2 | 13 => &[(bottom, right)],
                    3 | 12 => &[(left, right)],
                    4 | 11 => &[(right, top)],
                    6 | 9 => &[(bottom, top)],
                    7 | 8 => &[(left, top)],
                    5 if center_in => &[(left, top), (bottom, right)],
                    5 => &[(left, bottom), (right, top)],
                    10 if center_in => &[(left, bottom), (right, top)],
                    _ => &[(left, top), (bottom, right)],
                };
                segments.extend_from_slice(segs);
            }
        }
        self.chain(&segments)
    }

    fn chain(&self, segments: &[(EdgeId, EdgeId)]) -> Vec<Vec<[f64; 2]>> {
        let mut at: HashMap<EdgeId, Vec<usize>> = HashMap::new();
        for (k, &(a, b)) in segments.iter().enumerate() {
            at.entry(a).or_default().push(k);
            at.entry(b).or_default().push(k);
        }
        let mut used = vec![false; segments.len()];
        let mut lines = Vec::new();
        let walk = |start: usize, from: EdgeId, used: &mut Vec<bool>| {
            let mut ids = vec![from];
            let mut seg = start;
            let mut cur = from;
            loop {
                used[seg] = true;
                let (a, b) = segments[seg];
                let next = if a == cur { b } else { a };
                ids.push(next);
                cur = next;
                match at[&cur].iter().find(|&&s| !used[s]) {
                    Some(&s) => seg = s,
                    None => break,
                }
            }
            ids
        };
        // open chains start at edges touched once, so they are walked end to end
        let mut starts: Vec<usize> = (0..segments.len()).collect();
        starts.sort_by_key(|&k| {
            let (a, b) = segments[k];
            !(at[&a].len() == 1 || at[&b].len() == 1)
        });
        for k in starts {
            if used[k] {
                continue;
            }
            let (a, b) = segments[k];
            let from = if at[&a].len() == 1 || at[&b].len() != 1 { a } else { b };
            let ids = walk(k, from, &mut used);
            lines.push(ids.into_iter().map(|e| self.crossing(e)).collect());
        }
        lines
    }

    /// CSV with header `polyline,x,y`.
    pub fn contour_csv(&self) -> String {
        let mut s = String::from("polyline,x,y\n");
        for (k, line) in self.contours().iter().enumerate() {
            for p in line {
                s.push_str(&format!("{k},{:.6},{:.6}\n", p[0], p[1]));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Activation, Head, Layer};

    fn constant_half() -> NetworkSpec {
        NetworkSpec::new(
            vec![Layer::dense(vec![vec![0.0, 0.0]], vec![0.0], Activation::Identity)],
            Head::affine(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn constant_map() {
        let map = render_decision_map(&constant_half(), &Window::square(2.0), 20).unwrap();
        let ppm = map.to_ppm();
        let header = b"P6\n20 20\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(ppm.len(), header.len() + 3 * 400);
        assert!(ppm[header.len()..].iter().all(|&g| g == 128));
        assert!(map.contours().is_empty());
        assert_eq!(map.contour_csv(), "polyline,x,y\n");
    }

    #[test]
    fn rejects_non_planar() {
        let spec = NetworkSpec::new(
            vec![Layer::dense(vec![vec![1.0]], vec![0.0], Activation::Identity)],
            Head::affine(),
            None,
        )
        .unwrap();
        assert!(render_decision_map(&spec, &Window::square(2.0), 10).is_err());
    }

    #[test]
    fn top_row_is_max_y() {
        // prob = σ(40·y): bright at the top
        let spec = NetworkSpec::new(
            vec![Layer::dense(vec![vec![0.0, 40.0]], vec![0.0], Activation::Identity)],
            Head::affine(),
            None,
        )
        .unwrap();
        let map = render_decision_map(&spec, &Window::square(1.0), 8).unwrap();
        let px = &map.to_ppm()[b"P6\n8 8\n255\n".len()..];
        assert_eq!(px[0], 255);
        assert_eq!(px[px.len() - 1], 0);
        let lines = map.contours();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 8);
        assert!(lines[0].iter().all(|p| p[1].abs() < 1e-12));
    }

    #[test]
    fn circle_contour_is_closed() {
        let window = Window::square(2.0);
        let n = 64;
        let values = (0..n * n)
            .map(|k| {
                let p = window.cell_center(n, k % n, k / n);
                if p[0].hypot(p[1]) <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let map = DecisionMap { n, window, values, tau: 0.5 };
        let lines = map.contours();
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert_eq!(l.first(), l.last());
        let (dx, _) = window.cell(n);
        assert!(l.iter().all(|p| (p[0].hypot(p[1]) - 1.0).abs() <= dx));
    }
}
