use rayon::prelude::*;

use super::GeometryError;
use crate::Window;

/// Samples an indicator at the `n × n` cell centers of `window`.
///
/// Row-major with row 0 at the bottom (`index = j·n + i`).
pub fn rasterize<F>(indicator: F, window: &Window, n: usize) -> Vec<bool>
where
    F: Fn([f64; 2]) -> bool + Sync,
{
    (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let ind = &indicator;
            (0..n).map(move |i| ind(window.cell_center(n, i, j)))
        })
        .collect()
}

/// One-dimensional squared distance transform with sample spacing `s`
/// (Felzenszwalb–Huttenlocher lower envelope of parabolas).
fn edt_1d(f: &[f64], s: f64, out: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let s2 = s * s;
    v.clear();
    z.clear();
    let sites: Vec<usize> = (0..f.len()).filter(|&q| f[q].is_finite()).collect();
    if sites.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let key = |q: usize| f[q] + s2 * (q * q) as f64;
    for &q in &sites {
        while let Some(&r) = v.last() {
            let x = (key(q) - key(r)) / (2.0 * s2 * (q - r) as f64);
            if x <= *z.last().unwrap_or(&f64::NEG_INFINITY) {
                v.pop();
                z.pop();
            } else {
                v.push(q);
                z.push(x);
                break;
            }
        }
        if v.is_empty() {
            v.push(q);
            z.push(f64::NEG_INFINITY);
        }
    }
    let mut k = 0;
    for (p, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < p as f64 {
            k += 1;
        }
        let d = p as f64 - v[k] as f64;
        *o = s2 * d * d + f[v[k]];
    }
}

/// Squared Euclidean distance from every cell center to the nearest set cell.
fn squared_edt(mask: &[bool], n: usize, dx: f64, dy: f64) -> Vec<f64> {
    let init: Vec<f64> = mask.iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
    let mut rows = vec![0.0; n * n];
    rows.par_chunks_mut(n).enumerate().for_each(|(j, out)| {
        let (mut v, mut z) = (Vec::new(), Vec::new());
        edt_1d(&init[j * n..(j + 1) * n], dx, out, &mut v, &mut z);
    });
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let col: Vec<f64> = (0..n).map(|j| rows[j * n + i]).collect();
            let mut out = vec![0.0; n];
            let (mut v, mut z) = (Vec::new(), Vec::new());
            edt_1d(&col, dy, &mut out, &mut v, &mut z);
            out
        })
        .collect();
    let mut d = vec![0.0; n * n];
    for (i, col) in cols.iter().enumerate() {
        for (j, val) in col.iter().enumerate() {
            d[j * n + i] = *val;
        }
    }
    d
}

fn directed(from: &[bool], to_dist2: &[f64]) -> f64 {
    from.iter().zip(to_dist2).filter(|(&a, _)| a).map(|(_, &d)| d).fold(0.0, f64::max).sqrt()
}

/// Symmetric Hausdorff distance between two rasterized sets on the same grid.
pub fn grid_hausdorff_masks(a: &[bool], b: &[bool], window: &Window, n: usize) -> Result<f64, GeometryError> {
    if a.len() != n * n || b.len() != n * n {
        return Err(GeometryError::DimensionMismatch { expected: n * n, got: a.len().min(b.len()) });
    }
    if !a.iter().any(|&v| v) || !b.iter().any(|&v| v) {
        return Err(GeometryError::EmptySet);
    }
    let (dx, dy) = window.cell(n);
    let da = squared_edt(a, n, dx, dy);
    let db = squared_edt(b, n, dx, dy);
    Ok(directed(a, &db).max(directed(b, &da)))
}

/// Hausdorff distance between two indicator sets restricted to the cell
/// centers of an `n × n` grid. The estimate is exact on the grid; relative to
/// the continuous sets it is off by at most one cell diagonal.
pub fn grid_hausdorff<A, B>(a: A, b: B, window: &Window, n: usize) -> Result<f64, GeometryError>
where
    A: Fn([f64; 2]) -> bool + Sync,
    B: Fn([f64; 2]) -> bool + Sync,
{
    if n < 32 {
        return Err(GeometryError::InvalidParameter(format!("grid size must be at least 32, got {n}")));
    }
    if !window.is_valid() {
        return Err(GeometryError::InvalidParameter("invalid window".into()));
    }
    let ma = rasterize(a, window, n);
    let mb = rasterize(b, window, n);
    grid_hausdorff_masks(&ma, &mb, window, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(cx: f64, cy: f64, r: f64) -> impl Fn([f64; 2]) -> bool + Sync {
        move |p| (p[0] - cx).hypot(p[1] - cy) <= r
    }

    fn brute(a: &[bool], b: &[bool], w: &Window, n: usize) -> f64 {
        let pts = |m: &[bool]| -> Vec<[f64; 2]> {
            (0..n * n).filter(|&k| m[k]).map(|k| w.cell_center(n, k % n, k / n)).collect()
        };
        let (pa, pb) = (pts(a), pts(b));
        let dir = |x: &[[f64; 2]], y: &[[f64; 2]]| {
            x.iter()
                .map(|p| y.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        dir(&pa, &pb).max(dir(&pb, &pa))
    }

    #[test]
    fn identical_sets() {
        let w = Window::square(2.0);
        assert_eq!(grid_hausdorff(disk(0.0, 0.0, 1.0), disk(0.0, 0.0, 1.0), &w, 64).unwrap(), 0.0);
    }

    #[test]
    fn annulus_width() {
        let w = Window::square(2.0);
        let d = grid_hausdorff(disk(0.0, 0.0, 1.0), disk(0.0, 0.0, 1.1), &w, 400).unwrap();
        assert!((d - 0.1).abs() <= 0.01 + 1e-12, "{d}");
    }

    #[test]
    fn matches_brute_force() {
        let w = Window::new(-4.0, 4.0, -2.0, 2.0).unwrap();
        let n = 48;
        let a = rasterize(disk(-2.0, 0.0, 1.0), &w, n);
        let b = rasterize(disk(2.0, 0.0, 1.0), &w, n);
        let fast = grid_hausdorff_masks(&a, &b, &w, n).unwrap();
        let slow = brute(&a, &b, &w, n);
        assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        assert!((fast - 4.0).abs() < 0.35);

        let c = rasterize(|p| p[0] > 1.0 && p[1] < -0.5, &w, n);
        let d = rasterize(|p| (p[0] + 1.0).abs() + p[1].abs() < 0.7, &w, n);
        let fast = grid_hausdorff_masks(&c, &d, &w, n).unwrap();
        assert!((fast - brute(&c, &d, &w, n)).abs() < 1e-12);
    }

    #[test]
    fn empty_set_is_distinguished() {
        let w = Window::square(2.0);
        assert_eq!(grid_hausdorff(disk(0.0, 0.0, 1.0), |_| false, &w, 64), Err(GeometryError::EmptySet));
    }
}
