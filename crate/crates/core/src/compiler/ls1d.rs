use serde::{Deserialize, Serialize};
use serde_json::json;

use super::CompileError;
use crate::network::{sigmoid, Activation, Head, Layer, NetworkSpec};

/// Basis function of the 1D initializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `σ(k(x − p))`.
    #[default]
    Sigmoid,
    /// `max(0, k(x − p))`.
    Relu,
}

impl Basis {
    #[inline]
    fn eval(&self, k: f64, x: f64, p: f64) -> f64 {
        match self {
            Basis::Sigmoid => sigmoid(k * (x - p)),
            Basis::Relu => (k * (x - p)).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsFit {
    /// `α_1..α_m` followed by the bias `α_{m+1}`.
    pub alpha: Vec<f64>,
    pub spec: NetworkSpec,
    /// Ridge added to the normal equations (0 when none was needed).
    pub ridge: f64,
    /// Squared ratio of the extreme Cholesky pivots, a cheap condition estimate.
    pub condition: f64,
}

/// Lower-triangular Cholesky factor of a dense SPD matrix, or `None` when a
/// pivot is not safely positive.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 1e-13 * scale) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - ((i + 1)..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

fn pivot_condition(l: &[Vec<f64>]) -> f64 {
    let d: Vec<f64> = (0..l.len()).map(|i| l[i][i]).collect();
    let hi = d.iter().copied().fold(0.0, f64::max);
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    (hi / lo).powi(2)
}

/// Design matrix rows `[b(x_i − p_1), …, b(x_i − p_m), 1]`.
pub fn design_matrix(xs: &[f64], centers: &[f64], k: f64, basis: Basis) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let mut row: Vec<f64> = centers.iter().map(|&p| basis.eval(k, x, p)).collect();
            row.push(1.0);
            row
        })
        .collect()
}

/// Least-squares output weights for fixed centers, solved through the normal
/// equations by Cholesky. A ridge of `1e−12` up to `1e−6` (relative to the
/// largest diagonal entry) is added only when the plain factorization fails.
pub fn ls_initializer_1d(xs: &[f64], ys: &[f64], centers: &[f64], k: f64, basis: Basis) -> Result<LsFit, CompileError> {
    if xs.len() != ys.len() {
        return Err(CompileError::InvalidParameter(format!("{} inputs for {} targets", xs.len(), ys.len())));
    }
    if centers.is_empty() {
        return Err(CompileError::InvalidParameter("need at least one center".into()));
    }
    if xs.len() < centers.len() + 1 {
        return Err(CompileError::InvalidParameter(format!(
            "{} samples cannot determine {} weights",
            xs.len(),
            centers.len() + 1
        )));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(CompileError::InvalidParameter(format!("k must be positive, got {k}")));
    }
    if xs.iter().chain(ys).chain(centers).any(|v| !v.is_finite()) {
        return Err(CompileError::InvalidParameter("non-finite input".into()));
    }
    let phi = design_matrix(xs, centers, k, basis);
    let n = centers.len() + 1;
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for (row, &y) in phi.iter().zip(ys) {
        for i in 0..n {
            rhs[i] += row[i] * y;
            for j in 0..=i {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            gram[i][j] = gram[j][i];
        }
    }
    let scale = (0..n).map(|i| gram[i][i]).fold(0.0, f64::max);
    let mut ridge = 0.0;
    let mut factor = cholesky(&gram);
    let mut rel = 1e-12;
    while factor.is_none() && rel <= 1e-6 * (1.0 + 1e-9) {
        ridge = rel * scale;
        let mut g = gram.clone();
        (0..n).for_each(|i| g[i][i] += ridge);
        factor = cholesky(&g);
        rel *= 10.0;
    }
    let Some(l) = factor else {
        return Err(CompileError::IllConditioned { condition: f64::INFINITY });
    };
    let condition = pivot_condition(&l);
    let alpha = cholesky_solve(&l, &rhs);
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(CompileError::IllConditioned { condition });
    }
    if ridge > 0.0 {
        log::warn!("normal equations needed ridge {ridge:e} (condition ≈ {condition:e})");
    }

    let m = centers.len();
    let (w1, b1, act) = match basis {
        Basis::Sigmoid => (vec![vec![1.0]; m], centers.iter().map(|p| -p).collect(), Activation::Logistic { k }),
        Basis::Relu => (vec![vec![k]; m], centers.iter().map(|p| -k * p).collect(), Activation::Relu),
    };
    let spec = NetworkSpec::new(
        vec![Layer::dense(w1, b1, act), Layer::dense(vec![alpha[..m].to_vec()], vec![alpha[m]], Activation::Identity)],
        Head { tau: 0.5, scale: 1.0 },
        Some(json!({ "kind": "ls1d", "centers": centers, "k": k, "basis": basis, "ridge": ridge })),
    )?;
    Ok(LsFit { alpha, spec, ridge, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn predict(fit: &LsFit, x: f64) -> f64 {
        fit.spec.forward(&[x]).unwrap().score
    }

    #[test]
    fn constant_target() {
        let xs = grid(101, -1.0, 1.0);
        let ys = vec![0.7; xs.len()];
        let fit = ls_initializer_1d(&xs, &ys, &[-0.3, 0.4], 10.0, Basis::Sigmoid).unwrap();
        for &x in &xs {
            assert!((predict(&fit, x) - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn step_target_matches_oracle() {
        let xs = grid(401, -1.0, 1.0);
        let ys: Vec<f64> = xs.iter().map(|&x| if x >= 0.0 { 1.0 } else { 0.0 }).collect();
        let fit = ls_initializer_1d(&xs, &ys, &[0.0], 120.0, Basis::Sigmoid).unwrap();
        // Oracle: explicit 2×2 normal equations solved by Cramer's rule.
        let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            let f = 1.0 / (1.0 + (-120.0 * x).exp());
            s11 += f * f;
            s12 += f;
            s22 += 1.0;
            r1 += f * y;
            r2 += y;
        }
        let det = s11 * s22 - s12 * s12;
        let a1 = (r1 * s22 - s12 * r2) / det;
        let a2 = (s11 * r2 - s12 * r1) / det;
        assert!((fit.alpha[0] - a1).abs() < 1e-9 && (fit.alpha[1] - a2).abs() < 1e-9);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x.abs() > 0.05 {
                assert!((predict(&fit, x) - y).abs() <= 0.01, "x = {x}");
            }
        }
    }

    #[test]
    fn rectangle_weights() {
        let xs = grid(2001, -2.0, 2.0);
        let ys: Vec<f64> = xs.iter().map(|&x| if x.abs() <= 0.5 { 1.0 } else { 0.0 }).collect();
        let fit = ls_initializer_1d(&xs, &ys, &[-0.5, 0.5], 120.0, Basis::Sigmoid).unwrap();
        for (a, e) in fit.alpha.iter().zip([1.0, -1.0, 0.0]) {
            assert!((a - e).abs() < 0.01, "{:?}", fit.alpha);
        }
        assert_eq!(fit.ridge, 0.0);
    }

    #[test]
    fn relu_triangle_is_exact() {
        let xs = grid(2001, -2.0, 2.0);
        let tri = |x: f64| {
            if x <= -1.0 || x >= 1.0 {
                0.0
            } else if x <= 0.5 {
                (x + 1.0) / 1.5
            } else {
                (1.0 - x) / 0.5
            }
        };
        let ys: Vec<f64> = xs.iter().map(|&x| tri(x)).collect();
        let fit = ls_initializer_1d(&xs, &ys, &[-1.0, 0.5, 1.0], 1.0, Basis::Relu).unwrap();
        for &x in &xs {
            assert!((predict(&fit, x) - tri(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn duplicate_centers_need_ridge_or_fail() {
        let xs = grid(50, -1.0, 1.0);
        let ys: Vec<f64> = xs.iter().map(|&x| x.max(0.0)).collect();
        match ls_initializer_1d(&xs, &ys, &[0.0, 0.0], 5.0, Basis::Sigmoid) {
            Ok(fit) => assert!(fit.ridge > 0.0),
            Err(e) => assert!(matches!(e, CompileError::IllConditioned { .. })),
        }
    }

    #[test]
    fn input_validation() {
        assert!(ls_initializer_1d(&[0.0, 1.0], &[0.0], &[0.0], 1.0, Basis::Sigmoid).is_err());
        assert!(ls_initializer_1d(&[0.0], &[0.0], &[0.0], 1.0, Basis::Sigmoid).is_err());
        assert!(ls_initializer_1d(&[0.0, 1.0], &[0.0, 1.0], &[0.0], 0.0, Basis::Sigmoid).is_err());
    }
}
