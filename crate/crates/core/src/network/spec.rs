use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NetworkError;

/// Logistic function `σ(t) = 1/(1 + e^{−t})`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Head logits are clamped to this magnitude before the final sigmoid.
pub const LOGIT_CLAMP: f64 = 37.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "act", rename_all = "lowercase")]
pub enum Activation {
    /// `σ(k·z)`.
    Logistic {
        k: f64,
    },
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match *self {
            Activation::Logistic { k } => sigmoid(k * z),
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative with respect to `z`, given `a = apply(z)`.
    #[inline]
    pub fn derivative(&self, z: f64, a: f64) -> f64 {
        match *self {
            Activation::Logistic { k } => k * a * (1.0 - a),
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Affine map followed by an activation.
///
/// Dense layers store `w[r][c]` for every input column. Sparse layers list,
/// per output row, the input columns they read in `connect[r]`; `w[r][k]` is
/// then the weight of column `connect[r][k]`. Absent entries are structural
/// zeros and stay zero under training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(flatten)]
    pub act: Activation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connect: Option<Vec<Vec<usize>>>,
}

impl Layer {
    pub fn dense(w: Vec<Vec<f64>>, b: Vec<f64>, act: Activation) -> Self {
        let inputs = w.first().map_or(0, |r| r.len());
        Layer { inputs, w, b, act, connect: None }
    }

    pub fn sparse(inputs: usize, connect: Vec<Vec<usize>>, w: Vec<Vec<f64>>, b: Vec<f64>, act: Activation) -> Self {
        Layer { inputs, w, b, act, connect: Some(connect) }
    }

    pub fn outputs(&self) -> usize {
        self.b.len()
    }

    /// Number of trainable weights plus biases.
    pub fn param_count(&self) -> usize {
        self.w.iter().map(|r| r.len()).sum::<usize>() + self.b.len()
    }

    /// Input column read by weight `k` of row `r`.
    #[inline]
    pub fn column(&self, r: usize, k: usize) -> usize {
        match &self.connect {
            Some(c) => c[r][k],
            None => k,
        }
    }

    /// Pre-activations `z = W a + b`.
    pub fn pre_activation(&self, a: &[f64], z: &mut Vec<f64>) {
        z.clear();
        match &self.connect {
            None => {
                for (row, bias) in self.w.iter().zip(&self.b) {
                    let s: f64 = row.iter().zip(a).map(|(w, x)| w * x).sum();
                    z.push(s + bias);
                }
            }
            Some(conn) => {
                for ((row, cols), bias) in self.w.iter().zip(conn).zip(&self.b) {
                    let s: f64 = row.iter().zip(cols).map(|(w, &c)| w * a[c]).sum();
                    z.push(s + bias);
                }
            }
        }
    }

    fn validate(&self, index: usize, expected_in: usize) -> Result<(), NetworkError> {
        let bad = |msg: String| Err(NetworkError::Shape(format!("layer {index}: {msg}")));
        if self.inputs != expected_in {
            return bad(format!("expects {} inputs, previous width is {expected_in}", self.inputs));
        }
        if self.w.len() != self.b.len() || self.b.is_empty() {
            return bad(format!("{} weight rows for {} biases", self.w.len(), self.b.len()));
        }
        match &self.connect {
            None => {
                if let Some(r) = self.w.iter().position(|r| r.len() != self.inputs) {
                    return bad(format!("row {r} has {} weights, expected {}", self.w[r].len(), self.inputs));
                }
            }
            Some(conn) => {
                if conn.len() != self.w.len() {
                    return bad("connectivity rows do not match weight rows".into());
                }
                for (r, (cols, row)) in conn.iter().zip(&self.w).enumerate() {
                    if cols.len() != row.len() || cols.iter().any(|&c| c >= self.inputs) {
                        return bad(format!("row {r} has inconsistent connectivity"));
                    }
                }
            }
        }
        let finite = self.w.iter().flatten().chain(&self.b).all(|v| v.is_finite());
        let k_ok = match self.act {
            Activation::Logistic { k } => k.is_finite() && k > 0.0,
            _ => true,
        };
        if !finite || !k_ok {
            return bad("non-finite parameters".into());
        }
        Ok(())
    }
}

/// Decision head: `logit = scale·(Σ last-layer outputs − tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub tau: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Head {
    pub fn affine() -> Head {
        Head { tau: 0.0, scale: 1.0 }
    }
}

/// Result of evaluating a spec at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Output {
    /// Sum of the last layer's outputs.
    pub score: f64,
    pub logit: f64,
    pub prob: f64,
}

impl Output {
    pub fn decision(&self) -> bool {
        self.prob >= 0.5
    }
}

/// Layered sigmoidal network with a thresholding head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct NetworkSpec {
    pub format_version: u32,
    pub layers: Vec<Layer>,
    pub head: Head,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(default = "version")]
    format_version: u32,
    layers: Vec<Layer>,
    head: Head,
    #[serde(default)]
    provenance: Option<serde_json::Value>,
}

fn version() -> u32 {
    1
}

impl TryFrom<RawSpec> for NetworkSpec {
    type Error = NetworkError;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        if raw.format_version != 1 {
            return Err(NetworkError::Shape(format!("unsupported format_version {}", raw.format_version)));
        }
        NetworkSpec::new(raw.layers, raw.head, raw.provenance)
    }
}

impl NetworkSpec {
    pub fn new(layers: Vec<Layer>, head: Head, provenance: Option<serde_json::Value>) -> Result<Self, NetworkError> {
        let spec = NetworkSpec { format_version: 1, layers, head, provenance };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let Some(first) = self.layers.first() else {
            return Err(NetworkError::Shape("spec has no layers".into()));
        };
        if first.inputs == 0 {
            return Err(NetworkError::Shape("input width must be positive".into()));
        }
        let mut width = first.inputs;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.validate(i, width)?;
            width = layer.outputs();
        }
        if !(self.head.scale > 0.0) || !self.head.scale.is_finite() || !self.head.tau.is_finite() {
            return Err(NetworkError::Shape("head scale must be positive and tau finite".into()));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    /// Hidden units: outputs of every layer except a trailing single-unit affine head.
    pub fn unit_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.outputs()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    /// Maps a score to `(logit, prob)` with a decision consistent with `score ≥ tau`.
    pub fn head_output(&self, score: f64) -> Output {
        let Head { tau, scale } = self.head;
        let logit = scale * (score - tau);
        let mut prob = sigmoid(logit.clamp(-LOGIT_CLAMP, LOGIT_CLAMP));
        if score < tau && prob >= 0.5 {
            prob = 0.5f64.next_down();
        } else if score >= tau && prob < 0.5 {
            prob = 0.5;
        }
        Output { score, logit, prob }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Output, NetworkError> {
        if x.len() != self.input_dim() {
            return Err(NetworkError::Shape(format!(
                "input has {} coordinates, spec expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(self.forward_unchecked(x))
    }

    pub(crate) fn forward_unchecked(&self, x: &[f64]) -> Output {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        for layer in &self.layers {
            layer.pre_activation(&a, &mut z);
            a.clear();
            a.extend(z.iter().map(|&v| layer.act.apply(v)));
        }
        self.head_output(a.iter().sum())
    }

    /// Evaluates many points in parallel; results are in input order.
    pub fn forward_batch<P: AsRef<[f64]> + Sync>(&self, xs: &[P]) -> Result<Vec<Output>, NetworkError> {
        if let Some(bad) = xs.iter().find(|x| x.as_ref().len() != self.input_dim()) {
            return Err(NetworkError::Shape(format!(
                "input has {} coordinates, spec expects {}",
                bad.as_ref().len(),
                self.input_dim()
            )));
        }
        Ok(xs.par_iter().map(|x| self.forward_unchecked(x.as_ref())).collect())
    }

    /// Equivalent spec whose head is a plain sigmoid of a single affine output,
    /// so every decision parameter is trainable.
    pub fn to_trainable(&self) -> NetworkSpec {
        let Head { tau, scale } = self.head;
        let last = self.layers.last().map_or(0, |l| l.outputs());
        let already = tau == 0.0
            && scale == 1.0
            && last == 1
            && matches!(self.layers.last().map(|l| l.act), Some(Activation::Identity));
        if already {
            return self.clone();
        }
        let mut layers = self.layers.clone();
        layers.push(Layer::dense(vec![vec![scale; last]], vec![-scale * tau], Activation::Identity));
        NetworkSpec { format_version: 1, layers, head: Head::affine(), provenance: self.provenance.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> NetworkSpec {
        NetworkSpec::new(
            vec![
                Layer::dense(vec![vec![0.5, -1.0], vec![2.0, 0.25]], vec![0.1, -0.2], Activation::Logistic { k: 3.0 }),
                Layer::dense(vec![vec![1.5, -0.5]], vec![0.3], Activation::Identity),
            ],
            Head::affine(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn zero_network_is_half() {
        let spec = NetworkSpec::new(
            vec![Layer::dense(vec![vec![0.0, 0.0]], vec![0.0], Activation::Identity)],
            Head::affine(),
            None,
        )
        .unwrap();
        let out = spec.forward(&[3.0, -4.0]).unwrap();
        assert_eq!(out.prob, 0.5);
        assert!(spec.forward(&[1.0, 2.0, 3.0]).is_err());
        assert!(spec.forward(&[1.0]).is_err());
    }

    #[test]
    fn forward_by_hand() {
        let x = [0.4, -0.3];
        let h1 = sigmoid(3.0 * (0.5 * 0.4 + 0.3 + 0.1));
        let h2 = sigmoid(3.0 * (0.8 - 0.075 - 0.2));
        let logit = 1.5 * h1 - 0.5 * h2 + 0.3;
        let out = tiny().forward(&x).unwrap();
        assert!((out.logit - logit).abs() < 1e-15);
        assert!((out.prob - sigmoid(logit)).abs() < 1e-15);
    }

    #[test]
    fn shapes_are_checked() {
        let bad = NetworkSpec::new(
            vec![
                Layer::dense(vec![vec![1.0, 1.0]], vec![0.0], Activation::Identity),
                Layer::dense(vec![vec![1.0, 1.0]], vec![0.0], Activation::Identity),
            ],
            Head::affine(),
            None,
        );
        assert!(bad.is_err());
        let sparse = Layer::sparse(3, vec![vec![0, 5]], vec![vec![1.0, 1.0]], vec![0.0], Activation::Identity);
        let bad = NetworkSpec::new(
            vec![Layer::dense(vec![vec![1.0]; 3], vec![0.0; 3], Activation::Identity), sparse],
            Head::affine(),
            None,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut spec = tiny();
        spec.layers[0].w[0][0] = 0.1 + 0.2;
        spec.layers[0].b[1] = std::f64::consts::PI / 7.0;
        let text = spec.to_json();
        assert!(text.contains("\"act\": \"logistic\""));
        let back: NetworkSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn head_decision_matches_score() {
        let spec = NetworkSpec::new(
            vec![Layer::dense(vec![vec![1.0]], vec![0.0], Activation::Identity)],
            Head { tau: 0.5, scale: 1.0 },
            None,
        )
        .unwrap();
        for s in [0.5, 0.5f64.next_down(), 0.5f64.next_up(), -100.0, 100.0] {
            let out = spec.forward(&[s]).unwrap();
            assert_eq!(out.decision(), s >= 0.5, "score {s}");
        }
    }

    #[test]
    fn trainable_conversion_preserves_logits() {
        let spec = NetworkSpec::new(
            vec![Layer::dense(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], Activation::Logistic { k: 4.0 })],
            Head { tau: 1.5, scale: 1.0 },
            None,
        )
        .unwrap();
        let t = spec.to_trainable();
        assert_eq!(t.layers.len(), 2);
        for x in [[0.3, 0.9], [-1.0, 2.0], [5.0, 5.0]] {
            let (a, b) = (spec.forward(&x).unwrap(), t.forward(&x).unwrap());
            assert_eq!(a.logit, b.logit);
            assert_eq!(a.decision(), b.decision());
        }
        assert_eq!(t.to_trainable(), t);
    }
}
