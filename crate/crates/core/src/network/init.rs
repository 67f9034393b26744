use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Activation, Head, Layer, NetworkError, NetworkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitScheme {
    /// `U(−0.5, 0.5)`.
    Random,
    /// `U(±√(6/(fan_in + fan_out)))`.
    Xavier,
    /// `U(±√(6/fan_in))`.
    Kaiming,
    /// `N(0, 2/fan_in)`.
    He,
}

impl InitScheme {
    pub const ALL: [InitScheme; 4] = [InitScheme::Random, InitScheme::Xavier, InitScheme::Kaiming, InitScheme::He];

    pub fn name(&self) -> &'static str {
        match self {
            InitScheme::Random => "random",
            InitScheme::Xavier => "xavier",
            InitScheme::Kaiming => "kaiming",
            InitScheme::He => "he",
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R, fan_in: usize, fan_out: usize) -> f64 {
        match self {
            InitScheme::Random => rng.random_range(-0.5..0.5),
            InitScheme::Xavier => {
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                rng.random_range(-a..a)
            }
            InitScheme::Kaiming => {
                let a = (6.0 / fan_in as f64).sqrt();
                rng.random_range(-a..a)
            }
            InitScheme::He => Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std").sample(rng),
        }
    }
}

impl fmt::Display for InitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitScheme {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(InitScheme::Random),
            "xavier" => Ok(InitScheme::Xavier),
            "kaiming" => Ok(InitScheme::Kaiming),
            "he" => Ok(InitScheme::He),
            _ => Err(NetworkError::UnknownScheme(s.to_string())),
        }
    }
}

/// Fully connected baseline: logistic hidden layers (`k = 1`), an identity
/// output layer, zero biases and weights drawn per `scheme`.
pub fn init_baseline(scheme: InitScheme, widths: &[usize], seed: u64) -> Result<NetworkSpec, NetworkError> {
    if widths.len() < 2 || widths.contains(&0) {
        return Err(NetworkError::Shape(format!(
            "widths {widths:?} need at least input and output sizes, all positive"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = widths.len() - 2;
    let layers = widths
        .windows(2)
        .enumerate()
        .map(|(l, pair)| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let w =
                (0..fan_out).map(|_| (0..fan_in).map(|_| scheme.sample(&mut rng, fan_in, fan_out)).collect()).collect();
            let act = if l == last { Activation::Identity } else { Activation::Logistic { k: 1.0 } };
            Layer::dense(w, vec![0.0; fan_out], act)
        })
        .collect();
    NetworkSpec::new(
        layers,
        Head::affine(),
        Some(serde_json::json!({ "kind": "baseline", "scheme": scheme.name(), "seed": seed })),
    )
}
