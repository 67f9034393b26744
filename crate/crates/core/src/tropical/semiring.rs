//! Max-plus scalar arithmetic.

use std::cmp::Ordering;
use std::ops::{Add, Mul};

/// An element of the max-plus semiring `(ℝ ∪ {−∞}, max, +)`.
///
/// `a + b` is tropical addition (`max`), `a * b` is tropical multiplication
/// (ordinary `+`). The additive identity is `−∞`, the multiplicative one `0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MaxPlus(pub f64);

impl MaxPlus {
    pub const ZERO: MaxPlus = MaxPlus(f64::NEG_INFINITY);
    pub const ONE: MaxPlus = MaxPlus(0.0);

    /// Tropical power `a^{⊙n} = n·a`.
    pub fn pow(self, n: u32) -> MaxPlus {
        if n == 0 {
            MaxPlus::ONE
        } else {
            MaxPlus(self.0 * f64::from(n))
        }
    }
}

impl Add for MaxPlus {
    type Output = MaxPlus;

    fn add(self, rhs: MaxPlus) -> MaxPlus {
        match self.0.partial_cmp(&rhs.0) {
            Some(Ordering::Less) => rhs,
            _ => self,
        }
    }
}

impl Mul for MaxPlus {
    type Output = MaxPlus;

    fn mul(self, rhs: MaxPlus) -> MaxPlus {
        MaxPlus(self.0 + rhs.0)
    }
}

/// `a ⊕ b`
pub fn trop_add(a: f64, b: f64) -> f64 {
    (MaxPlus(a) + MaxPlus(b)).0
}

/// `a ⊙ b`
pub fn trop_mul(a: f64, b: f64) -> f64 {
    (MaxPlus(a) * MaxPlus(b)).0
}
