use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TropicalError;

/// One term `c ⊙ x^u = c + ⟨u, x⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(rename = "u")]
    pub exponent: Vec<i64>,
    #[serde(rename = "c")]
    pub coeff: f64,
}

impl Monomial {
    pub fn new(exponent: Vec<i64>, coeff: f64) -> Self {
        Monomial { exponent, coeff }
    }

    #[inline]
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.coeff + self.exponent.iter().zip(x).map(|(&u, &xi)| u as f64 * xi).sum::<f64>()
    }
}

/// A max-plus polynomial `F(x) = max_k { c_k + ⟨u_k, x⟩ }`.
///
/// Monomials with a `−∞` coefficient are represented by their absence.
/// Duplicate exponents are merged on construction by keeping the larger
/// coefficient, and monomials are stored sorted by exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct TropicalPolynomial {
    dim: usize,
    monomials: Vec<Monomial>,
}

#[derive(Serialize, Deserialize)]
struct RawPolynomial {
    #[serde(default = "format_version", skip_deserializing)]
    format_version: u32,
    dim: usize,
    monomials: Vec<Monomial>,
}

fn format_version() -> u32 {
    1
}

impl TryFrom<RawPolynomial> for TropicalPolynomial {
    type Error = TropicalError;

    fn try_from(raw: RawPolynomial) -> Result<Self, Self::Error> {
        TropicalPolynomial::new(raw.dim, raw.monomials)
    }
}

impl From<TropicalPolynomial> for RawPolynomial {
    fn from(p: TropicalPolynomial) -> Self {
        RawPolynomial { format_version: 1, dim: p.dim, monomials: p.monomials }
    }
}

impl TropicalPolynomial {
    pub fn new(dim: usize, monomials: Vec<Monomial>) -> Result<Self, TropicalError> {
        if dim == 0 {
            return Err(TropicalError::ZeroDimension);
        }
        if monomials.is_empty() {
            return Err(TropicalError::Empty);
        }
        let mut merged: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for m in monomials {
            if m.exponent.len() != dim {
                return Err(TropicalError::DimensionMismatch { expected: dim, got: m.exponent.len() });
            }
            if !m.coeff.is_finite() {
                return Err(TropicalError::NonFiniteCoefficient);
            }
            merged.entry(m.exponent).and_modify(|c| *c = c.max(m.coeff)).or_insert(m.coeff);
        }
        let monomials = merged.into_iter().map(|(exponent, coeff)| Monomial { exponent, coeff }).collect();
        Ok(TropicalPolynomial { dim, monomials })
    }

    /// Convenience constructor for planar polynomials from `((u1, u2), c)` terms.
    pub fn planar(terms: &[((i64, i64), f64)]) -> Result<Self, TropicalError> {
        TropicalPolynomial::new(2, terms.iter().map(|&((a, b), c)| Monomial::new(vec![a, b], c)).collect())
    }

    /// The constant polynomial `c`.
    pub fn constant(dim: usize, c: f64) -> Result<Self, TropicalError> {
        TropicalPolynomial::new(dim, vec![Monomial::new(vec![0; dim], c)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), TropicalError> {
        if x.len() != self.dim {
            return Err(TropicalError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Evaluates `max_k { c_k + ⟨u_k, x⟩ }`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, TropicalError> {
        self.check_dim(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.monomials.iter().map(|m| m.value_at(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of the monomials attaining the maximum within `tol`.
    pub fn argmax(&self, x: &[f64], tol: f64) -> Result<Vec<usize>, TropicalError> {
        self.check_dim(x)?;
        Ok(self.argmax_unchecked(x, tol))
    }

    pub(crate) fn argmax_unchecked(&self, x: &[f64], tol: f64) -> Vec<usize> {
        let values: Vec<f64> = self.monomials.iter().map(|m| m.value_at(x)).collect();
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        values.iter().enumerate().filter(|(_, &v)| top - v <= tol).map(|(k, _)| k).collect()
    }

    /// True when at least two monomials attain the maximum within `tol`.
    pub fn on_hypersurface(&self, x: &[f64], tol: f64) -> Result<bool, TropicalError> {
        if !(tol > 0.0) {
            return Err(TropicalError::BadTolerance(tol));
        }
        Ok(self.argmax(x, tol)?.len() >= 2)
    }

    /// Tropical sum `self ⊕ other`.
    pub fn trop_add(&self, other: &TropicalPolynomial) -> Result<Self, TropicalError> {
        if self.dim != other.dim {
            return Err(TropicalError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut all = self.monomials.clone();
        all.extend(other.monomials.iter().cloned());
        TropicalPolynomial::new(self.dim, all)
    }

    /// Tropical product `self ⊙ other`.
    pub fn trop_mul(&self, other: &TropicalPolynomial) -> Result<Self, TropicalError> {
        if self.dim != other.dim {
            return Err(TropicalError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut all = Vec::with_capacity(self.len() * other.len());
        for a in &self.monomials {
            for b in &other.monomials {
                let exponent = a.exponent.iter().zip(&b.exponent).map(|(x, y)| x + y).collect();
                all.push(Monomial::new(exponent, a.coeff + b.coeff));
            }
        }
        TropicalPolynomial::new(self.dim, all)
    }

    /// Scale of the coefficients, used to make geometric tolerances relative.
    pub(crate) fn coeff_scale(&self) -> f64 {
        1.0 + self.monomials.iter().map(|m| m.coeff.abs()).fold(0.0, f64::max)
    }
}

/// Evaluates the tropical rational function `U ⊘ V = U(x) − V(x)`.
pub fn trop_rational_eval(u: &TropicalPolynomial, v: &TropicalPolynomial, x: &[f64]) -> Result<f64, TropicalError> {
    if u.dim() != v.dim() {
        return Err(TropicalError::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    Ok(u.eval(x)? - v.eval(x)?)
}
