use serde::{Deserialize, Serialize};

use super::CompileError;

/// Logistic inverse `ln(p/(1 − p))`.
#[inline]
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Half-width `κ⁻¹ ln((1 − η)/η)` of the band where a gate is not yet
/// `η`-confident.
pub fn band_halfwidth(kappa: f64, eta: f64) -> Result<f64, CompileError> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(CompileError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    if !(eta > 0.0 && eta < 0.5) {
        return Err(CompileError::InvalidParameter(format!("eta must lie in (0, 1/2), got {eta}")));
    }
    Ok(logit(1.0 - eta) / kappa)
}

/// Sharpness making a gate `ε`-confident at distance `t`: `(1/t) ln((1 − ε)/ε)`.
pub fn sharpness_for(t: f64, eps_conf: f64) -> Result<f64, CompileError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(CompileError::InvalidParameter(format!("distance must be positive, got {t}")));
    }
    if !(eps_conf > 0.0 && eps_conf <= 0.5) {
        return Err(CompileError::InvalidParameter(format!(
            "confidence tolerance must lie in (0, 1/2], got {eps_conf}"
        )));
    }
    Ok(logit(1.0 - eps_conf) / t)
}

/// Default margins for `M` facets per component and `R` components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub eta: f64,
    pub delta: f64,
    pub lambda: f64,
}

/// `η = 1/(8M)`, `δ = 1/(8R)`, `λ = 4 ln((1 − δ)/δ)`.
pub fn margin_params(m: usize, r: usize) -> Result<Margins, CompileError> {
    if m == 0 || r == 0 {
        return Err(CompileError::InvalidParameter(format!("M and R must be positive, got {m}, {r}")));
    }
    let eta = 1.0 / (8 * m) as f64;
    let delta = 1.0 / (8 * r) as f64;
    Ok(Margins { eta, delta, lambda: 4.0 * logit(1.0 - delta) })
}

/// Sharpness and tolerance settings of a two-layer gate network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub kappa: f64,
    pub lambda: f64,
    pub eta: f64,
    pub delta: f64,
}

impl GateParams {
    pub fn new(kappa: f64, lambda: f64, eta: f64, delta: f64) -> Result<Self, CompileError> {
        let p = GateParams { kappa, lambda, eta, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn from_margins(m: usize, r: usize, kappa: f64) -> Result<Self, CompileError> {
        let mg = margin_params(m, r)?;
        GateParams::new(kappa, mg.lambda, mg.eta, mg.delta)
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.kappa) || !pos(self.lambda) {
            return Err(CompileError::InvalidParameter(format!(
                "kappa and lambda must be positive, got {} and {}",
                self.kappa, self.lambda
            )));
        }
        if !(self.eta > 0.0 && self.eta < 0.5) || !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(CompileError::InvalidParameter(format!(
                "eta and delta must lie in (0, 1/2), got {} and {}",
                self.eta, self.delta
            )));
        }
        Ok(())
    }

    /// Inner band half-width `w_η`.
    pub fn band(&self) -> f64 {
        logit(1.0 - self.eta) / self.kappa
    }

    /// `a_δ = ln((1 − δ)/δ)`.
    pub fn a_delta(&self) -> f64 {
        logit(1.0 - self.delta)
    }
}
