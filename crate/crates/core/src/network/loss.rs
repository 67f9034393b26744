use super::NetworkError;

/// Probabilities are clamped to `[PROB_CLAMP, 1 − PROB_CLAMP]` inside the loss.
pub const PROB_CLAMP: f64 = 1e-7;

/// Mean binary cross-entropy `−(1/N) Σ [y ln p + (1 − y) ln(1 − p)]`.
pub fn bce_loss(probs: &[f64], labels: &[bool]) -> Result<f64, NetworkError> {
    if probs.is_empty() {
        return Err(NetworkError::Empty);
    }
    if probs.len() != labels.len() {
        return Err(NetworkError::InvalidInput(format!("{} probabilities for {} labels", probs.len(), labels.len())));
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            if y {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(total / probs.len() as f64)
}

/// BCE of a single logit, `softplus(t) − y·t`, evaluated without overflow.
#[inline]
pub(crate) fn bce_logit(t: f64, y: bool) -> f64 {
    let softplus = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    if y {
        softplus - t
    } else {
        softplus
    }
}
