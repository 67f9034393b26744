//! Brier score, rank AUC and thresholded IoU for binary classifiers.
//!
//! AUC and IoU return `None` when they are undefined: AUC on single-class
//! labels, IoU when neither predictions nor labels contain a positive.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("no samples")]
    Empty,
    #[error("{scores} scores for {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("value {value} at index {index} is outside [0, 1] or not finite")]
    OutOfRange { index: usize, value: f64 },
    #[error("score at index {0} is NaN")]
    NaN(usize),
    #[error("threshold must lie in (0, 1), got {0}")]
    BadThreshold(f64),
}

fn check_lengths(scores: &[f64], labels: &[bool]) -> Result<(), MetricError> {
    if scores.len() != labels.len() {
        return Err(MetricError::LengthMismatch { scores: scores.len(), labels: labels.len() });
    }
    if scores.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

fn check_probs(probs: &[f64]) -> Result<(), MetricError> {
    match probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(index) => Err(MetricError::OutOfRange { index, value: probs[index] }),
        None => Ok(()),
    }
}

/// Mean of `(p_i − y_i)²`.
pub fn brier(probs: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    check_lengths(probs, labels)?;
    check_probs(probs)?;
    let s: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let d = p - if y { 1.0 } else { 0.0 };
            d * d
        })
        .sum();
    Ok(s / probs.len() as f64)
}

/// Wilcoxon–Mann–Whitney AUC with ties counted one half.
///
/// Scores are grouped by exact equality after sorting, and the pair count is
/// accumulated in integers, so the result equals the pairwise definition.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<Option<f64>, MetricError> {
    check_lengths(scores, labels)?;
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(MetricError::NaN(i));
    }
    let n_pos = labels.iter().filter(|&&y| y).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the number of won pairs
    let mut wins2: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let s = scores[idx[i]];
        let (mut pos_g, mut neg_g) = (0u128, 0u128);
        let mut j = i;
        while j < idx.len() && scores[idx[j]] == s {
            if labels[idx[j]] {
                pos_g += 1;
            } else {
                neg_g += 1;
            }
            j += 1;
        }
        wins2 += 2 * pos_g * neg_below + pos_g * neg_g;
        neg_below += neg_g;
        i = j;
    }
    Ok(Some(wins2 as f64 / (2 * n_pos * n_neg) as f64))
}

/// `|{p ≥ τ} ∩ {y = 1}| / |{p ≥ τ} ∪ {y = 1}|`.
pub fn iou(probs: &[f64], labels: &[bool], tau: f64) -> Result<Option<f64>, MetricError> {
    check_lengths(probs, labels)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(MetricError::BadThreshold(tau));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &y) in probs.iter().zip(labels) {
        let hat = p >= tau;
        inter += (hat && y) as usize;
        union += (hat || y) as usize;
    }
    Ok((union > 0).then(|| inter as f64 / union as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub brier: f64,
    pub auc: Option<f64>,
    pub iou: Option<f64>,
    pub tau: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl MetricsReport {
    /// All three metrics with the probabilities doubling as AUC scores.
    pub fn evaluate(probs: &[f64], labels: &[bool], tau: f64) -> Result<Self, MetricError> {
        let n_pos = labels.iter().filter(|&&y| y).count();
        Ok(MetricsReport {
            brier: brier(probs, labels)?,
            auc: auc(probs, labels)?,
            iou: iou(probs, labels, tau)?,
            tau,
            n_pos,
            n_neg: labels.len() - n_pos,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brier_examples() {
        assert_eq!(brier(&[1.0, 0.0], &[true, false]).unwrap(), 0.0);
        assert_eq!(brier(&[0.5; 3], &[true, false, true]).unwrap(), 0.25);
        assert!((brier(&[0.8, 0.3], &[true, false]).unwrap() - 0.065).abs() < 1e-15);
        assert_eq!(brier(&[], &[]), Err(MetricError::Empty));
        assert!(matches!(brier(&[1.2], &[true]), Err(MetricError::OutOfRange { index: 0, .. })));
        assert!(brier(&[0.5], &[true, false]).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(), Some(1.0));
        assert_eq!(auc(&[0.3; 4], &[false, true, false, true]).unwrap(), Some(0.5));
        assert_eq!(auc(&[0.9, 0.4, 0.6], &[true, false, false]).unwrap(), Some(1.0));
        assert_eq!(auc(&[0.9, 0.4], &[true, true]).unwrap(), None);
        assert!(matches!(auc(&[f64::NAN, 0.0], &[true, false]), Err(MetricError::NaN(0))));
    }

    fn pairwise(scores: &[f64], labels: &[bool]) -> f64 {
        let mut s = 0.0;
        let mut n = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi && !yj {
                    n += 1.0;
                    if scores[i] > scores[j] {
                        s += 1.0;
                    } else if scores[i] == scores[j] {
                        s += 0.5;
                    }
                }
            }
        }
        s / n
    }

    #[test]
    fn auc_matches_pairwise_with_ties() {
        let scores = [0.1, 0.5, 0.5, 0.2, 0.9, 0.5, 0.1, 0.0, 0.9];
        let labels = [false, true, false, true, true, false, true, false, false];
        assert_eq!(auc(&scores, &labels).unwrap().unwrap(), pairwise(&scores, &labels));
        // signed zeros compare equal
        assert_eq!(auc(&[-0.0, 0.0], &[true, false]).unwrap(), Some(0.5));
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&[0.9, 0.1, 0.7], &[true, false, true], 0.5).unwrap(), Some(1.0));
        assert_eq!(iou(&[0.9, 0.1], &[false, true], 0.5).unwrap(), Some(0.0));
        let p = [0.9, 0.9, 0.9, 0.9, 0.1, 0.1];
        let y = [true, true, true, false, true, false];
        assert_eq!(iou(&p, &y, 0.5).unwrap(), Some(0.6));
        assert_eq!(iou(&[0.1, 0.2], &[false, false], 0.5).unwrap(), None);
        assert_eq!(iou(&[0.5], &[true], 0.5).unwrap(), Some(1.0));
        assert!(iou(&[0.5], &[true], 1.0).is_err());
    }

    #[test]
    fn report() {
        let r = MetricsReport::evaluate(&[0.8, 0.3], &[true, false], 0.5).unwrap();
        assert_eq!((r.n_pos, r.n_neg), (1, 1));
        assert_eq!(r.auc, Some(1.0));
        assert_eq!(r.iou, Some(1.0));
    }
}
