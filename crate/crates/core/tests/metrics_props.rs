use proptest::prelude::*;
use tropinit::metrics::{auc, brier, iou};

fn labelled(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (prop::collection::vec(0.0f64..1.0, n), prop::collection::vec(any::<bool>(), n))
        .prop_filter("both classes", |(_, y)| y.iter().any(|&b| b) && y.iter().any(|&b| !b))
}

proptest! {
    #[test]
    fn auc_invariant_under_monotone_maps((s, y) in labelled(40), a in 0.1f64..5.0, b in -3.0f64..3.0) {
        let base = auc(&s, &y).unwrap().unwrap();
        let affine: Vec<f64> = s.iter().map(|v| a * v + b).collect();
        let cubic: Vec<f64> = s.iter().map(|v| (v - 0.3).powi(3)).collect();
        let logit: Vec<f64> = s.iter().map(|v| (v / (1.0 - v)).ln()).collect();
        prop_assert_eq!(auc(&affine, &y).unwrap().unwrap(), base);
        prop_assert_eq!(auc(&cubic, &y).unwrap().unwrap(), base);
        prop_assert_eq!(auc(&logit, &y).unwrap().unwrap(), base);
    }

    #[test]
    fn auc_of_negated_scores_complements((s, y) in labelled(30)) {
        let mut sorted = s.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[0] != w[1]));
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let total = auc(&s, &y).unwrap().unwrap() + auc(&neg, &y).unwrap().unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_with_heavy_ties_matches_pairwise(raw in prop::collection::vec(0u8..4, 25), y in prop::collection::vec(any::<bool>(), 25)) {
        prop_assume!(y.iter().any(|&b| b) && y.iter().any(|&b| !b));
        let s: Vec<f64> = raw.iter().map(|&v| v as f64 / 4.0).collect();
        let (mut won, mut pairs) = (0.0, 0.0);
        for i in 0..s.len() {
            for j in 0..s.len() {
                if y[i] && !y[j] {
                    pairs += 1.0;
                    won += if s[i] > s[j] { 1.0 } else if s[i] == s[j] { 0.5 } else { 0.0 };
                }
            }
        }
        prop_assert_eq!(auc(&s, &y).unwrap().unwrap(), won / pairs);
    }

    #[test]
    fn constant_brier_minimized_at_mean(y in prop::collection::vec(any::<bool>(), 1..60)) {
        let mean = y.iter().filter(|&&b| b).count() as f64 / y.len() as f64;
        let at_mean = brier(&vec![mean; y.len()], &y).unwrap();
        for k in 0..=200 {
            let c = k as f64 / 200.0;
            prop_assert!(brier(&vec![c; y.len()], &y).unwrap() >= at_mean - 1e-15);
        }
    }

    #[test]
    fn iou_shrinks_to_zero_as_threshold_rises((s, y) in labelled(40)) {
        let mut taus: Vec<f64> = s.iter().copied().filter(|&t| t > 0.0).collect();
        let top = s.iter().copied().fold(0.0, f64::max);
        taus.push((top + 1.0) / 2.0);
        taus.sort_by(f64::total_cmp);
        // with every label positive the IoU is the predicted fraction
        let all = vec![true; s.len()];
        let mut prev = f64::INFINITY;
        for &t in &taus {
            let v = iou(&s, &all, t).unwrap().unwrap();
            prop_assert!(v <= prev);
            prev = v;
        }
        prop_assert_eq!(iou(&s, &y, *taus.last().unwrap()).unwrap(), Some(0.0));
        prop_assert_eq!(iou(&s, &all, *taus.last().unwrap()).unwrap(), Some(0.0));
    }
}
