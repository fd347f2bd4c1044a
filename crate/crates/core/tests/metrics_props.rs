//! Metric identities and the binary-AUC equivalence of the RG estimator,
//! checked against a brute-force pairwise oracle.

mod common;

use common::pairwise_auc;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqsafe_core::matrix::Matrix;
use vqsafe_core::metrics::{
    curve_area, cvm_divergence, gini_index, rg_score, rga_multiclass, rgr_score, ScorePair,
};
use vqsafe_core::model::ProbMatrix;

// Acceptance criterion: 200 random binary instances, scores drawn both from
// a continuous range and from a coarse grid that forces ties; rg_score must
// equal the brute-force pairwise AUC within 1e-12.
#[test]
fn rg_equals_pairwise_auc_on_binary_references() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for trial in 0..200 {
        let n = rng.random_range(4..=200usize);
        let mut labels: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..2u32))).collect();
        // Guarantee both classes.
        labels[0] = 0.0;
        labels[1] = 1.0;
        let with_ties = trial % 2 == 0;
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if with_ties {
                    f64::from(rng.random_range(0..5u32)) / 4.0
                } else {
                    rng.random_range(0.0..1.0)
                }
            })
            .collect();
        let auc = pairwise_auc(&labels, &scores);
        let rg = rg_score(&ScorePair::new(labels.clone(), scores.clone()).unwrap()).unwrap();
        assert!(
            (rg - auc).abs() < 1e-12,
            "trial {}: rg {} vs auc {} (n={}, ties={})",
            trial,
            rg,
            auc,
            n,
            with_ties
        );
    }
}

#[test]
fn rga_matches_weighted_auc_oracle_on_random_multiclass_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    for _ in 0..50 {
        let n = rng.random_range(6..=60usize);
        let n_classes = rng.random_range(2..=4usize);
        let labels: Vec<usize> = (0..n)
            .enumerate()
            .map(|(i, _)| if i < n_classes { i } else { rng.random_range(0..n_classes) })
            .collect();
        let mut probs = Matrix::zeros(n, n_classes);
        for i in 0..n {
            let row: Vec<f64> =
                (0..n_classes).map(|_| f64::from(rng.random_range(1..6u32))).collect();
            let sum: f64 = row.iter().sum();
            for (c, v) in row.iter().enumerate() {
                probs.set(i, c, v / sum);
            }
        }
        let probs = ProbMatrix::new(probs).unwrap();

        let mut expect = 0.0;
        for c in 0..n_classes {
            let indicator: Vec<f64> =
                labels.iter().map(|&y| if y == c { 1.0 } else { 0.0 }).collect();
            let count = indicator.iter().sum::<f64>();
            if count == 0.0 {
                continue;
            }
            expect += (count / n as f64) * pairwise_auc(&indicator, &probs.column(c));
        }
        let got = rga_multiclass(&labels, &probs).unwrap();
        assert!((got - expect).abs() < 1e-12, "rga {} vs weighted auc {}", got, expect);
    }
}

#[test]
fn rgr_on_identical_matrices_is_exactly_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..20 {
        let n = rng.random_range(4..=40usize);
        let mut m = Matrix::zeros(n, 3);
        for i in 0..n {
            let row: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
            let sum: f64 = row.iter().sum();
            for (c, v) in row.iter().enumerate() {
                m.set(i, c, v / sum);
            }
        }
        let probs = ProbMatrix::new(m).unwrap();
        let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
        assert_eq!(rgr_score(&probs, &probs, &labels).unwrap(), 1.0);
    }
}

proptest! {
    #[test]
    fn rg_is_invariant_under_increasing_transforms(
        values in prop::collection::vec(-50.0f64..50.0, 3..50),
        candidate in prop::collection::vec(-50.0f64..50.0, 3..50),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let n = values.len().min(candidate.len());
        let reference = values[..n].to_vec();
        let cand = candidate[..n].to_vec();
        prop_assume!(reference.iter().any(|&v| v != reference[0]));

        let base = rg_score(&ScorePair::new(reference.clone(), cand.clone()).unwrap()).unwrap();
        // exp is strictly increasing; so is any positive affine map.
        let warped: Vec<f64> = cand.iter().map(|&v| (scale * v / 50.0 + shift).exp()).collect();
        let transformed = rg_score(&ScorePair::new(reference, warped).unwrap()).unwrap();
        prop_assert!((base - transformed).abs() < 1e-9, "{} vs {}", base, transformed);
    }

    #[test]
    fn rg_stays_in_unit_interval(
        reference in prop::collection::vec(-10.0f64..10.0, 2..60),
        candidate in prop::collection::vec(-10.0f64..10.0, 2..60),
    ) {
        let n = reference.len().min(candidate.len());
        prop_assume!(n >= 2);
        let r = reference[..n].to_vec();
        prop_assume!(r.iter().any(|&v| v != r[0]));
        let pair = ScorePair::new(r, candidate[..n].to_vec()).unwrap();
        let rg = rg_score(&pair).unwrap();
        prop_assert!((0.0..=1.0).contains(&rg));
    }

    #[test]
    fn gini_is_scale_invariant(
        values in prop::collection::vec(0.0f64..100.0, 2..40),
        scale in 0.01f64..100.0,
    ) {
        prop_assume!(values.iter().sum::<f64>() > 0.0);
        let scaled: Vec<f64> = values.iter().map(|&v| v * scale).collect();
        let a = gini_index(&values).unwrap();
        let b = gini_index(&scaled).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..1.0).contains(&a) || a == 0.0);
    }

    #[test]
    fn cvm_is_nonnegative_and_zero_on_self(
        values in prop::collection::vec(-5.0f64..5.0, 2..40),
        other in prop::collection::vec(-5.0f64..5.0, 2..40),
        p in 1u32..3,
    ) {
        let n = values.len().min(other.len());
        prop_assume!(n >= 2);
        let a = values[..n].to_vec();
        let b = other[..n].to_vec();
        let self_pair = ScorePair::new(a.clone(), a.clone()).unwrap();
        prop_assert_eq!(cvm_divergence(&self_pair, p).unwrap(), 0.0);
        let cross = ScorePair::new(a, b).unwrap();
        prop_assert!(cvm_divergence(&cross, p).unwrap() >= 0.0);
    }

    #[test]
    fn curve_area_respects_pointwise_dominance(
        scores_low in prop::collection::vec(0.0f64..1.0, 3..12),
        bumps in prop::collection::vec(0.0f64..0.5, 3..12),
    ) {
        let n = scores_low.len().min(bumps.len());
        prop_assume!(n >= 2);
        let levels: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let low = scores_low[..n].to_vec();
        let high: Vec<f64> = low.iter().zip(&bumps[..n]).map(|(&s, &b)| s + b).collect();
        let a_low = curve_area(&levels, &low).unwrap();
        let a_high = curve_area(&levels, &high).unwrap();
        prop_assert!(a_high >= a_low - 1e-12);
    }
}
