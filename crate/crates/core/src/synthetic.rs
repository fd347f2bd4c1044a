//! Seeded synthetic datasets: isotropic Gaussian class clusters.

use alloc::vec::Vec;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::eval::Dataset;
use crate::matrix::Matrix;

/// Parameters of a blob dataset. `separation` is the minimum pairwise
/// distance between class centers in units of the within-class standard
/// deviation (which is 1) times √d.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub separation: f64,
    pub seed: u64,
}

/// Generate isotropic Gaussian clusters with seeded centers at pairwise
/// distance ≥ `separation·√d`. Class counts differ by at most one.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_classes < 2 {
        return Err(Error::InvalidSpec("need at least two classes"));
    }
    if spec.n_features == 0 {
        return Err(Error::InvalidSpec("need at least one feature"));
    }
    if !(spec.separation.is_finite() && spec.separation > 0.0) {
        return Err(Error::InvalidSpec("separation must be positive"));
    }
    if spec.n_samples < spec.n_classes * 5 {
        return Err(Error::InvalidSpec("need at least five samples per class"));
    }

    let d = spec.n_features;
    let min_dist = spec.separation * (d as f64).sqrt();
    let center_scale = 1.5 * spec.separation;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(spec.n_classes);
    for _ in 0..spec.n_classes {
        let mut attempts = 0;
        loop {
            let candidate: Vec<f64> =
                (0..d).map(|_| center_scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let far_enough = centers.iter().all(|c| {
                let dist2: f64 =
                    c.iter().zip(&candidate).map(|(&a, &b)| (a - b) * (a - b)).sum();
                dist2.sqrt() >= min_dist
            });
            if far_enough {
                centers.push(candidate);
                break;
            }
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::InvalidSpec("could not place separated class centers"));
            }
        }
    }

    let base = spec.n_samples / spec.n_classes;
    let extra = spec.n_samples % spec.n_classes;
    let mut features = Matrix::zeros(spec.n_samples, d);
    let mut labels = Vec::with_capacity(spec.n_samples);
    let mut row = 0;
    for (class, center) in centers.iter().enumerate() {
        let count = base + usize::from(class < extra);
        for _ in 0..count {
            let out = features.row_mut(row);
            for (v, &c) in out.iter_mut().zip(center) {
                *v = c + rng.sample::<f64, _>(StandardNormal);
            }
            labels.push(class);
            row += 1;
        }
    }
    Dataset::new(features, labels, spec.n_classes)
}
