//! Synthetic costs that are decomposable in U-shaped curves by construction.
//!
//! `c(X) = u(|X|) + Σ_{i∈X} δᵢ` where `u` strictly decreases down to some
//! cardinality and strictly increases after it, and every `δᵢ` is smaller
//! than the smallest step of `u`. Each chain step then has the sign of the
//! corresponding step of `u`, so every maximal chain is U-shaped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CostError, CostFunction};
use crate::lattice::FeatureSubset;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticUInstance {
    profile: Vec<f64>,
    weights: Vec<f64>,
}

impl SyntheticUInstance {
    pub const MIN_DEGREE: usize = 2;
    pub const MAX_DEGREE: usize = 20;

    /// Validates the U profile (length `n + 1`) and the per-feature weights
    /// (length `n`, each in `[0, g / 2n)` with `g` the smallest profile step).
    pub fn from_parts(profile: Vec<f64>, weights: Vec<f64>) -> Result<Self, CostError> {
        let n = weights.len();
        if profile.len() != n + 1 {
            return Err(CostError::InvalidInstance(format!(
                "profile needs {} values, got {}",
                n + 1,
                profile.len()
            )));
        }
        let bottom = optimum_index(&profile);
        let descending = profile[..=bottom].windows(2).all(|w| w[0] > w[1]);
        let ascending = profile[bottom..].windows(2).all(|w| w[0] < w[1]);
        if !descending || !ascending {
            return Err(CostError::InvalidInstance(
                "profile must strictly decrease then strictly increase".to_string(),
            ));
        }
        let instance = Self { profile, weights };
        let bound = instance.weight_bound();
        if instance.weights.iter().any(|&w| !(0.0..bound).contains(&w)) {
            return Err(CostError::InvalidInstance(format!(
                "weights must lie in [0, {bound})"
            )));
        }
        Ok(instance)
    }

    /// `u(k) = (k − center)²` with zero weights: the cost depends only on
    /// cardinality.
    pub fn symmetric(degree: usize, center: usize) -> Self {
        let profile = (0..=degree)
            .map(|k| (k as f64 - center as f64).powi(2))
            .collect();
        Self {
            profile,
            weights: vec![0.0; degree],
        }
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cardinality at which the profile bottoms out.
    pub fn optimum_cardinality(&self) -> usize {
        optimum_index(&self.profile)
    }

    /// Smallest absolute step of the profile.
    pub fn min_gap(&self) -> f64 {
        self.profile
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn weight_bound(&self) -> f64 {
        self.min_gap() / (2.0 * self.weights.len().max(1) as f64)
    }
}

fn optimum_index(profile: &[f64]) -> usize {
    profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

impl CostFunction for SyntheticUInstance {
    fn degree(&self) -> usize {
        self.weights.len()
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        let mut total = self.profile[subset.len()];
        for i in subset.iter() {
            total += self.weights[i];
        }
        total
    }
}

/// A seeded random instance of degree `n ∈ [2, 20]`. The optimum cardinality
/// is uniform over `0..=n`, profile steps are uniform in `[1, 2)`, and weights
/// are uniform below the bound.
pub fn synth_u_instance(degree: usize, seed: u64) -> Result<SyntheticUInstance, CostError> {
    if !(SyntheticUInstance::MIN_DEGREE..=SyntheticUInstance::MAX_DEGREE).contains(&degree) {
        return Err(CostError::InvalidInstance(format!(
            "degree {degree} outside {}..={}",
            SyntheticUInstance::MIN_DEGREE,
            SyntheticUInstance::MAX_DEGREE
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bottom = rng.gen_range(0..=degree);
    let steps: Vec<f64> = (0..degree).map(|_| 1.0 + rng.gen::<f64>()).collect();
    let mut profile = vec![0.0; degree + 1];
    for k in (0..bottom).rev() {
        profile[k] = profile[k + 1] + steps[k];
    }
    for k in bottom + 1..=degree {
        profile[k] = profile[k - 1] + steps[k - 1];
    }
    let gap = steps.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = gap / (2.0 * degree as f64);
    let weights = (0..degree).map(|_| rng.gen::<f64>() * bound).collect();
    SyntheticUInstance::from_parts(profile, weights)
}
