//! Penalized mean conditional entropy of the class given a feature subset.
//!
//! Patterns observed exactly once are charged the maximal entropy (1 after
//! normalizing logarithms to base `|Y|`), which is what makes the cost rise
//! again once the sample no longer covers the feature space.

use std::collections::HashMap;

use super::{CostError, CostFunction};
use crate::data::Dataset;
use crate::lattice::FeatureSubset;

/// Per-pattern class tallies for one projection of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MceModel {
    class_count: usize,
    sample_count: usize,
    tallies: Vec<Vec<u32>>,
}

impl MceModel {
    /// `tallies[p][y]` counts samples with pattern `p` and class `y`.
    pub fn from_tallies(class_count: usize, tallies: Vec<Vec<u32>>) -> Self {
        debug_assert!(tallies.iter().all(|t| t.len() == class_count));
        let sample_count = tallies.iter().flatten().map(|&c| c as usize).sum();
        Self {
            class_count,
            sample_count,
            tallies,
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn pattern_count(&self) -> usize {
        self.tallies.len()
    }

    pub fn tallies(&self) -> &[Vec<u32>] {
        &self.tallies
    }
}

/// `N/t + Σ_{x: P̂(x) > 1/t} P̂(x)·Ĥ(Y|x)` with entropies in base `|Y|`,
/// where `N` counts the patterns seen exactly once.
pub fn penalized_mce(model: &MceModel) -> Result<f64, CostError> {
    if model.class_count < 2 {
        return Err(CostError::TooFewClasses(model.class_count));
    }
    if model.sample_count == 0 {
        return Err(CostError::EmptyModel);
    }
    // Count form: t·cost = N + Σ (s·ln s − Σ c·ln c) / ln|Y| over patterns
    // seen s > 1 times. Pure and single patterns add exactly nothing, so
    // costs that agree in exact arithmetic also agree bit for bit there.
    let x_ln_x = |x: u32| if x <= 1 { 0.0 } else { x as f64 * (x as f64).ln() };
    let mut singletons = 0u64;
    let mut terms: Vec<f64> = Vec::new();
    for counts in &model.tallies {
        let seen: u32 = counts.iter().sum();
        if seen == 1 {
            singletons += 1;
            continue;
        }
        if counts.iter().filter(|&&c| c > 0).count() < 2 {
            continue;
        }
        let spread = x_ln_x(seen) - counts.iter().map(|&c| x_ln_x(c)).sum::<f64>();
        terms.push(spread);
    }
    terms.sort_by(f64::total_cmp);
    let spread: f64 = terms.iter().sum();
    let log_base = (model.class_count as f64).ln();
    let total = (singletons as f64 + spread / log_base) / model.sample_count as f64;
    Ok(total.clamp(0.0, 1.0))
}

/// Dataset recoded to dense per-feature symbols, column-major.
#[derive(Debug, Clone)]
struct Encoded {
    sample_count: usize,
    class_count: usize,
    codes: Vec<u32>,
    arity: Vec<u32>,
    labels: Vec<u32>,
}

impl Encoded {
    fn new(dataset: &Dataset) -> Self {
        let t = dataset.sample_count();
        let n = dataset.feature_count();
        let mut codes = Vec::with_capacity(t * n);
        let mut arity = Vec::with_capacity(n);
        for j in 0..n {
            let mut symbols: Vec<u64> = Vec::new();
            for v in dataset.column(j) {
                let bits = if v == 0.0 { 0 } else { v.to_bits() };
                let code = match symbols.iter().position(|&s| s == bits) {
                    Some(c) => c,
                    None => {
                        symbols.push(bits);
                        symbols.len() - 1
                    }
                };
                codes.push(code as u32);
            }
            arity.push(symbols.len().max(1) as u32);
        }
        Self {
            sample_count: t,
            class_count: dataset.class_count(),
            codes,
            arity,
            labels: dataset.labels().to_vec(),
        }
    }

    fn column(&self, feature: usize) -> &[u32] {
        &self.codes[feature * self.sample_count..(feature + 1) * self.sample_count]
    }

    /// Groups samples by their values on `subset`, refining one feature at a time.
    fn project(&self, subset: &FeatureSubset) -> MceModel {
        let t = self.sample_count;
        let mut group = vec![0u32; t];
        let mut groups = 1usize;
        let mut dense: Vec<u32> = Vec::new();
        let mut sparse: HashMap<u64, u32> = HashMap::new();
        for f in subset.iter() {
            let column = self.column(f);
            let arity = self.arity[f] as usize;
            let mut next = 0u32;
            if groups * arity <= 1 << 16 {
                dense.clear();
                dense.resize(groups * arity, u32::MAX);
                for (g, &code) in group.iter_mut().zip(column) {
                    let key = *g as usize * arity + code as usize;
                    if dense[key] == u32::MAX {
                        dense[key] = next;
                        next += 1;
                    }
                    *g = dense[key];
                }
            } else {
                sparse.clear();
                for (g, &code) in group.iter_mut().zip(column) {
                    let key = *g as u64 * arity as u64 + code as u64;
                    *g = *sparse.entry(key).or_insert_with(|| {
                        next += 1;
                        next - 1
                    });
                }
            }
            groups = next as usize;
        }
        let mut tallies = vec![vec![0u32; self.class_count]; groups];
        for (&g, &y) in group.iter().zip(&self.labels) {
            tallies[g as usize][y as usize] += 1;
        }
        MceModel {
            class_count: self.class_count,
            sample_count: t,
            tallies,
        }
    }
}

/// Groups the samples of `dataset` by their restriction to `subset`.
///
/// Feature values are treated as opaque symbols, so the dataset should be
/// discretized first. Patterns are numbered in order of first appearance.
pub fn project_dataset(dataset: &Dataset, subset: &FeatureSubset) -> MceModel {
    debug_assert_eq!(subset.degree(), dataset.feature_count());
    Encoded::new(dataset).project(subset)
}

/// The penalized mean conditional entropy as a [`CostFunction`].
#[derive(Debug, Clone)]
pub struct PenalizedMce {
    encoded: Encoded,
}

impl PenalizedMce {
    pub fn new(dataset: &Dataset) -> Result<Self, CostError> {
        if dataset.sample_count() == 0 {
            return Err(CostError::EmptyModel);
        }
        if dataset.class_count() < 2 {
            return Err(CostError::TooFewClasses(dataset.class_count()));
        }
        Ok(Self {
            encoded: Encoded::new(dataset),
        })
    }

    pub fn model(&self, subset: &FeatureSubset) -> MceModel {
        self.encoded.project(subset)
    }
}

impl CostFunction for PenalizedMce {
    fn degree(&self) -> usize {
        self.encoded.arity.len()
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        penalized_mce(&self.encoded.project(subset)).expect("validated at construction")
    }
}
