//! Cost functions over feature subsets and the memoizing evaluation ledger.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::lattice::{check_width, FeatureSubset, LatticeError};

mod entropy;
mod synthetic;

pub use entropy::{penalized_mce, project_dataset, MceModel, PenalizedMce};
pub use synthetic::{synth_u_instance, SyntheticUInstance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("model has no samples")]
    EmptyModel,
    #[error("model needs at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("invalid synthetic instance: {0}")]
    InvalidInstance(String),
}

/// A deterministic cost `c: 𝒫(W) → ℝ`.
pub trait CostFunction {
    /// Number of features `|W|`.
    fn degree(&self) -> usize;

    fn cost(&self, subset: &FeatureSubset) -> f64;
}

impl<C: CostFunction + ?Sized> CostFunction for &C {
    fn degree(&self) -> usize {
        (**self).degree()
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        (**self).cost(subset)
    }
}

impl<C: CostFunction + ?Sized> CostFunction for Box<C> {
    fn degree(&self) -> usize {
        (**self).degree()
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        (**self).cost(subset)
    }
}

/// Cache of evaluated subsets; its size is the "computed nodes" metric.
#[derive(Debug, Clone, Default)]
pub struct EvaluationLedger {
    cache: HashMap<FeatureSubset, f64>,
    uncached: usize,
    memoize: bool,
}

impl EvaluationLedger {
    pub fn new() -> Self {
        Self {
            cache: HashMap::new(),
            uncached: 0,
            memoize: true,
        }
    }

    /// A ledger that only counts. Meant for callers that visit each subset
    /// at most once (full enumeration), where caching 2ⁿ entries is waste.
    pub fn counting_only() -> Self {
        Self {
            cache: HashMap::new(),
            uncached: 0,
            memoize: false,
        }
    }

    pub fn evaluate<C: CostFunction + ?Sized>(&mut self, cost: &C, subset: &FeatureSubset) -> f64 {
        debug_assert_eq!(subset.degree(), cost.degree());
        if !self.memoize {
            self.uncached += 1;
            return cost.cost(subset);
        }
        if let Some(&v) = self.cache.get(subset) {
            return v;
        }
        let v = cost.cost(subset);
        self.cache.insert(subset.clone(), v);
        v
    }

    pub fn lookup(&self, subset: &FeatureSubset) -> Option<f64> {
        self.cache.get(subset).copied()
    }

    pub fn contains(&self, subset: &FeatureSubset) -> bool {
        self.cache.contains_key(subset)
    }

    pub fn distinct_count(&self) -> usize {
        self.cache.len() + self.uncached
    }

    /// Cached `(subset, cost)` pairs in unspecified order.
    pub fn entries(&self) -> impl Iterator<Item = (&FeatureSubset, f64)> {
        self.cache.iter().map(|(k, &v)| (k, v))
    }
}

/// Evaluates `subset` through `ledger`, counting only cache misses.
pub fn evaluate_counted<C: CostFunction + ?Sized>(
    cost: &C,
    subset: &FeatureSubset,
    ledger: &mut EvaluationLedger,
) -> Result<f64, CostError> {
    check_width(cost.degree(), subset)?;
    Ok(ledger.evaluate(cost, subset))
}

/// Explicit cost table indexed by subset mask, for small hand-built lattices.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCost {
    degree: usize,
    values: Vec<f64>,
}

impl TableCost {
    pub const MAX_DEGREE: usize = 24;

    pub fn from_fn(degree: usize, f: impl Fn(&FeatureSubset) -> f64) -> Self {
        assert!(
            (1..=Self::MAX_DEGREE).contains(&degree),
            "table costs support degrees 1..={}",
            Self::MAX_DEGREE
        );
        let values = (0..1u64 << degree)
            .map(|mask| f(&FeatureSubset::from_mask(degree, mask)))
            .collect();
        Self { degree, values }
    }

    /// Values indexed by mask (bit `i` set iff feature `i` is present).
    pub fn from_values(degree: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), 1usize << degree, "table size must be 2^degree");
        Self { degree, values }
    }

    /// Tabulates any cost function.
    pub fn tabulate<C: CostFunction + ?Sized>(cost: &C) -> Self {
        Self::from_fn(cost.degree(), |x| cost.cost(x))
    }

    pub fn set(&mut self, subset: &FeatureSubset, value: f64) {
        let mask = subset.to_mask().expect("table degree fits a word");
        self.values[mask as usize] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl CostFunction for TableCost {
    fn degree(&self) -> usize {
        self.degree
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        let mask = subset.to_mask().expect("table degree fits a word");
        self.values[mask as usize]
    }
}

/// Wraps a closure as a cost function.
pub struct FnCost<F> {
    degree: usize,
    f: F,
}

impl<F: Fn(&FeatureSubset) -> f64> FnCost<F> {
    pub fn new(degree: usize, f: F) -> Self {
        Self { degree, f }
    }
}

impl<F: Fn(&FeatureSubset) -> f64> CostFunction for FnCost<F> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        (self.f)(subset)
    }
}

/// A uniformly random maximal chain `∅ ⊂ … ⊂ W` (n + 1 elements).
pub fn sample_maximal_chain<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Vec<FeatureSubset> {
    let mut order: Vec<usize> = (0..degree).collect();
    order.shuffle(rng);
    let mut current = FeatureSubset::empty(degree);
    let mut chain = Vec::with_capacity(degree + 1);
    chain.push(current.clone());
    for i in order {
        current.insert(i);
        chain.push(current.clone());
    }
    chain
}

/// Whether a sequence of costs along a chain is U-shaped: no element is
/// strictly above both something before it and something after it.
pub fn is_u_shaped(costs: &[f64]) -> bool {
    let n = costs.len();
    if n < 3 {
        return true;
    }
    let mut suffix_min = vec![f64::INFINITY; n];
    for j in (0..n - 1).rev() {
        suffix_min[j] = suffix_min[j + 1].min(costs[j + 1]);
    }
    let mut prefix_min = f64::INFINITY;
    for j in 0..n {
        if prefix_min < costs[j] && suffix_min[j] < costs[j] {
            return false;
        }
        prefix_min = prefix_min.min(costs[j]);
    }
    true
}

/// Share of `samples` random maximal chains whose costs are not U-shaped.
/// Returns 0 when `samples` is 0.
pub fn oscillating_chain_fraction<C: CostFunction + ?Sized, R: Rng + ?Sized>(
    cost: &C,
    samples: usize,
    rng: &mut R,
) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let oscillating = (0..samples)
        .filter(|_| {
            let chain = sample_maximal_chain(cost.degree(), rng);
            let costs: Vec<f64> = chain.iter().map(|x| cost.cost(x)).collect();
            !is_u_shaped(&costs)
        })
        .count();
    oscillating as f64 / samples as f64
}
