//! Comparison baselines: sequential forward floating selection and full search.

use thiserror::Error;

use crate::cost::{CostFunction, EvaluationLedger, TableCost};
use crate::lattice::FeatureSubset;
use crate::search::ResultList;

/// Largest degree [`exhaustive`] accepts without an explicit override.
pub const EXHAUSTIVE_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("full search over {0} features needs 2^{0} evaluations; pass the override to allow it")]
    TooLarge(usize),
    #[error("full search cannot enumerate {0} features")]
    Unsupported(usize),
}

#[derive(Debug, Clone)]
pub struct BaselineOutcome {
    pub results: ResultList,
    pub ledger: EvaluationLedger,
}

impl BaselineOutcome {
    pub fn best(&self) -> Option<(&FeatureSubset, f64)> {
        self.results.best()
    }

    pub fn computed_nodes(&self) -> usize {
        self.ledger.distinct_count()
    }
}

/// Evaluates every subset.
pub fn exhaustive<C: CostFunction + ?Sized>(
    cost: &C,
    result_capacity: usize,
    allow_large: bool,
) -> Result<BaselineOutcome, BaselineError> {
    let n = cost.degree();
    if n > EXHAUSTIVE_GUARD && !allow_large {
        return Err(BaselineError::TooLarge(n));
    }
    if n >= 64 {
        return Err(BaselineError::Unsupported(n));
    }
    let mut ledger = EvaluationLedger::counting_only();
    let mut results = ResultList::new(result_capacity.max(1));
    for mask in 0..1u64 << n {
        let subset = FeatureSubset::from_mask(n, mask);
        let c = ledger.evaluate(cost, &subset);
        results.update(&subset, c);
    }
    Ok(BaselineOutcome { results, ledger })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SffsConfig {
    /// How far past the target (or best) dimension the search keeps going.
    pub delta: usize,
    /// Desired dimension; `None` sweeps, stopping `delta` past the best size.
    pub target_dim: Option<usize>,
    pub result_capacity: usize,
}

impl Default for SffsConfig {
    fn default() -> Self {
        Self {
            delta: 3,
            target_dim: None,
            result_capacity: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SffsOutcome {
    pub results: ResultList,
    pub ledger: EvaluationLedger,
    /// Cheapest subset recorded at each cardinality `0..=n`.
    pub best_per_size: Vec<Option<(FeatureSubset, f64)>>,
}

impl SffsOutcome {
    pub fn best(&self) -> Option<(&FeatureSubset, f64)> {
        self.results.best()
    }

    pub fn computed_nodes(&self) -> usize {
        self.ledger.distinct_count()
    }

    /// Cheapest subset at the given cardinality, if one was recorded.
    pub fn best_of_size(&self, size: usize) -> Option<(&FeatureSubset, f64)> {
        self.best_per_size
            .get(size)
            .and_then(|e| e.as_ref())
            .map(|(s, c)| (s, *c))
    }
}

struct Sffs<'a, C: ?Sized> {
    cost: &'a C,
    ledger: EvaluationLedger,
    best: Vec<Option<(FeatureSubset, f64)>>,
}

impl<C: CostFunction + ?Sized> Sffs<'_, C> {
    fn eval(&mut self, subset: &FeatureSubset) -> f64 {
        self.ledger.evaluate(self.cost, subset)
    }

    fn record(&mut self, subset: &FeatureSubset, cost: f64) {
        let slot = &mut self.best[subset.len()];
        if slot.as_ref().is_none_or(|(_, c)| cost < *c) {
            *slot = Some((subset.clone(), cost));
        }
    }

    /// Cardinality of the cheapest recorded subset (smallest on ties).
    fn best_size(&self) -> usize {
        let mut best: Option<(usize, f64)> = None;
        for (k, entry) in self.best.iter().enumerate() {
            if let Some((_, c)) = entry {
                if best.is_none_or(|(_, b)| *c < b) {
                    best = Some((k, *c));
                }
            }
        }
        best.map_or(0, |(k, _)| k)
    }

    /// Cheapest one-feature change of `current`; lowest index wins ties.
    fn best_move(&mut self, current: &FeatureSubset, add: bool) -> Option<(FeatureSubset, f64)> {
        let candidates: Vec<FeatureSubset> = if add {
            current.iter_absent().map(|i| current.with(i)).collect()
        } else {
            current.iter().map(|i| current.without(i)).collect()
        };
        let mut best: Option<(FeatureSubset, f64)> = None;
        for c in candidates {
            let v = self.eval(&c);
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((c, v));
            }
        }
        best
    }
}

/// Sequential forward floating selection, minimizing cost.
///
/// Each forward step adds the feature giving the lowest cost; after it,
/// features are removed for as long as the removal beats the best subset
/// recorded at the smaller size. The walk stops once its size reaches
/// `target + delta` (or `best size + delta` when sweeping), capped at `n`.
pub fn sffs<C: CostFunction + ?Sized>(cost: &C, config: &SffsConfig) -> SffsOutcome {
    let n = cost.degree();
    let mut run = Sffs {
        cost,
        ledger: EvaluationLedger::new(),
        best: vec![None; n + 1],
    };
    let mut current = FeatureSubset::empty(n);
    let c0 = run.eval(&current);
    run.record(&current, c0);

    loop {
        let limit = match config.target_dim {
            Some(d) => (d + config.delta).min(n),
            None => (run.best_size() + config.delta).max(1).min(n),
        };
        if current.len() >= limit {
            break;
        }
        let (next, c) = run.best_move(&current, true).expect("current is not full");
        current = next;
        run.record(&current, c);

        while current.len() >= 2 {
            let (smaller, c) = run.best_move(&current, false).expect("current is not empty");
            let improves = run.best[smaller.len()]
                .as_ref()
                .is_some_and(|(_, b)| c < *b);
            if !improves {
                break;
            }
            current = smaller;
            run.record(&current, c);
        }
    }

    let mut results = ResultList::new(config.result_capacity.max(1));
    for (s, c) in run.best.iter().flatten() {
        results.update(s, *c);
    }
    SffsOutcome {
        results,
        ledger: run.ledger,
        best_per_size: run.best,
    }
}

/// A 6-feature cost on which greedy forward selection is led away from the
/// optimum: features 0 and 1 are individually best, but the cheapest subset is
/// the pair {4, 5}. The cost is decomposable in U-shaped curves.
pub fn nested_trap() -> TableCost {
    const PROFILE: [f64; 7] = [10.0, 5.0, 1.0, 4.0, 7.0, 10.0, 13.0];
    const WEIGHTS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.5, 0.5];
    let pair = FeatureSubset::from_indices(6, [4, 5]);
    TableCost::from_fn(6, |x| {
        let mut c = PROFILE[x.len()] + x.iter().map(|i| WEIGHTS[i]).sum::<f64>();
        if *x == pair {
            c -= 1.5;
        }
        c
    })
}
