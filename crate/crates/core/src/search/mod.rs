//! The U-curve branch-and-bound search.
//!
//! Each iteration picks a direction, builds a chain from a minimal (or
//! maximal) element of the residual space until the cost strictly rises,
//! cuts the intervals below and above the chain minimum, and then exhausts
//! the neighbourhood of that minimum. The run ends when the restriction sets
//! certify that nothing is left, or when a node budget or cost target halts it.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cost::{CostFunction, EvaluationLedger};
use crate::lattice::{
    maximal_element, minimal_element, space_is_exhausted, Adjacency, FeatureSubset,
    LowerRestrictions, RestrictionKind, SearchSpaceView, UpperRestrictions,
};

mod results;
mod trace;

pub use results::ResultList;
pub use trace::{RestrictionOrigin, TraceEvent};

/// The random source every stochastic choice of a run draws from.
pub type SeededRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("direction probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("result capacity must be at least 1")]
    ZeroCapacity,
    #[error("exhaust trial limit must be at least 1")]
    ZeroTrialLimit,
    #[error("lattice degree {0} is not supported")]
    InvalidDegree(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Start at a minimal element and climb.
    DownUp,
    /// Start at a maximal element and descend.
    UpDown,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DownUp => "down_up",
            Self::UpDown => "up_down",
        })
    }
}

/// How each iteration chooses its direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionPolicy {
    /// Down-up with a fixed probability.
    Fixed(f64),
    /// Down-up with probability `(1 + lower) / (2 + total)`, where the tally
    /// counts local minima found in the lower and upper halves of the lattice.
    Adaptive,
}

/// Early stop on a cost threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopTarget {
    pub threshold: f64,
    /// Also stop on a cost equal to the threshold.
    pub inclusive: bool,
}

impl StopTarget {
    pub fn below(threshold: f64) -> Self {
        Self {
            threshold,
            inclusive: false,
        }
    }

    pub fn at_or_below(threshold: f64) -> Self {
        Self {
            threshold,
            inclusive: true,
        }
    }

    fn is_met(&self, cost: f64) -> bool {
        cost < self.threshold || (self.inclusive && cost == self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub result_capacity: usize,
    pub direction_policy: DirectionPolicy,
    /// Budget of distinct evaluations; `None` runs until the space is exhausted.
    pub max_evaluations: Option<usize>,
    /// Stop scanning a stack element's neighbours after this many consecutive
    /// costlier ones.
    pub exhaust_trial_limit: Option<usize>,
    pub stop_target: Option<StopTarget>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            result_capacity: 1,
            direction_policy: DirectionPolicy::Fixed(0.5),
            max_evaluations: None,
            exhaust_trial_limit: None,
            stop_target: None,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.result_capacity == 0 {
            return Err(SearchError::ZeroCapacity);
        }
        if let DirectionPolicy::Fixed(p) = self.direction_policy {
            if !(0.0..=1.0).contains(&p) {
                return Err(SearchError::InvalidProbability(p));
            }
        }
        if self.exhaust_trial_limit == Some(0) {
            return Err(SearchError::ZeroTrialLimit);
        }
        Ok(())
    }
}

/// Local minima seen so far, split by lattice half (`|M| ≤ n/2` is lower).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MinimaTally {
    pub lower_half: usize,
    pub upper_half: usize,
}

impl MinimaTally {
    pub fn total(&self) -> usize {
        self.lower_half + self.upper_half
    }

    pub fn record(&mut self, subset: &FeatureSubset) {
        if 2 * subset.len() <= subset.degree() {
            self.lower_half += 1;
        } else {
            self.upper_half += 1;
        }
    }

    pub fn down_up_probability(&self) -> f64 {
        (1 + self.lower_half) as f64 / (2 + self.total()) as f64
    }
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub lower: LowerRestrictions,
    pub upper: UpperRestrictions,
    pub results: ResultList,
    pub ledger: EvaluationLedger,
    pub rng: SeededRng,
    pub minima: MinimaTally,
}

impl SearchState {
    pub fn new(degree: usize, config: &SearchConfig) -> Self {
        Self {
            lower: LowerRestrictions::new(degree),
            upper: UpperRestrictions::new(degree),
            results: ResultList::new(config.result_capacity.max(1)),
            ledger: EvaluationLedger::new(),
            rng: SeededRng::seed_from_u64(config.seed),
            minima: MinimaTally::default(),
        }
    }

    pub fn view(&self) -> SearchSpaceView<'_> {
        SearchSpaceView::new(&self.lower, &self.upper)
    }

    pub fn is_exhausted(&self) -> bool {
        space_is_exhausted(&self.lower, &self.upper)
    }
}

/// Interrupts a run before the space is exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    Budget,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Completion {
    Exhausted,
    BudgetReached,
    TargetReached,
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exhausted => "exhausted",
            Self::BudgetReached => "budget",
            Self::TargetReached => "target",
        })
    }
}

impl From<Halt> for Completion {
    fn from(h: Halt) -> Self {
        match h {
            Halt::Budget => Self::BudgetReached,
            Halt::Target => Self::TargetReached,
        }
    }
}

/// The three elements around a chain minimum.
///
/// Down-up: `previous ⊂ minimum ⊂ stop`. Up-down: `previous ⊃ minimum ⊃ stop`.
/// `previous` is the last chain element costing strictly more than `minimum`
/// and `stop` the first one after it that does.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub direction: Direction,
    pub previous: Option<FeatureSubset>,
    pub minimum: FeatureSubset,
    pub stop: Option<FeatureSubset>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub results: ResultList,
    pub ledger: EvaluationLedger,
    pub completion: Completion,
    pub iterations: usize,
    pub lower: LowerRestrictions,
    pub upper: UpperRestrictions,
}

impl SearchOutcome {
    pub fn best(&self) -> Option<(&FeatureSubset, f64)> {
        self.results.best()
    }

    pub fn computed_nodes(&self) -> usize {
        self.ledger.distinct_count()
    }
}

type TraceSink<'c> = Box<dyn FnMut(&TraceEvent) + 'c>;

/// A U-curve run over one cost function.
pub struct UCurveSearch<'c, C: CostFunction + ?Sized> {
    cost: &'c C,
    config: SearchConfig,
    state: SearchState,
    trace: Option<TraceSink<'c>>,
    iterations: usize,
}

impl<'c, C: CostFunction + ?Sized> UCurveSearch<'c, C> {
    pub fn new(cost: &'c C, config: SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        let degree = cost.degree();
        if degree == 0 || degree > crate::lattice::MAX_DEGREE {
            return Err(SearchError::InvalidDegree(degree));
        }
        Ok(Self {
            cost,
            state: SearchState::new(degree, &config),
            config,
            trace: None,
            iterations: 0,
        })
    }

    /// Sends every event to `sink`.
    pub fn with_trace(mut self, sink: impl FnMut(&TraceEvent) + 'c) -> Self {
        self.trace = Some(Box::new(sink));
        self
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut SearchState {
        &mut self.state
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_exhausted(&self) -> bool {
        self.state.is_exhausted()
    }

    fn emit(&mut self, event: impl FnOnce() -> TraceEvent) {
        if let Some(sink) = self.trace.as_mut() {
            sink(&event());
        }
    }

    /// Memoized evaluation that enforces the budget before computing a new
    /// node and the stop target after.
    fn evaluate(&mut self, subset: &FeatureSubset) -> Result<f64, Halt> {
        if let Some(v) = self.state.ledger.lookup(subset) {
            return Ok(v);
        }
        if let Some(max) = self.config.max_evaluations {
            if self.state.ledger.distinct_count() >= max {
                return Err(Halt::Budget);
            }
        }
        let v = self.state.ledger.evaluate(self.cost, subset);
        if let Some(target) = self.config.stop_target {
            if target.is_met(v) {
                self.update_results(subset, v);
                return Err(Halt::Target);
            }
        }
        Ok(v)
    }

    fn update_results(&mut self, subset: &FeatureSubset, cost: f64) {
        if self.state.results.update(subset, cost) {
            self.emit(|| TraceEvent::Result {
                subset: subset.clone(),
                cost,
            });
        }
    }

    fn restrict(&mut self, kind: RestrictionKind, subset: &FeatureSubset, origin: RestrictionOrigin) {
        let changed = match kind {
            RestrictionKind::Lower => self.state.lower.insert(subset.clone()),
            RestrictionKind::Upper => self.state.upper.insert(subset.clone()),
        };
        self.emit(|| TraceEvent::Restrict {
            kind,
            subset: subset.clone(),
            origin,
            changed,
        });
    }

    pub fn select_direction(&mut self) -> Direction {
        let p = match self.config.direction_policy {
            DirectionPolicy::Fixed(p) => p,
            DirectionPolicy::Adaptive => self.state.minima.down_up_probability(),
        };
        if self.state.rng.gen::<f64>() < p {
            Direction::DownUp
        } else {
            Direction::UpDown
        }
    }

    pub fn down_up_direction(&mut self) -> Result<Option<ChainRecord>, Halt> {
        self.explore(Direction::DownUp)
    }

    pub fn up_down_direction(&mut self) -> Result<Option<ChainRecord>, Halt> {
        self.explore(Direction::UpDown)
    }

    fn explore(&mut self, direction: Direction) -> Result<Option<ChainRecord>, Halt> {
        // Restriction kinds that absorb the elements below and above the
        // minimum, expressed along the walk: `behind` is where the chain came
        // from, `ahead` is where it was heading.
        let (start, behind, ahead, side) = match direction {
            Direction::DownUp => (
                minimal_element(&self.state.lower, &mut self.state.rng),
                RestrictionKind::Lower,
                RestrictionKind::Upper,
                Adjacency::Upper,
            ),
            Direction::UpDown => (
                maximal_element(&self.state.upper, &mut self.state.rng),
                RestrictionKind::Upper,
                RestrictionKind::Lower,
                Adjacency::Lower,
            ),
        };
        let covered_ahead = match ahead {
            RestrictionKind::Upper => self.state.upper.covers(&start),
            RestrictionKind::Lower => self.state.lower.covers(&start),
        };
        if covered_ahead {
            self.restrict(behind, &start, RestrictionOrigin::Discard);
            return Ok(None);
        }

        let mut previous: Option<FeatureSubset> = None;
        let mut minimum = start;
        let mut minimum_cost = self.evaluate(&minimum)?;
        self.emit(|| TraceEvent::ChainStep {
            subset: minimum.clone(),
            cost: minimum_cost,
        });
        let stop = loop {
            let candidates = self.state.view().adjacents(&minimum, side);
            let Some(next) = candidates.choose(&mut self.state.rng).cloned() else {
                break None;
            };
            let next_cost = self.evaluate(&next)?;
            self.emit(|| TraceEvent::ChainStep {
                subset: next.clone(),
                cost: next_cost,
            });
            if next_cost > minimum_cost {
                break Some(next);
            }
            // Across a plateau the cut stays anchored at the last strictly
            // costlier element: cutting at an equal-cost one is unsound.
            let left = std::mem::replace(&mut minimum, next);
            if next_cost < minimum_cost {
                previous = Some(left);
            }
            minimum_cost = next_cost;
        };

        if let Some(a) = &previous {
            self.restrict(behind, a, RestrictionOrigin::ChainStop);
        }
        if let Some(b) = &stop {
            self.restrict(ahead, b, RestrictionOrigin::ChainStop);
        }
        self.update_results(&minimum, minimum_cost);
        self.minimum_exhausting(&minimum)?;
        Ok(Some(ChainRecord {
            direction,
            previous,
            minimum,
            stop,
        }))
    }

    /// Depth-first exhaustion of the neighbourhood of `start`.
    ///
    /// Neighbours in the residual space that cost no more than the stack top
    /// are pushed; costlier ones become restrictions on their side. A top with
    /// nothing left to push is popped, recorded as a result and cut from both
    /// sides.
    pub fn minimum_exhausting(&mut self, start: &FeatureSubset) -> Result<(), Halt> {
        let mut stack: Vec<FeatureSubset> = Vec::new();
        let mut on_stack: HashSet<FeatureSubset> = HashSet::new();
        let start_cost = self.evaluate(start)?;
        self.emit(|| TraceEvent::Push {
            subset: start.clone(),
            cost: start_cost,
        });
        stack.push(start.clone());
        on_stack.insert(start.clone());

        while let Some(top) = stack.last().cloned() {
            let top_cost = self.evaluate(&top)?;
            let mut exhausted = true;
            let mut costlier_run = 0usize;
            let neighbours = top
                .iter()
                .map(|i| (top.without(i), RestrictionKind::Lower))
                .chain(top.iter_absent().map(|i| (top.with(i), RestrictionKind::Upper)));
            for (neighbour, kind) in neighbours.collect::<Vec<_>>() {
                if on_stack.contains(&neighbour) || !self.state.view().contains(&neighbour) {
                    continue;
                }
                let cost = self.evaluate(&neighbour)?;
                if cost <= top_cost {
                    self.emit(|| TraceEvent::Push {
                        subset: neighbour.clone(),
                        cost,
                    });
                    on_stack.insert(neighbour.clone());
                    stack.push(neighbour);
                    exhausted = false;
                    costlier_run = 0;
                } else {
                    self.restrict(kind, &neighbour, RestrictionOrigin::ExhaustNeighbor);
                    costlier_run += 1;
                    if self.config.exhaust_trial_limit.is_some_and(|l| costlier_run >= l) {
                        break;
                    }
                }
            }
            if exhausted {
                stack.pop();
                on_stack.remove(&top);
                self.emit(|| TraceEvent::Pop {
                    subset: top.clone(),
                    cost: top_cost,
                });
                self.update_results(&top, top_cost);
                self.restrict(RestrictionKind::Lower, &top, RestrictionOrigin::ExhaustPop);
                self.restrict(RestrictionKind::Upper, &top, RestrictionOrigin::ExhaustPop);
                self.state.minima.record(&top);
            }
        }
        Ok(())
    }

    /// One iteration of the main loop. Callers check exhaustion first.
    pub fn step(&mut self) -> Result<(), Halt> {
        let direction = self.select_direction();
        self.emit(|| TraceEvent::Direction(direction));
        self.iterations += 1;
        match direction {
            Direction::DownUp => self.down_up_direction()?,
            Direction::UpDown => self.up_down_direction()?,
        };
        Ok(())
    }

    pub fn run(mut self) -> SearchOutcome {
        let completion = loop {
            if self.is_exhausted() {
                break Completion::Exhausted;
            }
            if let Err(halt) = self.step() {
                break Completion::from(halt);
            }
        };
        self.emit(|| TraceEvent::Finish(completion));
        SearchOutcome {
            results: self.state.results,
            ledger: self.state.ledger,
            completion,
            iterations: self.iterations,
            lower: self.state.lower,
            upper: self.state.upper,
        }
    }
}

/// Runs the search to completion (or to its budget/target).
pub fn run_ucurve<C: CostFunction + ?Sized>(
    cost: &C,
    config: SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    Ok(UCurveSearch::new(cost, config)?.run())
}
