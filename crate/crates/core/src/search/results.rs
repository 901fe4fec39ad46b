use std::cmp::Ordering;

use crate::lattice::FeatureSubset;

/// Bounded list of the cheapest subsets seen, sorted by cost then by bit string.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultList {
    capacity: usize,
    entries: Vec<(FeatureSubset, f64)>,
}

fn rank(a: &(FeatureSubset, f64), b: &(FeatureSubset, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0))
}

impl ResultList {
    /// Panics on a zero capacity.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "result capacity must be at least 1");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity.min(64)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Inserts `(subset, cost)` if it ranks within capacity and the subset is
    /// not already listed. Returns whether the list changed.
    pub fn update(&mut self, subset: &FeatureSubset, cost: f64) -> bool {
        if self.entries.iter().any(|(s, _)| s == subset) {
            return false;
        }
        let candidate = (subset.clone(), cost);
        if self.entries.len() == self.capacity {
            let last = self.entries.last().expect("capacity >= 1");
            if rank(&candidate, last) != Ordering::Less {
                return false;
            }
            self.entries.pop();
        }
        let pos = self
            .entries
            .partition_point(|e| rank(e, &candidate) == Ordering::Less);
        self.entries.insert(pos, candidate);
        true
    }

    pub fn best(&self) -> Option<(&FeatureSubset, f64)> {
        self.entries.first().map(|(s, c)| (s, *c))
    }

    pub fn best_cost(&self) -> Option<f64> {
        self.entries.first().map(|e| e.1)
    }

    pub fn entries(&self) -> &[(FeatureSubset, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
