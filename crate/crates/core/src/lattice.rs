//! Elements of the Boolean lattice of feature subsets, lower/upper
//! restriction sets, and the residual search space they carve out.
//!
//! A lower restriction `R` removes the interval `[∅, R]` from the lattice and
//! an upper restriction removes `[R, W]`. The residual space is never
//! materialized: membership is always decided by scanning the restrictions.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Largest supported lattice degree.
pub const MAX_DEGREE: usize = 1024;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice degree {0} is outside 1..={MAX_DEGREE}")]
    InvalidDegree(usize),
    #[error("width mismatch: expected {expected} features, got {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("invalid subset string {0:?}: expected only '0' and '1'")]
    Parse(String),
}

/// Degree of the lattice, i.e. the number of features `|W|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeConfig {
    degree: usize,
}

impl LatticeConfig {
    pub fn new(degree: usize) -> Result<Self, LatticeError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(LatticeError::InvalidDegree(degree));
        }
        Ok(Self { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bottom(&self) -> FeatureSubset {
        FeatureSubset::empty(self.degree)
    }

    pub fn top(&self) -> FeatureSubset {
        FeatureSubset::full(self.degree)
    }

    pub fn check(&self, subset: &FeatureSubset) -> Result<(), LatticeError> {
        check_width(self.degree, subset)
    }
}

pub(crate) fn check_width(expected: usize, subset: &FeatureSubset) -> Result<(), LatticeError> {
    if subset.degree() != expected {
        return Err(LatticeError::WidthMismatch {
            expected,
            found: subset.degree(),
        });
    }
    Ok(())
}

/// A subset of the `n` features, stored as a little-endian array of words.
///
/// Feature `0` is the leftmost character of the textual form, so `"0111"`
/// contains features 1, 2 and 3. Bits at positions `>= n` are always zero.
#[derive(Clone, PartialEq, Eq)]
pub struct FeatureSubset {
    degree: usize,
    words: Box<[u64]>,
}

impl Hash for FeatureSubset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

fn word_count(degree: usize) -> usize {
    degree.div_ceil(WORD_BITS)
}

impl FeatureSubset {
    pub fn empty(degree: usize) -> Self {
        Self {
            degree,
            words: vec![0; word_count(degree)].into_boxed_slice(),
        }
    }

    pub fn full(degree: usize) -> Self {
        let mut s = Self {
            degree,
            words: vec![u64::MAX; word_count(degree)].into_boxed_slice(),
        };
        s.clear_tail();
        s
    }

    /// Builds a subset from feature indices; indices `>= degree` panic.
    pub fn from_indices<I: IntoIterator<Item = usize>>(degree: usize, indices: I) -> Self {
        let mut s = Self::empty(degree);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Subset whose bit `i` is bit `i` of `mask`. Only meaningful for `degree <= 64`.
    pub fn from_mask(degree: usize, mask: u64) -> Self {
        assert!(degree <= WORD_BITS, "from_mask requires degree <= 64");
        let mut s = Self::empty(degree);
        if degree > 0 {
            s.words[0] = mask;
            s.clear_tail();
        }
        s
    }

    /// Inverse of [`FeatureSubset::from_mask`]; `None` when the degree exceeds 64.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.degree % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn contains(&self, index: usize) -> bool {
        debug_assert!(index < self.degree);
        self.words[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.degree, "feature {index} out of range for degree {}", self.degree);
        self.words[index / WORD_BITS] |= 1 << (index % WORD_BITS);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(index < self.degree, "feature {index} out of range for degree {}", self.degree);
        self.words[index / WORD_BITS] &= !(1 << (index % WORD_BITS));
    }

    pub fn with(&self, index: usize) -> Self {
        let mut s = self.clone();
        s.insert(index);
        s
    }

    pub fn without(&self, index: usize) -> Self {
        let mut s = self.clone();
        s.remove(index);
        s
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.degree
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.degree, other.degree);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_superset(&self, other: &Self) -> bool {
        other.is_subset(self)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        debug_assert_eq!(self.degree, other.degree);
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            degree: self.degree,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.clear_tail();
        s
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.degree, other.degree);
        Self {
            degree: self.degree,
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Indices of the features in the subset, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + bit)
            })
        })
    }

    /// Indices of the features absent from the subset, ascending.
    pub fn iter_absent(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.degree).filter(move |&i| !self.contains(i))
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.degree)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }
}

impl FromStr for FeatureSubset {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_DEGREE {
            return Err(LatticeError::Parse(s.to_string()));
        }
        let mut subset = Self::empty(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => subset.insert(i),
                '0' => {}
                _ => return Err(LatticeError::Parse(s.to_string())),
            }
        }
        Ok(subset)
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureSubset({})", self.to_bit_string())
    }
}

/// Orders subsets as their bit strings compare (`"0011" < "0100"`); the
/// degree is compared first.
impl Ord for FeatureSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            self.words
                .iter()
                .map(|w| w.reverse_bits())
                .cmp(other.words.iter().map(|w| w.reverse_bits()))
        })
    }
}

impl PartialOrd for FeatureSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which side of the lattice a restriction set prunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictionKind {
    Lower,
    Upper,
}

impl fmt::Display for RestrictionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RestrictionKind::Lower => "lower",
            RestrictionKind::Upper => "upper",
        })
    }
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for super::Lower {}
    impl Sealed for super::Upper {}
}

/// Marker for the side of a [`RestrictionSet`].
pub trait Side: sealed::Sealed + fmt::Debug + Clone + PartialEq + Eq {
    const KIND: RestrictionKind;
    type Dual: Side<Dual = Self>;

    /// Whether restriction `r` removes `a` from the space.
    fn covers(r: &FeatureSubset, a: &FeatureSubset) -> bool;
}

/// Lower restrictions: `R` prunes `[∅, R]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lower {}

/// Upper restrictions: `R` prunes `[R, W]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Upper {}

impl Side for Lower {
    const KIND: RestrictionKind = RestrictionKind::Lower;
    type Dual = Upper;

    fn covers(r: &FeatureSubset, a: &FeatureSubset) -> bool {
        a.is_subset(r)
    }
}

impl Side for Upper {
    const KIND: RestrictionKind = RestrictionKind::Upper;
    type Dual = Lower;

    fn covers(r: &FeatureSubset, a: &FeatureSubset) -> bool {
        r.is_subset(a)
    }
}

/// Bit-sliced copy of a family of subsets: for every block of 64 slots, one
/// word per feature whose bit `j` says whether slot `j` holds that feature.
#[derive(Debug, Clone)]
struct SliceIndex {
    degree: usize,
    slots: usize,
    dead: usize,
    alive: Vec<u64>,
    // Block-major: `cols[block * degree + feature]`.
    cols: Vec<u64>,
}

impl SliceIndex {
    fn new(degree: usize) -> Self {
        Self {
            degree,
            slots: 0,
            dead: 0,
            alive: Vec::new(),
            cols: Vec::new(),
        }
    }

    fn live(&self) -> usize {
        self.slots - self.dead
    }

    fn push(&mut self, a: &FeatureSubset) {
        let (block, bit) = (self.slots / WORD_BITS, self.slots % WORD_BITS);
        if block == self.alive.len() {
            self.alive.push(0);
            self.cols.resize(self.cols.len() + self.degree, 0);
        }
        self.alive[block] |= 1 << bit;
        let base = block * self.degree;
        for i in a.iter() {
            self.cols[base + i] |= 1 << bit;
        }
        self.slots += 1;
    }

    /// Live slots holding a superset of `a`, per block.
    fn supersets(&self, present: &[usize], block: usize) -> u64 {
        let cols = &self.cols[block * self.degree..(block + 1) * self.degree];
        let mut acc = self.alive[block];
        for &i in present {
            acc &= cols[i];
            if acc == 0 {
                break;
            }
        }
        acc
    }

    /// Live slots holding a subset of `a`, per block.
    fn subsets(&self, absent: &[usize], block: usize) -> u64 {
        let cols = &self.cols[block * self.degree..(block + 1) * self.degree];
        let mut acc = self.alive[block];
        for &i in absent {
            acc &= !cols[i];
            if acc == 0 {
                break;
            }
        }
        acc
    }

    fn query(&self, a: &FeatureSubset, want_supersets: bool) -> impl Iterator<Item = (usize, u64)> + '_ {
        let probe: Vec<usize> = if want_supersets {
            a.iter().collect()
        } else {
            a.iter_absent().collect()
        };
        (0..self.alive.len()).filter_map(move |b| {
            let m = if want_supersets {
                self.supersets(&probe, b)
            } else {
                self.subsets(&probe, b)
            };
            (m != 0).then_some((b, m))
        })
    }

    fn kill(&mut self, block: usize, mask: u64) {
        self.dead += mask.count_ones() as usize;
        self.alive[block] &= !mask;
    }
}

/// An antichain of lower or upper restrictions.
///
/// Single writer; shared reads are fine.
#[derive(Debug, Clone)]
pub struct RestrictionSet<S: Side> {
    degree: usize,
    elements: Vec<FeatureSubset>,
    index: SliceIndex,
    _side: PhantomData<S>,
}

impl<S: Side> PartialEq for RestrictionSet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl<S: Side> Eq for RestrictionSet<S> {}

pub type LowerRestrictions = RestrictionSet<Lower>;
pub type UpperRestrictions = RestrictionSet<Upper>;

impl<S: Side> RestrictionSet<S> {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            elements: Vec::new(),
            index: SliceIndex::new(degree),
            _side: PhantomData,
        }
    }

    /// Builds a set by feeding every element through [`RestrictionSet::insert`].
    pub fn from_elements<I: IntoIterator<Item = FeatureSubset>>(degree: usize, elements: I) -> Self {
        let mut set = Self::new(degree);
        for e in elements {
            assert_eq!(e.degree(), degree, "restriction width mismatch");
            set.insert(e);
        }
        set
    }

    pub fn kind(&self) -> RestrictionKind {
        S::KIND
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[FeatureSubset] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FeatureSubset> {
        self.elements.iter()
    }

    /// True when some restriction removes `a`.
    pub fn covers(&self, a: &FeatureSubset) -> bool {
        debug_assert_eq!(a.degree(), self.degree);
        // Lower: some R ⊇ a. Upper: some R ⊆ a.
        let want_supersets = S::KIND == RestrictionKind::Lower;
        self.index.query(a, want_supersets).next().is_some()
    }

    /// Adds `a` as a restriction. No-op (returns `false`) when `a` is already
    /// covered; otherwise drops every restriction that `a` dominates.
    pub fn insert(&mut self, a: FeatureSubset) -> bool {
        debug_assert_eq!(a.degree(), self.degree);
        if self.covers(&a) {
            return false;
        }
        // Elements `a` dominates: its subsets (lower) or supersets (upper).
        let want_supersets = S::KIND == RestrictionKind::Upper;
        let dominated: Vec<(usize, u64)> = self.index.query(&a, want_supersets).collect();
        if !dominated.is_empty() {
            for (block, mask) in dominated {
                self.index.kill(block, mask);
            }
            self.elements.retain(|r| !S::covers(&a, r));
        }
        self.index.push(&a);
        self.elements.push(a);
        if self.index.dead > WORD_BITS && self.index.dead > self.index.live() {
            self.index = SliceIndex::new(self.degree);
            for e in &self.elements {
                self.index.push(e);
            }
        }
        true
    }

    /// The dual set obtained by complementing every element.
    pub fn complemented(&self) -> RestrictionSet<S::Dual> {
        RestrictionSet::from_elements(self.degree, self.elements.iter().map(FeatureSubset::complement))
    }

    /// One subset string per line, in insertion order.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            out.push_str(&e.to_bit_string());
            out.push('\n');
        }
        out
    }

    pub fn from_lines(degree: usize, text: &str) -> Result<Self, LatticeError> {
        let mut set = Self::new(degree);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let e: FeatureSubset = line.parse()?;
            check_width(degree, &e)?;
            set.insert(e);
        }
        Ok(set)
    }
}

/// Membership of `a` in the space left by the lower restrictions: true iff
/// `a ∩ Rᶜ ≠ ∅` for every `R`.
pub fn in_lower_space(a: &FeatureSubset, lower: &LowerRestrictions) -> Result<bool, LatticeError> {
    check_width(lower.degree(), a)?;
    Ok(lower
        .iter()
        .all(|r| a.intersects(&r.complement())))
}

/// Membership of `a` in the space left by the upper restrictions: true iff no
/// `R ⊆ a`.
pub fn in_upper_space(a: &FeatureSubset, upper: &UpperRestrictions) -> Result<bool, LatticeError> {
    check_width(upper.degree(), a)?;
    Ok(!upper.covers(a))
}

pub fn update_lower_restriction(
    a: &FeatureSubset,
    lower: &mut LowerRestrictions,
) -> Result<bool, LatticeError> {
    check_width(lower.degree(), a)?;
    Ok(lower.insert(a.clone()))
}

pub fn update_upper_restriction(
    a: &FeatureSubset,
    upper: &mut UpperRestrictions,
) -> Result<bool, LatticeError> {
    check_width(upper.degree(), a)?;
    Ok(upper.insert(a.clone()))
}

/// A minimal element of the space left by `lower`.
///
/// Starts from the full set and tries to drop each feature once, in an order
/// shuffled by `rng`. Returns the full set when `lower` covers it.
pub fn minimal_element<R: Rng + ?Sized>(lower: &LowerRestrictions, rng: &mut R) -> FeatureSubset {
    let n = lower.degree();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut current = FeatureSubset::full(n);
    for k in order {
        let candidate = current.without(k);
        if !lower.covers(&candidate) {
            current = candidate;
        }
    }
    current
}

/// A maximal element of the space left by `upper`; dual of [`minimal_element`].
pub fn maximal_element<R: Rng + ?Sized>(upper: &UpperRestrictions, rng: &mut R) -> FeatureSubset {
    let n = upper.degree();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut current = FeatureSubset::empty(n);
    for k in order {
        let candidate = current.with(k);
        if !upper.covers(&candidate) {
            current = candidate;
        }
    }
    current
}

/// True when `W` is covered by the lower set or `∅` by the upper set, the
/// only emptiness certificate the search relies on.
pub fn space_is_exhausted(lower: &LowerRestrictions, upper: &UpperRestrictions) -> bool {
    lower.covers(&FeatureSubset::full(lower.degree()))
        || upper.covers(&FeatureSubset::empty(upper.degree()))
}

/// Direction of a one-bit neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adjacency {
    /// One feature added.
    Upper,
    /// One feature removed.
    Lower,
}

/// The residual poset `𝕏(ℛ_L, ℛ_U)`, viewed through borrowed restriction sets.
#[derive(Debug, Clone, Copy)]
pub struct SearchSpaceView<'a> {
    pub lower: &'a LowerRestrictions,
    pub upper: &'a UpperRestrictions,
}

impl<'a> SearchSpaceView<'a> {
    pub fn new(lower: &'a LowerRestrictions, upper: &'a UpperRestrictions) -> Self {
        debug_assert_eq!(lower.degree(), upper.degree());
        Self { lower, upper }
    }

    pub fn degree(&self) -> usize {
        self.lower.degree()
    }

    pub fn contains(&self, a: &FeatureSubset) -> bool {
        !self.lower.covers(a) && !self.upper.covers(a)
    }

    pub fn is_exhausted(&self) -> bool {
        space_is_exhausted(self.lower, self.upper)
    }

    /// One-bit neighbours of `t` on the given side that remain in the space,
    /// in ascending feature order.
    pub fn adjacents(&self, t: &FeatureSubset, side: Adjacency) -> Vec<FeatureSubset> {
        let candidates: Vec<FeatureSubset> = match side {
            Adjacency::Upper => t.iter_absent().map(|i| t.with(i)).collect(),
            Adjacency::Lower => t.iter().map(|i| t.without(i)).collect(),
        };
        candidates.into_iter().filter(|a| self.contains(a)).collect()
    }
}

/// Checked form of [`SearchSpaceView::adjacents`].
pub fn adjacents_in_space(
    t: &FeatureSubset,
    view: &SearchSpaceView<'_>,
    side: Adjacency,
) -> Result<Vec<FeatureSubset>, LatticeError> {
    check_width(view.degree(), t)?;
    Ok(view.adjacents(t, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(text: &str) -> FeatureSubset {
        text.parse().unwrap()
    }

    fn lower(items: &[&str]) -> LowerRestrictions {
        RestrictionSet::from_elements(items[0].len(), items.iter().map(|t| s(t)))
    }

    fn upper(items: &[&str]) -> UpperRestrictions {
        RestrictionSet::from_elements(items[0].len(), items.iter().map(|t| s(t)))
    }

    #[test]
    fn bit_string_round_trip_uses_leftmost_as_first_feature() {
        let x = s("0111");
        assert_eq!(x.iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(x.to_string(), "0111");
        assert_eq!(x.to_mask(), Some(0b1110));
        assert!("01a1".parse::<FeatureSubset>().is_err());
    }

    #[test]
    fn ordering_follows_bit_strings() {
        let mut v = [s("0100"), s("0011"), s("1000"), s("0000")];
        v.sort();
        let strings: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(strings, ["0000", "0011", "0100", "1000"]);
    }

    #[test]
    fn wide_subsets_keep_tail_clear() {
        let full = FeatureSubset::full(130);
        assert_eq!(full.len(), 130);
        assert!(full.complement().is_empty());
        let x = FeatureSubset::from_indices(130, [0, 64, 129]);
        assert_eq!(x.complement().len(), 127);
        assert_eq!(x.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
    }

    #[test]
    fn lower_space_membership() {
        let l = lower(&["0011"]);
        assert!(in_lower_space(&s("0100"), &l).unwrap());
        assert!(!in_lower_space(&s("0010"), &l).unwrap());

        let l = lower(&["0010", "0001"]);
        assert!(in_lower_space(&s("1000"), &l).unwrap());
        assert!(!in_lower_space(&s("0000"), &l).unwrap());
    }

    #[test]
    fn upper_space_membership() {
        let u = upper(&["1110"]);
        assert!(!in_upper_space(&s("1111"), &u).unwrap());
        assert!(in_upper_space(&s("0111"), &u).unwrap());
        let empty = UpperRestrictions::new(4);
        assert!(in_upper_space(&s("1111"), &empty).unwrap());
        assert!(in_upper_space(&s("0000"), &empty).unwrap());
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let l = lower(&["0011"]);
        assert_eq!(
            in_lower_space(&s("011"), &l),
            Err(LatticeError::WidthMismatch { expected: 4, found: 3 })
        );
        assert!(LatticeConfig::new(0).is_err());
        assert!(LatticeConfig::new(1025).is_err());
        assert!(LatticeConfig::new(1024).is_ok());
    }

    #[test]
    fn minimal_elements_of_figure_one_space() {
        let l = lower(&["0010", "0001"]);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            seen.insert(minimal_element(&l, &mut rng).to_string());
        }
        let expected: std::collections::BTreeSet<String> =
            ["1000", "0100", "0011"].iter().map(|x| x.to_string()).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn minimal_element_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(minimal_element(&LowerRestrictions::new(4), &mut rng), s("0000"));
        assert_eq!(minimal_element(&lower(&["1111"]), &mut rng), s("1111"));
    }

    #[test]
    fn maximal_element_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(maximal_element(&UpperRestrictions::new(4), &mut rng), s("1111"));
        let u = upper(&["0000"]);
        assert_eq!(maximal_element(&u, &mut rng), s("0000"));
        assert!(space_is_exhausted(&LowerRestrictions::new(4), &u));
    }

    #[test]
    fn maximal_element_is_maximal_by_enumeration() {
        let u = upper(&["1110"]);
        for seed in 0..16 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = maximal_element(&u, &mut rng);
            assert!(!u.covers(&m));
            for i in m.iter_absent() {
                assert!(u.covers(&m.with(i)), "{m} + {i} still in space");
            }
            // Independent check: no element of the space strictly contains m.
            for mask in 0u64..16 {
                let x = FeatureSubset::from_mask(4, mask);
                let in_space = !(s("1110").is_subset(&x));
                if in_space && x != m {
                    assert!(!m.is_subset(&x));
                }
            }
        }
    }

    #[test]
    fn lower_updates() {
        let mut l = lower(&["0010"]);
        assert!(update_lower_restriction(&s("0011"), &mut l).unwrap());
        assert_eq!(l.elements(), &[s("0011")]);

        let mut l = lower(&["0011"]);
        assert!(!update_lower_restriction(&s("0001"), &mut l).unwrap());
        assert_eq!(l.elements(), &[s("0011")]);

        let mut l = lower(&["0011"]);
        update_lower_restriction(&s("1000"), &mut l).unwrap();
        assert_eq!(l.elements(), &[s("0011"), s("1000")]);
    }

    #[test]
    fn upper_updates() {
        let mut u = upper(&["1110"]);
        update_upper_restriction(&s("0110"), &mut u).unwrap();
        assert_eq!(u.elements(), &[s("0110")]);

        let mut u = upper(&["0110"]);
        assert!(!update_upper_restriction(&s("1110"), &mut u).unwrap());
        assert_eq!(u.elements(), &[s("0110")]);

        let mut u = upper(&["1100"]);
        update_upper_restriction(&s("0011"), &mut u).unwrap();
        assert_eq!(u.elements(), &[s("1100"), s("0011")]);
    }

    #[test]
    fn adjacents_against_figure_one_restrictions() {
        let l = lower(&["0010", "0001"]);
        let u = upper(&["1110"]);
        let view = SearchSpaceView::new(&l, &u);
        let up = adjacents_in_space(&s("0100"), &view, Adjacency::Upper).unwrap();
        assert_eq!(up, vec![s("1100"), s("0110"), s("0101")]);
        assert!(view.adjacents(&s("1111"), Adjacency::Upper).is_empty());
        assert!(view.adjacents(&s("0000"), Adjacency::Lower).is_empty());
    }

    #[test]
    fn exhaustion_certificate() {
        assert!(space_is_exhausted(&lower(&["1111"]), &UpperRestrictions::new(4)));
        assert!(space_is_exhausted(&LowerRestrictions::new(4), &upper(&["0000"])));
        assert!(!space_is_exhausted(&lower(&["0011"]), &upper(&["1110"])));
    }

    #[test]
    fn restriction_lines_round_trip() {
        let l = lower(&["0011", "1000"]);
        let text = l.to_lines();
        assert_eq!(text, "0011\n1000\n");
        assert_eq!(LowerRestrictions::from_lines(4, &text).unwrap(), l);
        assert!(LowerRestrictions::from_lines(5, &text).is_err());
    }
}
