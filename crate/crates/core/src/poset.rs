//! Finite posets, anti-chains, up/down-sets, and the labelled anti-chain index
//! sets used to name classes (`DIndex`) and central idempotent types (`EIndex`)
//! of a generalized wreath product.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of points a poset may have.
pub const MAX_POINTS: usize = 64;

/// A set of poset points, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u64 << p)
    }

    pub fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, p: usize) -> bool {
        p < 64 && self.0 & (1u64 << p) != 0
    }

    pub fn with(self, p: usize) -> Self {
        PointSet(self.0 | (1u64 << p))
    }

    pub fn union(self, other: PointSet) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Points in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(p)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Size first, then lexicographic on the sorted points.
    pub fn canonical_cmp(self, other: PointSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(PointSet::EMPTY, PointSet::with)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pts.join(","))
    }
}

/// A set of pairwise incomparable points. The empty set is an anti-chain.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub struct AntiChain(PointSet);

impl AntiChain {
    pub const EMPTY: AntiChain = AntiChain(PointSet::EMPTY);

    pub fn points(self) -> PointSet {
        self.0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.0.iter()
    }

    pub fn len(self) -> usize {
        self.0.len()
    }

    pub fn is_empty(self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for AntiChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A finite strict partial order on the labels `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    /// `above[p]` holds every `q` with `p < q`.
    above: Vec<PointSet>,
    /// `below[p]` holds every `q` with `q < p`.
    below: Vec<PointSet>,
}

/// JSON form: `{ "n": 3, "covers": [[0, 2], [1, 2]] }`, where `[a, b]` means `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub n: usize,
    #[serde(default)]
    pub covers: Vec<[usize; 2]>,
}

impl Poset {
    /// Transitive closure of the given cover relations.
    pub fn from_cover_relations(n: usize, covers: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotAPoset("a poset needs at least one point".into()));
        }
        if n > MAX_POINTS {
            return Err(Error::Resource(format!(
                "posets are limited to {MAX_POINTS} points, got {n}"
            )));
        }
        let mut above = vec![PointSet::EMPTY; n];
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::NotAPoset(format!(
                    "cover ({a}, {b}) is out of range for {n} points"
                )));
            }
            above[a] = above[a].with(b);
        }
        // Warshall
        for k in 0..n {
            for p in 0..n {
                if above[p].contains(k) {
                    above[p] = above[p].union(above[k]);
                }
            }
        }
        if let Some(p) = (0..n).find(|&p| above[p].contains(p)) {
            return Err(Error::NotAPoset(format!("cycle through point {p}")));
        }
        let mut below = vec![PointSet::EMPTY; n];
        for p in 0..n {
            for q in above[p].iter() {
                below[q] = below[q].with(p);
            }
        }
        Ok(Poset { n, above, below })
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Result<Self> {
        let covers: Vec<(usize, usize)> = (1..n).map(|p| (p - 1, p)).collect();
        Poset::from_cover_relations(n, &covers)
    }

    /// `n` pairwise incomparable points.
    pub fn antichain(n: usize) -> Result<Self> {
        Poset::from_cover_relations(n, &[])
    }

    pub fn from_json(json: &PosetJson) -> Result<Self> {
        let covers: Vec<(usize, usize)> = json.covers.iter().map(|c| (c[0], c[1])).collect();
        Poset::from_cover_relations(json.n, &covers)
    }

    /// Cover relations (Hasse edges) of the order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.n {
            for q in self.above[p].iter() {
                let between = self.above[p].intersection(self.below[q]);
                if between.is_empty() {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            n: self.n,
            covers: self.covers().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> PointSet {
        PointSet::full(self.n)
    }

    /// `p < q`.
    pub fn lt(&self, p: usize, q: usize) -> bool {
        self.above[p].contains(q)
    }

    pub fn comparable(&self, p: usize, q: usize) -> bool {
        self.lt(p, q) || self.lt(q, p)
    }

    pub fn above(&self, p: usize) -> PointSet {
        self.above[p]
    }

    pub fn below(&self, p: usize) -> PointSet {
        self.below[p]
    }

    /// `{p : q < p for some q in s}`.
    pub fn up_set(&self, s: PointSet) -> PointSet {
        s.iter()
            .fold(PointSet::EMPTY, |acc, q| acc.union(self.above[q]))
    }

    /// `{p : p < q for some q in s}`.
    pub fn down_set(&self, s: PointSet) -> PointSet {
        s.iter()
            .fold(PointSet::EMPTY, |acc, q| acc.union(self.below[q]))
    }

    pub fn is_antichain(&self, s: PointSet) -> bool {
        s.iter().all(|p| self.above[p].is_disjoint(s))
    }

    pub fn as_antichain(&self, s: PointSet) -> Result<AntiChain> {
        if !s.is_subset(self.points()) {
            return Err(Error::Contract(format!("{s} is not a subset of the poset")));
        }
        if !self.is_antichain(s) {
            return Err(Error::Contract(format!("{s} is not an anti-chain")));
        }
        Ok(AntiChain(s))
    }

    /// `p < q < r` with `p, r` in `s` forces `q` in `s`.
    pub fn is_convex(&self, s: PointSet) -> bool {
        s.iter().all(|p| {
            s.iter()
                .all(|r| self.above[p].intersection(self.below[r]).is_subset(s))
        })
    }

    /// Maximal elements of an arbitrary subset.
    pub fn maximal_elements(&self, s: PointSet) -> AntiChain {
        AntiChain(s.iter().filter(|&p| self.above[p].is_disjoint(s)).collect())
    }

    /// Minimal elements of an arbitrary subset.
    pub fn minimal_elements(&self, s: PointSet) -> AntiChain {
        AntiChain(s.iter().filter(|&p| self.below[p].is_disjoint(s)).collect())
    }

    pub fn max_of(&self, s: PointSet) -> Result<AntiChain> {
        self.require_convex(s)?;
        Ok(self.maximal_elements(s))
    }

    pub fn min_of(&self, s: PointSet) -> Result<AntiChain> {
        self.require_convex(s)?;
        Ok(self.minimal_elements(s))
    }

    /// Up-set of a convex subset: the up-set of its maximal elements.
    pub fn up_of_convex(&self, s: PointSet) -> Result<PointSet> {
        Ok(self.up_set(self.max_of(s)?.points()))
    }

    /// Down-set of a convex subset: the down-set of its minimal elements.
    pub fn down_of_convex(&self, s: PointSet) -> Result<PointSet> {
        Ok(self.down_set(self.min_of(s)?.points()))
    }

    fn require_convex(&self, s: PointSet) -> Result<()> {
        if !self.is_convex(s) {
            return Err(Error::Contract(format!("{s} is not convex")));
        }
        Ok(())
    }

    /// All anti-chains, including the empty one, by size then lexicographically.
    pub fn enumerate_antichains(&self) -> Vec<AntiChain> {
        let mut out = vec![AntiChain::EMPTY];
        // extend each anti-chain only by points larger than its maximum label
        let mut frontier = vec![AntiChain::EMPTY];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                let start = a.iter().last().map_or(0, |m| m + 1);
                for p in start..self.n {
                    let s = a.points().with(p);
                    if self.is_antichain(s) {
                        next.push(AntiChain(s));
                    }
                }
            }
            next.sort_by(|x, y| x.points().canonical_cmp(y.points()));
            out.extend(next.iter().copied());
            frontier = next;
        }
        out
    }

    /// The sub-poset induced on `subset`, relabelled `0..|subset|` in
    /// increasing label order. Also returns the original label of each new point.
    pub fn induced(&self, subset: PointSet) -> Result<(Poset, Vec<usize>)> {
        let labels = subset.to_vec();
        let mut covers = Vec::new();
        for (a, &p) in labels.iter().enumerate() {
            for (b, &q) in labels.iter().enumerate() {
                if self.lt(p, q) {
                    covers.push((a, b));
                }
            }
        }
        Ok((Poset::from_cover_relations(labels.len(), &covers)?, labels))
    }

    /// `true` when every pair of points is comparable.
    pub fn is_total(&self) -> bool {
        (0..self.n).all(|p| (0..self.n).all(|q| p == q || self.comparable(p, q)))
    }

    /// `true` when no two points are comparable.
    pub fn is_discrete(&self) -> bool {
        self.above.iter().all(|s| s.is_empty())
    }
}

/// Marker for indices labelled by scheme classes.
#[derive(Debug)]
pub enum ClassLabel {}

/// Marker for indices labelled by central idempotent types.
#[derive(Debug)]
pub enum TypeLabel {}

/// An anti-chain together with one label per point of it.
pub struct LabeledAntichain<K> {
    support: AntiChain,
    /// Labels aligned with the points of `support` in increasing order.
    labels: Vec<usize>,
    _kind: PhantomData<fn() -> K>,
}

/// An element of the class index set: a support anti-chain with a nontrivial
/// class label `1..=d_p` per point.
pub type DIndex = LabeledAntichain<ClassLabel>;

/// An element of the type index set: a support anti-chain with a type label
/// `0..=e_p` per point.
pub type EIndex = LabeledAntichain<TypeLabel>;

impl<K> Clone for LabeledAntichain<K> {
    fn clone(&self) -> Self {
        LabeledAntichain {
            support: self.support,
            labels: self.labels.clone(),
            _kind: PhantomData,
        }
    }
}

impl<K> PartialEq for LabeledAntichain<K> {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && self.labels == other.labels
    }
}

impl<K> Eq for LabeledAntichain<K> {}

impl<K> Hash for LabeledAntichain<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.support.hash(state);
        self.labels.hash(state);
    }
}

impl<K> PartialOrd for LabeledAntichain<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for LabeledAntichain<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.support
            .points()
            .canonical_cmp(other.support.points())
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

impl<K> fmt::Debug for LabeledAntichain<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<K> fmt::Display for LabeledAntichain<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.entries().map(|(p, l)| format!("{p}:{l}")).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl<K> LabeledAntichain<K> {
    /// The index with empty support.
    pub fn zero() -> Self {
        LabeledAntichain {
            support: AntiChain::EMPTY,
            labels: Vec::new(),
            _kind: PhantomData,
        }
    }

    /// Builds an index from `(point, label)` pairs, checking that the points
    /// form an anti-chain of `poset`. Label ranges are checked by the caller.
    pub fn new(poset: &Poset, entries: &[(usize, usize)]) -> Result<Self> {
        let mut sorted = entries.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract("repeated point in an index".into()));
        }
        let support = poset.as_antichain(sorted.iter().map(|e| e.0).collect())?;
        Ok(LabeledAntichain {
            support,
            labels: sorted.into_iter().map(|e| e.1).collect(),
            _kind: PhantomData,
        })
    }

    fn from_parts(support: AntiChain, labels: Vec<usize>) -> Self {
        LabeledAntichain {
            support,
            labels,
            _kind: PhantomData,
        }
    }

    pub fn support(&self) -> AntiChain {
        self.support
    }

    pub fn support_set(&self) -> PointSet {
        self.support.points()
    }

    pub fn is_zero(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: usize) -> Option<usize> {
        self.entries().find(|&(q, _)| q == p).map(|(_, l)| l)
    }

    /// `(point, label)` pairs in increasing point order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.support.iter().zip(self.labels.iter().copied())
    }

    /// `self ⊂ other`: the support is contained and labels agree on it.
    pub fn is_contained_in(&self, other: &Self) -> bool {
        self.support.points().is_subset(other.support.points())
            && self.entries().all(|(p, l)| other.label(p) == Some(l))
    }

    /// The least index containing both, if any.
    pub fn union(&self, other: &Self, poset: &Poset) -> Option<Self> {
        let points = self.support.points().union(other.support.points());
        if !poset.is_antichain(points) {
            return None;
        }
        let mut labels = Vec::with_capacity(points.len());
        for p in points.iter() {
            match (self.label(p), other.label(p)) {
                (Some(a), Some(b)) if a != b => return None,
                (Some(a), _) | (None, Some(a)) => labels.push(a),
                (None, None) => unreachable!("point comes from one of the supports"),
            }
        }
        Some(LabeledAntichain::from_parts(AntiChain(points), labels))
    }

    /// Keeps only the points in `s`.
    pub fn restrict(&self, s: PointSet) -> Self {
        let (points, labels): (Vec<usize>, Vec<usize>) =
            self.entries().filter(|&(p, _)| s.contains(p)).unzip();
        LabeledAntichain::from_parts(AntiChain(points.into_iter().collect()), labels)
    }
}

/// `i ⊂ j` in the containment order on indices.
pub fn d_contains(i: &DIndex, j: &DIndex) -> bool {
    i.is_contained_in(j)
}

/// Union of two class indices, absent when they have no common upper bound.
pub fn d_union(poset: &Poset, i: &DIndex, j: &DIndex) -> Option<DIndex> {
    i.union(j, poset)
}

pub fn supp<K>(i: &LabeledAntichain<K>) -> AntiChain {
    i.support()
}

fn enumerate_labeled<K>(
    poset: &Poset,
    ranges: impl Fn(usize) -> std::ops::RangeInclusive<usize>,
) -> Vec<LabeledAntichain<K>> {
    let mut out = Vec::new();
    for a in poset.enumerate_antichains() {
        let points = a.points().to_vec();
        let ranges: Vec<_> = points.iter().map(|&p| ranges(p)).collect();
        if ranges.iter().any(|r| r.is_empty()) {
            continue;
        }
        let mut labels: Vec<usize> = ranges.iter().map(|r| *r.start()).collect();
        loop {
            out.push(LabeledAntichain::from_parts(a, labels.clone()));
            // odometer, last point fastest
            let mut k = points.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if labels[k] < *ranges[k].end() {
                    labels[k] += 1;
                    for t in k + 1..points.len() {
                        labels[t] = *ranges[t].start();
                    }
                    k = usize::MAX;
                    break;
                }
            }
            if k != usize::MAX {
                break;
            }
        }
    }
    out
}

/// All class indices for the given per-point numbers of nontrivial classes.
pub fn enumerate_d(poset: &Poset, degrees: &[usize]) -> Vec<DIndex> {
    assert_eq!(degrees.len(), poset.len(), "one degree per point");
    enumerate_labeled(poset, |p| 1..=degrees[p])
}

/// All type indices for the given per-point numbers of nonprimary types.
/// With `ge1` only labels `>= 1` are allowed.
pub fn enumerate_e(poset: &Poset, types: &[usize], ge1: bool) -> Vec<EIndex> {
    assert_eq!(types.len(), poset.len(), "one type count per point");
    if ge1 {
        enumerate_labeled(poset, |p| 1..=types[p])
    } else {
        enumerate_labeled(poset, |p| 0..=types[p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_poset() -> Poset {
        Poset::from_cover_relations(3, &[(0, 2), (1, 2)]).unwrap()
    }

    fn set(points: &[usize]) -> PointSet {
        points.iter().copied().collect()
    }

    /// Every poset on `n` labels whose order extends the label order.
    fn all_posets(n: usize) -> Vec<Poset> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        (0..1u32 << pairs.len())
            .map(|mask| {
                let covers: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                Poset::from_cover_relations(n, &covers).unwrap()
            })
            .collect()
    }

    #[test]
    fn builders() {
        let c = Poset::chain(2).unwrap();
        assert!(c.lt(0, 1) && !c.lt(1, 0));
        let a = Poset::antichain(3).unwrap();
        assert!(a.is_discrete());
        let v = v_poset();
        assert!(v.lt(0, 2) && v.lt(1, 2) && !v.comparable(0, 1));
    }

    #[test]
    fn cycles_are_rejected() {
        assert!(matches!(
            Poset::from_cover_relations(2, &[(0, 1), (1, 0)]),
            Err(Error::NotAPoset(_))
        ));
        assert!(Poset::from_cover_relations(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn transitive_closure() {
        let c = Poset::chain(4).unwrap();
        assert!(c.lt(0, 3));
        assert_eq!(c.covers(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn up_and_down_sets() {
        let c = Poset::chain(3).unwrap();
        assert_eq!(c.up_set(set(&[0])), set(&[1, 2]));
        assert_eq!(c.up_set(PointSet::EMPTY), PointSet::EMPTY);
        assert_eq!(v_poset().down_set(set(&[2])), set(&[0, 1]));
    }

    #[test]
    fn antichain_enumeration_examples() {
        assert_eq!(Poset::chain(2).unwrap().enumerate_antichains().len(), 3);
        let a2: Vec<Vec<usize>> = Poset::antichain(2)
            .unwrap()
            .enumerate_antichains()
            .iter()
            .map(|a| a.points().to_vec())
            .collect();
        assert_eq!(a2, vec![vec![], vec![0], vec![1], vec![0, 1]]);
        let v: Vec<Vec<usize>> = v_poset()
            .enumerate_antichains()
            .iter()
            .map(|a| a.points().to_vec())
            .collect();
        assert_eq!(v, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1]]);
    }

    #[test]
    fn antichain_count_matches_subset_filter() {
        for n in 1..=5 {
            for p in all_posets(n) {
                let brute = (0..1u64 << n)
                    .filter(|&m| p.is_antichain(PointSet::from_bits(m)))
                    .count();
                let listed = p.enumerate_antichains();
                assert_eq!(listed.len(), brute);
                assert!(listed.iter().all(|a| p.is_antichain(a.points())));
            }
        }
    }

    #[test]
    fn convexity_examples() {
        let c = Poset::chain(3).unwrap();
        assert!(!c.is_convex(set(&[0, 2])));
        assert!(c.is_convex(set(&[1, 2])));
        assert_eq!(c.max_of(set(&[1, 2])).unwrap().points(), set(&[2]));
        assert_eq!(c.min_of(set(&[1, 2])).unwrap().points(), set(&[1]));
        assert!(matches!(c.max_of(set(&[0, 2])), Err(Error::Contract(_))));
        for a in v_poset().enumerate_antichains() {
            assert!(v_poset().is_convex(a.points()));
        }
    }

    #[test]
    fn convex_up_down_reduce_to_extremes() {
        for n in 1..=5 {
            for p in all_posets(n) {
                for m in 0..1u64 << n {
                    let s = PointSet::from_bits(m);
                    if !p.is_convex(s) {
                        continue;
                    }
                    let up = p.up_of_convex(s).unwrap();
                    let down = p.down_of_convex(s).unwrap();
                    assert_eq!(up, p.up_set(p.max_of(s).unwrap().points()));
                    assert_eq!(down, p.down_set(p.min_of(s).unwrap().points()));
                    assert!(up.is_disjoint(s) && down.is_disjoint(s));
                    assert!(up.is_subset(p.up_set(s)) && down.is_subset(p.down_set(s)));
                    if p.is_antichain(s) {
                        assert_eq!(up, p.up_set(s));
                        assert_eq!(down, p.down_set(s));
                    }
                }
            }
        }
    }

    #[test]
    fn convex_up_set_is_not_the_pointwise_up_set() {
        // 0 < 1, 0 < 2 with S = {0, 1}: 2 lies above 0 but not above max(S)
        let p = Poset::from_cover_relations(3, &[(0, 1), (0, 2)]).unwrap();
        let s = set(&[0, 1]);
        assert_eq!(p.up_of_convex(s).unwrap(), PointSet::EMPTY);
        assert_eq!(p.up_set(s).difference(s), set(&[2]));
    }

    #[test]
    fn anti_chains_and_their_up_and_down_sets_are_convex() {
        for p in all_posets(4) {
            for a in p.enumerate_antichains() {
                assert!(p.is_convex(a.points()));
                assert!(p.is_convex(p.up_set(a.points())));
                assert!(p.is_convex(p.down_set(a.points())));
            }
        }
    }

    #[test]
    fn d_enumeration_counts() {
        assert_eq!(enumerate_d(&Poset::chain(2).unwrap(), &[1, 1]).len(), 3);
        assert_eq!(enumerate_d(&Poset::antichain(2).unwrap(), &[1, 2]).len(), 6);
        let v = v_poset();
        assert_eq!(enumerate_d(&v, &[1, 1, 1]).len(), 5);
        let e = enumerate_e(&v, &[0, 0, 0], true);
        assert_eq!(e, vec![EIndex::zero()]);
        assert_eq!(enumerate_e(&v, &[0, 0, 0], false).len(), 5);
    }

    #[test]
    fn union_and_containment_examples() {
        let c = Poset::chain(2).unwrap();
        let i = DIndex::new(&c, &[(0, 1)]).unwrap();
        let j = DIndex::new(&c, &[(1, 1)]).unwrap();
        assert!(d_union(&c, &i, &j).is_none());
        assert!(d_contains(&DIndex::zero(), &j));
        assert_eq!(d_union(&c, &DIndex::zero(), &j), Some(j.clone()));

        let a = Poset::antichain(2).unwrap();
        let i = DIndex::new(&a, &[(0, 1)]).unwrap();
        let j = DIndex::new(&a, &[(1, 2)]).unwrap();
        let u = d_union(&a, &i, &j).unwrap();
        assert_eq!(u, DIndex::new(&a, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(supp(&u).points(), set(&[0, 1]));
        assert!(DIndex::new(&c, &[(0, 1), (1, 1)]).is_err());
    }

    #[test]
    fn containment_is_a_partial_order_and_unions_are_least() {
        let profiles: Vec<(Poset, Vec<usize>)> = vec![
            (Poset::antichain(3).unwrap(), vec![1, 2, 2]),
            (v_poset(), vec![2, 1, 2]),
            (Poset::chain(3).unwrap(), vec![2, 2, 1]),
            (
                Poset::from_cover_relations(4, &[(0, 2), (1, 2), (1, 3)]).unwrap(),
                vec![2, 1, 1, 2],
            ),
        ];
        for (p, d) in profiles {
            let all = enumerate_d(&p, &d);
            for i in &all {
                assert!(d_contains(i, i));
                for j in &all {
                    if d_contains(i, j) && d_contains(j, i) {
                        assert_eq!(i, j);
                    }
                    for k in &all {
                        if d_contains(i, j) && d_contains(j, k) {
                            assert!(d_contains(i, k));
                        }
                        if d_contains(i, k) && d_contains(j, k) {
                            let u = d_union(&p, i, j).expect("union must exist");
                            assert!(d_contains(&u, k));
                            assert!(d_contains(i, &u) && d_contains(j, &u));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn induced_subposet_relabels_in_order() {
        let c = Poset::chain(4).unwrap();
        let (sub, labels) = c.induced(set(&[1, 3])).unwrap();
        assert_eq!(labels, vec![1, 3]);
        assert!(sub.lt(0, 1));
    }

    #[test]
    fn json_round_trip() {
        let v = v_poset();
        let json = serde_json::to_string(&v.to_json()).unwrap();
        let back: PosetJson = serde_json::from_str(&json).unwrap();
        assert_eq!(Poset::from_json(&back).unwrap(), v);
    }
}
