//! Flaw identifiers, flaw sets, and the symmetric causality relation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LllError, Result};

/// Flaw sets whose members are all below this width are stored as a single
/// machine bitset; larger ids fall back to a sorted vector.
pub const INLINE_WIDTH: u32 = 128;

/// Dense flaw index in `[0, |F|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlawId(pub u32);

impl FlawId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for FlawId {
    fn from(i: usize) -> Self {
        FlawId(i as u32)
    }
}

impl fmt::Display for FlawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Bits(u128),
    Sorted(Vec<u32>),
}

/// A set of flaws. The representation is canonical for its contents, so
/// derived equality and hashing are set equality and set hashing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FlawSet(Repr);

impl Default for FlawSet {
    fn default() -> Self {
        FlawSet::new()
    }
}

impl FlawSet {
    pub fn new() -> Self {
        FlawSet(Repr::Bits(0))
    }

    pub fn singleton(f: FlawId) -> Self {
        let mut s = FlawSet::new();
        s.insert(f);
        s
    }

    fn from_sorted(v: Vec<u32>) -> Self {
        match v.last() {
            None => FlawSet::new(),
            Some(&m) if m < INLINE_WIDTH => {
                FlawSet(Repr::Bits(v.iter().fold(0u128, |acc, &x| acc | (1u128 << x))))
            }
            Some(_) => FlawSet(Repr::Sorted(v)),
        }
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            Repr::Bits(b) => b.count_ones() as usize,
            Repr::Sorted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, f: FlawId) -> bool {
        match &self.0 {
            Repr::Bits(b) => f.0 < INLINE_WIDTH && (b >> f.0) & 1 == 1,
            Repr::Sorted(v) => v.binary_search(&f.0).is_ok(),
        }
    }

    pub fn insert(&mut self, f: FlawId) {
        match &mut self.0 {
            Repr::Bits(b) if f.0 < INLINE_WIDTH => *b |= 1u128 << f.0,
            Repr::Bits(_) => {
                let mut v = self.to_vec();
                v.push(f.0);
                *self = FlawSet(Repr::Sorted(v));
            }
            Repr::Sorted(v) => {
                if let Err(pos) = v.binary_search(&f.0) {
                    v.insert(pos, f.0);
                }
            }
        }
    }

    pub fn remove(&mut self, f: FlawId) {
        match &mut self.0 {
            Repr::Bits(b) => {
                if f.0 < INLINE_WIDTH {
                    *b &= !(1u128 << f.0)
                }
            }
            Repr::Sorted(v) => {
                if let Ok(pos) = v.binary_search(&f.0) {
                    v.remove(pos);
                    let v = std::mem::take(v);
                    *self = FlawSet::from_sorted(v);
                }
            }
        }
    }

    fn to_vec(&self) -> Vec<u32> {
        self.iter().map(|f| f.0).collect()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> FlawIter<'_> {
        match &self.0 {
            Repr::Bits(b) => FlawIter::Bits(*b),
            Repr::Sorted(v) => FlawIter::Sorted(v.iter()),
        }
    }

    pub fn first(&self) -> Option<FlawId> {
        self.iter().next()
    }

    fn merge(&self, other: &FlawSet, keep: impl Fn(bool, bool) -> bool) -> FlawSet {
        let a = self.to_vec();
        let b = other.to_vec();
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            let (x, in_a, in_b) = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    (x, true, true)
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    (x, true, false)
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    (y, false, true)
                }
                (Some(&x), None) => {
                    i += 1;
                    (x, true, false)
                }
                (None, Some(&y)) => {
                    j += 1;
                    (y, false, true)
                }
                (None, None) => unreachable!(),
            };
            if keep(in_a, in_b) {
                out.push(x);
            }
        }
        FlawSet::from_sorted(out)
    }

    pub fn union(&self, other: &FlawSet) -> FlawSet {
        match (&self.0, &other.0) {
            (Repr::Bits(a), Repr::Bits(b)) => FlawSet(Repr::Bits(a | b)),
            _ => self.merge(other, |a, b| a || b),
        }
    }

    pub fn intersection(&self, other: &FlawSet) -> FlawSet {
        match (&self.0, &other.0) {
            (Repr::Bits(a), Repr::Bits(b)) => FlawSet(Repr::Bits(a & b)),
            _ => self.merge(other, |a, b| a && b),
        }
    }

    pub fn difference(&self, other: &FlawSet) -> FlawSet {
        match (&self.0, &other.0) {
            (Repr::Bits(a), Repr::Bits(b)) => FlawSet(Repr::Bits(a & !b)),
            _ => self.merge(other, |a, b| a && !b),
        }
    }

    pub fn is_subset(&self, other: &FlawSet) -> bool {
        match (&self.0, &other.0) {
            (Repr::Bits(a), Repr::Bits(b)) => a & !b == 0,
            _ => self.iter().all(|f| other.contains(f)),
        }
    }

    pub fn is_disjoint(&self, other: &FlawSet) -> bool {
        match (&self.0, &other.0) {
            (Repr::Bits(a), Repr::Bits(b)) => a & b == 0,
            _ => self.iter().all(|f| !other.contains(f)),
        }
    }

    pub fn max(&self) -> Option<FlawId> {
        self.iter().last()
    }
}

impl FromIterator<FlawId> for FlawSet {
    fn from_iter<I: IntoIterator<Item = FlawId>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().map(|f| f.0).collect();
        v.sort_unstable();
        v.dedup();
        FlawSet::from_sorted(v)
    }
}

impl<'a> IntoIterator for &'a FlawSet {
    type Item = FlawId;
    type IntoIter = FlawIter<'a>;
    fn into_iter(self) -> FlawIter<'a> {
        self.iter()
    }
}

pub enum FlawIter<'a> {
    Bits(u128),
    Sorted(std::slice::Iter<'a, u32>),
}

impl Iterator for FlawIter<'_> {
    type Item = FlawId;
    fn next(&mut self) -> Option<FlawId> {
        match self {
            FlawIter::Bits(b) => {
                if *b == 0 {
                    None
                } else {
                    let i = b.trailing_zeros();
                    *b &= *b - 1;
                    Some(FlawId(i))
                }
            }
            FlawIter::Sorted(it) => it.next().map(|&x| FlawId(x)),
        }
    }
}

/// Shortlex comparison (size first, then sorted members); the order used for
/// every listing of subsets in this crate.
pub fn shortlex(a: &FlawSet, b: &FlawSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

impl PartialOrd for FlawSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FlawSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        shortlex(self, other)
    }
}

impl fmt::Debug for FlawSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|x| x.0)).finish()
    }
}

impl Serialize for FlawSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlawSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Ok(v.into_iter().map(FlawId).collect())
    }
}

/// Symmetric relation `~` on flaws, loops allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    n: usize,
    // neighbors[f] = Γ(f); contains f itself iff f has a loop.
    neighbors: Vec<FlawSet>,
}

impl DependencyGraph {
    pub fn edgeless(n: usize) -> Self {
        DependencyGraph { n, neighbors: vec![FlawSet::new(); n] }
    }

    /// Every pair adjacent; loops on every flaw when `loops` is set.
    pub fn complete(n: usize, loops: bool) -> Self {
        let mut g = DependencyGraph::edgeless(n);
        for f in 0..n {
            for h in f..n {
                if f != h || loops {
                    g.add_edge(f.into(), h.into());
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = DependencyGraph::edgeless(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(LllError::input(format!("edge ({a},{b}) out of range for {n} flaws")));
            }
            g.add_edge(a.into(), b.into());
        }
        Ok(g)
    }

    pub fn flaw_count(&self) -> usize {
        self.n
    }

    /// Adds `f ~ g` (and `g ~ f`); `f == g` adds a loop.
    pub fn add_edge(&mut self, f: FlawId, g: FlawId) {
        self.neighbors[f.index()].insert(g);
        self.neighbors[g.index()].insert(f);
    }

    pub fn remove_edge(&mut self, f: FlawId, g: FlawId) {
        self.neighbors[f.index()].remove(g);
        self.neighbors[g.index()].remove(f);
    }

    pub fn adjacent(&self, f: FlawId, g: FlawId) -> bool {
        self.neighbors[f.index()].contains(g)
    }

    pub fn has_loop(&self, f: FlawId) -> bool {
        self.adjacent(f, f)
    }

    /// `f ≅ g`: adjacent or equal.
    pub fn congruent(&self, f: FlawId, g: FlawId) -> bool {
        f == g || self.adjacent(f, g)
    }

    pub fn gamma(&self, f: FlawId) -> &FlawSet {
        &self.neighbors[f.index()]
    }

    pub fn gamma_plus(&self, f: FlawId) -> FlawSet {
        let mut s = self.neighbors[f.index()].clone();
        s.insert(f);
        s
    }

    /// All unordered edges `(f, g)` with `f <= g`, loops included.
    pub fn edges(&self) -> Vec<(FlawId, FlawId)> {
        let mut out = Vec::new();
        for f in 0..self.n {
            for g in self.neighbors[f].iter() {
                if g.index() >= f {
                    out.push((FlawId::from(f), g));
                }
            }
        }
        out
    }

    pub fn check_range(&self, s: &FlawSet) -> Result<()> {
        match s.max() {
            Some(m) if m.index() >= self.n => Err(LllError::input(format!(
                "flaw {} out of range for {} flaws",
                m.0, self.n
            ))),
            _ => Ok(()),
        }
    }

    /// `Γ(S)` or, with `plus`, `Γ⁺(S)`.
    pub fn gamma_of(&self, s: &FlawSet, plus: bool) -> Result<FlawSet> {
        self.check_range(s)?;
        Ok(self.gamma_of_unchecked(s, plus))
    }

    pub(crate) fn gamma_of_unchecked(&self, s: &FlawSet, plus: bool) -> FlawSet {
        let mut out = if plus { s.clone() } else { FlawSet::new() };
        for f in s {
            out = out.union(&self.neighbors[f.index()]);
        }
        out
    }

    /// No two distinct members adjacent. Loops are ignored.
    pub fn is_independent(&self, s: &FlawSet) -> Result<bool> {
        self.check_range(s)?;
        Ok(self.is_independent_unchecked(s))
    }

    pub(crate) fn is_independent_unchecked(&self, s: &FlawSet) -> bool {
        s.iter().all(|f| {
            let mut others = s.clone();
            others.remove(f);
            self.neighbors[f.index()].is_disjoint(&others)
        })
    }

    /// All independent subsets of `s` (including the empty set) in shortlex
    /// order. Fails once more than `cap` subsets would be produced.
    pub fn enumerate_independent_subsets(&self, s: &FlawSet, cap: usize) -> Result<Vec<FlawSet>> {
        self.check_range(s)?;
        let members: Vec<FlawId> = s.iter().collect();
        let mut out = Vec::new();
        let mut current = FlawSet::new();
        self.extend_independent(&members, 0, &mut current, &mut out, cap)?;
        out.sort_by(shortlex);
        Ok(out)
    }

    fn extend_independent(
        &self,
        members: &[FlawId],
        from: usize,
        current: &mut FlawSet,
        out: &mut Vec<FlawSet>,
        cap: usize,
    ) -> Result<()> {
        if out.len() >= cap {
            return Err(LllError::resource("independent subsets", cap));
        }
        out.push(current.clone());
        for i in from..members.len() {
            let f = members[i];
            if self.neighbors[f.index()].is_disjoint(current) {
                current.insert(f);
                self.extend_independent(members, i + 1, current, out, cap)?;
                current.remove(f);
            }
        }
        Ok(())
    }
}

impl Serialize for DependencyGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            flaws: usize,
            edges: Vec<(u32, u32)>,
        }
        Wire { flaws: self.n, edges: self.edges().into_iter().map(|(a, b)| (a.0, b.0)).collect() }
            .serialize(s)
    }
}

/// A total order on flaws given by a permutation: `order[k]` is the k-th
/// lowest flaw.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlawOrder {
    rank: Vec<u32>,
}

impl FlawOrder {
    pub fn identity(n: usize) -> Self {
        FlawOrder { rank: (0..n as u32).collect() }
    }

    pub fn from_sequence(order: &[FlawId]) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![u32::MAX; n];
        for (k, f) in order.iter().enumerate() {
            if f.index() >= n || rank[f.index()] != u32::MAX {
                return Err(LllError::input("order is not a permutation of the flaws"));
            }
            rank[f.index()] = k as u32;
        }
        Ok(FlawOrder { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, f: FlawId) -> u32 {
        self.rank[f.index()]
    }

    pub fn precedes(&self, f: FlawId, g: FlawId) -> bool {
        self.rank(f) < self.rank(g)
    }

    /// Lowest member of `s`.
    pub fn lowest(&self, s: &FlawSet) -> Option<FlawId> {
        s.iter().min_by_key(|&f| self.rank(f))
    }

    pub fn sorted(&self, s: &FlawSet) -> Vec<FlawId> {
        let mut v: Vec<FlawId> = s.iter().collect();
        v.sort_by_key(|&f| self.rank(f));
        v
    }
}
