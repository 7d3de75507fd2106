//! The round-based swapping map that brings `Stab_π(τ)` to the front of every
//! walk in a valid set, with an audit of its testable guarantees.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::dag::{build_walk_dag, stab_from_dag};
use super::forward::swap_walk;
use super::words::{is_pi_stable, partition_stable};
use crate::domain::prob::PRODUCT_TOLERANCE;
use crate::domain::{
    name_word, walk_probability, DependencyGraph, ExplicitInstance, FlawId, FlawOrder, FlawSet, NamedFlaw, NamedWord,
    StateId, Walk,
};
use crate::error::{LllError, Result};
use crate::verify::SwapMap;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BackwardAudit {
    /// Every image starts with its `Stab_π(τ)` and has no reachable node after it.
    pub stab_prefix: bool,
    /// `REV[W^f̂_τ]` is π-stable, rooted at `{f̂}` in flaw mode.
    pub reverse_pi_stable: bool,
    pub injective: bool,
    /// No image is a proper prefix of another.
    pub prefix_free: bool,
    /// `p(τ′) = p(τ)` for every walk; expected under strong commutativity.
    pub probability_preserved: bool,
    pub violations: Vec<String>,
}

impl BackwardAudit {
    pub fn passed(&self) -> bool {
        self.stab_prefix && self.reverse_pi_stable && self.injective && self.prefix_free
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BackwardResult {
    pub walks: Vec<Walk<StateId>>,
    pub stabs: Vec<NamedWord>,
    /// Number of swap rounds performed.
    pub rounds: usize,
    pub audit: BackwardAudit,
}

struct Tracked {
    walk: Walk<StateId>,
    named: NamedWord,
    reachable: HashSet<NamedFlaw>,
    stab_pos: HashMap<NamedFlaw, usize>,
    stab: NamedWord,
}

impl Tracked {
    /// Position (number of named flaws before the right element) of the
    /// rightmost swappable pair, or zero.
    fn k(&self, dep: &DependencyGraph) -> usize {
        for i in (0..self.named.len().saturating_sub(1)).rev() {
            let (f, g) = (self.named[i], self.named[i + 1]);
            if dep.congruent(f.flaw, g.flaw) || !self.reachable.contains(&g) {
                continue;
            }
            if !self.reachable.contains(&f) || self.stab_pos[&g] < self.stab_pos[&f] {
                return i + 1;
            }
        }
        0
    }
}

type StepKey = (StateId, Vec<(FlawId, StateId)>);

fn key(w: &Walk<StateId>, len: usize) -> StepKey {
    (w.start, w.steps[..len].iter().map(|s| (s.flaw, s.next)).collect())
}

/// First pair `(i, j)` with walk `i` a proper prefix of walk `j`, or, when
/// `equal_too`, identical to it.
fn prefix_violation(walks: &[Walk<StateId>], equal_too: bool) -> Option<(usize, usize)> {
    let mut prefixes: HashMap<StepKey, usize> = HashMap::new();
    for (j, w) in walks.iter().enumerate() {
        for len in 0..w.len() {
            prefixes.entry(key(w, len)).or_insert(j);
        }
    }
    let mut whole: HashMap<StepKey, usize> = HashMap::new();
    for (i, w) in walks.iter().enumerate() {
        let k = key(w, w.len());
        if let Some(&j) = prefixes.get(&k) {
            return Some((i, j));
        }
        if let Some(&j) = whole.get(&k).filter(|_| equal_too) {
            return Some((j, i));
        }
        whole.insert(k, i);
    }
    None
}

/// `W^f̂_τ`: the longest prefix ending with `f̂`, or the whole word.
fn root_prefix(word: &[FlawId], root: Option<FlawId>) -> &[FlawId] {
    match root {
        Some(f) => &word[..word.iter().rposition(|&g| g == f).map_or(0, |p| p + 1)],
        None => word,
    }
}

/// Repeatedly finds the largest position `k` of a rightmost swappable pair
/// over the whole set and swaps that pair in every walk attaining it.
/// Swaps are realized through `swap`; the input must be a valid set (no walk
/// a proper prefix of another), each walk containing `root` when given.
pub fn backward_canonicalize_set(
    inst: &ExplicitInstance,
    swap: &SwapMap,
    dep: &DependencyGraph,
    order: &FlawOrder,
    walks: &[Walk<StateId>],
    root: Option<FlawId>,
) -> Result<BackwardResult> {
    if order.len() != dep.flaw_count() || inst.flaw_count() != dep.flaw_count() {
        return Err(LllError::input("instance, graph and order disagree on the number of flaws"));
    }
    if let Some((i, j)) = prefix_violation(walks, true) {
        return Err(LllError::input(format!("not a valid set: walk {i} is a prefix of walk {j}")));
    }
    let mut items = Vec::with_capacity(walks.len());
    for w in walks {
        walk_probability(inst, w)?;
        let word = w.word();
        let dag = build_walk_dag(dep, &word, root)?;
        let stab = stab_from_dag(&dag, order);
        items.push(Tracked {
            walk: w.clone(),
            named: name_word(&word),
            reachable: dag.reachable.iter().copied().collect(),
            stab_pos: stab.iter().enumerate().map(|(i, n)| (*n, i)).collect(),
            stab,
        });
    }
    let budget: usize = 1 + walks.iter().map(|w| w.len() * w.len()).max().unwrap_or(0) * 2;
    let mut rounds = 0;
    loop {
        let ks: Vec<usize> = items.iter().map(|t| t.k(dep)).collect();
        let k = ks.iter().copied().max().unwrap_or(0);
        if k == 0 {
            break;
        }
        rounds += 1;
        if rounds > budget {
            return Err(LllError::resource("swap rounds", budget));
        }
        for (t, &kt) in items.iter_mut().zip(&ks) {
            if kt == k {
                swap_walk(&mut t.walk, k - 1, swap)?;
                t.named.swap(k - 1, k);
            }
        }
    }

    let mut audit = BackwardAudit {
        stab_prefix: true,
        reverse_pi_stable: true,
        injective: true,
        prefix_free: true,
        probability_preserved: true,
        violations: Vec::new(),
    };
    for (idx, (t, orig)) in items.iter_mut().zip(walks).enumerate() {
        t.walk.prob = walk_probability(inst, &t.walk)?;
        if !t.walk.prob.approx_eq(&orig.prob, PRODUCT_TOLERANCE) {
            audit.probability_preserved = false;
        }
        let m = t.stab.len();
        if t.named[..m] != t.stab[..] || t.named[m..].iter().any(|n| t.reachable.contains(n)) {
            audit.stab_prefix = false;
            audit.violations.push(format!("walk {idx}: Stab_π(τ) is not a prefix of the image"));
        }
        let word = t.walk.word();
        let rev: Vec<FlawId> = root_prefix(&word, root).iter().rev().copied().collect();
        let rooted = match (root, partition_stable(dep, &rev)) {
            (Some(f), Ok(segs)) => segs.first().is_some_and(|s| s.iter().copied().collect::<FlawSet>() == FlawSet::singleton(f)),
            (None, Ok(_)) => true,
            (_, Err(_)) => false,
        };
        if !rooted || !is_pi_stable(dep, order, &rev) {
            audit.reverse_pi_stable = false;
            audit.violations.push(format!("walk {idx}: reversed root prefix is not π-stable with the right root"));
        }
    }
    let images: Vec<Walk<StateId>> = items.iter().map(|t| t.walk.clone()).collect();
    let distinct: HashSet<&Walk<StateId>> = images.iter().collect();
    if distinct.len() != images.len() {
        audit.injective = false;
        audit.violations.push("two walks share an image".into());
    }
    if let Some((i, j)) = prefix_violation(&images, false) {
        audit.prefix_free = false;
        audit.violations.push(format!("image {i} is a proper prefix of image {j}"));
    }
    Ok(BackwardResult { stabs: items.iter().map(|t| t.stab.clone()).collect(), walks: images, rounds, audit })
}
