//! Greedy segmentation, π-stable words, stable and strongly stable sequences,
//! and the truncated counting bound.

use serde::Serialize;

use crate::conditions::{mu_of_set, Weights};
use crate::domain::{lambda_of_word, DependencyGraph, ExplicitInstance, FlawId, FlawOrder, FlawSet, Word};
use crate::error::{LllError, Result};

/// A sequence of flaw sets `(I₁,…,I_s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StableSequence {
    pub sets: Vec<FlawSet>,
}

impl StableSequence {
    /// The root `I₁`.
    pub fn root(&self) -> &FlawSet {
        &self.sets[0]
    }

    /// `|φ| = Σ |I_r|`.
    pub fn size(&self) -> usize {
        self.sets.iter().map(FlawSet::len).sum()
    }

    pub fn lambda(&self, lambda: &[f64]) -> f64 {
        self.sets.iter().flat_map(FlawSet::iter).map(|f| lambda[f.index()]).product()
    }

    /// Independent sets with `I_{r+1} ⊆ Γ⁺(I_r)`.
    pub fn is_stable(&self, dep: &DependencyGraph) -> bool {
        self.check(dep, true)
    }

    /// Independent sets with `I_{r+1} ⊆ Γ(I_r)` and `I_r ≠ ∅` for `r ≥ 2`.
    pub fn is_strongly_stable(&self, dep: &DependencyGraph) -> bool {
        self.sets.iter().skip(1).all(|s| !s.is_empty()) && self.check(dep, false)
    }

    fn check(&self, dep: &DependencyGraph, plus: bool) -> bool {
        !self.sets.is_empty()
            && self.sets.iter().all(|s| dep.is_independent(s).unwrap_or(false))
            && self.sets.windows(2).all(|w| w[1].is_subset(&dep.gamma_of_unchecked(&w[0], plus)))
    }

    /// The π-stable word of the sequence: each set sorted increasingly.
    pub fn word(&self, order: &FlawOrder) -> Word {
        self.sets.iter().flat_map(|s| order.sorted(s)).collect()
    }
}

/// Where the greedy segmentation of a non-stable word breaks down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionFailure {
    /// 0-based position of the offending flaw.
    pub position: usize,
    pub flaw: FlawId,
}

/// Greedy segmentation. A flaw equal or adjacent to a member of the last
/// segment opens a new one; otherwise it joins the last segment, which is
/// only allowed if it lies in `Γ⁺` of the segment before.
///
/// # Panics
/// If the word mentions a flaw outside the graph.
pub fn partition_stable(dep: &DependencyGraph, w: &[FlawId]) -> std::result::Result<Vec<Word>, PartitionFailure> {
    let mut segs: Vec<Word> = Vec::new();
    for (i, &f) in w.iter().enumerate() {
        match segs.last_mut() {
            Some(last) if !last.iter().any(|&g| dep.congruent(f, g)) => {
                if segs.len() >= 2 {
                    let prev = &segs[segs.len() - 2];
                    if !prev.iter().any(|&g| dep.congruent(f, g)) {
                        return Err(PartitionFailure { position: i, flaw: f });
                    }
                }
                segs.last_mut().expect("non-empty").push(f);
            }
            _ => segs.push(vec![f]),
        }
    }
    Ok(segs)
}

/// `φ_W` of a stable word; `(∅)` for the empty word.
pub fn stable_sequence_of(dep: &DependencyGraph, w: &[FlawId]) -> Option<StableSequence> {
    let segs = partition_stable(dep, w).ok()?;
    if segs.is_empty() {
        return Some(StableSequence { sets: vec![FlawSet::new()] });
    }
    Some(StableSequence { sets: segs.iter().map(|s| s.iter().copied().collect()).collect() })
}

pub fn is_pi_stable(dep: &DependencyGraph, order: &FlawOrder, w: &[FlawId]) -> bool {
    match partition_stable(dep, w) {
        Ok(segs) => segs.iter().all(|s| s.windows(2).all(|p| order.precedes(p[0], p[1]))),
        Err(_) => false,
    }
}

fn follows(inst: &ExplicitInstance, word: impl Iterator<Item = FlawId>) -> bool {
    let n = inst.state_count();
    let mut cur = vec![true; n];
    for f in word {
        let mut next = vec![false; n];
        let mut any = false;
        for s in (0..n).filter(|&s| cur[s]) {
            if let Some(sup) = inst.support(f, s) {
                for (t, _) in sup {
                    next[*t] = true;
                    any = true;
                }
            }
        }
        if !any {
            return false;
        }
        cur = next;
    }
    true
}

/// Whether some walk of the instance follows `w` or its reverse.
pub fn has_walk_witness(inst: &ExplicitInstance, w: &[FlawId]) -> bool {
    follows(inst, w.iter().copied()) || follows(inst, w.iter().rev().copied())
}

/// Depth-first growth of `(R, I₂, …)` with `I_{r+1}` a non-empty independent
/// subset of `Γ⁺(I_r)` (or `Γ(I_r)` when `strong`), up to total size `max_len`.
fn grow(
    dep: &DependencyGraph,
    sets: &mut Vec<FlawSet>,
    size: usize,
    max_len: usize,
    strong: bool,
    cap: usize,
    visit: &mut dyn FnMut(&[FlawSet], usize) -> Result<()>,
) -> Result<()> {
    visit(sets, size)?;
    let last = sets.last().expect("non-empty");
    if last.is_empty() || size >= max_len {
        return Ok(());
    }
    let pool = dep.gamma_of_unchecked(last, !strong);
    for next in dep.enumerate_independent_subsets(&pool, cap)? {
        if next.is_empty() || size + next.len() > max_len {
            continue;
        }
        let k = next.len();
        sets.push(next);
        grow(dep, sets, size + k, max_len, strong, cap, visit)?;
        sets.pop();
    }
    Ok(())
}

fn check_root(dep: &DependencyGraph, r: &FlawSet) -> Result<bool> {
    dep.check_range(r)?;
    dep.is_independent(r)
}

/// `Stab_π(R,t)` truncated at `max_len`: π-stable words rooted at `R` with
/// `t ≤ |W| ≤ max_len`, ordered by length and then lexicographically. With an
/// instance, only words admitting a walk witness (forward or reversed) are kept.
pub fn enumerate_stab_pi(
    inst: Option<&ExplicitInstance>,
    dep: &DependencyGraph,
    order: &FlawOrder,
    r: &FlawSet,
    t: usize,
    max_len: usize,
    cap: usize,
) -> Result<Vec<Word>> {
    if order.len() != dep.flaw_count() {
        return Err(LllError::input("order length differs from the number of flaws"));
    }
    if let Some(i) = inst {
        if i.flaw_count() != dep.flaw_count() {
            return Err(LllError::input("instance and graph disagree on the number of flaws"));
        }
    }
    if !check_root(dep, r)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut visit = |sets: &[FlawSet], size: usize| -> Result<()> {
        if size < t {
            return Ok(());
        }
        let w = StableSequence { sets: sets.to_vec() }.word(order);
        if inst.is_some_and(|i| !has_walk_witness(i, &w)) {
            return Ok(());
        }
        if out.len() >= cap {
            return Err(LllError::resource("stable words", cap));
        }
        out.push(w);
        Ok(())
    };
    grow(dep, &mut vec![r.clone()], r.len(), max_len, false, cap, &mut visit)?;
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// `Stab(R,t)` truncated at `max_len`: strongly stable sequences rooted at `R`.
pub fn enumerate_strongly_stable(
    dep: &DependencyGraph,
    r: &FlawSet,
    t: usize,
    max_len: usize,
    cap: usize,
) -> Result<Vec<StableSequence>> {
    if !check_root(dep, r)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut visit = |sets: &[FlawSet], size: usize| -> Result<()> {
        if size < t {
            return Ok(());
        }
        if out.len() >= cap {
            return Err(LllError::resource("strongly stable sequences", cap));
        }
        out.push(StableSequence { sets: sets.to_vec() });
        Ok(())
    };
    grow(dep, &mut vec![r.clone()], r.len(), max_len, true, cap, &mut visit)?;
    out.sort();
    Ok(out)
}

/// `λ`, the weights defining `μ(R)`, and `θ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingParams {
    pub lambda: Vec<f64>,
    pub weights: Weights,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingReport {
    pub root: FlawSet,
    pub t: usize,
    pub max_len: usize,
    /// `μ(R)·θ^t`.
    pub bound: f64,
    pub words: usize,
    pub word_sum: f64,
    pub sequences: usize,
    pub sequence_sum: f64,
    /// Upper bound on the omitted terms, `μ(R)·θ^{max(t, max_len+1)}`.
    pub tail_bound: f64,
    pub passed: bool,
}

/// Truncated check of `Σ_{W∈Stab_π(R,t)} λ_W ≤ μ(R)·θ^t` and of its strongly
/// stable counterpart. Without an instance the walk-witness clause cannot be
/// evaluated; words are then admitted when `φ_W` is strongly stable, which the
/// witness clause implies.
pub fn verify_stab_counting(
    inst: Option<&ExplicitInstance>,
    dep: &DependencyGraph,
    order: &FlawOrder,
    params: &CountingParams,
    r: &FlawSet,
    t: usize,
    max_len: usize,
    cap: usize,
) -> Result<CountingReport> {
    let n = dep.flaw_count();
    if params.lambda.len() != n || params.lambda.iter().any(|x| !(*x >= 0.0)) {
        return Err(LllError::input("lambda must have one non-negative entry per flaw"));
    }
    if !(params.theta > 0.0) {
        return Err(LllError::input("theta must be positive"));
    }
    let mu_r = mu_of_set(dep, &params.weights, r)?;
    let bound = mu_r * params.theta.powi(t as i32);
    let words: Vec<Word> = enumerate_stab_pi(inst, dep, order, r, t, max_len, cap)?
        .into_iter()
        .filter(|w| stable_sequence_of(dep, w).is_some_and(|phi| phi.is_strongly_stable(dep)))
        .collect();
    let word_sum = words.iter().map(|w| lambda_of_word(&params.lambda, w)).fold(0.0, |a, b| a + b);
    let seqs = enumerate_strongly_stable(dep, r, t, max_len, cap)?;
    let sequence_sum = seqs.iter().map(|s| s.lambda(&params.lambda)).fold(0.0, |a, b| a + b);
    let tail_bound = mu_r * params.theta.powi(t.max(max_len + 1) as i32);
    let slack = 1e-12 * bound.max(1e-300);
    Ok(CountingReport {
        root: r.clone(),
        t,
        max_len,
        bound,
        words: words.len(),
        word_sum,
        sequences: seqs.len(),
        sequence_sum,
        tail_bound,
        passed: word_sum <= bound + slack && sequence_sum <= bound + slack,
    })
}
