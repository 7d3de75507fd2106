//! Exhaustive unrolling of every random branch of a run: bad `t`-trajectories
//! of the sequential walk and the cut walks of the round-structured one.

use serde::Serialize;

use crate::domain::{DependencyGraph, ExplicitInstance, FlawId, FlawSet, Model, Prob, StateId, Walk};
use crate::engine::Strategy;
use crate::error::{LllError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "rounds", rename_all = "snake_case")]
pub enum BadMode {
    /// Walks of exactly `t` steps produced by the sequential walk.
    Full,
    /// Walks covering the first `s − 1` rounds and the first flaw of round `s`.
    ParallelRounds(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct BadWalks {
    pub walks: Vec<Walk<StateId>>,
    /// `Σ p(τ)`: the probability of taking at least `t` steps (or `s` rounds).
    pub total: Prob,
    /// In round mode, whether every walk has longest chain exactly `s`.
    pub chains_ok: Option<bool>,
}

/// Length of the longest subsequence `u₁…u_s` with `u_i ≅ u_{i+1}`.
pub fn longest_chain(dep: &DependencyGraph, word: &[FlawId]) -> usize {
    let mut best = vec![1usize; word.len()];
    for j in 0..word.len() {
        for i in 0..j {
            if dep.congruent(word[i], word[j]) {
                best[j] = best[j].max(best[i] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

struct Branch {
    walk: Walk<StateId>,
    strat: Strategy,
    round: usize,
    round_start: FlawSet,
    addressed: FlawSet,
}

/// Unrolls the walk from every state in `supp(ω^init)`. The strategy must be
/// a deterministic function of the history (all built-in kinds are). Round
/// mode needs the causality graph.
pub fn enumerate_bad(
    inst: &ExplicitInstance,
    dep: Option<&DependencyGraph>,
    strategy: &Strategy,
    t: usize,
    mode: BadMode,
    cap: usize,
) -> Result<BadWalks> {
    let mut out = Vec::new();
    let mut stack: Vec<Branch> = inst
        .initial_support()
        .into_iter()
        .rev()
        .map(|s| Branch {
            walk: Walk::new(s, inst.initial(s).clone()),
            strat: strategy.clone(),
            round: 1,
            round_start: inst.present(s).clone(),
            addressed: FlawSet::new(),
        })
        .collect();
    let push_out = |out: &mut Vec<Walk<StateId>>, w: Walk<StateId>| -> Result<()> {
        if out.len() >= cap {
            return Err(LllError::resource("bad walks", cap));
        }
        out.push(w);
        Ok(())
    };
    match mode {
        BadMode::Full => {
            while let Some(mut b) = stack.pop() {
                if b.walk.len() == t {
                    push_out(&mut out, b.walk)?;
                    continue;
                }
                let present = inst.present(*b.walk.last_state()).clone();
                if present.is_empty() {
                    continue;
                }
                let f = b.strat.select(&b.walk, &present)?;
                expand(inst, &mut stack, b, f, false)?;
            }
        }
        BadMode::ParallelRounds(s) => {
            let dep = dep.ok_or_else(|| LllError::input("round mode needs a causality graph"))?;
            if dep.flaw_count() != inst.flaw_count() {
                return Err(LllError::input("instance and graph disagree on the number of flaws"));
            }
            if s == 0 {
                return Err(LllError::input("round count must be at least 1"));
            }
            while let Some(mut b) = stack.pop() {
                let present = inst.present(*b.walk.last_state()).clone();
                let mut candidates = present.difference(&dep.gamma_of_unchecked(&b.addressed, true));
                if candidates.is_empty() {
                    if present.is_empty() {
                        continue;
                    }
                    b.round += 1;
                    b.round_start = present.clone();
                    b.addressed = FlawSet::new();
                    candidates = present;
                }
                let f = b.strat.select(&b.walk, &candidates)?;
                if !candidates.contains(f) {
                    return Err(LllError::Strategy(format!("picker chose {f} outside F_σ − Γ⁺(I)")));
                }
                if !b.round_start.contains(f) {
                    return Err(LllError::Causality(format!(
                        "round {} addressed {f}, which was absent at the start of the round",
                        b.round
                    )));
                }
                if b.round == s {
                    let base = b.walk;
                    let sup = inst.support(f, *base.last_state()).expect("present flaw has actions");
                    for (next, p) in sup {
                        let mut w = base.clone();
                        w.push(f, *next, p);
                        push_out(&mut out, w)?;
                    }
                } else {
                    expand(inst, &mut stack, b, f, true)?;
                }
            }
        }
    }
    let total = out.iter().map(|w| w.prob.clone()).sum();
    let chains_ok = match (mode, dep) {
        (BadMode::ParallelRounds(s), Some(dep)) => Some(out.iter().all(|w| longest_chain(dep, &w.word()) == s)),
        _ => None,
    };
    Ok(BadWalks { walks: out, total, chains_ok })
}

fn expand(inst: &ExplicitInstance, stack: &mut Vec<Branch>, b: Branch, f: FlawId, track: bool) -> Result<()> {
    let from = *b.walk.last_state();
    let sup = inst
        .support(f, from)
        .ok_or_else(|| LllError::Strategy(format!("selected {f} which is not present")))?;
    for (next, p) in sup.iter().rev() {
        let mut w = b.walk.clone();
        w.push(f, *next, p);
        let mut addressed = b.addressed.clone();
        if track {
            addressed.insert(f);
        }
        stack.push(Branch {
            walk: w,
            strat: b.strat.clone(),
            round: b.round,
            round_start: b.round_start.clone(),
            addressed,
        });
    }
    debug_assert!(inst.flaws_present(&from).contains(f));
    Ok(())
}
