//! Executable random walks: the sequential walk with a pluggable flaw
//! selection strategy, and the round-structured variant in which each round
//! addresses an independent set of flaws.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::prob::PRODUCT_TOLERANCE;
use crate::domain::rng::{self, RNG_NAME};
use crate::domain::{walk_probability, DependencyGraph, FlawId, FlawOrder, FlawSet, Model, Walk};
use crate::error::{LllError, Result};

pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    /// Lowest flaw in `F_σ − Γ⁺(I)` within greedy rounds.
    PiStable(FlawOrder),
    /// Uniform over `F_σ`; the draw at step `i` comes from stream `i` of the seed,
    /// making the choice a deterministic function of the history.
    UniformRandom { seed: u64 },
    /// Minimum flaw id.
    FirstPresent,
    /// Replays a fixed flaw list.
    Scripted(Vec<FlawId>),
}

/// A flaw-selection rule. Clones carry their internal round state, so
/// exhaustive unrolling can fork a strategy at every branch.
#[derive(Clone, Debug)]
pub struct Strategy {
    kind: StrategyKind,
    dep: Option<Arc<DependencyGraph>>,
    round: FlawSet,
}

pub fn make_strategy(kind: StrategyKind, dep: Option<Arc<DependencyGraph>>) -> Result<Strategy> {
    if let StrategyKind::PiStable(order) = &kind {
        let dep = dep
            .as_ref()
            .ok_or_else(|| LllError::input("the pi-stable strategy needs a causality graph"))?;
        if order.len() != dep.flaw_count() {
            return Err(LllError::input("order length differs from the number of flaws"));
        }
    }
    Ok(Strategy { kind, dep, round: FlawSet::new() })
}

impl Strategy {
    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::PiStable(_) => "pi_stable",
            StrategyKind::UniformRandom { .. } => "uniform_random",
            StrategyKind::FirstPresent => "first_present",
            StrategyKind::Scripted(_) => "scripted",
        }
    }

    /// Picks a flaw from `present` (non-empty) given the history so far.
    pub fn select<S: Clone>(&mut self, history: &Walk<S>, present: &FlawSet) -> Result<FlawId> {
        if present.is_empty() {
            return Err(LllError::Strategy("selection requested at a flawless state".into()));
        }
        let f = match &self.kind {
            StrategyKind::PiStable(order) => {
                let dep = self.dep.as_ref().expect("checked at construction");
                let mut candidates = present.difference(&dep.gamma_of_unchecked(&self.round, true));
                if candidates.is_empty() {
                    self.round = FlawSet::new();
                    candidates = present.clone();
                }
                let f = order.lowest(&candidates).expect("non-empty");
                self.round.insert(f);
                f
            }
            StrategyKind::UniformRandom { seed } => {
                let mut r = rng::stream(*seed, history.len() as u64);
                let k = r.random_range(0..present.len());
                present.iter().nth(k).expect("in range")
            }
            StrategyKind::FirstPresent => present.first().expect("non-empty"),
            StrategyKind::Scripted(list) => {
                let f = *list.get(history.len()).ok_or_else(|| {
                    LllError::Strategy(format!("script exhausted at step {}", history.len()))
                })?;
                if !present.contains(f) {
                    return Err(LllError::Strategy(format!(
                        "script asks for {f} at step {} but it is not present",
                        history.len()
                    )));
                }
                f
            }
        };
        debug_assert!(present.contains(f));
        Ok(f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord<S> {
    pub index: usize,
    /// The set `I` of flaws addressed in this round.
    pub addressed: FlawSet,
    /// State at the start of the round.
    pub boundary: S,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome<S> {
    pub walk: Walk<S>,
    pub terminated: bool,
    pub steps: usize,
    pub rounds: Option<Vec<RoundRecord<S>>>,
    pub seed: u64,
    pub rng: &'static str,
}

fn check_walk<M: Model>(model: &M, walk: &Walk<M::State>) -> Result<()> {
    let p = walk_probability(model, walk)?;
    if !p.approx_eq(&walk.prob, PRODUCT_TOLERANCE) {
        return Err(LllError::Contract {
            step: walk.len(),
            reason: format!("recorded probability {} differs from recomputed {}", walk.prob, p),
        });
    }
    Ok(())
}

fn step<M: Model>(model: &M, walk: &mut Walk<M::State>, f: FlawId, rng: &mut rng::LllRng) -> Result<()> {
    let (next, p) = model.sample_action(f, walk.last_state(), rng)?;
    walk.push(f, next, &p);
    Ok(())
}

/// The sequential walk: sample from `ω^init`, then address flaws chosen by the
/// strategy until a flawless state or `max_steps` is reached.
pub fn run_sequential<M: Model>(
    model: &M,
    strategy: &Strategy,
    seed: u64,
    max_steps: usize,
) -> Result<RunOutcome<M::State>> {
    let mut strat = strategy.clone();
    let mut rng = rng::seeded(seed);
    let start = model.sample_initial(&mut rng);
    let mut walk = Walk::new(start.clone(), model.initial_prob(&start));
    let mut present = model.flaws_present(&start);
    while !present.is_empty() && walk.len() < max_steps {
        let f = strat.select(&walk, &present)?;
        if !present.contains(f) {
            return Err(LllError::Strategy(format!("selected {f} which is not present")));
        }
        step(model, &mut walk, f, &mut rng)?;
        present = model.flaws_present(walk.last_state());
    }
    check_walk(model, &walk)?;
    Ok(RunOutcome { steps: walk.len(), terminated: present.is_empty(), walk, rounds: None, seed, rng: RNG_NAME })
}

/// The round walk: rounds of greedy independent resampling. The picker chooses
/// among `F_σ − Γ⁺(I)`. Picking a flaw absent from the round's starting state
/// means `dep` is not a potential causality graph for the model.
pub fn run_parallel<M: Model>(
    model: &M,
    dep: &DependencyGraph,
    picker: &Strategy,
    seed: u64,
    max_rounds: usize,
) -> Result<RunOutcome<M::State>> {
    if dep.flaw_count() != model.flaw_count() {
        return Err(LllError::input("causality graph and model disagree on the number of flaws"));
    }
    let mut picker = picker.clone();
    let mut rng = rng::seeded(seed);
    let start = model.sample_initial(&mut rng);
    let mut walk = Walk::new(start.clone(), model.initial_prob(&start));
    let mut present = model.flaws_present(&start);
    let mut rounds = Vec::new();
    while !present.is_empty() && rounds.len() < max_rounds {
        let boundary = walk.last_state().clone();
        let round_start = present.clone();
        let mut addressed = FlawSet::new();
        loop {
            let candidates = present.difference(&dep.gamma_of_unchecked(&addressed, true));
            if candidates.is_empty() {
                break;
            }
            let f = picker.select(&walk, &candidates)?;
            if !candidates.contains(f) {
                return Err(LllError::Strategy(format!("picker chose {f} outside F_σ − Γ⁺(I)")));
            }
            if !round_start.contains(f) {
                return Err(LllError::Causality(format!(
                    "round {} addressed {f}, which was absent at the start of the round",
                    rounds.len()
                )));
            }
            step(model, &mut walk, f, &mut rng)?;
            addressed.insert(f);
            present = model.flaws_present(walk.last_state());
        }
        rounds.push(RoundRecord { index: rounds.len(), addressed, boundary });
    }
    check_walk(model, &walk)?;
    Ok(RunOutcome {
        steps: walk.len(),
        terminated: present.is_empty(),
        walk,
        rounds: Some(rounds),
        seed,
        rng: RNG_NAME,
    })
}

/// Seed of trial `k` for an experiment with base seed `base`.
pub fn trial_seed(base: u64, k: usize) -> u64 {
    base.wrapping_add(k as u64)
}

/// Per-trial summary used by experiments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub steps: usize,
    pub rounds: Option<usize>,
    pub terminated: bool,
}

/// Which executor a batch of trials uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Executor {
    Sequential { max_steps: usize },
    Parallel { max_rounds: usize },
}

/// Runs `trials` independent runs with seeds `trial_seed(base, k)`. The
/// result order is by trial index regardless of `jobs`. `check` is applied
/// to every final state that is flawless.
pub fn run_trials<M, C>(
    model: &M,
    dep: Option<&DependencyGraph>,
    strategy: &Strategy,
    executor: Executor,
    base_seed: u64,
    trials: usize,
    jobs: usize,
    check: C,
) -> Result<Vec<TrialRecord>>
where
    M: Model,
    C: Fn(&M::State) -> Result<()> + Sync,
{
    let one = |k: usize| -> Result<TrialRecord> {
        let seed = trial_seed(base_seed, k);
        let out = match executor {
            Executor::Sequential { max_steps } => run_sequential(model, strategy, seed, max_steps)?,
            Executor::Parallel { max_rounds } => {
                let dep = dep.ok_or_else(|| LllError::input("parallel runs need a causality graph"))?;
                run_parallel(model, dep, strategy, seed, max_rounds)?
            }
        };
        if out.terminated {
            check(out.walk.last_state())?;
        }
        Ok(TrialRecord {
            trial: k,
            seed,
            steps: out.steps,
            rounds: out.rounds.as_ref().map(Vec::len),
            terminated: out.terminated,
        })
    };
    if jobs <= 1 {
        (0..trials).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| LllError::capability(format!("thread pool: {e}")))?;
        pool.install(|| (0..trials).into_par_iter().map(one).collect())
    }
}
