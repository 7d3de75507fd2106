//! The abstract model contract and its explicit (enumerated) realization.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

use super::flaws::{FlawId, FlawSet};
use super::prob::{Prob, SUM_TOLERANCE};
use super::rng::LllRng;
use crate::error::{LllError, Result};

/// A discrete space with flaws and resampling oracles, usable generatively.
///
/// `sample_action` returns the drawn state together with its probability
/// `ρ(σ'|f,σ)`; `transition_prob` answers the same question for an arbitrary
/// candidate and returns `None` when `σ'` is not in `A(f,σ)` or `f` is absent.
pub trait Model: Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn flaw_count(&self) -> usize;

    fn flaws_present(&self, state: &Self::State) -> FlawSet;

    fn sample_initial(&self, rng: &mut LllRng) -> Self::State;

    fn initial_prob(&self, state: &Self::State) -> Prob;

    fn sample_action(&self, f: FlawId, state: &Self::State, rng: &mut LllRng) -> Result<(Self::State, Prob)>;

    fn transition_prob(&self, f: FlawId, state: &Self::State, next: &Self::State) -> Option<Prob>;
}

/// A model whose state space can be listed.
pub trait EnumerableModel: Model {
    /// All states in the model's canonical order.
    fn states(&self) -> Vec<Self::State>;

    /// `|Ω|` when it is cheap to compute; lets callers refuse oversized
    /// enumerations before listing anything.
    fn state_count_hint(&self) -> Option<u128> {
        None
    }

    /// `A(f,σ)` with probabilities; only called when `f ∈ F_σ`.
    fn action_support(&self, f: FlawId, state: &Self::State) -> Vec<(Self::State, Prob)>;

    /// The reference measure `ω(σ)`.
    fn measure(&self, state: &Self::State) -> Prob;

    fn label(&self, state: &Self::State) -> String {
        format!("{state:?}")
    }
}

pub type StateId = usize;

/// Draws an index with probability proportional to the weights.
pub(crate) fn sample_index(weights: &[Prob], rng: &mut LllRng) -> usize {
    let total: f64 = weights.iter().map(Prob::to_f64).sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        x -= w.to_f64();
        if x < 0.0 {
            return i;
        }
    }
    // Rounding can leave x marginally non-negative: take the last positive weight.
    weights.iter().rposition(Prob::is_positive).unwrap_or(0)
}

fn sums_to_one(ps: &[Prob]) -> bool {
    let s: Prob = ps.iter().cloned().sum();
    s.approx_eq(&Prob::one(), SUM_TOLERANCE)
}

/// A fully enumerated instance with dense state ids. All verifiers and
/// enumerations operate on this form.
#[derive(Clone, Debug)]
pub struct ExplicitInstance {
    flaw_count: usize,
    labels: Vec<String>,
    present: Vec<FlawSet>,
    // actions[σ] sorted by flaw; each entry is the support of ρ(·|f,σ).
    actions: Vec<Vec<(FlawId, Vec<(StateId, Prob)>)>>,
    measure: Vec<Prob>,
    initial: Vec<Prob>,
}

impl ExplicitInstance {
    pub fn builder(state_count: usize, flaw_count: usize) -> ExplicitBuilder {
        ExplicitBuilder {
            flaw_count,
            labels: (0..state_count).map(|i| format!("s{i}")).collect(),
            actions: vec![Vec::new(); state_count],
            measure: None,
            initial: None,
        }
    }

    /// Enumerates a model. Fails when the model has more than `cap` states.
    pub fn from_model<M: EnumerableModel>(model: &M, cap: usize) -> Result<Self> {
        if model.state_count_hint().is_some_and(|n| n > cap as u128) {
            return Err(LllError::resource("enumerated states", cap));
        }
        let states = model.states();
        if states.len() > cap {
            return Err(LllError::resource("enumerated states", cap));
        }
        let index: HashMap<&M::State, StateId> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut b = ExplicitInstance::builder(states.len(), model.flaw_count());
        for (i, s) in states.iter().enumerate() {
            b.labels[i] = model.label(s);
            for f in model.flaws_present(s).iter() {
                let mut targets = Vec::new();
                for (t, p) in model.action_support(f, s) {
                    let j = *index
                        .get(&t)
                        .ok_or_else(|| LllError::input(format!("action target {t:?} is not an enumerated state")))?;
                    targets.push((j, p));
                }
                b = b.action(i, f, targets);
            }
        }
        let measure = states.iter().map(|s| model.measure(s)).collect();
        let initial = states.iter().map(|s| model.initial_prob(s)).collect();
        b.measure(measure).initial(initial).build()
    }

    pub fn state_count(&self) -> usize {
        self.present.len()
    }

    pub fn flaw_count(&self) -> usize {
        self.flaw_count
    }

    pub fn label(&self, s: StateId) -> &str {
        &self.labels[s]
    }

    pub fn present(&self, s: StateId) -> &FlawSet {
        &self.present[s]
    }

    pub fn measure(&self, s: StateId) -> &Prob {
        &self.measure[s]
    }

    pub fn initial(&self, s: StateId) -> &Prob {
        &self.initial[s]
    }

    /// States with positive initial mass.
    pub fn initial_support(&self) -> Vec<StateId> {
        (0..self.state_count()).filter(|&s| self.initial[s].is_positive()).collect()
    }

    /// `A(f,σ)` with probabilities, or `None` if `f ∉ F_σ`.
    pub fn support(&self, f: FlawId, s: StateId) -> Option<&[(StateId, Prob)]> {
        let row = &self.actions[s];
        row.binary_search_by_key(&f, |(g, _)| *g).ok().map(|i| row[i].1.as_slice())
    }

    /// All flaws with their action lists at `s`.
    pub fn actions_at(&self, s: StateId) -> &[(FlawId, Vec<(StateId, Prob)>)] {
        &self.actions[s]
    }

    /// `ρ(σ'|f,σ)` or `None` when the step is not a valid walk.
    pub fn step_prob(&self, f: FlawId, s: StateId, t: StateId) -> Option<&Prob> {
        self.support(f, s)?.iter().find(|(x, _)| *x == t).map(|(_, p)| p)
    }

    pub fn is_rational(&self) -> bool {
        self.measure.iter().chain(&self.initial).all(Prob::is_exact)
            && self.actions.iter().flatten().flat_map(|(_, v)| v).all(|(_, p)| p.is_exact())
    }

    /// `ω(f) = Σ_{σ∈f} ω(σ)`.
    pub fn flaw_measure(&self, f: FlawId) -> Prob {
        (0..self.state_count()).filter(|&s| self.present[s].contains(f)).map(|s| self.measure[s].clone()).sum()
    }

    /// Replaces the initial distribution (it must still sum to one).
    pub fn with_initial(mut self, initial: Vec<Prob>) -> Result<Self> {
        if initial.len() != self.state_count() || initial.iter().any(Prob::is_negative) || !sums_to_one(&initial) {
            return Err(LllError::input("initial distribution must be non-negative and sum to 1"));
        }
        self.initial = initial;
        Ok(self)
    }

    /// Point mass on `s`.
    pub fn with_point_initial(self, s: StateId) -> Result<Self> {
        let n = self.state_count();
        let v = (0..n).map(|i| if i == s { Prob::one() } else { Prob::zero() }).collect();
        self.with_initial(v)
    }
}

pub struct ExplicitBuilder {
    flaw_count: usize,
    labels: Vec<String>,
    actions: Vec<Vec<(FlawId, Vec<(StateId, Prob)>)>>,
    measure: Option<Vec<Prob>>,
    initial: Option<Vec<Prob>>,
}

impl ExplicitBuilder {
    /// Declares `f ∈ F_σ` with the given action distribution.
    pub fn action(mut self, s: StateId, f: FlawId, targets: Vec<(StateId, Prob)>) -> Self {
        self.actions[s].push((f, targets));
        self
    }

    pub fn label(mut self, s: StateId, label: impl Into<String>) -> Self {
        self.labels[s] = label.into();
        self
    }

    pub fn measure(mut self, m: Vec<Prob>) -> Self {
        self.measure = Some(m);
        self
    }

    pub fn initial(mut self, m: Vec<Prob>) -> Self {
        self.initial = Some(m);
        self
    }

    pub fn build(self) -> Result<ExplicitInstance> {
        let n = self.actions.len();
        let uniform = || vec![Prob::ratio(1, n.max(1) as u64); n];
        let measure = self.measure.unwrap_or_else(uniform);
        let initial = match self.initial {
            Some(v) => v,
            None => measure.clone(),
        };
        if measure.len() != n || initial.len() != n {
            return Err(LllError::input("measure vectors must have one entry per state"));
        }
        if let Some(s) = measure.iter().position(|p| !p.is_positive()) {
            return Err(LllError::input(format!("measure must be positive everywhere (state {s})")));
        }
        if !sums_to_one(&measure) {
            return Err(LllError::input("measure must sum to 1"));
        }
        if initial.iter().any(Prob::is_negative) || !sums_to_one(&initial) {
            return Err(LllError::input("initial distribution must be non-negative and sum to 1"));
        }
        let mut actions = self.actions;
        let mut present = Vec::with_capacity(n);
        let mut seen = vec![false; self.flaw_count];
        for (s, row) in actions.iter_mut().enumerate() {
            row.sort_by_key(|(f, _)| *f);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(LllError::input(format!("flaw {} declared twice at state {s}", w[0].0)));
                }
            }
            for (f, targets) in row.iter() {
                if f.index() >= self.flaw_count {
                    return Err(LllError::input(format!("flaw {f} out of range")));
                }
                seen[f.index()] = true;
                if targets.is_empty() {
                    return Err(LllError::input(format!("empty action set for {f} at state {s}")));
                }
                if let Some((t, _)) = targets.iter().find(|(t, p)| *t >= n || !p.is_positive()) {
                    return Err(LllError::input(format!(
                        "action {f} at state {s}: target {t} out of range or non-positive probability"
                    )));
                }
                let ps: Vec<Prob> = targets.iter().map(|(_, p)| p.clone()).collect();
                if !sums_to_one(&ps) {
                    return Err(LllError::input(format!("action {f} at state {s} does not sum to 1")));
                }
                let mut ts: Vec<StateId> = targets.iter().map(|(t, _)| *t).collect();
                ts.sort_unstable();
                ts.dedup();
                if ts.len() != targets.len() {
                    return Err(LllError::input(format!("action {f} at state {s} repeats a target")));
                }
            }
            present.push(row.iter().map(|(f, _)| *f).collect());
        }
        if let Some(f) = seen.iter().position(|x| !x) {
            return Err(LllError::input(format!("flaw f{f} is empty (present in no state)")));
        }
        Ok(ExplicitInstance { flaw_count: self.flaw_count, labels: self.labels, present, actions, measure, initial })
    }
}

impl Model for ExplicitInstance {
    type State = StateId;

    fn flaw_count(&self) -> usize {
        self.flaw_count
    }

    fn flaws_present(&self, s: &StateId) -> FlawSet {
        self.present[*s].clone()
    }

    fn sample_initial(&self, rng: &mut LllRng) -> StateId {
        sample_index(&self.initial, rng)
    }

    fn initial_prob(&self, s: &StateId) -> Prob {
        self.initial[*s].clone()
    }

    fn sample_action(&self, f: FlawId, s: &StateId, rng: &mut LllRng) -> Result<(StateId, Prob)> {
        let support = self
            .support(f, *s)
            .ok_or_else(|| LllError::Strategy(format!("{f} is not present in state {s}")))?;
        let weights: Vec<Prob> = support.iter().map(|(_, p)| p.clone()).collect();
        let (t, p) = &support[sample_index(&weights, rng)];
        Ok((*t, p.clone()))
    }

    fn transition_prob(&self, f: FlawId, s: &StateId, next: &StateId) -> Option<Prob> {
        self.step_prob(f, *s, *next).cloned()
    }
}
