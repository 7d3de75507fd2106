//! Walks, words, and named words.

use serde::Serialize;

use super::flaws::FlawId;
use super::model::Model;
use super::prob::Prob;
use crate::error::{LllError, Result};

/// A sequence of flaws.
pub type Word = Vec<FlawId>;

/// A flaw tagged with its occurrence number counted from the left (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NamedFlaw {
    pub flaw: FlawId,
    pub occurrence: u32,
}

pub type NamedWord = Vec<NamedFlaw>;

/// Names every position of `word`.
pub fn name_word(word: &[FlawId]) -> NamedWord {
    let mut counts = std::collections::HashMap::new();
    word.iter()
        .map(|&f| {
            let c = counts.entry(f).or_insert(0u32);
            *c += 1;
            NamedFlaw { flaw: f, occurrence: *c }
        })
        .collect()
}

pub fn unname(word: &[NamedFlaw]) -> Word {
    word.iter().map(|n| n.flaw).collect()
}

/// `λ_W = Π λ_{w_i}`; the empty word gives one.
pub fn lambda_of_word<T>(lambda: &[T], word: &[FlawId]) -> T
where
    T: Clone + num_traits::One + std::ops::Mul<Output = T>,
{
    word.iter().fold(T::one(), |acc, f| acc * lambda[f.index()].clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Step<S> {
    pub flaw: FlawId,
    pub next: S,
}

/// A trajectory `σ₁ →w₁ σ₂ → … → σ_{t+1}` with its probability `p(τ)`.
#[derive(Clone, Debug, Serialize)]
pub struct Walk<S> {
    pub start: S,
    pub steps: Vec<Step<S>>,
    pub prob: Prob,
}

impl<S: Clone> Walk<S> {
    /// The zero-step walk at `start` with weight `ω^init(start)`.
    pub fn new(start: S, initial_prob: Prob) -> Self {
        Walk { start, steps: Vec::new(), prob: initial_prob }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, flaw: FlawId, next: S, step_prob: &Prob) {
        self.steps.push(Step { flaw, next });
        self.prob = &self.prob * step_prob;
    }

    /// State `σ_{i+1}` in 0-based terms: `state(0)` is the start.
    pub fn state(&self, i: usize) -> &S {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].next
        }
    }

    pub fn last_state(&self) -> &S {
        self.state(self.len())
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.next))
    }

    pub fn word(&self) -> Word {
        self.steps.iter().map(|s| s.flaw).collect()
    }

    /// The first `len` steps, with probability left unset (zero).
    pub fn prefix_unweighted(&self, len: usize) -> Walk<S> {
        Walk { start: self.start.clone(), steps: self.steps[..len].to_vec(), prob: Prob::zero() }
    }
}

impl<S: PartialEq> PartialEq for Walk<S> {
    /// Walks are equal when their trajectories are; the stored weight is derived data.
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start && self.steps == other.steps
    }
}

impl<S: Eq> Eq for Walk<S> {}

impl<S: std::hash::Hash> std::hash::Hash for Walk<S> {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.start.hash(h);
        self.steps.hash(h);
    }
}

/// Recomputes `p(τ) = ω^init(σ₁) Π ρ(σ_{i+1}|w_i,σ_i)`, validating every step.
pub fn walk_probability<M: Model>(model: &M, walk: &Walk<M::State>) -> Result<Prob> {
    let mut p = model.initial_prob(&walk.start);
    let mut current = &walk.start;
    for (i, step) in walk.steps.iter().enumerate() {
        if !model.flaws_present(current).contains(step.flaw) {
            return Err(LllError::Contract { step: i, reason: format!("{} is not present", step.flaw) });
        }
        let q = model.transition_prob(step.flaw, current, &step.next).ok_or_else(|| LllError::Contract {
            step: i,
            reason: format!("{:?} is not an action of {} at {:?}", step.next, step.flaw, current),
        })?;
        p = &p * &q;
        current = &step.next;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::model::ExplicitInstance;

    #[test]
    fn lambda_examples() {
        let half = vec![0.5f64; 2];
        assert_eq!(lambda_of_word(&half, &[]), 1.0);
        assert_eq!(lambda_of_word(&half, &[FlawId(0), FlawId(1), FlawId(0)]), 0.125);
        let exact = vec![
            num_rational::BigRational::new(1.into(), 4.into()),
            num_rational::BigRational::new(1.into(), 3.into()),
        ];
        let w = [FlawId(0), FlawId(1), FlawId(0)];
        assert_eq!(lambda_of_word(&exact, &w), num_rational::BigRational::new(1.into(), 48.into()));
    }

    #[test]
    fn naming_counts_occurrences() {
        let w = [FlawId(0), FlawId(1), FlawId(0)];
        let named = name_word(&w);
        assert_eq!(named[2], NamedFlaw { flaw: FlawId(0), occurrence: 2 });
        assert_eq!(unname(&named), w.to_vec());
    }

    fn toy() -> ExplicitInstance {
        // state 0 flawless, states 1,2 carry flaw 0; each resample is a fair coin.
        let half = || Prob::ratio(1, 2);
        ExplicitInstance::builder(3, 1)
            .action(1, FlawId(0), vec![(0, half()), (2, half())])
            .action(2, FlawId(0), vec![(0, half()), (1, half())])
            .measure(vec![Prob::ratio(1, 3), Prob::ratio(1, 3), Prob::ratio(1, 3)])
            .build()
            .unwrap()
    }

    #[test]
    fn probability_of_walks() {
        let inst = toy();
        let w = Walk::new(1usize, Prob::ratio(1, 3));
        assert_eq!(walk_probability(&inst, &w).unwrap(), Prob::ratio(1, 3));

        let inst = inst.with_point_initial(1).unwrap();
        let mut w = Walk::new(1usize, Prob::one());
        w.push(FlawId(0), 2, &Prob::ratio(1, 2));
        w.push(FlawId(0), 0, &Prob::ratio(1, 2));
        assert_eq!(walk_probability(&inst, &w).unwrap(), Prob::ratio(1, 4));
        assert_eq!(w.prob, Prob::ratio(1, 4));
    }

    #[test]
    fn invalid_step_is_reported_with_index() {
        let inst = toy();
        let mut w = Walk::new(1usize, Prob::ratio(1, 3));
        w.push(FlawId(0), 2, &Prob::ratio(1, 2));
        w.push(FlawId(0), 2, &Prob::ratio(1, 2));
        assert!(matches!(walk_probability(&inst, &w), Err(LllError::Contract { step: 1, .. })));
    }
}
