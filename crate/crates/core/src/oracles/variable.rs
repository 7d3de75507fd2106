//! The Moser–Tardos variable model: `Ω = X₁ × … × X_n` under a product
//! measure, flaws depending on a declared variable set, and resampling that
//! redraws exactly those variables.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::model::sample_index;
use crate::domain::prob::SUM_TOLERANCE;
use crate::domain::rng::{self, LllRng};
use crate::domain::{DependencyGraph, EnumerableModel, FlawId, FlawSet, Model, Prob};
use crate::error::{LllError, Result};

pub type Assignment = Vec<u32>;

/// A literal `x_var = value`, or `x_var ≠ value` when negated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub value: u32,
    #[serde(default)]
    pub negated: bool,
}

impl Literal {
    fn holds(&self, x: &[u32]) -> bool {
        (x[self.var] == self.value) != self.negated
    }
}

type Predicate = Arc<dyn Fn(&[u32]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum FlawPredicate {
    /// Bad tuples of values, listed in the order of the flaw's `vbl`.
    Assignments(Vec<Vec<u32>>),
    /// A CNF clause; the flaw is present when every literal is false.
    Clause(Vec<Literal>),
    /// An arbitrary predicate over the full assignment. It must only read
    /// the declared variables; this is spot-checked at construction.
    Custom(Predicate),
}

impl fmt::Debug for FlawPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlawPredicate::Assignments(a) => f.debug_tuple("Assignments").field(a).finish(),
            FlawPredicate::Clause(c) => f.debug_tuple("Clause").field(c).finish(),
            FlawPredicate::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VariableFlaw {
    pub vbl: Vec<usize>,
    pub predicate: FlawPredicate,
}

impl VariableFlaw {
    pub fn assignments(vbl: Vec<usize>, bad: Vec<Vec<u32>>) -> Self {
        VariableFlaw { vbl, predicate: FlawPredicate::Assignments(bad) }
    }

    /// The clause over `literals`; `vbl` is the set of variables they mention.
    pub fn clause(literals: Vec<Literal>) -> Self {
        let mut vbl: Vec<usize> = literals.iter().map(|l| l.var).collect();
        vbl.sort_unstable();
        vbl.dedup();
        VariableFlaw { vbl, predicate: FlawPredicate::Clause(literals) }
    }

    pub fn custom(vbl: Vec<usize>, p: impl Fn(&[u32]) -> bool + Send + Sync + 'static) -> Self {
        VariableFlaw { vbl, predicate: FlawPredicate::Custom(Arc::new(p)) }
    }

    fn holds(&self, x: &[u32]) -> bool {
        match &self.predicate {
            FlawPredicate::Assignments(bad) => {
                bad.iter().any(|t| t.iter().zip(&self.vbl).all(|(&val, &v)| x[v] == val))
            }
            FlawPredicate::Clause(lits) => lits.iter().all(|l| !l.holds(x)),
            FlawPredicate::Custom(p) => p(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VariableInitial {
    /// `ω^init = ω`.
    Product,
    Point(Assignment),
}

#[derive(Clone, Debug)]
pub struct VariableModel {
    domains: Vec<usize>,
    dists: Vec<Vec<Prob>>,
    flaws: Vec<VariableFlaw>,
    initial: VariableInitial,
}

const PROBES: usize = 256;
const NONEMPTY_SCAN_LIMIT: u128 = 1 << 20;

/// Builds a variable model. `dists[i]` is the distribution of `x_i` over
/// `0..domains[i]`; `None` means uniform.
pub fn build_variable_model(
    domains: Vec<usize>,
    dists: Option<Vec<Vec<Prob>>>,
    flaws: Vec<VariableFlaw>,
    initial: VariableInitial,
) -> Result<VariableModel> {
    if domains.iter().any(|&d| d == 0 || d > u32::MAX as usize) {
        return Err(LllError::input("every variable needs a non-empty domain"));
    }
    let dists = match dists {
        Some(d) => d,
        None => domains.iter().map(|&d| vec![Prob::ratio(1, d as u64); d]).collect(),
    };
    if dists.len() != domains.len() {
        return Err(LllError::input("one distribution per variable is required"));
    }
    for (i, (d, dist)) in domains.iter().zip(&dists).enumerate() {
        let total: Prob = dist.iter().cloned().sum();
        if dist.len() != *d || dist.iter().any(|p| !p.is_positive()) || !total.approx_eq(&Prob::one(), SUM_TOLERANCE) {
            return Err(LllError::input(format!(
                "distribution of variable {i} must be positive on its domain and sum to 1"
            )));
        }
    }
    let model = VariableModel { domains, dists, flaws, initial };
    model.validate()?;
    Ok(model)
}

impl VariableModel {
    fn validate(&self) -> Result<()> {
        let n = self.domains.len();
        for (k, f) in self.flaws.iter().enumerate() {
            if f.vbl.is_empty() || f.vbl.iter().any(|&v| v >= n) {
                return Err(LllError::input(format!("flaw f{k}: vbl must be a non-empty set of variables")));
            }
            let mut sorted = f.vbl.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != f.vbl.len() {
                return Err(LllError::input(format!("flaw f{k}: vbl repeats a variable")));
            }
            match &f.predicate {
                FlawPredicate::Assignments(bad) => {
                    for t in bad {
                        if t.len() != f.vbl.len()
                            || t.iter().zip(&f.vbl).any(|(&val, &v)| val as usize >= self.domains[v])
                        {
                            return Err(LllError::input(format!("flaw f{k}: bad tuple {t:?} does not fit vbl")));
                        }
                    }
                }
                FlawPredicate::Clause(lits) => {
                    if let Some(l) = lits.iter().find(|l| l.var >= n || l.value as usize >= self.domains[l.var]) {
                        return Err(LllError::input(format!("flaw f{k}: literal {l:?} out of range")));
                    }
                }
                FlawPredicate::Custom(_) => self.probe_custom(k)?,
            }
            if !self.flaw_nonempty(k) {
                return Err(LllError::input(format!("flaw f{k} is empty")));
            }
        }
        if let VariableInitial::Point(x) = &self.initial {
            if !self.in_range(x) {
                return Err(LllError::input("initial point is not an assignment of the variables"));
            }
        }
        Ok(())
    }

    fn in_range(&self, x: &[u32]) -> bool {
        x.len() == self.domains.len() && x.iter().zip(&self.domains).all(|(&v, &d)| (v as usize) < d)
    }

    /// Re-evaluates a custom predicate after perturbing variables outside
    /// `vbl`; any change in the verdict means the predicate reads them.
    fn probe_custom(&self, k: usize) -> Result<()> {
        let f = &self.flaws[k];
        let outside: Vec<usize> = (0..self.domains.len()).filter(|v| !f.vbl.contains(v)).collect();
        if outside.is_empty() {
            return Ok(());
        }
        let mut rng = rng::stream(0x7072_6f62, k as u64);
        for _ in 0..PROBES {
            let mut x: Assignment = self.domains.iter().map(|&d| rng.random_range(0..d as u32)).collect();
            let before = f.holds(&x);
            for &v in &outside {
                x[v] = rng.random_range(0..self.domains[v] as u32);
            }
            if f.holds(&x) != before {
                return Err(LllError::Contract {
                    step: 0,
                    reason: format!("predicate of f{k} reads variables outside its vbl {:?}", f.vbl),
                });
            }
        }
        Ok(())
    }

    fn flaw_nonempty(&self, k: usize) -> bool {
        let f = &self.flaws[k];
        let size: u128 = f.vbl.iter().map(|&v| self.domains[v] as u128).product();
        if size > NONEMPTY_SCAN_LIMIT {
            return true;
        }
        let mut x: Assignment = vec![0; self.domains.len()];
        let mut found = false;
        self.for_each_on(&f.vbl, &mut x, 0, &mut |x| found |= f.holds(x));
        found
    }

    fn for_each_on(&self, vars: &[usize], x: &mut Assignment, i: usize, visit: &mut dyn FnMut(&Assignment)) {
        if i == vars.len() {
            visit(x);
            return;
        }
        let v = vars[i];
        for val in 0..self.domains[v] as u32 {
            x[v] = val;
            self.for_each_on(vars, x, i + 1, visit);
        }
    }

    pub fn variable_count(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn flaws(&self) -> &[VariableFlaw] {
        &self.flaws
    }

    pub fn vbl(&self, f: FlawId) -> &[usize] {
        &self.flaws[f.index()].vbl
    }

    pub fn with_initial(mut self, initial: VariableInitial) -> Result<Self> {
        self.initial = initial;
        self.validate()?;
        Ok(self)
    }

    /// The relation `f ∼ g` iff `vbl(f) ∩ vbl(g) ≠ ∅`; every flaw has a loop.
    pub fn dependency_graph(&self) -> DependencyGraph {
        let m = self.flaws.len();
        let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); self.domains.len()];
        for (k, f) in self.flaws.iter().enumerate() {
            for &v in &f.vbl {
                by_var[v].push(k);
            }
        }
        let mut dep = DependencyGraph::edgeless(m);
        for list in &by_var {
            for &a in list {
                for &b in list {
                    dep.add_edge(FlawId(a as u32), FlawId(b as u32));
                }
            }
        }
        dep
    }

    fn product_prob(&self, x: &[u32], vars: &[usize]) -> Prob {
        vars.iter().map(|&v| self.dists[v][x[v] as usize].clone()).product()
    }
}

impl Model for VariableModel {
    type State = Assignment;

    fn flaw_count(&self) -> usize {
        self.flaws.len()
    }

    fn flaws_present(&self, x: &Assignment) -> FlawSet {
        self.flaws
            .iter()
            .enumerate()
            .filter(|(_, f)| f.holds(x))
            .map(|(k, _)| FlawId(k as u32))
            .collect()
    }

    fn sample_initial(&self, rng: &mut LllRng) -> Assignment {
        match &self.initial {
            VariableInitial::Point(x) => x.clone(),
            VariableInitial::Product => self.dists.iter().map(|d| sample_index(d, rng) as u32).collect(),
        }
    }

    fn initial_prob(&self, x: &Assignment) -> Prob {
        match &self.initial {
            VariableInitial::Point(p) => {
                if p == x {
                    Prob::one()
                } else {
                    Prob::zero()
                }
            }
            VariableInitial::Product => {
                let all: Vec<usize> = (0..self.domains.len()).collect();
                self.product_prob(x, &all)
            }
        }
    }

    fn sample_action(&self, f: FlawId, x: &Assignment, rng: &mut LllRng) -> Result<(Assignment, Prob)> {
        let flaw = self
            .flaws
            .get(f.index())
            .ok_or_else(|| LllError::input(format!("{f} out of range")))?;
        if !flaw.holds(x) {
            return Err(LllError::Strategy(format!("{f} is not present")));
        }
        let mut y = x.clone();
        for &v in &flaw.vbl {
            y[v] = sample_index(&self.dists[v], rng) as u32;
        }
        let p = self.product_prob(&y, &flaw.vbl);
        Ok((y, p))
    }

    fn transition_prob(&self, f: FlawId, x: &Assignment, y: &Assignment) -> Option<Prob> {
        let flaw = self.flaws.get(f.index())?;
        if !flaw.holds(x) || !self.in_range(y) {
            return None;
        }
        let same_outside = (0..x.len()).all(|v| flaw.vbl.contains(&v) || x[v] == y[v]);
        same_outside.then(|| self.product_prob(y, &flaw.vbl))
    }
}

impl EnumerableModel for VariableModel {
    fn states(&self) -> Vec<Assignment> {
        let all: Vec<usize> = (0..self.domains.len()).collect();
        let mut out = Vec::new();
        let mut x = vec![0; self.domains.len()];
        self.for_each_on(&all, &mut x, 0, &mut |x| out.push(x.clone()));
        out
    }

    fn state_count_hint(&self) -> Option<u128> {
        self.domains
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .or(Some(u128::MAX))
    }

    fn action_support(&self, f: FlawId, x: &Assignment) -> Vec<(Assignment, Prob)> {
        let flaw = &self.flaws[f.index()];
        let mut out = Vec::new();
        let mut y = x.clone();
        self.for_each_on(&flaw.vbl, &mut y, 0, &mut |y| out.push((y.clone(), self.product_prob(y, &flaw.vbl))));
        out
    }

    fn measure(&self, x: &Assignment) -> Prob {
        let all: Vec<usize> = (0..self.domains.len()).collect();
        self.product_prob(x, &all)
    }

    fn label(&self, x: &Assignment) -> String {
        x.iter().map(u32::to_string).collect::<Vec<_>>().join("")
    }
}
