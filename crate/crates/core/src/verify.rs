//! Exhaustive verifiers of the structural conditions on `(ρ, ∼)` over an
//! enumerated instance: atomicity, the potential causality graph, weak and
//! strong commutativity, and the regenerating equation. Also computes the
//! minimal flaw charges.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::domain::prob::PRODUCT_TOLERANCE;
use crate::domain::{DependencyGraph, ExplicitInstance, FlawId, Prob, StateId};
use crate::error::{LllError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Several sources reach `target` by addressing `flaw`.
    Atomicity { flaw: FlawId, target: StateId, sources: Vec<StateId> },
    /// `from →flaw→ to` makes `created` present outside `(F_σ − {f}) ∪ Γ(f)`.
    Causality { from: StateId, flaw: FlawId, to: StateId, created: FlawId },
    /// The `fg`-walks through `unmatched` middle states have no SWAP image.
    Commutativity { f: FlawId, g: FlawId, start: StateId, end: StateId, unmatched: Vec<StateId> },
    /// The regenerating equation fails at `target`.
    Regenerating { flaw: FlawId, target: StateId, lhs: String, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: &'static str,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub checked_count: usize,
}

impl VerificationReport {
    fn new(check: &'static str, witnesses: Vec<Witness>, checked_count: usize) -> Self {
        VerificationReport { check, passed: witnesses.is_empty(), witnesses, checked_count }
    }
}

fn check_dep(inst: &ExplicitInstance, dep: &DependencyGraph) -> Result<()> {
    if dep.flaw_count() != inst.flaw_count() {
        return Err(LllError::input(format!(
            "graph has {} flaws but the instance has {}",
            dep.flaw_count(),
            inst.flaw_count()
        )));
    }
    Ok(())
}

/// Per flaw: target state ↦ list of `(source, ρ(target|f,source))`.
type Predecessors = Vec<BTreeMap<StateId, Vec<(StateId, Prob)>>>;

fn predecessors(inst: &ExplicitInstance) -> Predecessors {
    let mut out: Predecessors = vec![BTreeMap::new(); inst.flaw_count()];
    for s in 0..inst.state_count() {
        for (f, targets) in inst.actions_at(s) {
            for (t, p) in targets {
                out[f.index()].entry(*t).or_default().push((s, p.clone()));
            }
        }
    }
    out
}

pub fn check_atomicity(inst: &ExplicitInstance) -> Result<VerificationReport> {
    let pred = predecessors(inst);
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for (f, map) in pred.iter().enumerate() {
        for (t, sources) in map {
            checked += 1;
            if sources.len() > 1 {
                witnesses.push(Witness::Atomicity {
                    flaw: FlawId(f as u32),
                    target: *t,
                    sources: sources.iter().map(|(s, _)| *s).collect(),
                });
            }
        }
    }
    Ok(VerificationReport::new("atomicity", witnesses, checked))
}

pub fn check_causality_graph(inst: &ExplicitInstance, dep: &DependencyGraph) -> Result<VerificationReport> {
    check_dep(inst, dep)?;
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for s in 0..inst.state_count() {
        for (f, targets) in inst.actions_at(s) {
            let mut allowed = inst.present(s).clone();
            allowed.remove(*f);
            let allowed = allowed.union(dep.gamma(*f));
            for (t, _) in targets {
                checked += 1;
                for g in inst.present(*t).difference(&allowed).iter() {
                    witnesses.push(Witness::Causality { from: s, flaw: *f, to: *t, created: g });
                }
            }
        }
    }
    Ok(VerificationReport::new("causality", witnesses, checked))
}

/// The least symmetric relation satisfying the causality inclusion.
pub fn infer_minimal_causality(inst: &ExplicitInstance) -> DependencyGraph {
    let mut dep = DependencyGraph::edgeless(inst.flaw_count());
    for s in 0..inst.state_count() {
        for (f, targets) in inst.actions_at(s) {
            let mut kept = inst.present(s).clone();
            kept.remove(*f);
            for (t, _) in targets {
                for g in inst.present(*t).difference(&kept).iter() {
                    dep.add_edge(*f, g);
                }
            }
        }
    }
    dep
}

/// Kuhn's augmenting-path matching. `adj[i]` lists right vertices adjacent
/// to left vertex `i`; returns `match_of_left`.
fn bipartite_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for i in 0..adj.len() {
        let mut seen = vec![false; right];
        augment(i, adj, &mut seen, &mut owner);
    }
    let mut left = vec![None; adj.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            left[*i] = Some(j);
        }
    }
    left
}

/// Key `(f, g, σ₁, σ₂, σ₃)` of an `fg`-walk; the value is the middle state
/// `σ₂′` of its image `σ₁ →g σ₂′ →f σ₃`.
pub type SwapMap = HashMap<(FlawId, FlawId, StateId, StateId, StateId), StateId>;

struct Group {
    fg: Vec<(StateId, Prob)>,
    gf: Vec<(StateId, Prob)>,
}

/// Groups the two-step walks by `(f, g, σ₁, σ₃)` for every ordered pair of
/// distinct flaws with `f ≁ g`.
fn groups(inst: &ExplicitInstance, dep: &DependencyGraph) -> BTreeMap<(FlawId, FlawId, StateId, StateId), Group> {
    let mut out: BTreeMap<(FlawId, FlawId, StateId, StateId), Group> = BTreeMap::new();
    for s1 in 0..inst.state_count() {
        for (f, t1) in inst.actions_at(s1) {
            for (s2, p1) in t1 {
                for (g, t2) in inst.actions_at(*s2) {
                    if f == g || dep.adjacent(*f, *g) {
                        continue;
                    }
                    for (s3, p2) in t2 {
                        let p = p1 * p2;
                        out.entry((*f, *g, s1, *s3))
                            .or_insert_with(|| Group { fg: Vec::new(), gf: Vec::new() })
                            .fg
                            .push((*s2, p.clone()));
                        out.entry((*g, *f, s1, *s3))
                            .or_insert_with(|| Group { fg: Vec::new(), gf: Vec::new() })
                            .gf
                            .push((*s2, p));
                    }
                }
            }
        }
    }
    out
}

fn commutativity(
    inst: &ExplicitInstance,
    dep: &DependencyGraph,
    strong: bool,
) -> Result<(Vec<Witness>, usize, SwapMap)> {
    check_dep(inst, dep)?;
    let mut witnesses = Vec::new();
    let mut checked = 0;
    let mut swap = SwapMap::new();
    for ((f, g, s1, s3), grp) in groups(inst, dep) {
        if grp.fg.is_empty() {
            continue;
        }
        checked += grp.fg.len();
        let adj: Vec<Vec<usize>> = grp
            .fg
            .iter()
            .map(|(_, p)| {
                (0..grp.gf.len())
                    .filter(|&j| !strong || p.approx_eq(&grp.gf[j].1, PRODUCT_TOLERANCE))
                    .collect()
            })
            .collect();
        let m = bipartite_matching(&adj, grp.gf.len());
        let unmatched: Vec<StateId> =
            m.iter().zip(&grp.fg).filter(|(x, _)| x.is_none()).map(|(_, (s2, _))| *s2).collect();
        if unmatched.is_empty() {
            for (i, j) in m.iter().enumerate() {
                swap.insert((f, g, s1, grp.fg[i].0, s3), grp.gf[j.expect("saturated")].0);
            }
        } else {
            witnesses.push(Witness::Commutativity { f, g, start: s1, end: s3, unmatched });
        }
    }
    Ok((witnesses, checked, swap))
}

/// Existence of an injective SWAP, decided per group by a saturating matching.
pub fn check_weak_commutativity(inst: &ExplicitInstance, dep: &DependencyGraph) -> Result<VerificationReport> {
    let (w, c, _) = commutativity(inst, dep, false)?;
    Ok(VerificationReport::new("weak_commutativity", w, c))
}

/// As the weak check, with SWAP restricted to pairs of equal probability products.
pub fn check_strong_commutativity(inst: &ExplicitInstance, dep: &DependencyGraph) -> Result<VerificationReport> {
    let (w, c, _) = commutativity(inst, dep, true)?;
    Ok(VerificationReport::new("strong_commutativity", w, c))
}

/// The weak test for atomic instances: every `fg`-walk has some `gf`-walk
/// with the same endpoints.
pub fn check_weak_commutativity_atomic(inst: &ExplicitInstance, dep: &DependencyGraph) -> Result<VerificationReport> {
    check_dep(inst, dep)?;
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for ((f, g, s1, s3), grp) in groups(inst, dep) {
        checked += grp.fg.len();
        if !grp.fg.is_empty() && grp.gf.is_empty() {
            witnesses.push(Witness::Commutativity {
                f,
                g,
                start: s1,
                end: s3,
                unmatched: grp.fg.iter().map(|(s, _)| *s).collect(),
            });
        }
    }
    Ok(VerificationReport::new("weak_commutativity_atomic", witnesses, checked))
}

/// A concrete SWAP mapping; fails with a contract error when none exists.
pub fn realize_swap(inst: &ExplicitInstance, dep: &DependencyGraph, strong: bool) -> Result<SwapMap> {
    let (w, _, map) = commutativity(inst, dep, strong)?;
    match w.first() {
        None => Ok(map),
        Some(Witness::Commutativity { f, g, start, .. }) => Err(LllError::Contract {
            step: 0,
            reason: format!("no injective SWAP for ({f},{g}) walks from state {start}"),
        }),
        Some(_) => unreachable!(),
    }
}

/// `(1/ω(f)) Σ_{σ∈f} ρ(σ′|f,σ) ω(σ) = ω(σ′)` for all `f, σ′`.
pub fn check_regenerating(inst: &ExplicitInstance) -> Result<VerificationReport> {
    let pred = predecessors(inst);
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for (f, map) in pred.iter().enumerate() {
        let wf = inst.flaw_measure(FlawId(f as u32));
        for t in 0..inst.state_count() {
            checked += 1;
            let sum: Prob = map
                .get(&t)
                .map(|v| v.iter().map(|(s, p)| p * inst.measure(*s)).sum())
                .unwrap_or_else(Prob::zero);
            let lhs = &sum / &wf;
            if !lhs.approx_eq(inst.measure(t), PRODUCT_TOLERANCE) {
                witnesses.push(Witness::Regenerating {
                    flaw: FlawId(f as u32),
                    target: t,
                    lhs: lhs.to_string(),
                    rhs: inst.measure(t).to_string(),
                });
            }
        }
    }
    Ok(VerificationReport::new("regenerating", witnesses, checked))
}

/// The least `λ` with `λ_f ≥ Σ_{σ∈f: σ′∈A(f,σ)} ρ(σ′|f,σ) ω(σ)/ω(σ′)` for all `σ′`.
pub fn minimal_lambda(inst: &ExplicitInstance) -> Vec<Prob> {
    predecessors(inst)
        .iter()
        .map(|map| {
            map.iter()
                .map(|(t, v)| {
                    let s: Prob = v.iter().map(|(s, p)| p * inst.measure(*s)).sum();
                    &s / inst.measure(*t)
                })
                .fold(Prob::zero(), Prob::max)
        })
        .collect()
}
