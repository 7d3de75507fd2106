//! Perfect matchings of a host graph satisfying condition (*): the complete
//! graph `K_{2n}` and disjoint unions of complete bipartite graphs
//! `K_{m,m}` (permutations). Flaws are `f_M = {σ : M ⊆ σ}`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::rng::LllRng;
use crate::domain::{DependencyGraph, EnumerableModel, FlawId, FlawSet, Model, Prob};
use crate::error::{LllError, Result};

pub type Vertex = u32;
/// An undirected edge stored with the smaller endpoint first.
pub type Edge = (Vertex, Vertex);
/// A directed copy of an edge.
pub type DirEdge = (Vertex, Vertex);

pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum HostCase {
    /// `K_{2n}`.
    Complete { n: usize },
    /// Blocks `(A_i, B_i)` with edges `A_i × B_i`.
    Bipartite { blocks: Vec<(Vec<Vertex>, Vec<Vertex>)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostGraph {
    case: HostCase,
    vertex_count: usize,
    // For the bipartite case: block index and side (false = A) per vertex.
    block: Vec<(usize, bool)>,
}

impl HostGraph {
    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LllError::input("the complete host needs at least 2 vertices"));
        }
        Ok(HostGraph { case: HostCase::Complete { n }, vertex_count: 2 * n, block: Vec::new() })
    }

    /// Validates `|A_i| = |B_i|` and that the blocks partition `0..2N`.
    pub fn bipartite(blocks: Vec<(Vec<Vertex>, Vec<Vertex>)>) -> Result<Self> {
        let total: usize = blocks.iter().map(|(a, b)| a.len() + b.len()).sum();
        if total == 0 {
            return Err(LllError::input("the bipartite host needs at least one vertex pair"));
        }
        let mut block = vec![None; total];
        for (i, (a, b)) in blocks.iter().enumerate() {
            if a.len() != b.len() || a.is_empty() {
                return Err(LllError::input(format!("block {i}: sides must be non-empty and of equal size")));
            }
            for (side, part) in [(false, a), (true, b)] {
                for &v in part {
                    let slot = block
                        .get_mut(v as usize)
                        .ok_or_else(|| LllError::input(format!("vertex {v} out of range 0..{total}")))?;
                    if slot.is_some() {
                        return Err(LllError::input(format!("vertex {v} appears twice")));
                    }
                    *slot = Some((i, side));
                }
            }
        }
        let block = block.into_iter().map(|b| b.expect("all slots filled")).collect();
        Ok(HostGraph { case: HostCase::Bipartite { blocks }, vertex_count: total, block })
    }

    pub fn from_case(case: HostCase) -> Result<Self> {
        match case {
            HostCase::Complete { n } => HostGraph::complete(n),
            HostCase::Bipartite { blocks } => HostGraph::bipartite(blocks),
        }
    }

    pub fn case(&self) -> &HostCase {
        &self.case
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let n = self.vertex_count as Vertex;
        if u == v || u >= n || v >= n {
            return false;
        }
        match self.case {
            HostCase::Complete { .. } => true,
            HostCase::Bipartite { .. } => {
                let (bu, su) = self.block[u as usize];
                let (bv, sv) = self.block[v as usize];
                bu == bv && su != sv
            }
        }
    }

    /// `|Ω|`: `(2n−1)!!` or `Π m_i!`.
    pub fn matching_count(&self) -> BigInt {
        match &self.case {
            HostCase::Complete { n } => (1..=*n).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1)),
            HostCase::Bipartite { blocks } => blocks
                .iter()
                .map(|(a, _)| (1..=a.len()).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
                .product(),
        }
    }

    /// Checks that `m` is a matching inside `E`; returns it sorted.
    pub fn validate_matching(&self, m: &[Edge]) -> Result<Vec<Edge>> {
        let mut used = vec![false; self.vertex_count];
        let mut out = Vec::with_capacity(m.len());
        for &(u, v) in m {
            if !self.has_edge(u, v) {
                return Err(LllError::input(format!("{{{u},{v}}} is not an edge of the host graph")));
            }
            for x in [u, v] {
                if std::mem::replace(&mut used[x as usize], true) {
                    return Err(LllError::input(format!("edges share vertex {x}: not a matching")));
                }
            }
            out.push(edge(u, v));
        }
        out.sort_unstable();
        Ok(out)
    }

    fn check_state(&self, s: &MatchingState) -> Result<()> {
        let ok = s.partner.len() == self.vertex_count
            && s.partner.iter().enumerate().all(|(u, &v)| {
                (v as usize) < self.vertex_count && s.partner[v as usize] == u as Vertex && self.has_edge(u as Vertex, v)
            });
        if ok {
            Ok(())
        } else {
            Err(LllError::input("state is not a perfect matching of the host graph"))
        }
    }

    /// Single-edge `ψ̂`: splice `{u,v}` into `σ`.
    fn psi_edge(&self, s: &mut MatchingState, (u, v): Edge) {
        let (pu, pv) = (s.partner[u as usize], s.partner[v as usize]);
        if pu == v {
            return;
        }
        debug_assert!(self.has_edge(pu, pv), "condition (*) violated");
        s.set(u, v);
        s.set(pu, pv);
    }

    /// `ψ̂(M,σ)`, folding the single-edge splice over `M` in sorted order.
    pub fn hat_psi(&self, m: &[Edge], s: &MatchingState) -> Result<MatchingState> {
        let m = self.validate_matching(m)?;
        self.check_state(s)?;
        let mut out = s.clone();
        for &e in &m {
            self.psi_edge(&mut out, e);
        }
        Ok(out)
    }

    /// `Swap_σ((u,v),(u′,v′)) = (σ − {{u,v},{u′,v′}}) ∪ {{u,u′},{v,v′}}`.
    pub fn swap_sigma(&self, s: &MatchingState, a: DirEdge, b: DirEdge) -> Result<MatchingState> {
        let ((u, v), (u2, v2)) = (a, b);
        if !s.contains_dir(a) || !s.contains_dir(b) {
            return Err(LllError::input("swap arguments must be directed edges of σ"));
        }
        if a == b {
            return Err(LllError::input("Swap_σ(e,e) produces loops, not a matching"));
        }
        if (u2, v2) == (v, u) {
            return Ok(s.clone());
        }
        if !self.has_edge(u, u2) || !self.has_edge(v, v2) {
            return Err(LllError::input(format!(
                "swap yields {{{u},{u2}}},{{{v},{v2}}}, which is not a perfect matching of the host"
            )));
        }
        let mut out = s.clone();
        out.set(u, u2);
        out.set(v, v2);
        Ok(out)
    }

    /// `N_σ(u,v)`: directed edges `(u′,v′)` of σ whose swap with `(u,v)` stays in Ω.
    pub fn neighbors_n(&self, s: &MatchingState, a: DirEdge) -> Result<Vec<DirEdge>> {
        if !s.contains_dir(a) {
            return Err(LllError::input("(u,v) must be a directed edge of σ"));
        }
        let mut out = Vec::new();
        for (x, y) in s.edges() {
            for d in [(x, y), (y, x)] {
                if d != a && self.swap_sigma(s, a, d).is_ok() {
                    out.push(d);
                }
            }
        }
        Ok(out)
    }

    /// Candidate partners of the backward sampler at step `i` (0-based into `m`).
    fn candidates(&self, s: &MatchingState, m: &[Edge], i: usize) -> Vec<DirEdge> {
        let (u, v) = m[i];
        let earlier = &m[..i];
        self.neighbors_n(s, (u, v))
            .expect("e_i ∈ σ_i")
            .into_iter()
            .filter(|&(x, y)| !earlier.contains(&edge(x, y)))
            .collect()
    }

    /// Backward sampler: draws `σ₀` with `ψ̂(M,σ₀) = σ_k`, returning it with its probability.
    pub fn sample_action(&self, m: &[Edge], s: &MatchingState, rng: &mut LllRng) -> Result<(MatchingState, Prob)> {
        let m = self.validate_matching(m)?;
        self.check_state(s)?;
        if !m.iter().all(|&e| s.contains(e)) {
            return Err(LllError::Strategy("the backward sampler needs M ⊆ σ".into()));
        }
        let mut cur = s.clone();
        let mut count = BigInt::one();
        for i in (0..m.len()).rev() {
            let cand = self.candidates(&cur, &m, i);
            let pick = cand[rng.random_range(0..cand.len())];
            count *= BigInt::from(cand.len());
            cur = self.swap_sigma(&cur, m[i], pick).expect("candidate from N_σ");
        }
        Ok((cur, Prob::from_big(BigInt::one(), count)))
    }

    /// Every execution branch of the backward sampler, sorted by state.
    pub fn support_of_action(&self, m: &[Edge], s: &MatchingState) -> Result<Vec<(MatchingState, Prob)>> {
        let m = self.validate_matching(m)?;
        self.check_state(s)?;
        if !m.iter().all(|&e| s.contains(e)) {
            return Err(LllError::Strategy("the backward sampler needs M ⊆ σ".into()));
        }
        let mut out = Vec::new();
        self.branches(&m, m.len(), s.clone(), BigInt::one(), &mut out);
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    fn branches(&self, m: &[Edge], i: usize, s: MatchingState, count: BigInt, out: &mut Vec<(MatchingState, Prob)>) {
        if i == 0 {
            out.push((s, Prob::from_big(BigInt::one(), count)));
            return;
        }
        let cand = self.candidates(&s, m, i - 1);
        let c = &count * BigInt::from(cand.len());
        for pick in cand {
            let next = self.swap_sigma(&s, m[i - 1], pick).expect("candidate from N_σ");
            self.branches(m, i - 1, next, c.clone(), out);
        }
    }

    /// `ρ(σ₀|f_M,σ_k)`: replays the unique branch leading to `σ₀`.
    pub fn action_prob(&self, m: &[Edge], s: &MatchingState, s0: &MatchingState) -> Option<Prob> {
        let m = self.validate_matching(m).ok()?;
        if self.check_state(s).is_err() || self.check_state(s0).is_err() || !m.iter().all(|&e| s.contains(e)) {
            return None;
        }
        let mut cur = s0.clone();
        let mut count = BigInt::one();
        for (i, &e) in m.iter().enumerate() {
            self.psi_edge(&mut cur, e);
            count *= BigInt::from(self.candidates(&cur, &m, i).len());
        }
        (cur == *s).then(|| Prob::from_big(BigInt::one(), count))
    }

    /// Uniform perfect matching by sequential pairing of the lowest free vertex.
    pub fn sample_uniform(&self, rng: &mut LllRng) -> MatchingState {
        let n = self.vertex_count;
        let mut partner = vec![Vertex::MAX; n];
        for u in 0..n {
            if partner[u] != Vertex::MAX {
                continue;
            }
            let free: Vec<usize> =
                (u + 1..n).filter(|&v| partner[v] == Vertex::MAX && self.has_edge(u as Vertex, v as Vertex)).collect();
            let v = free[rng.random_range(0..free.len())];
            partner[u] = v as Vertex;
            partner[v] = u as Vertex;
        }
        MatchingState { partner }
    }

    /// All perfect matchings in lexicographic edge-list order.
    pub fn enumerate(&self) -> Vec<MatchingState> {
        let mut out = Vec::new();
        let mut partner = vec![Vertex::MAX; self.vertex_count];
        self.extend(&mut partner, 0, &mut out);
        out
    }

    fn extend(&self, partner: &mut Vec<Vertex>, from: usize, out: &mut Vec<MatchingState>) {
        let Some(u) = (from..partner.len()).find(|&u| partner[u] == Vertex::MAX) else {
            out.push(MatchingState { partner: partner.clone() });
            return;
        };
        for v in u + 1..partner.len() {
            if partner[v] == Vertex::MAX && self.has_edge(u as Vertex, v as Vertex) {
                partner[u] = v as Vertex;
                partner[v] = u as Vertex;
                self.extend(partner, u + 1, out);
                partner[u] = Vertex::MAX;
                partner[v] = Vertex::MAX;
            }
        }
    }
}

/// A perfect matching stored as a partner map.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingState {
    partner: Vec<Vertex>,
}

impl MatchingState {
    /// Builds a state from its edges; validated against the host.
    pub fn from_edges(host: &HostGraph, edges: &[Edge]) -> Result<Self> {
        let mut partner = vec![Vertex::MAX; host.vertex_count()];
        for &(u, v) in edges {
            if (u as usize) >= partner.len() || (v as usize) >= partner.len() {
                return Err(LllError::input(format!("vertex out of range in {{{u},{v}}}")));
            }
            if partner[u as usize] != Vertex::MAX || partner[v as usize] != Vertex::MAX {
                return Err(LllError::input("edges share a vertex"));
            }
            partner[u as usize] = v;
            partner[v as usize] = u;
        }
        let s = MatchingState { partner };
        host.check_state(&s)?;
        Ok(s)
    }

    pub fn partner(&self, u: Vertex) -> Vertex {
        self.partner[u as usize]
    }

    pub fn contains(&self, (u, v): Edge) -> bool {
        self.partner.get(u as usize) == Some(&v)
    }

    fn contains_dir(&self, d: DirEdge) -> bool {
        self.contains(d)
    }

    fn set(&mut self, u: Vertex, v: Vertex) {
        self.partner[u as usize] = v;
        self.partner[v as usize] = u;
    }

    /// Edges with the smaller endpoint first, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.partner.len() as Vertex).filter(|&u| u < self.partner[u as usize]).map(|u| (u, self.partner[u as usize])).collect()
    }
}

impl fmt::Debug for MatchingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for MatchingState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.edges().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingInitial {
    /// `ω^init = ω`, the uniform measure.
    Uniform,
    Point(MatchingState),
}

/// The matching oracle over a host graph with an explicit flaw list.
#[derive(Clone, Debug)]
pub struct MatchingModel {
    host: HostGraph,
    flaws: Vec<Vec<Edge>>,
    by_first_edge: HashMap<Edge, Vec<FlawId>>,
    initial: MatchingInitial,
    omega: Prob,
}

/// Builds the instance and its causality relation: `f_M ∼ f_{M′}` iff
/// `M ∪ M′` is not a matching or `M = M′`.
pub fn build_matching_instance(
    host: HostGraph,
    flaws: Vec<Vec<Edge>>,
    initial: MatchingInitial,
) -> Result<(MatchingModel, DependencyGraph)> {
    let mut sorted = Vec::with_capacity(flaws.len());
    let mut seen = HashMap::new();
    for (k, m) in flaws.iter().enumerate() {
        let m = host.validate_matching(m).map_err(|e| LllError::input(format!("flaw f{k}: {e}")))?;
        if m.is_empty() {
            return Err(LllError::input(format!("flaw f{k}: M must be non-empty")));
        }
        if let Some(j) = seen.insert(m.clone(), k) {
            return Err(LllError::input(format!("flaws f{j} and f{k} coincide")));
        }
        sorted.push(m);
    }
    if let MatchingInitial::Point(s) = &initial {
        host.check_state(s)?;
    }
    let mut by_first_edge: HashMap<Edge, Vec<FlawId>> = HashMap::new();
    for (k, m) in sorted.iter().enumerate() {
        by_first_edge.entry(m[0]).or_default().push(FlawId(k as u32));
    }
    let omega = Prob::from_big(BigInt::one(), host.matching_count());
    let model = MatchingModel { host, flaws: sorted, by_first_edge, initial, omega };
    let dep = model.relation();
    Ok((model, dep))
}

impl MatchingModel {
    pub fn host(&self) -> &HostGraph {
        &self.host
    }

    pub fn flaw_edges(&self, f: FlawId) -> &[Edge] {
        &self.flaws[f.index()]
    }

    pub fn initial(&self) -> &MatchingInitial {
        &self.initial
    }

    /// `ψ(f_M,σ′) = ψ̂(M,σ′)`, the unique pre-state of an atomic step.
    pub fn backward_step_psi(&self, f: FlawId, s: &MatchingState) -> Result<MatchingState> {
        let m = self.flaws.get(f.index()).ok_or_else(|| LllError::input(format!("{f} out of range")))?;
        self.host.hat_psi(m, s)
    }

    fn relation(&self) -> DependencyGraph {
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); self.host.vertex_count()];
        for (k, m) in self.flaws.iter().enumerate() {
            for &(u, v) in m {
                touching[u as usize].push(k);
                touching[v as usize].push(k);
            }
        }
        let mut dep = DependencyGraph::edgeless(self.flaws.len());
        for (k, m) in self.flaws.iter().enumerate() {
            dep.add_edge(FlawId(k as u32), FlawId(k as u32));
            for &(u, v) in m {
                for &j in touching[u as usize].iter().chain(&touching[v as usize]) {
                    if j != k && !union_is_matching(m, &self.flaws[j]) {
                        dep.add_edge(FlawId(k as u32), FlawId(j as u32));
                    }
                }
            }
        }
        dep
    }
}

fn union_is_matching(a: &[Edge], b: &[Edge]) -> bool {
    a.iter().all(|&(u, v)| {
        b.iter().all(|&e| e == (u, v) || (e.0 != u && e.0 != v && e.1 != u && e.1 != v))
    })
}

impl Model for MatchingModel {
    type State = MatchingState;

    fn flaw_count(&self) -> usize {
        self.flaws.len()
    }

    fn flaws_present(&self, s: &MatchingState) -> FlawSet {
        let mut out = FlawSet::new();
        for e in s.edges() {
            if let Some(list) = self.by_first_edge.get(&e) {
                for &f in list {
                    if self.flaws[f.index()].iter().all(|&x| s.contains(x)) {
                        out.insert(f);
                    }
                }
            }
        }
        out
    }

    fn sample_initial(&self, rng: &mut LllRng) -> MatchingState {
        match &self.initial {
            MatchingInitial::Uniform => self.host.sample_uniform(rng),
            MatchingInitial::Point(s) => s.clone(),
        }
    }

    fn initial_prob(&self, s: &MatchingState) -> Prob {
        match &self.initial {
            MatchingInitial::Uniform => self.omega.clone(),
            MatchingInitial::Point(p) if p == s => Prob::one(),
            MatchingInitial::Point(_) => Prob::zero(),
        }
    }

    fn sample_action(&self, f: FlawId, s: &MatchingState, rng: &mut LllRng) -> Result<(MatchingState, Prob)> {
        let m = self.flaws.get(f.index()).ok_or_else(|| LllError::input(format!("{f} out of range")))?;
        self.host.sample_action(m, s, rng)
    }

    fn transition_prob(&self, f: FlawId, s: &MatchingState, next: &MatchingState) -> Option<Prob> {
        self.host.action_prob(self.flaws.get(f.index())?, s, next)
    }
}

impl EnumerableModel for MatchingModel {
    fn states(&self) -> Vec<MatchingState> {
        self.host.enumerate()
    }

    fn state_count_hint(&self) -> Option<u128> {
        u128::try_from(self.host.matching_count()).ok().or(Some(u128::MAX))
    }

    fn action_support(&self, f: FlawId, s: &MatchingState) -> Vec<(MatchingState, Prob)> {
        self.host.support_of_action(&self.flaws[f.index()], s).expect("f present at s")
    }

    fn measure(&self, _: &MatchingState) -> Prob {
        self.omega.clone()
    }
}

/// All single-edge flaws of the host, in edge order.
pub fn single_edge_flaws(host: &HostGraph) -> Vec<Vec<Edge>> {
    let n = host.vertex_count() as Vertex;
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| host.has_edge(u, v)).map(|e| vec![e]).collect()
}

/// All flaws `{e, e′}` with `e, e′` vertex-disjoint edges of the host.
pub fn disjoint_pair_flaws(host: &HostGraph) -> Vec<Vec<Edge>> {
    let edges: Vec<Edge> = single_edge_flaws(host).into_iter().map(|m| m[0]).collect();
    let mut out = Vec::new();
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            if union_is_matching(&[a], &[b]) {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rng;

    fn k4() -> HostGraph {
        HostGraph::complete(2).unwrap()
    }

    fn st(h: &HostGraph, e: &[Edge]) -> MatchingState {
        MatchingState::from_edges(h, e).unwrap()
    }

    #[test]
    fn hat_psi_single_edge() {
        let h = k4();
        let a = st(&h, &[(0, 1), (2, 3)]);
        let b = st(&h, &[(0, 2), (1, 3)]);
        assert_eq!(h.hat_psi(&[(0, 2)], &a).unwrap(), b);
        assert_eq!(h.hat_psi(&[(0, 1)], &a).unwrap(), a);
        assert_eq!(h.hat_psi(&[(0, 1), (2, 3)], &b).unwrap(), a);
        assert!(h.hat_psi(&[(0, 1), (1, 2)], &a).is_err());
    }

    #[test]
    fn swap_and_neighbors() {
        let h = k4();
        let a = st(&h, &[(0, 1), (2, 3)]);
        assert_eq!(h.swap_sigma(&a, (0, 1), (2, 3)).unwrap(), st(&h, &[(0, 2), (1, 3)]));
        assert_eq!(h.swap_sigma(&a, (0, 1), (1, 0)).unwrap(), a);
        assert!(h.swap_sigma(&a, (0, 2), (1, 3)).is_err());
        assert_eq!(h.neighbors_n(&a, (0, 1)).unwrap(), vec![(1, 0), (2, 3), (3, 2)]);
    }

    #[test]
    fn permutation_block_neighbors() {
        let h = HostGraph::bipartite(vec![(vec![0, 1, 2], vec![3, 4, 5])]).unwrap();
        let s = st(&h, &[(0, 3), (1, 4), (2, 5)]);
        let n = h.neighbors_n(&s, (0, 3)).unwrap();
        assert_eq!(n.len(), 3);
        assert!(n.iter().all(|&(u, _)| u >= 3));
        assert!(h.swap_sigma(&s, (0, 3), (1, 4)).is_err());
    }

    #[test]
    fn k4_pair_flaw_support() {
        let h = k4();
        let a = st(&h, &[(0, 1), (2, 3)]);
        let sup = h.support_of_action(&[(0, 1), (2, 3)], &a).unwrap();
        assert_eq!(sup.len(), 3);
        assert!(sup.iter().all(|(_, p)| *p == Prob::ratio(1, 3)));
        let all = h.enumerate();
        assert_eq!(sup.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>(), all);
    }

    #[test]
    fn sampler_probability_matches_replay() {
        let h = HostGraph::complete(3).unwrap();
        let m = vec![(0, 1), (2, 3)];
        let s = st(&h, &[(0, 1), (2, 3), (4, 5)]);
        let mut r = rng::seeded(3);
        for _ in 0..20 {
            let (t, p) = h.sample_action(&m, &s, &mut r).unwrap();
            assert_eq!(h.action_prob(&m, &s, &t), Some(p.clone()));
            assert_eq!(p, Prob::ratio(1, 15));
        }
    }

    #[test]
    fn uniform_sampling_covers_all_matchings() {
        let h = HostGraph::complete(3).unwrap();
        let mut r = rng::seeded(1);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..500 {
            seen.insert(h.sample_uniform(&mut r));
        }
        assert_eq!(seen.len(), 15);
        assert_eq!(h.matching_count(), BigInt::from(15));
    }

    #[test]
    fn relation_examples() {
        let h = k4();
        let (_, dep) = build_matching_instance(h.clone(), single_edge_flaws(&h), MatchingInitial::Uniform).unwrap();
        // flaws in edge order: 01,02,03,12,13,23
        assert!(dep.has_loop(FlawId(0)));
        assert!(dep.adjacent(FlawId(0), FlawId(1)));
        assert!(!dep.adjacent(FlawId(0), FlawId(5)));
    }
}
