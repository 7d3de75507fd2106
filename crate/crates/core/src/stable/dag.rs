//! The named-flaw DAG of a walk and the word `Stab_π(τ)` read off its depths.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::domain::{name_word, DependencyGraph, FlawId, FlawOrder, NamedFlaw, NamedWord};
use crate::error::{LllError, Result};

/// Nodes are the named flaws of a walk; `(f,n) → (g,m)` whenever `f ≅ g` and
/// the first occurs earlier. In flaw mode the root is the rightmost occurrence
/// of `root` and `reachable` holds the nodes from which it can be reached; in
/// empty mode every node is reachable and sinks have depth one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkDag {
    pub root: Option<FlawId>,
    /// Named flaws in walk order.
    pub nodes: NamedWord,
    pub edges: BTreeSet<(NamedFlaw, NamedFlaw)>,
    /// `d_τ`, defined on reachable nodes.
    pub depth: BTreeMap<NamedFlaw, usize>,
    pub reachable: BTreeSet<NamedFlaw>,
}

impl WalkDag {
    /// Fields that valid swaps leave unchanged (everything except node order).
    pub fn invariant_part(&self) -> (&BTreeSet<(NamedFlaw, NamedFlaw)>, &BTreeMap<NamedFlaw, usize>) {
        (&self.edges, &self.depth)
    }
}

pub fn build_walk_dag(dep: &DependencyGraph, word: &[FlawId], root: Option<FlawId>) -> Result<WalkDag> {
    if let Some(f) = word.iter().find(|f| f.index() >= dep.flaw_count()) {
        return Err(LllError::input(format!("flaw {f} out of range")));
    }
    let nodes = name_word(word);
    let t = word.len();
    let mut edges = BTreeSet::new();
    for i in 0..t {
        for j in i + 1..t {
            if dep.congruent(word[i], word[j]) {
                edges.insert((nodes[i], nodes[j]));
            }
        }
    }
    let last = match root {
        Some(f) => {
            let p = word
                .iter()
                .rposition(|&g| g == f)
                .ok_or_else(|| LllError::input(format!("root flaw {f} does not occur in the walk")))?;
            Some(p)
        }
        None => None,
    };
    let end = last.map_or(t, |p| p + 1);
    let mut d: Vec<Option<usize>> = vec![None; t];
    for i in (0..end).rev() {
        let below = (i + 1..end).filter(|&j| dep.congruent(word[i], word[j])).filter_map(|j| d[j]).max();
        d[i] = match (last, below) {
            (Some(p), _) if p == i => Some(1),
            (Some(_), b) => b.map(|x| x + 1),
            (None, b) => Some(b.map_or(1, |x| x + 1)),
        };
    }
    let depth: BTreeMap<NamedFlaw, usize> =
        d.iter().enumerate().filter_map(|(i, x)| x.map(|x| (nodes[i], x))).collect();
    let reachable = depth.keys().copied().collect();
    Ok(WalkDag { root, nodes, edges, depth, reachable })
}

/// `Stab_π(τ) = W_s … W₁`, where `W_r` lists the reachable nodes of depth `r`
/// in decreasing order.
pub fn stab_of_walk(dep: &DependencyGraph, order: &FlawOrder, word: &[FlawId], root: Option<FlawId>) -> Result<NamedWord> {
    let dag = build_walk_dag(dep, word, root)?;
    Ok(stab_from_dag(&dag, order))
}

pub(crate) fn stab_from_dag(dag: &WalkDag, order: &FlawOrder) -> NamedWord {
    let s = dag.depth.values().copied().max().unwrap_or(0);
    let mut layers: Vec<Vec<NamedFlaw>> = vec![Vec::new(); s + 1];
    for (n, &r) in &dag.depth {
        layers[r].push(*n);
    }
    let mut out = Vec::new();
    for r in (1..=s).rev() {
        let mut layer = std::mem::take(&mut layers[r]);
        layer.sort_by_key(|n| std::cmp::Reverse(order.rank(n.flaw)));
        out.extend(layer);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: FlawId = FlawId(0);
    const B: FlawId = FlawId(1);

    fn nf(f: FlawId, k: u32) -> NamedFlaw {
        NamedFlaw { flaw: f, occurrence: k }
    }

    #[test]
    fn aba_empty_mode() {
        let dep = DependencyGraph::from_edges(2, &[(0, 1)]).unwrap();
        let dag = build_walk_dag(&dep, &[A, B, A], None).unwrap();
        assert_eq!(dag.edges.len(), 3);
        assert!(dag.edges.contains(&(nf(A, 1), nf(A, 2))));
        assert_eq!(dag.depth[&nf(A, 2)], 1);
        assert_eq!(dag.depth[&nf(B, 1)], 2);
        assert_eq!(dag.depth[&nf(A, 1)], 3);
        let id = FlawOrder::identity(2);
        assert_eq!(stab_of_walk(&dep, &id, &[A, B, A], None).unwrap(), vec![nf(A, 1), nf(B, 1), nf(A, 2)]);
    }

    #[test]
    fn aba_flaw_mode() {
        let dep = DependencyGraph::from_edges(2, &[(0, 1)]).unwrap();
        let dag = build_walk_dag(&dep, &[A, B, A], Some(B)).unwrap();
        assert_eq!(dag.reachable, [nf(A, 1), nf(B, 1)].into_iter().collect());
        assert_eq!(dag.depth[&nf(B, 1)], 1);
        assert_eq!(dag.depth[&nf(A, 1)], 2);
    }

    #[test]
    fn single_step() {
        let dep = DependencyGraph::edgeless(1);
        let dag = build_walk_dag(&dep, &[A], None).unwrap();
        assert_eq!(dag.depth[&nf(A, 1)], 1);
        assert_eq!(stab_of_walk(&dep, &FlawOrder::identity(1), &[A], None).unwrap(), vec![nf(A, 1)]);
    }

    #[test]
    fn absent_root() {
        let dep = DependencyGraph::edgeless(2);
        assert!(matches!(build_walk_dag(&dep, &[A], Some(B)), Err(LllError::Input(_))));
    }

    #[test]
    fn invariant_under_swap() {
        // a ≁ c: swapping them keeps edges, depths and Stab_π(τ).
        let dep = DependencyGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = FlawId(2);
        let id = FlawOrder::identity(3);
        let w1 = [B, A, c, B];
        let w2 = [B, c, A, B];
        let d1 = build_walk_dag(&dep, &w1, None).unwrap();
        let d2 = build_walk_dag(&dep, &w2, None).unwrap();
        assert_eq!(d1.invariant_part(), d2.invariant_part());
        assert_eq!(stab_of_walk(&dep, &id, &w1, None).unwrap(), stab_of_walk(&dep, &id, &w2, None).unwrap());
    }
}
