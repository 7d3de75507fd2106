mod common;

use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use resampling_lll::domain::{DependencyGraph, FlawId, FlawOrder, FlawSet, Word};
use resampling_lll::stable::{
    build_walk_dag, canonical_word, forward_canonicalize_word, is_pi_stable, partition_stable, stab_of_walk,
};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = DependencyGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&mask).filter(|(_, &b)| b).map(|(&e, _)| e).collect();
            DependencyGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn graph_and_word(max_n: usize, max_len: usize) -> impl Strategy<Value = (DependencyGraph, Word)> {
    graph_strategy(max_n).prop_flat_map(move |g| {
        let n = g.flaw_count() as u32;
        (Just(g), proptest::collection::vec((0..n).prop_map(FlawId), 0..=max_len))
    })
}

fn graph_word_order(max_n: usize, max_len: usize) -> impl Strategy<Value = (DependencyGraph, Word, FlawOrder)> {
    graph_and_word(max_n, max_len).prop_flat_map(|(g, w)| {
        let n = g.flaw_count() as u32;
        let perm = Just((0..n).map(FlawId).collect::<Vec<_>>()).prop_shuffle();
        (Just(g), Just(w), perm.prop_map(|p| FlawOrder::from_sequence(&p).unwrap()))
    })
}

fn independent(dep: &DependencyGraph, seg: &[FlawId]) -> bool {
    seg.iter().enumerate().all(|(i, &f)| seg[i + 1..].iter().all(|&g| !dep.congruent(f, g)))
}

fn inside_gamma_plus(dep: &DependencyGraph, seg: &[FlawId], prev: &[FlawId]) -> bool {
    seg.iter().all(|&g| prev.iter().any(|&f| dep.congruent(f, g)))
}

/// Some cut of `w` into consecutive blocks is a stable sequence.
fn stable_by_brute_force(dep: &DependencyGraph, w: &[FlawId]) -> bool {
    fn go(dep: &DependencyGraph, w: &[FlawId], prev: Option<&[FlawId]>) -> bool {
        if w.is_empty() {
            return true;
        }
        (1..=w.len()).any(|k| {
            let seg = &w[..k];
            independent(dep, seg) && prev.is_none_or(|p| inside_gamma_plus(dep, seg, p)) && go(dep, &w[k..], Some(seg))
        })
    }
    go(dep, w, None)
}

fn valid_swaps(dep: &DependencyGraph, w: &[FlawId]) -> Vec<usize> {
    (0..w.len().saturating_sub(1)).filter(|&k| !dep.congruent(w[k], w[k + 1])).collect()
}

fn swap_class(dep: &DependencyGraph, w: &[FlawId]) -> HashSet<Word> {
    let mut seen: HashSet<Word> = HashSet::from([w.to_vec()]);
    let mut queue = VecDeque::from([w.to_vec()]);
    while let Some(u) = queue.pop_front() {
        for k in valid_swaps(dep, &u) {
            let mut v = u.clone();
            v.swap(k, k + 1);
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn greedy_partition_meets_the_definition((dep, w) in graph_and_word(5, 8)) {
        match partition_stable(&dep, &w) {
            Ok(segs) => {
                let flat: Word = segs.concat();
                prop_assert_eq!(&flat, &w);
                for (i, seg) in segs.iter().enumerate() {
                    prop_assert!(!seg.is_empty());
                    prop_assert!(independent(&dep, seg));
                    if i > 0 {
                        prop_assert!(inside_gamma_plus(&dep, seg, &segs[i - 1]));
                    }
                }
            }
            Err(fail) => {
                prop_assert_eq!(w[fail.position], fail.flaw);
                prop_assert!(partition_stable(&dep, &w[..fail.position]).is_ok());
                prop_assert!(!stable_by_brute_force(&dep, &w));
            }
        }
        prop_assert_eq!(partition_stable(&dep, &w).is_ok(), stable_by_brute_force(&dep, &w));
    }

    #[test]
    fn canonical_form_is_the_unique_pi_stable_word_of_its_class((dep, w, order) in graph_word_order(4, 7)) {
        let class = swap_class(&dep, &w);
        let c = canonical_word(&dep, &order, &w);
        prop_assert!(class.contains(&c));
        prop_assert!(is_pi_stable(&dep, &order, &c));
        let stable: BTreeSet<&Word> = class.iter().filter(|u| is_pi_stable(&dep, &order, u)).collect();
        prop_assert_eq!(stable, BTreeSet::from([&c]));
        for u in &class {
            prop_assert_eq!(&canonical_word(&dep, &order, u), &c);
        }
    }

    #[test]
    fn forward_trace_uses_valid_swaps_only((dep, w, order) in graph_word_order(5, 9)) {
        let r = forward_canonicalize_word(&dep, &order, &w);
        let mut cur = w.clone();
        for &k in &r.trace {
            prop_assert!(!dep.congruent(cur[k], cur[k + 1]));
            cur.swap(k, k + 1);
        }
        prop_assert_eq!(&cur, &r.result);
        if is_pi_stable(&dep, &order, &w) {
            prop_assert!(r.trace.is_empty());
        }
    }

    #[test]
    fn walk_dag_is_invariant_under_valid_swaps(
        (dep, w, order) in graph_word_order(5, 8),
        picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..12),
        root_pick in any::<prop::sample::Index>(),
    ) {
        let mut u = w.clone();
        for p in picks {
            let ks = valid_swaps(&dep, &u);
            if ks.is_empty() {
                break;
            }
            let k = ks[p.index(ks.len())];
            u.swap(k, k + 1);
        }
        let a = build_walk_dag(&dep, &w, None).unwrap();
        let b = build_walk_dag(&dep, &u, None).unwrap();
        prop_assert_eq!(a.invariant_part(), b.invariant_part());
        prop_assert_eq!(stab_of_walk(&dep, &order, &w, None).unwrap(), stab_of_walk(&dep, &order, &u, None).unwrap());
        if !w.is_empty() {
            let root = w[root_pick.index(w.len())];
            let a = build_walk_dag(&dep, &w, Some(root)).unwrap();
            let b = build_walk_dag(&dep, &u, Some(root)).unwrap();
            prop_assert_eq!(a.invariant_part(), b.invariant_part());
            prop_assert_eq!(&a.reachable, &b.reachable);
        }
    }

    #[test]
    fn stab_word_reversed_is_pi_stable((dep, w, order) in graph_word_order(5, 8)) {
        let stab = stab_of_walk(&dep, &order, &w, None).unwrap();
        prop_assert_eq!(stab.len(), w.len());
        let rev: Word = stab.iter().rev().map(|n| n.flaw).collect();
        prop_assert!(is_pi_stable(&dep, &order, &rev));
    }
}

#[test]
fn depth_layers_are_independent() {
    let dep = DependencyGraph::from_edges(3, &[(0, 1), (1, 2), (1, 1)]).unwrap();
    let w = common::ids(&[0, 2, 1, 0, 2, 1]);
    let dag = build_walk_dag(&dep, &w, None).unwrap();
    let max = *dag.depth.values().max().unwrap();
    for r in 1..=max {
        let layer: FlawSet = dag.depth.iter().filter(|(_, &d)| d == r).map(|(n, _)| n.flaw).collect();
        assert!(dep.is_independent(&layer).unwrap(), "layer {r}");
    }
}
