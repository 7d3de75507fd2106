mod common;

use std::collections::{BTreeMap, BTreeSet};

use resampling_lll::domain::{rng, FlawId, Model, Prob};
use resampling_lll::oracles::{edge, Edge, HostGraph, MatchingState};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn disjoint(a: &[Edge], b: &[Edge]) -> bool {
    let va: BTreeSet<u32> = a.iter().flat_map(|&(u, v)| [u, v]).collect();
    b.iter().all(|&(u, v)| !va.contains(&u) && !va.contains(&v))
}

/// Matchings of size `k` in `K_{2n}`, built edge by edge with increasing edges.
fn matchings_of_size(n2: u32, k: usize) -> Vec<Vec<Edge>> {
    let edges: Vec<Edge> = (0..n2).flat_map(|u| (u + 1..n2).map(move |v| edge(u, v))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(edges: &[Edge], from: usize, k: usize, cur: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..edges.len() {
            if disjoint(cur, &edges[i..=i]) {
                cur.push(edges[i]);
                go(edges, i + 1, k, cur, out);
                cur.pop();
            }
        }
    }
    go(&edges, 0, k, &mut cur, &mut out);
    out
}

fn preimages(host: &HostGraph, m: &[Edge], target: &MatchingState) -> BTreeSet<Vec<Edge>> {
    host.enumerate()
        .into_iter()
        .filter(|s0| host.hat_psi(m, s0).unwrap() == *target)
        .map(|s0| s0.edges())
        .collect()
}

#[test]
fn support_is_the_preimage_set_with_product_branch_count() {
    for n in 2..=4usize {
        let host = HostGraph::complete(n).unwrap();
        for k in 1..=3.min(n) {
            let expect: usize = (1..=k).map(|i| 2 * n - 2 * i + 1).product();
            for m in matchings_of_size(2 * n as u32, k) {
                for s in host.enumerate().into_iter().filter(|s| m.iter().all(|&e| s.contains(e))) {
                    let sup = host.support_of_action(&m, &s).unwrap();
                    assert_eq!(sup.len(), expect, "n={n} M={m:?}");
                    let p = Prob::ratio(1, expect as u64);
                    assert!(sup.iter().all(|(_, q)| *q == p));
                    let got: BTreeSet<Vec<Edge>> = sup.iter().map(|(t, _)| t.edges()).collect();
                    assert_eq!(got.len(), expect, "distinct executions give distinct outputs");
                    if n <= 3 {
                        assert_eq!(got, preimages(&host, &m, &s));
                    }
                }
            }
        }
    }
}

#[test]
fn hat_psi_composes_on_k6() {
    let host = HostGraph::complete(3).unwrap();
    let singles = matchings_of_size(6, 1);
    for s in host.enumerate() {
        for a in &singles {
            for b in &singles {
                if !disjoint(a, b) {
                    continue;
                }
                let union: Vec<Edge> = a.iter().chain(b).copied().collect();
                let whole = host.hat_psi(&union, &s).unwrap();
                assert_eq!(host.hat_psi(a, &host.hat_psi(b, &s).unwrap()).unwrap(), whole);
                assert_eq!(host.hat_psi(b, &host.hat_psi(a, &s).unwrap()).unwrap(), whole);
                assert!(union.iter().all(|&e| whole.contains(e)));
            }
        }
    }
}

#[test]
fn backward_step_inverts_the_oracle() {
    for pairs in [false, true] {
        let (model, _) = common::complete(3, pairs);
        let host = model.host().clone();
        let states = host.enumerate();
        for f in 0..model.flaw_count() {
            let f = FlawId(f as u32);
            for s in states.iter().filter(|s| model.flaws_present(s).contains(f)) {
                let sup: BTreeSet<Vec<Edge>> =
                    host.support_of_action(model.flaw_edges(f), s).unwrap().iter().map(|(t, _)| t.edges()).collect();
                let scanned: BTreeSet<Vec<Edge>> = states
                    .iter()
                    .filter(|t| model.backward_step_psi(f, t).unwrap() == *s)
                    .map(|t| t.edges())
                    .collect();
                assert_eq!(sup, scanned);
            }
        }
    }
}

#[test]
fn permutation_block_support() {
    // One block of size 3: resampling a fixed pair redraws among the 3 images.
    let (model, _) = common::permutations(3, false);
    let host = model.host().clone();
    assert_eq!(host.enumerate().len(), 6);
    for f in 0..model.flaw_count() {
        let f = FlawId(f as u32);
        for s in host.enumerate().iter().filter(|s| model.flaws_present(s).contains(f)) {
            let sup = host.support_of_action(model.flaw_edges(f), s).unwrap();
            assert_eq!(sup.len(), 3);
        }
    }
}

#[test]
fn sampler_is_uniform_on_the_support() {
    let host = HostGraph::complete(3).unwrap();
    let m = vec![edge(0, 1), edge(2, 3)];
    let s = MatchingState::from_edges(&host, &[edge(0, 1), edge(2, 3), edge(4, 5)]).unwrap();
    let sup = host.support_of_action(&m, &s).unwrap();
    assert_eq!(sup.len(), 15);
    let mut counts: BTreeMap<Vec<Edge>, usize> = sup.iter().map(|(t, _)| (t.edges(), 0)).collect();
    let mut r = rng::seeded(2024);
    let draws = 100_000;
    for _ in 0..draws {
        let (t, _) = host.sample_action(&m, &s, &mut r).unwrap();
        *counts.get_mut(&t.edges()).expect("draw lies in the support") += 1;
    }
    let e = draws as f64 / 15.0;
    let stat: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let p = 1.0 - ChiSquared::new(14.0).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square p = {p}");
}
