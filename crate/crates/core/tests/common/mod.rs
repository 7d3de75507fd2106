#![allow(dead_code)]

use resampling_lll::domain::{DependencyGraph, ExplicitInstance, FlawId, Prob};
use resampling_lll::oracles::{
    build_matching_instance, build_variable_model, disjoint_pair_flaws, single_edge_flaws, HostGraph,
    MatchingInitial, MatchingModel, VariableFlaw, VariableInitial, VariableModel,
};
use resampling_lll::rainbow::{build_rainbow_instance, ColoredGraph, RainbowInstance};

pub const CAP: usize = 100_000;

pub fn complete(n_half: usize, pairs: bool) -> (MatchingModel, DependencyGraph) {
    let host = HostGraph::complete(n_half).unwrap();
    let flaws = if pairs { disjoint_pair_flaws(&host) } else { single_edge_flaws(&host) };
    build_matching_instance(host, flaws, MatchingInitial::Uniform).unwrap()
}

/// Permutations of `0..m` as perfect matchings of `K_{m,m}`.
pub fn permutations(m: u32, pairs: bool) -> (MatchingModel, DependencyGraph) {
    let host = HostGraph::bipartite(vec![((0..m).collect(), (m..2 * m).collect())]).unwrap();
    let flaws = if pairs { disjoint_pair_flaws(&host) } else { single_edge_flaws(&host) };
    build_matching_instance(host, flaws, MatchingInitial::Uniform).unwrap()
}

pub fn explicit(m: &MatchingModel) -> ExplicitInstance {
    ExplicitInstance::from_model(m, CAP).unwrap()
}

/// `x ∈ {0,1,2,3}` uniform with the single flaw `x = 0`, a self-loop:
/// `λ = 1/4`, and `μ = 1/2` gives `θ = 3/4`.
pub fn loop_toy() -> (VariableModel, DependencyGraph) {
    let m = build_variable_model(
        vec![4],
        None,
        vec![VariableFlaw::assignments(vec![0], vec![vec![0]])],
        VariableInitial::Product,
    )
    .unwrap();
    let dep = m.dependency_graph();
    (m, dep)
}

/// `K₆` with colour 0 on `01, 23, 45, 02` and distinct colours elsewhere:
/// four monochromatic disjoint pairs.
pub fn k6_rainbow_style() -> RainbowInstance {
    let special = [(0, 1), (2, 3), (4, 5), (0, 2)];
    let mut next = 1;
    let mut edges = Vec::new();
    for u in 0..6u32 {
        for v in u + 1..6 {
            let c = if special.contains(&(u, v)) {
                0
            } else {
                next += 1;
                next - 1
            };
            edges.push((u, v, c));
        }
    }
    build_rainbow_instance(&ColoredGraph::new(3, &edges).unwrap()).unwrap()
}

pub fn to_f64(ps: &[Prob]) -> Vec<f64> {
    ps.iter().map(Prob::to_f64).collect()
}

pub fn ids(xs: &[u32]) -> Vec<FlawId> {
    xs.iter().map(|&x| FlawId(x)).collect()
}
