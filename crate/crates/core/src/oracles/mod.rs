//! Built-in resampling oracles.

pub mod matching;
pub mod variable;

pub use matching::{
    build_matching_instance, disjoint_pair_flaws, edge, single_edge_flaws, Edge, HostCase, HostGraph, MatchingInitial,
    MatchingModel, MatchingState,
};
pub use variable::{
    build_variable_model, Assignment, FlawPredicate, Literal, VariableFlaw, VariableInitial, VariableModel,
};
