//! Domain types shared by every module: flaws, flaw sets, the causality
//! relation, models, walks and words.

pub mod flaws;
pub mod model;
pub mod prob;
pub mod rng;
pub mod walk;

pub use flaws::{DependencyGraph, FlawId, FlawOrder, FlawSet};
pub use model::{EnumerableModel, ExplicitInstance, Model, StateId};
pub use prob::Prob;
pub use walk::{lambda_of_word, name_word, walk_probability, NamedFlaw, NamedWord, Step, Walk, Word};
