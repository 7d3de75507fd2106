//! Algorithmic Lovász Local Lemma with resampling oracles.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: flaws, the causality relation, models, walks and words.
//! - [`engine`]: the sequential random walk and its round-structured variant.
//! - [`verify`]: exhaustive checkers for atomicity, causality, weak and strong
//!   commutativity, and regenerating oracles.
//! - [`conditions`]: cluster-expansion, symmetric and Shearer conditions and
//!   the runtime bounds derived from them.
//! - [`stable`]: stable words and sequences, swapping mappings, and the
//!   exhaustive enumeration of bad trajectories.
//! - [`oracles`]: the variable model and the perfect-matching oracles.
//! - [`rainbow`]: rainbow perfect matchings of edge-coloured complete graphs.
//! - [`schema`]: JSON instance descriptions.

pub mod conditions;
pub mod domain;
pub mod engine;
pub mod error;
pub mod oracles;
pub mod rainbow;
pub mod schema;
pub mod stable;
pub mod verify;

pub use error::{LllError, Result};
