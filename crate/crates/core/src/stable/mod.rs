//! Stable words and sequences, swapping mappings, and exhaustive enumeration
//! of bad trajectories.
//!
//! A word is stable when the greedy segmentation (start a new segment as soon
//! as a flaw is equal or adjacent to something in the current one) yields
//! independent segments, each contained in `Γ⁺` of its predecessor. The
//! forward canonical form sorts each segment; the backward machinery builds
//! the named-flaw DAG of a walk and moves its reachable part to the front.

mod backward;
mod bad;
mod dag;
mod forward;
mod words;

pub use backward::{backward_canonicalize_set, BackwardAudit, BackwardResult};
pub use bad::{enumerate_bad, longest_chain, BadMode, BadWalks};
pub use dag::{build_walk_dag, stab_of_walk, WalkDag};
pub use forward::{canonical_word, forward_canonicalize_walk, forward_canonicalize_word, ForwardResult};
pub use words::{
    enumerate_stab_pi, enumerate_strongly_stable, has_walk_witness, is_pi_stable, partition_stable,
    stable_sequence_of, verify_stab_counting, CountingParams, CountingReport, PartitionFailure, StableSequence,
};

/// Default bound on the number of words, sequences or walks one query may produce.
pub const DEFAULT_ENUM_CAP: usize = 100_000;
