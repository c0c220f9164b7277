//! Combinatorics of iterated Duhamel expansions for the quintic hierarchy.
//!
//! A term of the `n`-fold expansion is indexed by a collision map: at each
//! level a contraction glues a fresh pair of particle lines onto one of the
//! previously existing lines. This crate enumerates these maps, reduces them
//! to a canonical (upper-echelon) form by the board-game column moves, groups
//! them into equivalence classes, and builds the forest of contraction trees
//! that encodes how a term factorizes into one-particle kernels.

mod board;
mod echelon;
mod error;
mod maps;
mod trees;

pub mod dot;

pub use board::BoardMatrix;
pub use echelon::{partition_classes, reduce_to_echelon, EchelonClass, MoveTrace, TimeChain};
pub use error::CombinatoricsError;
pub use maps::{count_maps, enumerate_maps, CollisionMap, DEFAULT_ENUMERATION_CAP};
pub use trees::{
    build_forest, relabel, subtree_internal_count, Child, Forest, InternalVertex,
    RelabeledKernelSpec, TreeGraph,
};
