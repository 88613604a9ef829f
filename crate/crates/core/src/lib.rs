//! Verification toolkit for the closed supergroups of `Aut(D;<,E)`, the
//! automorphism group of the random ordered graph.
//!
//! Groups containing `Aut(D;<,E)` are studied through their orbits on
//! k-types of tuples (`k <= 5`). The crate computes these orbits for joins of
//! the eleven join-irreducible groups `a`..`k`, rebuilds the preservation
//! table and the lattice of all 44 closed groups, and replays the
//! constellation case analysis for order-preserving canonical functions.

pub mod constellations;
pub mod error;
pub mod lattice;
pub mod orbits;
pub mod structures;
pub mod transforms;

pub use error::{Error, Result};

pub use orbits::{Engine, GroupSignature, GroupSpec, OrbitPartition};
pub use structures::{KType, OrderedGraph, Relation, RelationName};
pub use transforms::GeneratorLabel;
