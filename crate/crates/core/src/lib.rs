//! Exact computational Lie theory: root systems, Weyl groups, weight
//! multiplicities, finite orthogonal stabilizers, toral embeddings and
//! trace invariants of matrix tuples.

pub mod embeddings;
pub mod error;
pub mod group;
pub mod lattice_auts;
pub mod linalg;
pub mod report;
pub mod reps;
pub mod roots;
pub mod trace;

pub use error::{Error, Result};
