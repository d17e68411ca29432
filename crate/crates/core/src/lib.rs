//! Quantum graphs, quantum relations and the quantum graph homomorphism game.

pub mod conformance;
pub mod error;
pub mod game;
pub mod graph;
pub mod json;
pub mod numkernel;
pub mod qgraph;
pub mod qrel;
pub mod qset;
pub mod random;
pub mod weaver;

pub use error::{Error, Result};
pub use numkernel::{Matrix, Subspace, C64, DEFAULT_TOL};
pub use graph::Graph;
pub use qgraph::QuantumGraph;
pub use qrel::Relation;
pub use qset::{Atom, QuantumSet};
