//! Clique counts in H-free subgraphs of random graphs, at desk scale.
//!
//! The crate covers exact 2-density computation, the sparse `k`-chromatic
//! tower/supercomplex construction with exhaustive potential sweeps, exact
//! colouring, clique statistics of `G(n,p)`, exact and heuristic H-free
//! clique maximization, and a reproducible sweep harness.

pub mod cliques;
pub mod coloring;
pub mod construct;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod extremal;
mod flow;
pub mod graph;
pub mod harness;
pub mod rational;

pub use error::{Error, Result};
pub use graph::{AdjRows, Graph, StructuredLabel, VertexSet};
pub use rational::ExactRational;
