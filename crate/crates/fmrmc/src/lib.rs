//! Fastest mixing reversible Markov chains on undirected graphs.
//!
//! Given a graph and a prescribed positive equilibrium distribution, the
//! crate finds symmetric edge weights minimizing the second largest
//! eigenvalue modulus (SLEM) of the induced reversible chain
//! `P = I - D^{-1} L(q)`:
//!
//! - [`families`]: closed-form optimal weights for recognized topology
//!   families (paths, stars, clique-lift families, symmetric trees, ...),
//!   each behind a common [`families::FamilySolver`] trait and selectable by
//!   name at runtime.
//! - [`solver`]: a projected-subgradient optimizer for arbitrary connected
//!   graphs, plus a spectral optimality certificate.
//! - [`lift`]: clique-lift construction and exact transfer of optimal
//!   solutions between a base graph and its lift.
//! - [`subgraph`]: locally-optimal weights on recognized subgraphs hanging
//!   off a cut vertex, completed by the numeric solver.

pub mod corpus;
pub mod eig;
pub mod error;
pub mod families;
pub mod graph;
pub mod io;
pub mod lift;
pub mod solver;
pub mod spectral;
pub mod subgraph;

pub use error::{Error, Result};
pub use graph::{Chain, EdgeWeights, EquilibriumDistribution, Graph};
