use thiserror::Error;

/// Errors produced by graph construction, chain assembly and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("equilibrium distribution must be strictly positive (entry {index} = {value})")]
    NonPositivePi { index: usize, value: f64 },

    #[error("weight given for non-edge {{{i}, {j}}}")]
    WeightOnNonEdge { i: usize, j: usize },

    #[error("weights infeasible at vertex {vertex}: incident sum {sum} exceeds pi {pi}")]
    InfeasibleWeights { vertex: usize, sum: f64, pi: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("chain violates detailed balance (max violation {0:.3e})")]
    NotReversible(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid topology descriptor: {0}")]
    BadDescriptor(String),

    #[error("unknown topology family '{0}'")]
    UnknownFamily(String),

    #[error("closed form does not cover this instance: {0}")]
    RegimeNotCovered(String),

    #[error("subgraph declaration invalid: {0}")]
    BadSubgraph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
