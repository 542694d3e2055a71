use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("network must have at least one node")]
    EmptyNetwork,

    #[error("edge {edge} endpoint {node} is out of range for {n_nodes} nodes")]
    EndpointOutOfRange {
        edge: usize,
        node: usize,
        n_nodes: usize,
    },

    #[error("edge {edge} is a self-loop at node {node}")]
    SelfLoop { edge: usize, node: usize },

    #[error("reference node {node} is out of range for {n_nodes} nodes")]
    ReferenceOutOfRange { node: usize, n_nodes: usize },

    #[error("reduced incidence requested but the topology has no reference node")]
    MissingReference,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid line distribution: {0}")]
    InvalidDistribution(String),

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains a NaN or infinite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("matrix is zero; intrinsic dimension undefined")]
    ZeroMatrix,

    #[error("line admittance modulus {modulus} exceeds the unit bound on line {line}")]
    AdmittanceTooLarge { line: usize, modulus: f64 },

    #[error("invalid bound argument: {0}")]
    InvalidBoundArgument(String),

    #[error("bound of kind {0} cannot be used here")]
    IncompatibleBound(String),

    #[error("topology is not a tree")]
    NotATree,

    #[error("line {line} has non-positive conductance {g}; G is singular")]
    SingularConductance { line: usize, g: f64 },

    #[error("operator requires the reduced incidence form")]
    UnreducedIncidence,

    #[error("Schur and line-space inverses disagree by {0:e}")]
    InversePathsDisagree(f64),

    #[error("linear power flow matrix is singular (condition number {0:e})")]
    SingularSystem(f64),

    #[error("brute-force enumeration supports at most {max} lines, got {m}")]
    TooManyLines { m: usize, max: usize },

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
