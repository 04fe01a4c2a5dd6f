use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("negative weight {weight} on edge ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: String },
    #[error("edge ({0}, {1}) listed twice")]
    DuplicateEdge(usize, usize),
    #[error("arrival order is not a permutation of 1..={0}")]
    InvalidPermutation(usize),
    #[error("expected {expected} entries for {what}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("vertex {0} appears in more than one matched pair")]
    NotDisjoint(usize),
    #[error("pair ({0}, {1}) is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    SizeCap { what: &'static str, n: usize, cap: usize },
    #[error("random branching exceeds the cap of {0} leaves")]
    BranchingCap(u64),
    #[error("could not parse rational {0:?}")]
    ParseRational(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("policy {policy} violated feasibility at time {time}: {reason}")]
    PolicyViolation {
        policy: String,
        time: usize,
        reason: String,
    },
    #[error("instance is not constrained bipartite: {0}")]
    NotConstrainedBipartite(String),
    #[error("warm start rejected: {0}")]
    WarmStart(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
