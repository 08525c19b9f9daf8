use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("photon number {total} exceeds the cap of {cap}")]
    Capacity { total: u64, cap: u32 },

    #[error("state has zero norm; expectation values are undefined")]
    UndefinedState,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("reference scan has zero peak-to-peak amplitude")]
    DegenerateReference,

    #[error("signal slope vanishes at phi = {phi}; sensitivity is singular there")]
    SingularPoint { phi: f64 },

    #[error("objective is flat over the search interval (variation {variation:e})")]
    DegenerateObjective { variation: f64 },

    #[error("numerical cross-check failed: {0}")]
    Consistency(String),

    #[error("circuit step {index} rejected: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}
