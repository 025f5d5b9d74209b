use thiserror::Error;

/// Errors surfaced by the engine's public operations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("time domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("malformed time or frontier text: {0}")]
    Parse(String),
    #[error("graph validation failed: {0}")]
    InvalidGraph(String),
    #[error("projection requires recorded metadata: {0}")]
    MissingProjectionContext(String),
    #[error("checkpoint rejected: {0}")]
    CheckpointRejected(String),
    #[error("snapshot error: {0}")]
    Snapshot(String),
    #[error("oracle bound exceeded: {0}")]
    OracleBound(String),
    #[error("replay requires a deterministic behavior: {0}")]
    NonDeterministicReplay(String),
    #[error("simulation error: {0}")]
    Simulation(String),
    #[error("step limit exhausted after {steps} steps; trace prefix retained")]
    StepLimit { steps: u64 },
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("storage invariant broken: {0}")]
    Storage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
