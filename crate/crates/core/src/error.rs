use thiserror::Error;

/// Everything that can go wrong while loading a game or running the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed rational: {0}")]
    MalformedRational(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex reference `{0}`")]
    UnknownVertex(String),
    #[error("terminal vertex `{0}` declares actions")]
    TerminalWithActions(String),
    #[error("non-terminal vertex `{0}` has no actions")]
    NoActions(String),
    #[error("vertex `{0}` is a terminal and has no mover")]
    TerminalVertex(String),
    #[error("unknown action `{action}` at vertex `{vertex}`")]
    UnknownAction { vertex: String, action: String },
    #[error("lasso is inconsistent with the game graph: {0}")]
    InvalidLasso(String),
    #[error("game is not certified lower-semi-continuous; the operation is only sound on certified games")]
    NotLscCertified,
    #[error("inconsistent value labels: {0}")]
    InconsistentLabels(String),
    #[error("no viable play exists from `{0}`; the viability iteration invariant is violated")]
    EmptyViability(String),
    #[error("operation requires an acyclic game")]
    CyclicGame,
    #[error("refusing to run: {0}")]
    CapExceeded(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
