use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate dart {0}")]
    DuplicateDart(usize),
    #[error("missing dart {0}")]
    MissingDart(usize),
    #[error("dart {dart} out of range (2E = {limit})")]
    DartOutOfRange { dart: usize, limit: usize },
    #[error("vertex {0} listed twice")]
    DuplicateVertex(usize),
    #[error("vertex {0} has no rotation line")]
    MissingVertex(usize),
    #[error("disconnected embedding")]
    Disconnected,
    #[error("embedding has no edges")]
    Empty,
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("cycle is not simple")]
    NotSimple,
    #[error("cycle is separating")]
    Separating,
    #[error("no nonseparating cycle")]
    NoNonseparatingCycle,
    #[error("precondition unmet ({lemma}): {requirement}")]
    Precondition { lemma: String, requirement: String },
    #[error("instance too large for exact stretch (more than {cap} cycles)")]
    TooLarge { cap: usize },
    #[error("exact mode required")]
    ExactRequired,
    #[error("not bipolar: {0}")]
    NotBipolar(String),
    #[error("density too low: ewn* = {k} < 2^g = {need}")]
    DensityTooLow { k: usize, need: usize },
    #[error("none exists: {0}")]
    NoneExists(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn pre(lemma: &str, requirement: &str) -> Self {
        Error::Precondition { lemma: lemma.into(), requirement: requirement.into() }
    }

    /// True for errors that mean "the input does not satisfy a stated hypothesis".
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition { .. }
                | Error::NoNonseparatingCycle
                | Error::DensityTooLow { .. }
                | Error::TooLarge { .. }
                | Error::ExactRequired
                | Error::Separating
                | Error::NotBipolar(_)
                | Error::NoneExists(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
