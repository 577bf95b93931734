use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// A caller broke an operation's stated hypothesis.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A construction failed in a way its underlying theorem rules out.
    /// Verification runs treat this as a counterexample.
    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error("corrupt corpus: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
