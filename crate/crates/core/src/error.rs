use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("round {round} outside 1..={horizon}")]
    RoundOutOfRange { round: u64, horizon: u64 },

    #[error("arm {arm} outside 1..={arms}")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("arm {0} is optimal at every round; its gap is undefined")]
    UndefinedGap(usize),

    #[error("parameter outside the domain of {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain_err(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
