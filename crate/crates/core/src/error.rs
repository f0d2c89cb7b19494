use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mobile placement infeasible: {placed} of {requested} mobiles placed before the rejection budget ran out")]
    PlacementInfeasible { placed: usize, requested: usize },

    #[error("angle undefined: point coincides with {0}")]
    UndefinedAngle(&'static str),

    #[error("invalid reference: mobile {mobile} is not served by sector {sector}")]
    InvalidReference { mobile: usize, sector: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("topology file: {0}")]
    Topology(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
