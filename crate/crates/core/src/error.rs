use std::io;

use thiserror::Error;

use crate::linalg::IndexSet;
use crate::romp::RecoveryResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Smallest |R_ii| fell below the rank cutoff relative to the largest.
    #[error("matrix is numerically rank deficient: rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    /// The least-squares update on the current support failed. `partial`
    /// holds the recovery state reached before the failing update.
    #[error("least squares on support of size {} is rank deficient (rank {rank})", support.len())]
    SupportRankDeficient {
        support: IndexSet,
        rank: usize,
        partial: Box<RecoveryResult>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
