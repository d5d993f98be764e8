use thiserror::Error;

use crate::hexgrid::HexVertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex {0} is not in the grid")]
    InvalidVertex(HexVertex),
    #[error("visibility query needs two distinct vertices")]
    InvalidPair,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no pattern for {n} robots has a symmetricity divisible by {rho}; symmetricity {rho} needs a multiple of {rho} robots")]
    UnsolvableDivisibility { n: usize, rho: usize },
    #[error("guard frame undefined: {corner_robots} corner robots, symmetricity {rho}")]
    FrameUndefined { corner_robots: usize, rho: usize },
    #[error("row {row} selects the same robot to move up and down")]
    OverlapAnomaly { row: usize },
    #[error("robot at {0} is not selected to move along a column")]
    NotApplicable(HexVertex),
    #[error("collision: {0}")]
    Collision(String),
    #[error("algorithm invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
