use thiserror::Error;

use crate::rootsystem::Series;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Dynkin type {series:?}{rank}: {constraint}")]
    InvalidDynkin {
        series: Series,
        rank: usize,
        constraint: &'static str,
    },
    #[error("cannot parse Dynkin type from {0:?}")]
    ParseDynkin(String),
    #[error("node {node} out of range for rank {rank} (nodes are numbered 1..={rank})")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error("weight has {found} coordinates, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("weight {weight} is not dominant: coordinate at node {node} is negative")]
    NotDominant { weight: String, node: usize },
    #[error("characters live in different symmetry contexts")]
    ContextMismatch,
    #[error(
        "exterior power {q}: Newton identity produced a non-divisible coefficient at {weight}"
    )]
    InexactDivision { q: usize, weight: String },
    #[error("negative multiplicity at {weight}: input is not a genuine character")]
    NegativeMultiplicity { weight: String },
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("twist must vanish at unmarked node {node}")]
    InvalidTwist { node: usize },
    #[error("exterior power degree {q} exceeds dimension {dim}")]
    DegreeTooLarge { q: usize, dim: usize },
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
