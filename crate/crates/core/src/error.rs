// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::{Length, VertexId};

/// Errors produced while loading data, building indexes, or answering queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: edge weight must be positive and finite, got {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("network has no vertices")]
    EmptyNetwork,

    #[error("network is not connected")]
    Disconnected,

    #[error("vertex id {0} is out of range")]
    InvalidVertex(VertexId),

    #[error("external vertex id {0} does not exist in the network")]
    UnknownExternalId(u64),

    #[error("vertex {0} has no coordinates")]
    MissingCoordinates(u64),

    #[error("need {needed} vertices but only {available} are available")]
    InsufficientVertices { needed: usize, available: usize },

    #[error("category {0} is empty")]
    EmptyCategory(usize),

    #[error("vertex {0} appears in more than one category")]
    OverlappingCategories(VertexId),

    #[error("group must be nonempty with matching sources and destinations (got {sources} sources, {destinations} destinations)")]
    InvalidGroup { sources: usize, destinations: usize },

    #[error("member index {index} out of range for a group of {size}")]
    InvalidMemberIndex { index: usize, size: usize },

    #[error("combination does not match the query categories")]
    InvalidCombination,

    #[error("threshold must be nonnegative, got {0}")]
    InvalidThreshold(Length),

    #[error("minimum additional distance requested for a feasible instance")]
    FeasibleInstance,

    #[error("distance matrix needs {required_bytes} bytes, limit is {limit_bytes} bytes")]
    MatrixCapacity { required_bytes: u128, limit_bytes: u128 },

    #[error("{combinations} combinations exceed the limit of {limit}; use a smaller per_category")]
    CombinationGuard { combinations: u128, limit: u128 },

    #[error("duplicate vertex id {0} in spatial index input")]
    DuplicateEntry(VertexId),

    #[error("spatial index needs at least one entry")]
    EmptyIndex,

    #[error("group nearest neighbor query needs at least one point")]
    EmptyQueryPoints,

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("invalid fanout {fanout} / min fill {min_fill}")]
    InvalidFanout { fanout: usize, min_fill: usize },

    #[error("bad distance matrix file: {0}")]
    BadMatrixFile(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
