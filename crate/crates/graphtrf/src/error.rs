//! Error types shared across the crate.

use crate::graph::TaskKind;
use crate::trf::TrfKind;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no valid graph found within {attempts} attempts for task {task:?}")]
    GenerationExhausted { task: TaskKind, attempts: usize },

    #[error("invalid node id {node} for graph with {node_count} nodes")]
    InvalidNode { node: usize, node_count: usize },

    #[error("graph contains a cycle; topological sort undefined")]
    CycleDetected,

    #[error("node {target} is unreachable from node {start}")]
    Unreachable { start: usize, target: usize },

    #[error("graph instance is not bipartite")]
    NotBipartite,

    #[error("task {task:?} is not supported by TRF {trf:?}")]
    UnsupportedCombination { task: TaskKind, trf: TrfKind },

    #[error("external renderer `{0}` not found on the search path")]
    RendererMissing(String),

    #[error("renderer failed: {stderr}")]
    RenderFailed { stderr: String },

    #[error("cannot judge an empty run set")]
    EmptyRuns,

    #[error("cannot aggregate an empty record set")]
    EmptyRecords,

    #[error("accuracy is zero; log accuracy objective undefined")]
    ZeroAccuracy,

    #[error("simulation profile has no cell for ({task:?}, {trf:?}) and no default")]
    ProfileMissing { task: TaskKind, trf: TrfKind },

    #[error("authentication failed: {0}")]
    Auth(String),

    #[error("rate limited after retries: {0}")]
    RateLimited(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("malformed provider response: {0}")]
    MalformedResponse(String),

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate training set: labels identical and loss non-decreasing")]
    Degenerate,

    #[error("journal incomplete: question {question_id} is missing TRF {trf:?}")]
    IncompleteJournal { question_id: String, trf: TrfKind },

    #[error("missing artifact {path}; run `{producer}` first")]
    MissingArtifact { path: String, producer: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("TOML parse error: {0}")]
    Toml(String),
}

pub type Result<T> = std::result::Result<T, Error>;
