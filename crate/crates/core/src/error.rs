use thiserror::Error;

use crate::simplicial::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid number literal `{0}`")]
    InvalidNumber(String),

    #[error("schedule rejected: {0}")]
    Schedule(#[from] ScheduleError),

    #[error("annulus: {0}")]
    Annulus(#[from] AnnulusError),

    #[error("boundary is not a single cycle: {0}")]
    Boundary(String),

    #[error("vertex {vertex} is unreachable from {source_vertex}")]
    Unreachable { source_vertex: VertexId, vertex: VertexId },

    #[error("drift bound violated on annulus {annulus}: edge ({u},{v}) moves {observed} > {bound}")]
    DriftViolation {
        annulus: usize,
        u: VertexId,
        v: VertexId,
        observed: String,
        bound: String,
    },

    #[error("oracle budget: {0}")]
    Budget(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Names the construction bound a parameter triple violates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("n = {0} is too small (need n >= 3)")]
    BoundaryTooShort(u32),
    #[error("rho = {0} must be positive")]
    RhoNotPositive(String),
    #[error("eta = {0} must satisfy 0 < eta < 1")]
    EtaOutOfRange(String),
    #[error("eta^2 < rho violated ({eta_sq} >= {rho})")]
    EtaSquaredNotBelowRho { eta_sq: String, rho: String },
    #[error("collar width w = ceil(rho n) = {0} must be >= 1")]
    EmptyCollar(u64),
    #[error("block length L_b = floor(n Delta_n) = {0} must be >= 1")]
    EmptyBlock(u64),
    #[error("cycle length M_{block} = {length} must be >= 3")]
    CycleTooShort { block: usize, length: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnulusError {
    #[error("outer cycle length {0} is below 3")]
    OuterTooShort(u32),
    #[error("inner cycle length {0} is below 3")]
    InnerTooShort(u32),
    #[error("inner cycle length {inner} exceeds outer length {outer}")]
    Expanding { outer: u32, inner: u32 },
    #[error("layer {0} is not the innermost layer")]
    NotInnermost(usize),
    #[error("the complex is already capped")]
    Capped,
}
