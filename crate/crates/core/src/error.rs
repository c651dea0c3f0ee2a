use alloc::string::String;

use crate::algebra::PropagatorSymbol;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: u32, dim: u32 },
    #[error("tensor block {0} occurs in both factors")]
    BlockCollision(u32),
    #[error("no value assigned to {0}")]
    MissingAssignment(PropagatorSymbol),
    #[error("no kernel bound to propagator family `{0}`")]
    UnboundFamily(String),
    #[error("empty factor sequence")]
    EmptySequence,
    #[error("expected {expected} items, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(&'static str),
    #[error("degree {0} is odd")]
    OddDegree(u32),
    #[error("parts sum to {sum}, expected {k}")]
    PartsSum { k: u32, sum: u32 },
    #[error("entry {position} of the sequence is not positive")]
    NonPositiveEntry { position: usize },
    #[error("sequence is not admissible")]
    Inadmissible,
    #[error("sequence is not weakly decreasing")]
    Unsorted,
    #[error("row {row} does not sum to 1")]
    NotPerfectMatching { row: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("embedding positions must be strictly increasing and below {bound}")]
    InvalidPositions { bound: usize },
    #[error("boundary counts differ: {left} vs {right}")]
    BoundaryMismatch { left: usize, right: usize },
    #[error("factor {} must depend on x{} alone", .factor + 1, .factor + 1)]
    NotSingleVariable { factor: usize },
    #[error("kernel is {rows}x{cols}, expected {dim}x{dim}")]
    KernelShape { rows: usize, cols: usize, dim: usize },
    #[error("kernel is declared symmetric but entry ({row},{col}) differs from its transpose")]
    KernelNotSymmetric { row: usize, col: usize },
    #[error("quadrature rule: {0}")]
    Quadrature(&'static str),
}
