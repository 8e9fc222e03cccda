use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants are split into validation failures (bad input, exit status 2 in
/// the CLI) and numerical failures (exit status 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate cell {0:?}")]
    DuplicateCell(Vec<usize>),
    #[error("cell {0:?} repeats a vertex")]
    RepeatedVertex(Vec<usize>),
    #[error("cell {cell:?} listed in dimension {listed} but has {len} vertices")]
    MisplacedCell { cell: Vec<usize>, listed: usize, len: usize },
    #[error("declared dimension {declared} does not match cells (dimension {actual})")]
    DimensionMismatch { declared: usize, actual: usize },
    #[error("degree {q} out of range {lo}..={hi}")]
    DegreeOutOfRange { q: usize, lo: usize, hi: usize },
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("word does not close up: starts on tile {start}, ends on tile {end}")]
    OpenPath { start: usize, end: usize },
    #[error("word label {label} cannot be applied on tile {tile}")]
    BadLabel { label: usize, tile: usize },
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("cycle is not rationally null-homologous")]
    NotNullHomologous,
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unknown bound id `{0}`")]
    UnknownBound(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of numerical routines (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }

    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}
