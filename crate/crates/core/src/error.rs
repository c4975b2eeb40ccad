use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the algebra, solvers, GCE engine and scenario layers.
#[derive(Debug, Error)]
pub enum GceError {
    #[error("invalid rank {0}: SU(N) bases need N >= 2")]
    InvalidRank(usize),

    #[error("inconsistent basis: f[{a}][{b}][{c}] has imaginary part {imag:e}")]
    InconsistentBasis {
        a: usize,
        b: usize,
        c: usize,
        imag: f64,
    },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pair ({0}, {1}) out of range for {2} systems")]
    PairOutOfRange(usize, usize, usize),

    #[error("invalid convention: {0}")]
    InvalidConvention(String),

    #[error("empty potential profile")]
    EmptyProfile,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),

    #[error("scattering requested at evanescent asymptotic energy: {0}")]
    Evanescent(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("point {0} lies outside the evaluation domain")]
    OutsideDomain(f64),

    #[error("non-uniform grid: spacing varies by {0:e}")]
    NonUniformGrid(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("solutions use different Dirac conventions")]
    MixedConventions,

    #[error("degenerate energies: E1 = E2 = {0}")]
    DegenerateEnergies(f64),

    #[error("no pair of domains meets at the delta barrier at x = {0}")]
    DomainsNotAdjacent(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{origin}: parse error at line {line}, column {column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{origin}: schema violation at `{key}`: {message}")]
    Schema {
        origin: String,
        key: String,
        message: String,
    },

    #[error("{origin}: invariant `{rule}` violated: {message}")]
    Invariant {
        origin: String,
        rule: String,
        message: String,
    },

    #[error("unknown built-in scenario `{0}`")]
    UnknownScenario(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario `{scenario}`: {source}")]
    InScenario {
        scenario: String,
        #[source]
        source: Box<GceError>,
    },
}

pub type Result<T> = std::result::Result<T, GceError>;

impl GceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GceError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            GceError::Parse { .. }
            | GceError::Schema { .. }
            | GceError::Invariant { .. }
            | GceError::UnknownScenario(_)
            | GceError::Io { .. } => true,
            GceError::InScenario { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
