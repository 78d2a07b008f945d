use thiserror::Error;

/// Errors produced by graph ingestion and the walk computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },

    #[error("line {line}: node id {id} out of range")]
    NodeOutOfRange { line: usize, id: i64 },

    #[error("graph is a tree; the non-backtracking spectrum vanishes")]
    TreeGraph,

    #[error("graph is not connected")]
    NotConnected,

    #[error("node {node} is isolated")]
    IsolatedNode { node: usize },

    #[error("node {node} has vanishing neighbourhood centrality")]
    ZeroDenominator { node: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("singular linear system at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Stable, machine-readable error taxonomy used by the command line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    ParseError,
    TreeGraph,
    NotConnected,
    ZeroDenominator,
    ConvergenceFailure,
    InvalidParams,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::ParseError => "parse_error",
            ErrorKind::TreeGraph => "tree_graph",
            ErrorKind::NotConnected => "not_connected",
            ErrorKind::ZeroDenominator => "zero_denominator",
            ErrorKind::ConvergenceFailure => "convergence_failure",
            ErrorKind::InvalidParams => "invalid_params",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::ParseError => 1,
            ErrorKind::TreeGraph => 2,
            ErrorKind::NotConnected => 3,
            ErrorKind::ZeroDenominator => 4,
            ErrorKind::ConvergenceFailure => 5,
            ErrorKind::InvalidParams => 6,
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::SelfLoop { .. } | Error::NodeOutOfRange { .. } => {
                ErrorKind::ParseError
            }
            Error::TreeGraph => ErrorKind::TreeGraph,
            Error::NotConnected | Error::IsolatedNode { .. } => ErrorKind::NotConnected,
            Error::ZeroDenominator { .. } => ErrorKind::ZeroDenominator,
            Error::ConvergenceFailure { .. } | Error::Singular { .. } => {
                ErrorKind::ConvergenceFailure
            }
            Error::NotSymmetric { .. } | Error::InvalidParams(_) => ErrorKind::InvalidParams,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
