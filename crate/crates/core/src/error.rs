use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure category, mapped one-to-one onto process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or inconsistent network data.
    Data,
    /// Linear algebra trouble: singular factorizations, non-convergence.
    Numeric,
    /// The request is well formed but has no admissible answer.
    Infeasible,
    /// Bad parameters supplied by the caller.
    Usage,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Data => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Infeasible => 4,
            ErrorKind::Usage => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("injections are not balanced; island residuals (island, MW): {residuals:?}")]
    Unbalanced { residuals: Vec<(usize, f64)> },

    #[error("island {island} has imbalance {imbalance} MW but no generator bus to absorb it")]
    Unbalanceable { island: usize, imbalance: f64 },

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("network is disconnected: {0}")]
    Disconnected(String),

    #[error("line {line} is a bridge; its outage islands the network (use the bridge-outage factor under a balancing rule)")]
    BridgeOutage { line: usize },

    #[error("outage set is a cut set; surviving islands: {islands:?}")]
    CutSet { islands: Vec<Vec<usize>> },

    #[error("vertex set is not an island of the surviving network")]
    NotAnIsland,

    #[error("invalid proportional control: {0}")]
    Control(String),

    #[error("flow on outaged bridge {line} is zero; the outage ratio is undefined")]
    UndefinedRatio { line: usize },

    #[error("{count} spanning trees exceed the enumeration cap {cap}")]
    EnumerationCap { count: BigUint, cap: u64 },

    #[error("degenerate partition: {0}")]
    Degenerate(String),

    #[error("objective undefined: {0}")]
    UndefinedObjective(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::Data(_)
            | Error::Unbalanced { .. }
            | Error::Unbalanceable { .. }
            | Error::Io(_)
            | Error::Json(_) => ErrorKind::Data,
            Error::Conditioning(_) | Error::Numeric(_) => ErrorKind::Numeric,
            Error::Disconnected(_)
            | Error::BridgeOutage { .. }
            | Error::CutSet { .. }
            | Error::NotAnIsland
            | Error::UndefinedRatio { .. }
            | Error::EnumerationCap { .. }
            | Error::Degenerate(_)
            | Error::UndefinedObjective(_) => ErrorKind::Infeasible,
            Error::Control(_) | Error::InvalidArgument(_) => ErrorKind::Usage,
        }
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Data(_) => "data",
            Error::Unbalanced { .. } => "unbalanced",
            Error::Unbalanceable { .. } => "unbalanceable",
            Error::Conditioning(_) => "conditioning",
            Error::Numeric(_) => "numeric",
            Error::Disconnected(_) => "disconnected",
            Error::BridgeOutage { .. } => "bridge_outage",
            Error::CutSet { .. } => "cut_set",
            Error::NotAnIsland => "not_an_island",
            Error::Control(_) => "control",
            Error::UndefinedRatio { .. } => "undefined_ratio",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::Degenerate(_) => "degenerate",
            Error::UndefinedObjective(_) => "undefined_objective",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
