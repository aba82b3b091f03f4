use thiserror::Error;

/// Errors raised by channel, code, decoder and experiment operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pairing is not an involution at symbol {0}")]
    NonInvolutivePairing(usize),
    #[error("symbol {0} has zero probability (unbounded LLR)")]
    ZeroProbabilitySymbol(usize),
    #[error("probabilities sum to {0}, not 1")]
    ProbabilitiesDoNotSumToOne(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("channel has zero capacity (no symbol with negative LLR)")]
    ZeroCapacityChannel,
    #[error("delta {0} is infeasible: delta/(1-delta) must be below p(plus) - p(minus)")]
    InfeasibleDelta(String),
    #[error("channels have different output alphabets")]
    AlphabetMismatch,
    #[error("channels have different pairings")]
    PairingMismatch,
    #[error("malformed channel spec at line {line}: {msg}")]
    MalformedChannelSpec { line: usize, msg: String },
    #[error("malformed alist at line {line}: {msg}")]
    MalformedAlist { line: usize, msg: String },
    #[error("row space of rank {0} is too large to enumerate (limit 24)")]
    RowSpaceTooLarge(usize),
    #[error("code of dimension {0} is too large to enumerate (limit 20)")]
    CodeTooLarge(usize),
    #[error("check degree {0} exceeds the polytope limit of 12")]
    CheckDegreeTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("witnesses live on different graphs")]
    GraphMismatch,
    #[error("k = {k} is below the maximum original check degree {d}")]
    KBelowMaxOriginalDegree { k: usize, d: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("malformed config at line {line}: {msg}")]
    MalformedConfig { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
