use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u16 },

    #[error("invalid antidictionary: {0}")]
    InvalidAntidictionary(String),

    #[error("no minimal forbidden word of length <= {max_len} exists for this input")]
    EmptyAntidictionary { max_len: usize },

    #[error("degenerate antidictionary: state '{locus}' has no outgoing edge after sink removal")]
    DegenerateAutomaton { locus: String },

    #[error("input enters a forbidden word at position {position}")]
    ForbiddenInput { position: usize },

    #[error("stationary distribution is not unique ({closed_classes} closed classes)")]
    NonUniqueStationary { closed_classes: usize },

    #[error("linear system is singular beyond tolerance")]
    SingularSystem,

    #[error("invalid transition probabilities: {0}")]
    InvalidProbability(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bit stream ended prematurely")]
    TruncatedStream,

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("rank {rank} out of range (only {available} candidates)")]
    RankOutOfRange { rank: u16, available: usize },

    #[error("frequency counters exceed the coder's precision budget")]
    CounterOverflow,

    #[error("cannot code a symbol with zero frequency")]
    ZeroFrequency,

    #[error("integer code is defined only for n >= 1")]
    OmegaZero,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
