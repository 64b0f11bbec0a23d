use thiserror::Error;

/// Errors raised by configuration, enumeration and I/O paths.
#[derive(Debug, Error)]
pub enum Error {
    /// An unsupported or inconsistent parameter combination.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A caller broke an operation's input contract (wrong lengths, shapes, indices).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A codebook or pair enumeration would exceed the configured cap.
    #[error(
        "enumeration too large: {codewords} codewords exceeds the cap of {cap}; \
         raise the cap or use the sampled bound"
    )]
    EnumerationTooLarge { codewords: u64, cap: u64 },
    /// The requested detector cannot be used for this scheme.
    #[error("unsupported scheme for this operation: {0}")]
    UnsupportedScheme(String),
    /// A malformed experiment file or CSV.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
