use thiserror::Error;

/// Errors shared by the gate, arithmetic, matching and protocol layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs produced under different key triples were mixed.
    #[error("ciphertext does not belong to the provided key")]
    KeyMismatch,

    /// Decryption could not produce a plaintext (the ⊥ outcome).
    #[error("decryption failed: {0}")]
    DecryptionFailed(&'static str),

    #[error("unsupported parameter set `{0}`")]
    UnsupportedParams(String),

    #[error("word widths differ: {left} vs {right}")]
    WidthMismatch { left: u16, right: u16 },

    #[error("width {0} is outside the supported range (1..=64)")]
    BadWidth(u16),

    #[error("vector length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {value} is not in [0, {modulus})")]
    ComponentRange { value: u32, modulus: u32 },

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    /// A serialized blob failed structural validation.
    #[error("malformed blob: {0}")]
    Malformed(String),

    #[error("unknown client `{0}`")]
    UnknownClient(String),

    #[error("client `{0}` is already registered")]
    DuplicateClient(String),

    #[error("unknown session {0}")]
    UnknownSession(u64),

    /// A session was driven past its one-shot lifecycle.
    #[error("session {0} has already been consumed")]
    StageViolation(u64),

    #[error("session {0} expired before verification")]
    SessionExpired(u64),

    #[error("peer backend `{peer}` does not match local backend `{local}`")]
    BackendMismatch { local: &'static str, peer: &'static str },

    #[error("wire protocol violation: {0}")]
    Wire(String),

    #[error("frame of {got} bytes exceeds the {limit}-byte limit")]
    FrameTooLarge { got: u64, limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
