use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit length {0} outside supported range [{min}, {max}]", min = crate::group::MIN_BITS, max = crate::group::MAX_BITS)]
    BitLength(u64),

    #[error("no suitable safe prime found after {0} attempts")]
    SearchExhausted(u64),

    #[error("invalid group parameters: {0}")]
    InvalidParams(String),

    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(String, String),

    #[error("value {0} is not a member of the prime-order subgroup")]
    NotMember(String),

    #[error("identity element is not allowed here")]
    Identity,

    #[error("exponent must lie in [1, p-1]")]
    ZeroExponent,

    #[error("subgroup order has {0} bits, above the discrete-log bound of {1} bits")]
    ScaleBound(u64, u64),

    #[error("oracle base {0} does not match the expected base {1}")]
    OracleBase(String, String),

    #[error("trapdoor is inconsistent with the published generator")]
    TrapdoorMismatch,

    #[error("ciphertext header does not match this recipient")]
    HeaderMismatch,

    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed hex value {0:?}")]
    Hex(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BitLength(_)
            | Error::SearchExhausted(_)
            | Error::InvalidParams(_)
            | Error::InvalidArgument(_)
            | Error::Hex(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            Error::NotInvertible(..)
            | Error::NotMember(_)
            | Error::Identity
            | Error::ZeroExponent
            | Error::OracleBase(..)
            | Error::MalformedCiphertext(_) => 3,
            Error::ScaleBound(..) => 4,
            Error::TrapdoorMismatch => 5,
            Error::HeaderMismatch => 6,
        }
    }
}
