use thiserror::Error;

/// Failures raised by the arithmetic model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    /// `x * y0` overshoots one by more than the quantization allowance.
    #[error("seed quality: x*y0 exceeds 1 + 2^-20 (raw product {product:#x})")]
    SeedQuality { product: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn overflow(msg: impl Into<String>) -> Error {
    Error::Overflow(msg.into())
}
