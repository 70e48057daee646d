use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("F_c(x) = x^2 + c has no real fixed point for c = {c} (need c <= 1/4)")]
    NoRealFixedPoint { c: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters outside the regime where the construction is certified.
    #[error("regime error: {0}")]
    Regime(String),

    /// Malformed Cantor set description or interval document.
    #[error("spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
