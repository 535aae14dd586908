use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series for J_(i{nu})({z}) cannot be certified at {bits} bits; raise the working precision")]
    PrecisionExhausted { nu: f64, z: f64, bits: u32 },
    #[error("cosh(pi*{nu}/2) overflows binary64; use the scaled evaluation")]
    OverflowWithoutScaling { nu: f64 },
    #[error("x = {x:e} m lies outside the cavity [0, {len:e}] m")]
    Domain { x: f64, len: f64 },
    #[error("regime condition violated: {0}")]
    Regime(String),
    #[error("sample grids differ: {0}")]
    GridMismatch(String),
    #[error("density vanishes, weak value undefined")]
    DivisionByZero,
    #[error("grid under-resolves the integrand: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
