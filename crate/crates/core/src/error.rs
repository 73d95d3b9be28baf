use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("pole at {0}")]
    Pole(String),
    #[error("outside the real domain: {0}")]
    Domain(String),
    #[error("unbound atom `{0}`")]
    Unbound(String),
    #[error("unbound function `{0}`")]
    UnboundFunction(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("zero test indeterminate: {0} samples hit poles or domain errors")]
    Indeterminate(usize),
    #[error("jet order {got} exceeds the cap {cap}")]
    OrderOverflow { got: u32, cap: u32 },
    #[error("cannot differentiate with respect to a formal function `{0}`")]
    DiffWrtFunction(String),
    #[error("degenerate invariant pair: dI ∧ dJ vanishes identically on the equation ({0})")]
    DegeneratePair(String),
    #[error("genericity violation: {0}")]
    Genericity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
