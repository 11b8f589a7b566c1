use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("not a module: {0}")]
    NotAModule(String),
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("Lie axiom violated ({axiom}): {witness}")]
    LieAxiomViolation { axiom: String, witness: String },
    #[error("invalid cdga: {0}")]
    InvalidCdga(String),
    #[error("weight {weight} exceeds the configured bound {bound}")]
    WeightTooLarge { weight: u32, bound: u32 },
    #[error("division by the characteristic {prime}: {detail}")]
    CharDivision { prime: u64, detail: String },
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}
