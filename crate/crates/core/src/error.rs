use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("edge `{0}`-`{1}` listed twice")]
    DuplicateEdge(String, String),
    #[error("edge `{a}`-`{b}` has non-positive multiplicity {mult}")]
    BadMultiplicity { a: String, b: String, mult: i64 },
    #[error("intersection matrix is not negative definite")]
    NotContractible,
    #[error("cannot contract `{id}`: self-intersection {weight} is not -1")]
    IllegalContraction { id: String, weight: i64 },
    #[error("invalid marked configuration: {0}")]
    InvalidConfiguration(String),
    #[error("reference data corrupt: {0}")]
    Reference(String),
}
