use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator {column} of the sublattice is not contained in the ambient lattice")]
    SubNotContained { column: usize },

    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),

    #[error("group enumeration exceeded the element cap of {cap}")]
    NotFinite { cap: usize },

    #[error("generator `{name}` is not unimodular (determinant {det})")]
    NotUnimodular { name: String, det: String },

    #[error("generators `{a}` and `{b}` do not commute")]
    NotCommuting { a: String, b: String },

    #[error("group is not abelian")]
    NotAbelian,

    #[error("group is not cyclic with generator element {0}")]
    NotCyclic(usize),

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("lattices are defined over different groups")]
    GroupMismatch,

    #[error("action is not a group homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(message: impl Into<String>) -> Self {
        Error::Invariant(message.into())
    }

    /// True for errors caused by the caller's input rather than by a failed self-check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
