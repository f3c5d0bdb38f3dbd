use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid prime modulus {0}")]
    InvalidModulus(u64),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree must be at least 1")]
    EmptyDegree,

    #[error("word {0:?} is not a Lyndon word")]
    NotLyndon(String),

    #[error("elements belong to different free Lie algebras")]
    AlgebraMismatch,

    #[error("unbound name `{0}`")]
    UnboundName(String),

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("antisymmetry violated by [{0}, {1}]")]
    AntisymmetryViolation(String, String),

    #[error("Jacobi identity violated by ({0}, {1}, {2})")]
    JacobiViolation(String, String, String),

    #[error("subspace is not an ideal: [{basis}, v] leaves it")]
    NotAnIdeal { basis: String },

    #[error("subspace is not closed under the bracket: {0}")]
    NotSubalgebra(String),

    #[error("{what} {value} out of range (max {max})")]
    OutOfRange { what: &'static str, value: usize, max: usize },

    #[error("relators do not certify nilpotency of class {class}")]
    NotNilpotent { class: usize },

    #[error("relator `{0}` is not homogeneous")]
    Inhomogeneous(String),

    #[error("not a subdirect sum: projection to factor {factor} deficient at degree {degree}")]
    NotSubdirect { factor: usize, degree: usize },

    #[error("maps to the quotient disagree: `{0}` does not vanish")]
    MapsDisagree(String),

    #[error("map to the quotient is not surjective: {0}")]
    NotSurjective(String),

    #[error("malformed presentation: {0}")]
    MalformedPresentation(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),
}
