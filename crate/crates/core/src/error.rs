use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed model descriptor `{0}`")]
    BadDescriptor(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("level {level:?} is not available on {model}")]
    UnsupportedLevel {
        level: (usize, usize),
        model: String,
    },

    #[error("element has non-finite entries")]
    NonFinite,

    #[error("element is not self-adjoint (defect {0:.3e})")]
    NotSelfAdjoint(f64),

    #[error("element is outside the positive cone (minimum eigenvalue {0:.3e})")]
    OutsideCone(f64),

    #[error("element has non-zero entries outside the block pattern of {0}")]
    OutsidePattern(String),

    #[error("element is not in the order interval [0, e]")]
    OutOfInterval,

    #[error("domain/codomain mismatch: {0}")]
    ModelMismatch(String),

    #[error("map is not |.|-preserving")]
    NotAbsPreserving,

    #[error("map is not invertible")]
    Singular,

    #[error("map is not surjective")]
    NotSurjective,

    #[error("map is not unital")]
    NotUnital,

    #[error("image of the order unit is not an order projection")]
    NotOrderProjection,

    #[error("map is not star-linear (defect {0:.3e})")]
    NotStarLinear(f64),

    #[error("operation is not supported on the lattice model")]
    LatticeUnsupported,

    #[error("unknown map family `{0}`")]
    UnknownFamily(String),

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
