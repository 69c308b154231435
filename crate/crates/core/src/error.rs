use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed convex sum: {0}")]
    MalformedSum(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("sets do not meet: {0}")]
    EmptyIntersection(String),

    #[error("intersection of {0} cannot be represented exactly")]
    UnsupportedIntersection(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("malformed wire plan: {0}")]
    MalformedPlan(String),

    #[error("result is not a union of product cells: {0}")]
    NonProductResult(String),

    #[error("input too large: {0}")]
    InputTooLarge(String),

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid entry `{entry}`: {message}")]
    Validation { entry: String, message: String },

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("no interpretation for grammatical base `{0}`")]
    UnknownBase(String),

    #[error("`{phrase}` does not reduce to {target}")]
    NoReduction { phrase: String, target: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
