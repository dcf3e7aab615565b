use crate::data::Fixture;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid match: {0}")]
    InvalidMatch(String),

    #[error("duplicate fixture {fixture} on lines {first_line} and {second_line}")]
    DuplicateFixture {
        fixture: Fixture,
        first_line: u64,
        second_line: u64,
    },

    #[error("unknown team `{0}`")]
    UnknownTeam(String),

    #[error("no result recorded for {0}")]
    NoResult(Fixture),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{model}: {message}")]
    Predictor { model: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
