use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },

    #[error("duplicate trial key (implementation={implementation}, environment={environment}, trial={trial})")]
    DuplicateTrial {
        implementation: String,
        environment: String,
        trial: u32,
    },

    #[error("duplicate baseline for environment {0}")]
    DuplicateBaseline(String),

    #[error("no baseline for environment {0}")]
    MissingBaseline(String),

    #[error("degenerate baseline (human_play == random_play) for environment(s): {}", .0.join(", "))]
    DegenerateBaseline(Vec<String>),

    #[error("implementation {implementation} has no trials in environment {environment}")]
    MissingCell {
        implementation: String,
        environment: String,
    },

    #[error("unknown implementation {0}")]
    UnknownImplementation(String),

    #[error("need >= 2 implementations, got {0}")]
    TooFewImplementations(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("anova for environment {environment}: {message}")]
    Anova {
        environment: String,
        message: String,
    },

    #[error("synthetic spec: {0}")]
    SyntheticSpec(String),

    #[error("mixed trial-log formats in one dataset")]
    MixedFormats,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
