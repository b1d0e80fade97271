//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("framework `{0}` is not registered")]
    UnknownFramework(String),

    #[error("framework `{0}` is already registered (use overwrite to replace it)")]
    DuplicateFramework(String),

    #[error("framework `{framework}` does not declare operation `{op}`")]
    UnknownOp { framework: String, op: String },

    #[error("operation `{op}` cannot be resolved under framework `{framework}`: not declared and no default composition")]
    UnresolvableOp { framework: String, op: String },

    #[error("invalid framework configuration `{name}`: {reason}")]
    InvalidConfig { name: String, reason: String },

    #[error("invalid security parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown identifier `{ident}` at byte {pos}")]
    UnknownIdent { ident: String, pos: usize },

    #[error("missing parameter `{0}` for cost evaluation")]
    MissingParameter(String),

    #[error("division by zero while evaluating a cost formula")]
    DivisionByZero,

    #[error("log2 of a non-positive value while evaluating a cost formula")]
    Log2NonPositive,

    #[error("cost formula produced a negative component ({component} = {value})")]
    NegativeCost { component: &'static str, value: String },

    #[error("cost component does not fit in 64 bits")]
    CostOverflow,

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid label segment `{0}`: segments must be non-empty and must not contain `-`")]
    InvalidLabel(String),

    #[error("loop body is input-dependent: repeated compilation produced different block structures")]
    InputDependentLoop,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("loss must be scalar-shaped, got {0:?}")]
    NonScalarLoss(Vec<u64>),

    #[error("backward called twice without re-tracing the forward pass")]
    BackwardTwice,

    #[error("optimizer step called before backward populated any gradient")]
    StepBeforeBackward,

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid model spec: {0}")]
    ModelSpec(String),

    #[error("dataloader batch {batch} exceeds data length {len} (no wraparound)")]
    BatchOutOfRange { batch: u64, len: u64 },

    #[error("invalid request: {0}")]
    Request(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config file error: {0}")]
    ConfigFile(String),
}

impl Error {
    /// CLI exit code: 3 for unknown entities, 2 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownFramework(_)
            | Error::UnknownModel(_)
            | Error::UnknownOp { .. } => 3,
            _ => 2,
        }
    }
}
