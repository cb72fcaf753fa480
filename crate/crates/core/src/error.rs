use thiserror::Error;

use crate::spinchain::Alphabet;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a chain needs at least one site")]
    EmptyChain,

    #[error("value {value} at site {site} is not a {alphabet} state")]
    InvalidValue {
        site: usize,
        value: i64,
        alphabet: Alphabet,
    },

    #[error("path step {step} at bond {bond} exceeds the spin bound {bound}")]
    StepTooLarge { bond: usize, step: i64, bound: i64 },

    #[error("path must start at height 0, found {0}")]
    BadAnchor(i64),

    #[error("configuration {0} is not in the core subspace")]
    NotCore(String),

    #[error("{0} has no core subspace (integer spin required)")]
    NoCore(Alphabet),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alphabet mismatch: model acts on {model}, input is {input}")]
    AlphabetMismatch { model: Alphabet, input: Alphabet },

    #[error("length mismatch: expected {expected} sites, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("basis is not closed: state {from} connects to {to} which is outside the basis")]
    BasisNotClosed { from: String, to: String },

    #[error(
        "dimension {dimension} exceeds the solver cap {cap}; restrict to a smaller Krylov class or chain"
    )]
    DimensionTooLarge { dimension: usize, cap: usize },

    #[error("initial state norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("projector formula is only tabulated for 2S in 1..=5, got 2S = {0}")]
    UnsupportedSpin(u32),

    #[error("projector formula evaluated to a non-indicator value at m = {0}")]
    NotIndicator(i64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
