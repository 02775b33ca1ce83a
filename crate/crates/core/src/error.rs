use serde::Serialize;
use thiserror::Error;

/// A point witnessing that subspace `subspace` admits points on both sides of a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitWitness {
    pub subspace: usize,
    pub inside: usize,
    pub outside: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance specification: {0}")]
    SpecInvalid(String),

    #[error("palette is not closed under meet: {p} and {q} give a subspace outside the palette")]
    PaletteNotClosedUnderMeet { p: usize, q: usize },

    #[error("search exceeded its budget of {budget} nodes")]
    ExhaustionBudget { budget: u64 },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("position is not terminal")]
    NotTerminal,

    #[error("strategy has no entry for position {0}")]
    StrategyIncomplete(String),

    #[error("finite exhaustion in {stage}: {detail}")]
    FiniteExhaustion { stage: String, detail: String },

    #[error("no palette subspace is homogeneous ({} split witnesses)", witnesses.len())]
    PigeonholeUnavailable { witnesses: Vec<SplitWitness> },

    #[error("instance has no metric")]
    NoMetric,

    #[error("subset is not dense: point {point} has no neighbour within {radius}")]
    NotDense { point: usize, radius: String },

    #[error("counterexample {kind} does not apply to this instance: {reason}")]
    KindMismatch { kind: String, reason: String },

    #[error("strategy does not win: {0}")]
    NotVerified(String),

    #[error("game mismatch: {0}")]
    GameMismatch(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// The variant name, for machine-readable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SpecInvalid(_) => "SpecInvalid",
            Error::PaletteNotClosedUnderMeet { .. } => "PaletteNotClosedUnderMeet",
            Error::ExhaustionBudget { .. } => "ExhaustionBudget",
            Error::IllegalMove(_) => "IllegalMove",
            Error::NotTerminal => "NotTerminal",
            Error::StrategyIncomplete(_) => "StrategyIncomplete",
            Error::FiniteExhaustion { .. } => "FiniteExhaustion",
            Error::PigeonholeUnavailable { .. } => "PigeonholeUnavailable",
            Error::NoMetric => "NoMetric",
            Error::NotDense { .. } => "NotDense",
            Error::KindMismatch { .. } => "KindMismatch",
            Error::NotVerified(_) => "NotVerified",
            Error::GameMismatch(_) => "GameMismatch",
            Error::Invariant(_) => "Invariant",
        }
    }

    pub(crate) fn exhaustion(stage: &str, detail: impl Into<String>) -> Self {
        Error::FiniteExhaustion {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
