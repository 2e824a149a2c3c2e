use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter lies outside the domain of the operation.
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateMode(usize),

    #[error("expected {expected} modes, got {actual}")]
    ModeCountMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The matrices handed to a constructor violate a physical invariant.
    #[error("unphysical {what}: {detail}")]
    Unphysical { what: &'static str, detail: String },

    #[error("partition must be a nonempty proper subset of the modes")]
    ImproperPartition,

    /// Exact broadcasting needs a nonnegative ancilla photon number.
    #[error("exact broadcasting infeasible: ancilla thermal number mbar = {mbar} < 0")]
    Infeasible { mbar: f64 },

    /// A Fock-space run would exceed its truncation or memory budget.
    #[error("resource budget exceeded: {detail}")]
    Budget {
        detail: String,
        required_cutoff: Option<usize>,
    },

    #[error("unitarity leakage {leakage:e} exceeds budget {budget:e} (padding {padding})")]
    Leakage {
        leakage: f64,
        budget: f64,
        padding: usize,
    },

    /// Circuit output disagrees with its closed-form prediction.
    #[error("prediction mismatch for {quantity}: measured {measured}, predicted {predicted}")]
    PredictionMismatch {
        quantity: &'static str,
        measured: f64,
        predicted: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
