use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable `{name}` exceeds declared arity {arity}")]
    Arity { name: String, arity: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("subdivision diverged: {0}")]
    Diverged(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("inputs are equal")]
    EqualInputs,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("degenerate row: {0}")]
    DegenerateRow(String),
    #[error("Siegel step failed: {0}")]
    SiegelFailed(String),
    #[error("sup bound unverified: {0}")]
    SupBoundUnverified(String),
    #[error("feasibility cap exceeded: {0}")]
    FeasibilityCap(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors caused by running out of a budget or of precision,
    /// as opposed to malformed input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_)
                | Error::Diverged(_)
                | Error::SearchExhausted(_)
                | Error::BudgetExceeded(_)
                | Error::FeasibilityCap(_)
                | Error::SupBoundUnverified(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
