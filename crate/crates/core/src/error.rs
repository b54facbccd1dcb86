use thiserror::Error;

/// Everything that can go wrong while building or checking a factorization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("root of unity of order {order} does not live in Q(zeta_{conductor})")]
    ConductorTooSmall { order: u64, conductor: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different scalar domains")]
    MixedDomain,
    #[error("conductor {from} does not divide {to}")]
    NotDivisible { from: u64, to: u64 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coherent polynomials are built over different band matrices")]
    JMismatch,
    #[error("band is not a scalar multiple of the reference band")]
    NotProportional,
    #[error("coherent sequence is not normalized (D_0 = D_1 = I)")]
    NotNormalized,
    #[error("matrix is not coherent with respect to the given band")]
    NotCoherent,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("factor fails its declared order: {0}")]
    OrderViolated(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("matrix does not have determinant one")]
    NotUnimodular,
    #[error("scalar matrix given where a nonscalar one is required")]
    ScalarInput,
    #[error("similarity search exhausted {0} retries")]
    RetriesExhausted(usize),
    #[error("1 is an eigenvalue of the finite block")]
    EigenvalueOne,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by an input that is well formed but outside the
    /// domain of an algorithm.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::PreconditionViolated(_)
                | Error::EigenvalueOne
                | Error::NotUnimodular
                | Error::ScalarInput
                | Error::DegenerateParameter(_)
                | Error::OrderViolated(_)
        )
    }
}
