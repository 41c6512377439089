use thiserror::Error;

/// Everything that can go wrong while building or evaluating a q-expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at t = 1; the q -> 1 limit is not a rational number")]
    DenominatorVanishesAtUnity,
    #[error("exponent {0} is not representable in the exact backend (needs a multiple of 1/4)")]
    NonHalfIntegerExponent(String),
    #[error("negative argument {0}")]
    NegativeArgument(i64),
    #[error("pole in a Gamma-tilde ratio")]
    PoleInRatio,
    #[error("series has a vanishing denominator at index {0}, before it terminates")]
    PoleBeforeTermination(usize),
    #[error("series does not terminate")]
    NonTerminating,
    #[error("closed form has a vanishing denominator")]
    PoleInClosedForm,
    #[error("degenerate lattice point s = {0}")]
    DegenerateLatticePoint(String),
    #[error("boundary condition sigma(s) rho(s) = 0 fails at s = {0}")]
    BoundaryConditionViolated(String),
    #[error("degree {n} outside the orthogonality range 0..={max}")]
    DegreeOutOfRange { n: i64, max: i64 },
    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(String),
    #[error("triangle or interval condition violated: {0}")]
    TriangleViolation(String),
    #[error("negative value under a square root")]
    NegativeUnderRadical,
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("quantities carry different Gamma-tilde factors and cannot be added")]
    BasisMismatch,
    #[error("invalid q: {0}")]
    InvalidQ(String),
    #[error("precision {0} is below the 64-bit minimum")]
    PrecisionTooLow(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
