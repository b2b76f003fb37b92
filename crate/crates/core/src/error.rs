use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Phase-space constructions require odd dimensions of at least 3.
    #[error("dimension must be odd and at least 3, got {0}")]
    BadDimension(usize),

    /// Operand shapes are incompatible with the declared dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A Wigner vector came out complex because the operator is not Hermitian.
    #[error("complex Wigner vector: operator is not Hermitian (imaginary residue {residue:.3e})")]
    NotHermitian { residue: f64 },

    /// A stochastic Wigner matrix came out complex because the map is not
    /// Hermitian-preserving.
    #[error("not Hermitian-preserving: Choi matrix is not Hermitian (imaginary residue {residue:.3e})")]
    NotHermitianPreserving { residue: f64 },

    /// Input failed the density-operator checks.
    #[error("not a quantum state: {0}")]
    NotAState(String),

    /// No column-stochastic matrix maps the source quasi-probability vector
    /// to the target.
    #[error("transformation infeasible: ||p||_1 = {p_norm:.9} < ||q||_1 = {q_norm:.9}")]
    InfeasibleTransform { p_norm: f64, q_norm: f64 },

    /// Rate from a mana-free state to a magic state is undefined.
    #[error("undefined rate: source state has zero mana while the target does not")]
    UndefinedRate,

    /// The conic solver failed for a numerical reason, as opposed to
    /// certifying infeasibility.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error("unknown state name: {0}")]
    UnknownState(String),

    #[error("state file parse error: {0}")]
    Parse(String),

    /// The +1 eigenspace of the Fourier matrix is numerically degenerate.
    #[error("degenerate +1 eigenspace of the dimension-3 Fourier matrix")]
    DegenerateEigenspace,

    /// A scalar argument is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
