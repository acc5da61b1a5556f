use thiserror::Error;

/// Errors raised by operator construction, evolution and compilation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense realization on {requested} qubits exceeds the limit of {limit}")]
    DimensionGuard { requested: usize, limit: usize },

    #[error("operator acts on qubit {qubit} but the register has {n_qubits} qubits")]
    SupportOutOfRange { qubit: usize, n_qubits: usize },

    #[error("pauli string coefficient must be non-zero")]
    ZeroCoefficient,

    #[error("cannot parse pauli notation {input:?}: {reason}")]
    PauliParse { input: String, reason: String },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("unknown link id {0}")]
    UnknownLink(u32),

    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("layout parse error on line {line}: {reason}")]
    LayoutParse { line: usize, reason: String },

    #[error("plaquette is not a closed oriented loop: {0}")]
    OpenPlaquette(String),

    #[error("state dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid trotter plan: {0}")]
    InvalidPlan(String),

    #[error("reference gauge expectation {0:e} is too small for a relative deviation")]
    DivisionGuard(f64),

    #[error("no gauge sector with eigenvalue {0}")]
    UnknownSector(f64),

    #[error("ancilla qubit {0} lies in the monomial support")]
    AncillaCollision(usize),

    #[error("monomial coefficient must be real, got imaginary part {0:e}")]
    ComplexCoefficient(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("near-degenerate energy denominator: gap {gap:e} below {threshold:e}")]
    DegenerateDenominator { gap: f64, threshold: f64 },

    #[error("circuit parse error on line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },
}

impl Error {
    /// True for failures of numerical guards (dimension limits, degenerate
    /// denominators, non-Hermitian input) as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DimensionGuard { .. }
                | Error::NotHermitian { .. }
                | Error::DivisionGuard(_)
                | Error::DegenerateDenominator { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
