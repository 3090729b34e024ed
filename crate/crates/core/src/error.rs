use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not unitary (max |U^H U - I| = {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("literal refers to variable {var} but formula has {n} variables")]
    VariableOutOfRange { var: usize, n: usize },

    #[error("prefix length {k} out of range 0..={m}")]
    KOutOfRange { k: usize, m: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("header declares {declared} clauses but {found} were read")]
    HeaderMismatch { declared: usize, found: usize },

    #[error("{n} variables exceeds the limit of {limit} for this operation")]
    TooManyVariables { n: usize, limit: usize },

    #[error("instance too large for dense oracle: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("basis has {basis_n} qubits but formula has {formula_n} variables")]
    BasisMismatch { basis_n: usize, formula_n: usize },

    #[error("invalid selection basis: {0}")]
    InvalidBasis(String),

    #[error("constraint prefix of length {k} is unsatisfiable: the Zeno subspace is empty")]
    EmptySubspace { k: usize },

    #[error("initial state has no overlap with the Zeno subspace")]
    ZeroOverlap,

    #[error("model enumeration stopped at the cap of {cap} models")]
    ModelCapExceeded { cap: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("nothing to export")]
    EmptyInput,

    #[error("export failed: {0}")]
    Export(String),
}
