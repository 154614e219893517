use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("unknown builtin potential `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid search region: {0}")]
    InvalidRegion(String),

    #[error("energy {0} lies on the branch cut [0, ∞)")]
    OnBranchCut(num_complex::Complex64),

    #[error("contour too close to a zero after {retries} retries")]
    ContourNearZero { retries: u32 },

    #[error("winding integral did not settle to an integer (got {value})")]
    WindingNotInteger { value: f64 },

    #[error("eigenvalue iteration failed to converge at index {index}")]
    EigNonConvergence { index: usize },

    #[error("invalid functional parameters: {0}")]
    InvalidFunctional(String),

    #[error("case ({case}) out of range: {constraint}")]
    CaseOutOfRange { case: char, constraint: String },

    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),

    #[error("rate fit failed: {0}")]
    FitError(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("result file schema error: {0}")]
    Schema(String),

    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersion { found: u64, expected: u64 },

    #[error("sweep failed at every ħ point")]
    AllPointsFailed,

    #[error("search failed: {0}")]
    Search(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
