use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("the two points are equal; no unique line through them")]
    EqualPoints,
    #[error("point set must contain at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("grid dimensions must be positive")]
    ZeroDimension,
    #[error("lattice dimensions degenerate for n={n}, eps={eps}")]
    DegenerateLattice { n: u64, eps: String },
    #[error("cannot place {requested} distinct points: only {available} available")]
    InfeasibleDensity { requested: u64, available: u64 },
    #[error("line-anchored set needs 1 <= m <= n, got m={m}, n={n}")]
    BadLineCount { m: u64, n: u64 },
    #[error("coordinate bound too small for the requested configuration")]
    InfeasibleBound,
    #[error("kappa must be nonzero for the rectangular metric")]
    ZeroKappa,
    #[error("point {0} is not on the required line")]
    PointOffLine(String),
    #[error("A is not a subset of P")]
    NotSubset,
    #[error("empty input set")]
    EmptySet,
    #[error("census and profile were computed from different instances")]
    MismatchedInputs,
    #[error("metric/kappa of the collinear set does not match the curve family")]
    InconsistentFamily,
    #[error("energy exponent must be positive, got {0}")]
    NonpositiveExponent(String),
    #[error("logarithm of a nonpositive value")]
    LogNonpositive,
    #[error("even root of a negative value")]
    NegativeRoot,
    #[error("interval comparison undecided at the precision cap of {0} bits")]
    PrecisionCapExceeded(u32),
    #[error("term {0} has the same m-exponent as the left-hand side; not solvable for m")]
    UnsolvableTerm(String),
    #[error("scaling fit needs at least 3 points with positive values")]
    DegenerateSeries,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse scalar {0:?}: expected \"num/den\" or an integer")]
    BadScalar(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
