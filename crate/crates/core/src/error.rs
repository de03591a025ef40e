use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },
    #[error("basis matrices are linearly dependent")]
    DependentBasis,
    #[error("basis is not pairwise orthogonal")]
    NotOrthogonal,
    #[error("negative eigenvalue set changes inside the finite-difference stencil")]
    EigenvalueCrossing,
    #[error("first coordinate of a rank-one parameter is zero")]
    ZeroFirstCoordinate,
    #[error("intermediate PSD projection has rank {rank}, expected 1")]
    RankNotOne { rank: usize },
    #[error("leading eigenvector component {value:e} is too small to extract a chart point")]
    SmallLeadingComponent { value: f64 },
    #[error("plane kind does not support this operation")]
    WrongKind,
    #[error("invalid plane parameters: {0}")]
    InvalidSpec(String),
    #[error("denominator vanishes at t = {t}")]
    VanishingDenominator { t: f64 },
    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },
    #[error("singular Jacobian in Newton iteration")]
    SingularJacobian,
    #[error("series division needs a nonzero constant term")]
    SeriesNotInvertible,
    #[error("series composition needs an inner series without constant term")]
    SeriesInnerConstant,
    #[error("series caps differ: {0} vs {1}")]
    SeriesCapMismatch(usize, usize),
    #[error("fit window [{0}, {1}] contains no trace points")]
    EmptyWindow(usize, usize),
    #[error("zero distance at iteration {0}")]
    ZeroDistance(usize),
    #[error("recursive-sequence hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("difference {diff:e} at t = {t} is at the precision floor; use a wider scalar or a larger t0")]
    BelowPrecision { t: f64, diff: f64 },
    #[error("iterate left the curve chart at step {0}")]
    LeftChart(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
