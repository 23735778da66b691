use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FinslerError {
    #[error("point {point:?} lies outside the metric domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("Randers condition violated: |b|_a = {norm} >= 1")]
    RandersCondition { norm: f64 },
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("F(x, y) = {value} is too small relative to |y|; F is not smooth there")]
    NonSmooth { value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("fundamental tensor is not positive definite (min eigenvalue {min_eigenvalue})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("condition number {condition:e} exceeds the guard")]
    IllConditioned { condition: f64 },
    #[error("dual-norm maximizer did not converge (achieved {achieved:e})")]
    NonConvergence { achieved: f64 },
    #[error("metric is not projectively flat here (residual {residual:e})")]
    NotProjectivelyFlat { residual: f64 },
    #[error("degenerate flag: denominator {denominator:e}")]
    DegenerateFlag { denominator: f64 },
    #[error("density must be positive, got {value}")]
    NonPositiveDensity { value: f64 },
    #[error("geodesic left the domain at step {step}")]
    GeodesicExit { step: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("tolerance not met on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    ToleranceNotMet { a: f64, b: f64, estimate: f64, error: f64 },
    #[error("non-finite integrand value at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error(transparent)]
    Finsler(#[from] FinslerError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("knots must satisfy 0 < t1 < t2 < t3 < t4 < R, got {0:?}")]
    KnotOrder([f64; 4]),
    #[error("invalid Riccati pair: {0}")]
    Pair(String),
    #[error("evaluation at t = {t} outside (0, {right})")]
    OutsideInterval { t: f64, right: f64 },
    #[error("table error: {0}")]
    Table(String),
    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("epsilon {eps} is not below the validity threshold {eps_tilde}")]
    EpsTooLarge { eps: f64, eps_tilde: f64 },
}
