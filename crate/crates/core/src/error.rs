use thiserror::Error;

/// Errors raised by the forward and inverse solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile is not positive at x = {x} (value {value})")]
    NonPositiveProfile { x: f64, value: f64 },
    #[error("profile has a jump in value or slope; the Liouville map needs a C1 profile with piecewise second derivative")]
    NotSmooth,
    #[error("x = {x} lies outside [0, {b}]")]
    OutOfDomain { x: f64, b: f64 },
    #[error("|lambda| = {0} exceeds the supported envelope 1e8")]
    LambdaOutOfEnvelope(f64),
    #[error("integrator failed to meet tolerance near x = {x}")]
    ToleranceNotMet { x: f64 },
    #[error("adaptive quadrature did not converge (estimated error {0})")]
    QuadratureNotConverged(f64),
    #[error("both D1 and D2 vanish; the origin has order d >= 3 and gamma is not determined from the expansion")]
    DegenerateExpansion,
    #[error("dispersion function vanishes on the contour after {0} retries")]
    ZeroOnContour(usize),
    #[error("dispersion function is identically zero (trivial profile: rho = 1 or V = 0)")]
    IdenticallyZero,
    #[error("subdivision exceeded maximum depth {0}")]
    MaxDepthExceeded(usize),
    #[error("travel time equals the radius; the lattice n^2 pi^2/(a-b)^2 degenerates")]
    RegimeAEqualsB,
    #[error("failed to bracket zero #{0}")]
    BracketingFailed(usize),
    #[error("spectral data holds {available} zero groups, {requested} requested and no tail model")]
    InsufficientZeros { available: usize, requested: usize },
    #[error("gamma is required but missing from the spectral data")]
    GammaMissing,
    #[error("sum rule needs a simple zero at the origin (d = 1), got d = {0}")]
    WrongOriginOrder(u32),
    #[error("need at least {needed} real positive zeros, have {have}")]
    InsufficientRealZeros { needed: usize, have: usize },
    #[error("real zeros imply a non-positive travel time ({0}); no positive profile has this lattice")]
    PathologicalLattice(f64),
    #[error("cardinal interpolation is ill-conditioned (held-out residual {0})")]
    InterpolationIllConditioned(f64),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("uniqueness when a = b requires the constant gamma together with the zeros; gamma is missing")]
    GammaRequired,
    #[error("a > b is outside the regime where the zeros determine the profile: an entire term of type a - b can be added to phi(b) and phi'(b) without changing D")]
    RegimeNotCovered,
    #[error("spectral data is not closed under conjugation: {0}")]
    NotConjugateClosed(String),
    #[error("optimizer did not converge after {iterations} iterations (misfit {misfit})")]
    NotConverged { iterations: usize, misfit: f64 },
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
