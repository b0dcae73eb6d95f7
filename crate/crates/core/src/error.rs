use thiserror::Error;

/// Errors raised by the library. Variants are grouped by the layer that
/// produces them but share one type so callers can propagate with `?`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} must be a positive integer, got {value}")]
    NonPositiveInteger { name: &'static str, value: i64 },
    #[error("coupling k = {m}/{n} is below the admissible minimum {min}")]
    KTooSmall { m: u32, n: u32, min: f64 },
    #[error("bad variant: {0}")]
    BadVariant(String),
    #[error("state outside the configuration domain: {0}")]
    DomainViolation(String),
    #[error("inadmissible energies: {0}")]
    InvalidEnergies(String),
    #[error("H_phi = {0} too close to zero for the ladder functions")]
    ZeroEnergy(f64),
    #[error("finite-difference stencil leaves the domain at coordinate {0}")]
    NearSingular(&'static str),
    #[error("phase undefined: |{0}| vanishes")]
    ZeroModulus(&'static str),
    #[error("ambiguous phase jump of pi at sample {0}")]
    UndersampledPhase(usize),
    #[error("integration left the domain at step {0}")]
    LeftDomain(usize),
    #[error("relative energy drift {drift:e} exceeds gate {gate:e}")]
    EnergyDriftExceeded { drift: f64, gate: f64 },
    #[error("no libration for the given energies: {0}")]
    NoLibration(String),
    #[error("trajectory too short: {0}")]
    TooShort(String),
    #[error("momentum {0} never crosses zero")]
    NoOscillation(&'static str),
    #[error("orbit inversion out of range: cos value {0}")]
    InversionOutOfRange(f64),
    #[error("spectrum enumeration exceeds the limit of {limit} levels")]
    CutoffTooLarge { limit: usize },
    #[error("tridiagonal eigensolver did not converge for eigenvalue {0}")]
    ConvergenceFailure(usize),
    #[error("eigenpair index {index} not computed (have {available})")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
