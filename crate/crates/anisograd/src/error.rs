use thiserror::Error;

use crate::solver::SolveReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("part map is not idempotent")]
    NotAProjection,
    #[error("rank {0} is too low for a complementary decomposition (need 3 or 4)")]
    RankTooLow(usize),
    #[error("no dependent tensor pair with a nonzero certificate")]
    NoValidPermutation,
    #[error("operator is not C-elliptic")]
    NotCElliptic,
    #[error("the 6x6 second-order recovery matrix is singular")]
    SingularCertificate,
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("region contains no cells")]
    EmptyRegion,
    #[error("cutoff bounds violated: {0}")]
    BoundsViolated(String),
    #[error("mu = {0} is outside the admissible range")]
    MuOutOfRange(f64),
    #[error("convexity violated: sampled Hessian form {0:e}")]
    ConvexityViolated(f64),
    #[error("recession quotient did not converge (last change {0:e})")]
    NotConverged(f64),
    #[error("Newton iteration hit the limit of {} steps (residual {:e})", .0.iterations, .0.el_residual)]
    MaxIterExceeded(Box<SolveReport>),
    #[error("energy is not finite")]
    NonFiniteEnergy,
    #[error("kernel normal matrix is singular on the region")]
    DegenerateRegion,
    #[error("operator is C-elliptic; the probe needs a non-C-elliptic part map")]
    WrongOperatorClass,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
