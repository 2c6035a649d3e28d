use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coalgebra element is singular (p = 0)")]
    SingularElement,
    #[error("orbit is singular (p = 0)")]
    SingularOrbit,
    #[error("cross-section recipe degenerate: {0}")]
    FrameDegenerate(&'static str),
    #[error("curve is not normalized: |‖α″‖ − 1| = {0:e}")]
    NotNormalized(f64),
    #[error("curve velocity is not future-directed null")]
    NotNull,
    #[error("flex point: α′ ∧ α″ vanishes")]
    FlexPoint,
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: &'static str },
    #[error("state blew up at t = {0}")]
    NonFiniteState(f64),
    #[error("degenerate cubic (D = {0:e})")]
    DegenerateCubic(f64),
    #[error("argument within {0:e} of a lattice pole")]
    NearPole(f64),
    #[error("requested branch does not exist for these invariants")]
    WrongBranch,
    #[error("gauge integrand leaves the isotropy algebra (residual {0:e})")]
    NotInIsotropy(f64),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
