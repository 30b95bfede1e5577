use thiserror::Error;

/// Errors raised by the library. Undefined phases at orthogonality points are
/// *not* errors; they are carried as `None` phases.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} has squared norm {norm_sq}, expected 1")]
    NotNormalized { what: &'static str, norm_sq: f64 },

    #[error("polar angle {0} rad outside [0, pi]")]
    PolarAngleOutOfRange(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "phase step of {delta:.4} rad between phi = {phi_from:.6} and phi = {phi_to:.6} \
         breaks the |dphase| < pi/2 contract; refine the phi grid (steps) instead of \
         unwrapping across a suspected jump"
    )]
    StepSizeViolation { phi_from: f64, phi_to: f64, delta: f64 },

    #[error("equatorial state (theta = pi/2) has no secular slope or opposite-hemisphere reference")]
    Equatorial,

    #[error("curve span of {span:.6} rad is not a whole number of 2 pi periods")]
    NotWholePeriods { span: f64 },

    #[error("curve has undefined samples; decomposition needs a phase at every point")]
    UndefinedSamples,

    #[error("phase undefined at phi = {phi:.6} rad (overlap visibility {visibility:.3e})")]
    UndefinedPhase { phi: f64, visibility: f64 },

    #[error("fringe needs at least {min} phase-shifter settings, got {got}")]
    TooFewSettings { min: usize, got: usize },

    #[error("mean count must be positive, got {0}")]
    NonPositiveMeanCount(f64),
}

pub type Result<T> = std::result::Result<T, PhaseError>;
