use thiserror::Error;

use crate::exponents::GapReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// Variants split into two families: structural errors (malformed input, mismatched
/// dimensions) and validation errors (well-formed input that violates a hypothesis of
/// the inequalities, e.g. a gap or band condition). [`Error::is_validation`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent sequence is empty")]
    EmptySequence,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("classification does not belong to this sequence")]
    ClassificationMismatch,

    #[error("weak gap condition violated: {0}")]
    GapViolation(GapReport),
    #[error("no admissible band: pi/delta - gamma/2 = {threshold} <= 0")]
    NoAdmissibleBand { threshold: f64 },
    #[error("band condition violated at indices {indices:?}")]
    BandViolation { indices: Vec<usize> },
    #[error("window exceeds period: gamma = {gamma} > pi/delta = {half_period}")]
    WindowExceedsPeriod { gamma: f64, half_period: f64 },
    #[error("kernel certification failed: {inequality} at {point}")]
    CertificationFailed { inequality: String, point: f64 },
    #[error("Q matrix numerically singular: pair gap {gap}")]
    SingularQ { gap: f64 },
    #[error("Q not positive definite")]
    NotPositiveDefinite,
    #[error("singular pencil: min eigenvalue {min_eig}, max eigenvalue {max_eig}")]
    SingularPencil { min_eig: f64, max_eig: f64 },
    #[error("sampling resonance: (omega - omega')delta/2 = {half_angle} is a multiple of pi")]
    SamplingResonance { half_angle: f64 },
    #[error("omega' = {omega_prime} coincides with an exponent (gamma' = 0)")]
    ZeroDistance { omega_prime: f64 },
    #[error("Haraux contraction fails: eps_sup = {eps_sup} >= 1")]
    HarauxContractionFails { eps_sup: f64 },
    #[error("|omega_k - omega'| < 2c'/delta violated at indices {indices:?}")]
    FilterRange { indices: Vec<usize> },
    #[error("empirical upper constant {empirical} exceeds the explicit bound {formula}")]
    FormulaBoundViolated { empirical: f64, formula: f64 },
    #[error("junction point resonant: frequency {frequency} appears on both sides")]
    JunctionResonant { frequency: f64 },
    #[error("mode cap exceeded for modes {modes:?}")]
    ModeCapExceeded { modes: Vec<String> },
    #[error("observation horizon too short: J*delta = {j_delta} <= {required}")]
    HorizonViolated { j_delta: f64, required: f64 },
    #[error("rank deficient system: {samples} samples, {exponents} exponents, min eigenvalue {min_eig}")]
    RankDeficient {
        samples: usize,
        exponents: usize,
        min_eig: f64,
    },
}

impl Error {
    /// True for hypothesis violations (exit status 2 in the CLI), false for structural errors.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::EmptySequence
                | Error::NonFinite(_)
                | Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::ClassificationMismatch
        )
    }
}
