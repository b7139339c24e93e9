//! Crate-wide error type.
//!
//! Every variant belongs to one of four classes which the command line maps
//! onto process exit codes (see [`ErrorClass::exit_code`]).

use thiserror::Error;

/// Coarse classification of failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ErrorClass {
    /// Malformed input: scenario, expression, file.
    Invalid,
    /// An iterative numerical method failed to converge.
    Numerical,
    /// The input is not generic enough (non-Morse, non-Morse-Smale, ...).
    Genericity,
    /// A mathematical identity that must hold was violated.
    Check,
}

impl ErrorClass {
    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Invalid => "invalid",
            ErrorClass::Numerical => "numerical",
            ErrorClass::Genericity => "genericity",
            ErrorClass::Check => "check",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Invalid => 1,
            ErrorClass::Numerical => 2,
            ErrorClass::Genericity => 3,
            ErrorClass::Check => 4,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("projection did not converge (|phi| = {residual:e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("constraint gradient {norm:e} below regularity tolerance at {at:?}")]
    Degenerate { norm: f64, at: [f64; 3] },
    #[error("point {at:?} is outside the bounding box")]
    OutsideBox { at: [f64; 3] },
    #[error("point is not critical (restricted gradient norm {norm:e})")]
    NotCritical { norm: f64 },
    #[error("adaptive step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("trajectory left the bounding box at {at:?}")]
    LeftBoundingBox { at: [f64; 3] },
    #[error("flow did not settle at a critical point: {0}")]
    Inconclusive(String),
    #[error("orientation transport degenerated (angle {angle:e} rad)")]
    IllConditioned { angle: f64 },
    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("degenerate critical point at {at:?} (eigenvalue {eigenvalue:e})")]
    DegenerateCritical { at: [f64; 3], eigenvalue: f64 },
    #[error("Morse-Smale failure: trajectory from critical point {from} runs into critical point {to}")]
    MorseSmaleFailure { from: usize, to: usize },
    #[error("non-generic homotopy: {0}")]
    NonGenericHomotopy(String),
    #[error("non-transverse crossing at {at:?} (angle {angle_deg:.3} deg)")]
    NonTransverse { at: [f64; 3], angle_deg: f64 },
    #[error("curve passes within {distance:e} of critical point {id}")]
    ClearanceViolation { id: usize, distance: f64 },

    #[error("Euler characteristic mismatch: found {found}, expected {expected} (deficit {})", expected - found)]
    EulerMismatch { found: i64, expected: i64 },
    #[error("moduli space for ({source_id}, {target_id}) was not enumerated")]
    MissingModuli { source_id: usize, target_id: usize },
    #[error("chain is not a cycle: boundary coefficient {coefficient} at generator {generator}")]
    NotACycle { generator: usize, coefficient: i64 },
    #[error("gluing gap {gap:e} exceeds tolerance {tol:e}")]
    GluingGap { gap: f64, tol: f64 },
    #[error("induced map is not an isomorphism in degree {degree} (det {det})")]
    NotIso { degree: usize, det: i64 },
    #[error("boundary matrices do not compose to zero")]
    NotAComplex,
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Syntax { .. } | UnknownIdentifier { .. } | Invalid(_) | OutsideBox { .. } => {
                ErrorClass::Invalid
            }
            Domain(_) | NoConvergence { .. } | Degenerate { .. } | NotCritical { .. }
            | StepFailure { .. } | LeftBoundingBox { .. } | Inconclusive(_)
            | IllConditioned { .. } | Overflow => ErrorClass::Numerical,
            DegenerateCritical { .. } | MorseSmaleFailure { .. } | NonGenericHomotopy(_)
            | NonTransverse { .. } | ClearanceViolation { .. } => ErrorClass::Genericity,
            EulerMismatch { .. } | MissingModuli { .. } | NotACycle { .. } | GluingGap { .. }
            | NotIso { .. } | NotAComplex | CheckFailed(_) => ErrorClass::Check,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }

    /// Variant name, e.g. `MorseSmaleFailure`.
    pub fn kind(&self) -> String {
        let debug = format!("{self:?}");
        debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
