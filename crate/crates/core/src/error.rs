use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::Violation;

/// Errors raised by construction, propagation and fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The `SystemSpec` failed validation.
    InvalidSpec(Vec<Violation>),
    /// Inputs whose dimensions disagree (state vs. basis, spec vs. basis).
    DimensionMismatch { expected: usize, found: usize },
    /// The adaptive step fell below the representable resolution at `t`.
    StepSizeUnderflow { t: f64 },
    /// The step budget ran out before reaching the final time.
    MaxStepsExceeded { t: f64, steps: usize },
    /// A non-finite value appeared in the state at `t`.
    NonFinite { t: f64 },
    /// The basis lacks the vacuum state that dissipation needs as a target.
    MissingVacuum,
    /// A jump operator targets something other than the vacuum, so the
    /// no-jump shortcut is not exact.
    NonVacuumJump { jump: usize },
    /// A fit whose design is singular (e.g. all abscissae equal).
    SingularFit,
    /// A function argument outside its documented domain.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(v) => {
                write!(f, "invalid system spec: ")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            Error::MaxStepsExceeded { t, steps } => {
                write!(f, "step budget of {steps} exhausted at t = {t}")
            }
            Error::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
            Error::MissingVacuum => write!(f, "dissipation requires the vacuum state in the basis"),
            Error::NonVacuumJump { jump } => {
                write!(f, "jump operator {jump} does not target the vacuum state")
            }
            Error::SingularFit => write!(f, "singular least-squares fit"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// True for failures of the numerical integration itself, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::MaxStepsExceeded { .. }
                | Error::NonFinite { .. }
                | Error::SingularFit
        )
    }
}
