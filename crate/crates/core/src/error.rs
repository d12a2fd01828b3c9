use thiserror::Error;

use crate::hopf::OrbitKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular evaluation: distance to the primary is {r:e}")]
    Singularity { r: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("collision guard: distance {r:e} below {r_min:e} at t = {t}")]
    Collision { t: f64, r: f64, r_min: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    MaxSteps(usize),

    #[error("differential correction diverged: residual {residual:e} after {iterations} iterations")]
    Divergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("family {family} does not exist at L' = {lp}: {reason}")]
    FamilyNotPresent {
        family: OrbitKind,
        lp: f64,
        reason: String,
    },

    #[error("continuation step collapsed to {step:e} after {members} members")]
    StepCollapse { step: f64, members: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical procedure (integration, Newton,
    /// continuation), false for invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Collision { .. }
                | Error::StepUnderflow { .. }
                | Error::MaxSteps(_)
                | Error::Divergence { .. }
                | Error::SingularJacobian(_)
                | Error::NotConverged { .. }
                | Error::StepCollapse { .. }
        )
    }
}
