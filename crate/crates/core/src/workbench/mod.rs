//! Orbit synthesis in the original coordinates, differential correction,
//! family continuation and bifurcation detection.

mod continuation;
mod corrector;
mod shooting;
mod synthesize;

use serde::{Deserialize, Serialize};

use crate::hill::RotState;
use crate::hopf::OrbitKind;
use crate::propagation::scaled_index;

pub use continuation::{
    continuation_run, continue_family, locate_bifurcations, locate_bifurcations_with, Bifurcation,
    ContinuationOptions, ContinuationRun, CrossingDirection, StabilityIndex,
};
pub use corrector::{correct, Constraint, CorrectorOptions, Correction, Symmetry};
pub use shooting::{on_symmetric_section, Evaluation, Shooting};
pub use synthesize::{
    recommended_seed, synthesize, synthesize_point, synthesize_state, OrbitSample,
    SynthesizedOrbit, DEFAULT_SAMPLES,
};

/// Periodic orbit corrected to the shooting tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub ic: RotState,
    pub period: f64,
    pub energy: f64,
    pub s1: f64,
    pub s2: f64,
    /// Norm of the shooting residual at convergence: `Φ_T(x0) − x0` (with the
    /// phase row) for full-period shooting, `(X, Z)` at the half-period
    /// crossing for symmetric shooting.
    pub residual: f64,
    /// Whether the orbit was obtained with the half-period symmetric corrector.
    pub symmetric: bool,
    /// Whether `s1`, `s2` are the in-plane/out-of-plane indices of a planar orbit.
    pub planar_split: bool,
}

impl PeriodicOrbit {
    pub fn scaled_indices(&self) -> (f64, f64) {
        (scaled_index(self.s1), scaled_index(self.s2))
    }
}

/// Serialized orbit: `{family, Lp, ic, period, energy, s1, s2, residual}`.
/// Analytic orbits leave the stability fields empty; corrected ones may leave
/// the family fields empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<OrbitKind>,
    #[serde(rename = "Lp", default, skip_serializing_if = "Option::is_none")]
    pub lp: Option<f64>,
    pub ic: RotState,
    pub period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
}

impl OrbitRecord {
    pub fn from_periodic(orbit: &PeriodicOrbit, family: Option<OrbitKind>, lp: Option<f64>) -> Self {
        OrbitRecord {
            family,
            lp,
            ic: orbit.ic,
            period: orbit.period,
            energy: Some(orbit.energy),
            s1: Some(orbit.s1),
            s2: Some(orbit.s2),
            residual: Some(orbit.residual),
            symmetric: Some(orbit.symmetric),
        }
    }

    /// Back to a periodic orbit when all stability fields are present.
    pub fn to_periodic(&self) -> Option<PeriodicOrbit> {
        Some(PeriodicOrbit {
            ic: self.ic,
            period: self.period,
            energy: self.energy?,
            s1: self.s1?,
            s2: self.s2?,
            residual: self.residual?,
            symmetric: self
                .symmetric
                .unwrap_or_else(|| on_symmetric_section(&self.ic, 1e-10)),
            planar_split: crate::propagation::is_planar(&self.ic),
        })
    }
}
