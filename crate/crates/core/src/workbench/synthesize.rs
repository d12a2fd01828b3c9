use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::center_manifold::{cm_to_decoupled, CmState};
use crate::error::Result;
use crate::hill::{translate_from_libration, RotState};
use crate::hopf::{equilibrium_of, from_hopf, period_estimate, OrbitKind, ReducedEquilibrium};
use crate::linear::t2_inverse;
use crate::lissajous::{lissajous_to_cm, to_osculating};

pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    /// Mean anomaly `ℓ'`.
    pub ell: f64,
    pub state: RotState,
}

/// Analytic orbit in the original coordinates, sampled over one revolution
/// of the mean anomaly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedOrbit {
    pub family: OrbitKind,
    #[serde(rename = "Lp")]
    pub lp: f64,
    pub equilibrium: ReducedEquilibrium,
    pub period: f64,
    pub seed_phase: f64,
    /// False when the short-period corrections were skipped (circular limit).
    pub short_period_applied: bool,
    pub samples: Vec<OrbitSample>,
}

impl SynthesizedOrbit {
    /// State at the recommended seed phase.
    pub fn seed(&self) -> Result<RotState> {
        Ok(synthesize_point(&self.equilibrium, self.seed_phase)?.0)
    }

    /// Center-manifold projection `(y2, z2, Y2, Z2)` of every sample.
    pub fn center_manifold_samples(&self) -> Result<Vec<(f64, CmState)>> {
        self.samples
            .iter()
            .map(|s| Ok((s.ell, cm_point(&self.equilibrium, s.ell)?.0)))
            .collect()
    }
}

/// Phase `ℓ'` recommended for seeding the corrector: `π` for planar
/// Lyapunov orbits, `0` otherwise.
pub fn recommended_seed(kind: OrbitKind) -> f64 {
    match kind {
        OrbitKind::PlanarLyapunov => PI,
        _ => 0.0,
    }
}

fn cm_point(eq: &ReducedEquilibrium, ell: f64) -> Result<(CmState, bool)> {
    let (mean, _) = from_hopf(&eq.point, ell);
    let (osc, applied) = to_osculating(&mean)?;
    Ok((lissajous_to_cm(&osc)?, applied))
}

/// Original-coordinate state of the orbit attached to `eq` at mean anomaly `ell`.
pub fn synthesize_point(eq: &ReducedEquilibrium, ell: f64) -> Result<(RotState, bool)> {
    let (cm, applied) = cm_point(eq, ell)?;
    let local = t2_inverse(&cm_to_decoupled(&cm));
    Ok((translate_from_libration(&local), applied))
}

pub fn synthesize_state(kind: OrbitKind, lp: f64, ell: f64) -> Result<RotState> {
    let eq = equilibrium_of(kind, lp)?;
    Ok(synthesize_point(&eq, ell)?.0)
}

/// `n` samples at `ℓ' = 2πk/n`, `k = 0..n`.
pub fn synthesize(kind: OrbitKind, lp: f64, n: usize) -> Result<SynthesizedOrbit> {
    let eq = equilibrium_of(kind, lp)?;
    let n = n.max(1);
    let mut applied = true;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let ell = 2.0 * PI * k as f64 / n as f64;
        let (state, ok) = synthesize_point(&eq, ell)?;
        applied &= ok;
        samples.push(OrbitSample { ell, state });
    }
    let est = period_estimate(&eq);
    Ok(SynthesizedOrbit {
        family: kind,
        lp,
        equilibrium: eq,
        period: est.period,
        seed_phase: recommended_seed(kind),
        short_period_applied: applied,
        samples,
    })
}
