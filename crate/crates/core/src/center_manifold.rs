//! Hamiltonian restricted to the center manifold `x2 = X2 = 0` and the
//! first-order corrections that lift center-manifold states back onto the
//! decoupled variables.

use serde::{Deserialize, Serialize};

use crate::linear::{constants, DecoupledState};

/// Point on the center manifold: planar `(y2, Y2)` and vertical `(z2, Z2)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CmState {
    pub y2: f64,
    pub z2: f64,
    pub py2: f64,
    pub pz2: f64,
}

impl CmState {
    pub fn new(y2: f64, z2: f64, py2: f64, pz2: f64) -> Self {
        CmState { y2, z2, py2, pz2 }
    }

    /// Variables in `(y, Y, z, Z)` order, as used by the polynomial tables.
    pub fn vars(&self) -> [f64; 4] {
        [self.y2, self.py2, self.z2, self.pz2]
    }

    pub fn norm(&self) -> f64 {
        self.vars().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Saddle components `(x1, X1)` induced by a center-manifold state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SaddleCorrection {
    pub x1: f64,
    pub px1: f64,
}

pub fn quadratic_part(s: &CmState) -> f64 {
    let c = constants();
    0.5 * (s.py2 * s.py2 + c.omega2() * s.y2 * s.y2)
        + 0.5 * (s.pz2 * s.pz2 + c.nu * c.nu * s.z2 * s.z2)
}

pub fn cubic_part(s: &CmState) -> f64 {
    constants().c1.eval(s.vars())
}

pub fn quartic_part(s: &CmState) -> f64 {
    constants().c2.eval(s.vars())
}

/// `C0 + C1 + C2/2`.
pub fn cm_hamiltonian(s: &CmState) -> f64 {
    quadratic_part(s) + cubic_part(s) + 0.5 * quartic_part(s)
}

pub fn delta1(s: &CmState) -> f64 {
    constants().delta1.eval(s.vars())
}

pub fn delta2(s: &CmState) -> f64 {
    constants().delta2.eval(s.vars())
}

fn corrections(v: [f64; 4]) -> (f64, f64) {
    let c = constants();
    let d1 = c.delta1.eval(v);
    let d2 = c.delta2.eval(v);
    let f = c.rho * c.rho * c.sigma;
    (-f * (c.lambda * d1 + d2), f * (c.lambda * d1 - d2))
}

/// Saddle components of a center-manifold state: with `x2 = X2 = 0`,
/// `x1 = −ρ²σ(λΔ1 + Δ2)` and `X1 = ρ²σ(λΔ1 − Δ2)`.
pub fn t3_saddle_corrections(s: &CmState) -> SaddleCorrection {
    let (x1, px1) = corrections(s.vars());
    SaddleCorrection { x1, px1 }
}

/// Lift to decoupled variables; the center variables pass through unchanged.
pub fn cm_to_decoupled(s: &CmState) -> DecoupledState {
    let sc = t3_saddle_corrections(s);
    DecoupledState {
        x1: sc.x1,
        y1: s.y2,
        z1: s.z2,
        px1: sc.px1,
        py1: s.py2,
        pz1: s.pz2,
    }
}

/// Inverse direction: `(x2, X2)` from decoupled variables, with the
/// corrections evaluated in those variables.
pub fn t3_inverse_corrections(d: &DecoupledState) -> (f64, f64) {
    let (cx, cp) = corrections([d.y1, d.py1, d.z1, d.pz1]);
    (d.x1 - cx, d.px1 - cp)
}

/// Projection of decoupled variables onto the center-manifold chart.
pub fn decoupled_to_cm(d: &DecoupledState) -> CmState {
    CmState::new(d.y1, d.z1, d.py1, d.pz1)
}

/// Split into the 1:1 resonant oscillator with frequency `ω` and the rest,
/// which absorbs the detuning `−½ω²δ z2²`.
pub fn detuned_split(s: &CmState) -> (f64, f64) {
    let c = constants();
    let w2 = c.omega2();
    let principal =
        0.5 * (s.py2 * s.py2 + s.pz2 * s.pz2) + 0.5 * w2 * (s.y2 * s.y2 + s.z2 * s.z2);
    let perturbation = cm_hamiltonian(s) - principal;
    (principal, perturbation)
}
