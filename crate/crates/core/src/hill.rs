//! The Hill three-body model in rotating coordinates, its libration points and
//! the Legendre expansion of the potential about the point on the positive
//! x-axis.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hill radius: distance from the primary to either libration point.
pub fn hill_radius() -> f64 {
    (1.0f64 / 3.0).cbrt()
}

/// State in rotating Hill coordinates: position `(x, y, z)` and canonical
/// momenta `(px, py, pz)`, which equal the inertial velocity components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl RotState {
    pub fn new(x: f64, y: f64, z: f64, px: f64, py: f64, pz: f64) -> Self {
        RotState { x, y, z, px, py, pz }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        RotState::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.px, self.py, self.pz]
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        RotState::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::from_column_slice(&self.to_array())
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Reflection through the ecliptic plane, a symmetry of the flow.
    pub fn mirror_z(&self) -> Self {
        RotState::new(self.x, self.y, -self.z, self.px, self.py, -self.pz)
    }
}

/// Hill Hamiltonian
/// `H = ½(X²+Y²+Z²) − (xY − yX) − x² + ½(y²+z²) − 1/R`.
pub fn hamiltonian(s: &RotState) -> Result<f64> {
    let r = s.radius();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Singularity { r });
    }
    let kin = 0.5 * (s.px * s.px + s.py * s.py + s.pz * s.pz);
    let cor = -(s.x * s.py - s.y * s.px);
    let pot = -s.x * s.x + 0.5 * (s.y * s.y + s.z * s.z) - 1.0 / r;
    Ok(kin + cor + pot)
}

/// Hamilton's equations; the returned `RotState` holds the time derivatives.
pub fn vector_field(s: &RotState) -> Result<RotState> {
    let r = s.radius();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Singularity { r });
    }
    Ok(RotState::from_vector(&rhs_unchecked(&s.to_vector())))
}

/// Right-hand side without the singularity check, for the integrator hot loop.
pub(crate) fn rhs_unchecked(v: &Vector6<f64>) -> Vector6<f64> {
    let (x, y, z, px, py, pz) = (v[0], v[1], v[2], v[3], v[4], v[5]);
    let r2 = x * x + y * y + z * z;
    let r3 = r2 * r2.sqrt();
    Vector6::new(
        px + y,
        py - x,
        pz,
        py + 2.0 * x - x / r3,
        -px - y - y / r3,
        -z - z / r3,
    )
}

/// Jacobian of the vector field with respect to (x, y, z, X, Y, Z).
pub fn jacobian(s: &RotState) -> Matrix6<f64> {
    let (x, y, z) = (s.x, s.y, s.z);
    let r2 = x * x + y * y + z * z;
    let r = r2.sqrt();
    let r3 = r2 * r;
    let r5 = r3 * r2;
    // Hessian of 1/R contribution, -d/dq (q/R³)
    let hxx = -1.0 / r3 + 3.0 * x * x / r5;
    let hyy = -1.0 / r3 + 3.0 * y * y / r5;
    let hzz = -1.0 / r3 + 3.0 * z * z / r5;
    let hxy = 3.0 * x * y / r5;
    let hxz = 3.0 * x * z / r5;
    let hyz = 3.0 * y * z / r5;
    let mut m = Matrix6::zeros();
    m[(0, 1)] = 1.0;
    m[(0, 3)] = 1.0;
    m[(1, 0)] = -1.0;
    m[(1, 4)] = 1.0;
    m[(2, 5)] = 1.0;
    m[(3, 0)] = 2.0 + hxx;
    m[(3, 1)] = hxy;
    m[(3, 2)] = hxz;
    m[(3, 4)] = 1.0;
    m[(4, 0)] = hxy;
    m[(4, 1)] = -1.0 + hyy;
    m[(4, 2)] = hyz;
    m[(4, 3)] = -1.0;
    m[(5, 0)] = hxz;
    m[(5, 1)] = hyz;
    m[(5, 2)] = -1.0 + hzz;
    m
}

/// The two equilibria `±(ρ, 0, 0, 0, ρ, 0)`. The first one is the point the
/// rest of the crate expands about.
pub fn libration_points() -> (RotState, RotState) {
    let rho = hill_radius();
    (
        RotState::new(rho, 0.0, 0.0, 0.0, rho, 0.0),
        RotState::new(-rho, 0.0, 0.0, 0.0, -rho, 0.0),
    )
}

/// Coordinates centred on the libration point `(ρ, 0, 0, 0, ρ, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl LocalState {
    pub fn new(x: f64, y: f64, z: f64, px: f64, py: f64, pz: f64) -> Self {
        LocalState { x, y, z, px, py, pz }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.px, self.py, self.pz]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        LocalState::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

pub fn translate_to_libration(s: &RotState) -> LocalState {
    let rho = hill_radius();
    LocalState::new(s.x - rho, s.y, s.z, s.px, s.py - rho, s.pz)
}

pub fn translate_from_libration(l: &LocalState) -> RotState {
    let rho = hill_radius();
    RotState::new(l.x + rho, l.y, l.z, l.px, l.py + rho, l.pz)
}

/// Legendre polynomial `P_n(u)` by the three-term recurrence.
pub fn legendre(n: usize, u: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = u;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * u * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Homogeneous form `r^n P_n(u/r)`, a polynomial in `u` and `r²`; regular at `r = 0`.
fn homogeneous_legendre(n: usize, u: f64, r2: f64) -> f64 {
    let mut q0 = 1.0;
    if n == 0 {
        return q0;
    }
    let mut q1 = u;
    for k in 1..n {
        let kf = k as f64;
        let q2 = ((2.0 * kf + 1.0) * u * q1 - kf * r2 * q0) / (kf + 1.0);
        q0 = q1;
        q1 = q2;
    }
    q1
}

/// Order-`n` term of the potential expansion about the libration point, in
/// local coordinates (the primary sits at `x = −ρ`):
/// `H_n = −(n!/ρ)(r/ρ)^{n+2} P_{n+2}(−x/r)`.
///
/// The cubic term is `(5x³ − 3x r²)/(2ρ⁴)`.
pub fn perturbation_term(n: usize, l: &LocalState) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(
            "perturbation order must be at least 1".into(),
        ));
    }
    let rho = hill_radius();
    let r2 = l.x * l.x + l.y * l.y + l.z * l.z;
    let q = homogeneous_legendre(n + 2, -l.x, r2);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(-fact / rho * q / rho.powi(n as i32 + 2))
}

/// Quadratic part of the local Hamiltonian.
pub fn quadratic_hamiltonian(l: &LocalState) -> f64 {
    0.5 * (l.px * l.px + l.py * l.py) - (l.x * l.py - l.px * l.y)
        + 2.0 * (l.y * l.y - 2.0 * l.x * l.x)
        + 0.5 * (l.pz * l.pz + 4.0 * l.z * l.z)
}

/// Truncated expansion `H_0 + Σ_{n=1}^{N} H_n / n!`.
///
/// Approximates `H(state) − H(libration point)` for small local states.
pub fn expanded_hamiltonian(l: &LocalState, order: usize) -> f64 {
    let mut h = quadratic_hamiltonian(l);
    let mut fact = 1.0;
    for n in 1..=order {
        fact *= n as f64;
        // order >= 1 here, so the term is always defined
        h += perturbation_term(n, l).unwrap_or(0.0) / fact;
    }
    h
}
