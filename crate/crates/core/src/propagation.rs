//! Numerical propagation of the Hill equations, state-transition matrices and
//! stability indices of periodic orbits.

use nalgebra::{Complex, Matrix2, Matrix4, Matrix6, SVector, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{hamiltonian, jacobian, rhs_unchecked, RotState};
use crate::integrator::{integrate, Event, OdeSolution, OdeSystem, Record, StepControl};

pub const DEFAULT_R_MIN: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hill equations with a collision guard.
#[derive(Debug, Clone, Copy)]
pub struct HillSystem {
    pub r_min: f64,
}

impl Default for HillSystem {
    fn default() -> Self {
        HillSystem {
            r_min: DEFAULT_R_MIN,
        }
    }
}

fn guard(t: f64, x: f64, y: f64, z: f64, r_min: f64) -> Result<()> {
    let r = (x * x + y * y + z * z).sqrt();
    if r < r_min || !r.is_finite() {
        return Err(Error::Collision { t, r, r_min });
    }
    Ok(())
}

impl OdeSystem<6> for HillSystem {
    fn rhs(&self, t: f64, y: &Vector6<f64>) -> Result<Vector6<f64>> {
        guard(t, y[0], y[1], y[2], self.r_min)?;
        Ok(rhs_unchecked(y))
    }
}

/// Hill equations plus the 6×6 variational equations `Φ' = J(x) Φ`, with `Φ`
/// stored column-major after the state.
#[derive(Debug, Clone, Copy)]
pub struct VariationalSystem {
    pub r_min: f64,
}

impl OdeSystem<42> for VariationalSystem {
    fn rhs(&self, t: f64, y: &SVector<f64, 42>) -> Result<SVector<f64, 42>> {
        guard(t, y[0], y[1], y[2], self.r_min)?;
        let x = Vector6::from_column_slice(&y.as_slice()[..6]);
        let f = rhs_unchecked(&x);
        let jac = jacobian(&RotState::from_vector(&x));
        let phi = Matrix6::from_column_slice(&y.as_slice()[6..]);
        let dphi = jac * phi;
        let mut out = SVector::<f64, 42>::zeros();
        out.as_mut_slice()[..6].copy_from_slice(f.as_slice());
        out.as_mut_slice()[6..].copy_from_slice(dphi.as_slice());
        Ok(out)
    }
}

fn pack(s: &RotState, phi: &Matrix6<f64>) -> SVector<f64, 42> {
    let mut y = SVector::<f64, 42>::zeros();
    y.as_mut_slice()[..6].copy_from_slice(&s.to_array());
    y.as_mut_slice()[6..].copy_from_slice(phi.as_slice());
    y
}

fn unpack(y: &SVector<f64, 42>) -> (RotState, Matrix6<f64>) {
    let s = RotState::from_vector(&Vector6::from_column_slice(&y.as_slice()[..6]));
    let phi = Matrix6::from_column_slice(&y.as_slice()[6..]);
    (s, phi)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Domain(format!(
            "integration tolerance {tol:e} outside [1e-14, 1e-6]"
        )));
    }
    Ok(())
}

/// Numerical trajectory with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<RotState>,
    solution: OdeSolution<6>,
}

impl Trajectory {
    /// State at any time inside the span.
    pub fn state_at(&self, t: f64) -> Option<RotState> {
        self.solution
            .interpolate(t)
            .map(|v| RotState::from_vector(&v))
    }

    pub fn final_state(&self) -> RotState {
        *self.states.last().expect("trajectory is never empty")
    }

    /// Largest `|H(t) − H(0)|` over the recorded steps.
    pub fn energy_drift(&self) -> Result<f64> {
        let h0 = hamiltonian(&self.states[0])?;
        let mut worst: f64 = 0.0;
        for s in &self.states {
            worst = worst.max((hamiltonian(s)? - h0).abs());
        }
        Ok(worst)
    }

    /// `n + 1` equispaced samples `(t, state, H)`.
    pub fn resample(&self, n: usize) -> Result<Vec<(f64, RotState, f64)>> {
        let t0 = self.times[0];
        let t1 = *self.times.last().unwrap();
        let n = n.max(1);
        (0..=n)
            .map(|k| {
                let t = t0 + (t1 - t0) * k as f64 / n as f64;
                let s = if k == n {
                    self.final_state()
                } else {
                    self.state_at(t).unwrap_or_else(|| self.final_state())
                };
                Ok((t, s, hamiltonian(&s)?))
            })
            .collect()
    }
}

pub fn propagate(s0: &RotState, t_end: f64, tol: f64) -> Result<Trajectory> {
    propagate_with(s0, t_end, tol, DEFAULT_R_MIN)
}

pub fn propagate_with(s0: &RotState, t_end: f64, tol: f64, r_min: f64) -> Result<Trajectory> {
    check_tol(tol)?;
    if !s0.is_finite() || !t_end.is_finite() {
        return Err(Error::Domain("non-finite initial state or time span".into()));
    }
    let sys = HillSystem { r_min };
    let ctrl = StepControl::with_tol(tol);
    let sol = integrate(&sys, 0.0, s0.to_vector(), t_end, &ctrl, Record::Dense, None)?;
    Ok(Trajectory {
        times: sol.t.clone(),
        states: sol.y.iter().map(RotState::from_vector).collect(),
        solution: sol,
    })
}

/// Flow map `Φ_t(s0)` without storing the trajectory.
pub fn flow(s0: &RotState, t: f64, tol: f64) -> Result<RotState> {
    check_tol(tol)?;
    let sol = integrate(
        &HillSystem::default(),
        0.0,
        s0.to_vector(),
        t,
        &StepControl::with_tol(tol),
        Record::Endpoints,
        None,
    )?;
    Ok(RotState::from_vector(&sol.final_state()))
}

/// Final state and state-transition matrix after time `t`.
pub fn flow_with_stm(s0: &RotState, t: f64, tol: f64) -> Result<(RotState, Matrix6<f64>)> {
    check_tol(tol)?;
    let sys = VariationalSystem {
        r_min: DEFAULT_R_MIN,
    };
    let sol = integrate(
        &sys,
        0.0,
        pack(s0, &Matrix6::identity()),
        t,
        &variational_control(tol),
        Record::Endpoints,
        None,
    )?;
    Ok(unpack(&sol.final_state()))
}

fn variational_control(tol: f64) -> StepControl {
    StepControl {
        rtol: tol,
        atol: tol,
        ..Default::default()
    }
}

/// Crossing of the plane `y = 0` with the given direction of `dy/dt`, after at
/// least `min_elapsed`; returns time, state and STM at the crossing.
pub fn flow_to_y_crossing(
    s0: &RotState,
    direction: i8,
    min_elapsed: f64,
    t_max: f64,
    tol: f64,
) -> Result<Option<(f64, RotState, Matrix6<f64>)>> {
    check_tol(tol)?;
    let sys = VariationalSystem {
        r_min: DEFAULT_R_MIN,
    };
    let g = |_t: f64, y: &SVector<f64, 42>| y[1];
    let ev = Event {
        g: &g,
        direction,
        terminal: true,
        min_elapsed,
    };
    let sol = integrate(
        &sys,
        0.0,
        pack(s0, &Matrix6::identity()),
        t_max,
        &variational_control(tol),
        Record::Endpoints,
        Some(&ev),
    )?;
    Ok(sol.events.first().map(|hit| {
        let (s, phi) = unpack(&hit.y);
        (hit.t, s, phi)
    }))
}

/// Symplectic unit in `(x, y, z, X, Y, Z)` ordering.
pub fn symplectic_j6() -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    for i in 0..3 {
        j[(i, i + 3)] = 1.0;
        j[(i + 3, i)] = -1.0;
    }
    j
}

/// Time-reversing symmetry `(x, y, z, X, Y, Z) → (x, −y, z, −X, Y, −Z)`.
pub fn reversor() -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(1.0, -1.0, 1.0, -1.0, 1.0, -1.0))
}

/// Full-period monodromy of a symmetric orbit from its half-period STM:
/// `M = G Φ(T/2)⁻¹ G Φ(T/2)`.
pub fn monodromy_from_half(phi_half: &Matrix6<f64>) -> Matrix6<f64> {
    let g = reversor();
    // Φ⁻¹ = −J Φᵀ J for a symplectic Φ
    let j = symplectic_j6();
    let inv = -j * phi_half.transpose() * j;
    g * inv * g * phi_half
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityIndices {
    pub s1: f64,
    pub s2: f64,
    /// True when `s1`, `s2` are the in-plane and out-of-plane indices of a planar orbit.
    pub planar_split: bool,
    /// Imaginary residual of the index pair (nonzero for complex quadruplets).
    pub complex_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy {
    pub m: Matrix6<f64>,
    pub s1: f64,
    pub s2: f64,
    pub period: f64,
    pub planar_split: bool,
    /// `‖Φ_T(x0) − x0‖`.
    pub periodicity: f64,
}

impl Monodromy {
    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_j6();
        (self.m.transpose() * j * self.m - j).amax()
    }

    pub fn multipliers(&self) -> Vec<Complex<f64>> {
        self.m.complex_eigenvalues().iter().copied().collect()
    }
}

/// Stability indices from the monodromy matrix. Planar orbits use the
/// block structure; otherwise the unit pair is deflated and the remaining
/// multipliers are paired by reciprocity.
pub fn stability_indices(m: &Matrix6<f64>, planar: bool) -> StabilityIndices {
    if planar {
        // planar block (x, y, X, Y) and vertical block (z, Z)
        let idx = [0usize, 1, 3, 4];
        let mut p = Matrix4::zeros();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                p[(a, b)] = m[(i, j)];
            }
        }
        let v = Matrix2::new(m[(2, 2)], m[(2, 5)], m[(5, 2)], m[(5, 5)]);
        return StabilityIndices {
            s1: p.trace() - 2.0,
            s2: v.trace(),
            planar_split: true,
            complex_residual: 0.0,
        };
    }
    let mut ev: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    // remove the two multipliers closest to 1
    for _ in 0..2 {
        let (k, _) = ev
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - Complex::new(1.0, 0.0)).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("six multipliers");
        ev.remove(k);
    }
    // pair the remaining four by reciprocity: choose the pairing with the
    // smallest |λ_a λ_b − 1|
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    let cost = |(a, b): (usize, usize)| (ev[a] * ev[b] - Complex::new(1.0, 0.0)).norm();
    let best = pairings
        .iter()
        .min_by(|x, y| (cost(x.0) + cost(x.1)).total_cmp(&(cost(y.0) + cost(y.1))))
        .unwrap();
    let s_a = ev[best.0 .0] + ev[best.0 .1];
    let s_b = ev[best.1 .0] + ev[best.1 .1];
    let resid = s_a.im.abs().max(s_b.im.abs());
    let (mut s1, mut s2) = (s_a.re, s_b.re);
    if s1.abs() < s2.abs() {
        std::mem::swap(&mut s1, &mut s2);
    }
    if resid > 1e-6 * (1.0 + s1.abs()) {
        log::warn!("stability indices form a complex pair (imaginary part {resid:e})");
    }
    StabilityIndices {
        s1,
        s2,
        planar_split: false,
        complex_residual: resid,
    }
}

/// Plot scaling `2 asinh(s)/asinh(2)`, equal to ±2 where `s = ±2`.
pub fn scaled_index(s: f64) -> f64 {
    2.0 * s.asinh() / 2f64.asinh()
}

pub fn is_planar(s: &RotState) -> bool {
    s.z.abs() < 1e-13 && s.pz.abs() < 1e-13
}

/// Monodromy over one period by integrating the variational equations.
pub fn monodromy(ic: &RotState, period: f64, tol: f64) -> Result<Monodromy> {
    if !(period > 0.0) {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    let (end, m) = flow_with_stm(ic, period, tol)?;
    let periodicity = (end.to_vector() - ic.to_vector()).norm();
    if periodicity > 1e-6 {
        log::warn!("orbit is not periodic to 1e-6 (‖x(T) − x(0)‖ = {periodicity:e})");
    }
    let planar = is_planar(ic);
    let st = stability_indices(&m, planar);
    Ok(Monodromy {
        m,
        s1: st.s1,
        s2: st.s2,
        period,
        planar_split: st.planar_split,
        periodicity,
    })
}
