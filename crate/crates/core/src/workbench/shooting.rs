//! Shooting formulations for periodic orbits of the Hill problem.
//!
//! Two parametrizations are used. The general one takes the unknowns
//! `u = (x, y, z, X, Y, Z, T)` with residual `Φ_T(x0) − x0` plus a phase row
//! pinning `y0`. The symmetric one exploits the time-reversal symmetry
//! `(x, −y, z, −X, Y, −Z, −t)`: an orbit that crosses `y = 0` perpendicularly
//! (`X = Z = 0`) twice is periodic, so the unknowns are `u = (x, z, Y)` and the
//! residual is `(X, Z)` at the next crossing of `y = 0`.

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};

use crate::error::{Error, Result};
use crate::hill::{rhs_unchecked, RotState};
use crate::propagation::{flow_to_y_crossing, flow_with_stm, monodromy_from_half};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shooting {
    General { y_ref: f64 },
    Symmetric,
}

/// Residual, Jacobian and by-products of one shooting evaluation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub residual: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub state: RotState,
    pub period: f64,
    /// Gradient of the period with respect to `u`.
    pub period_grad: DVector<f64>,
    pub energy: f64,
    /// Gradient of the energy with respect to `u`.
    pub energy_grad: DVector<f64>,
    pub monodromy: Matrix6<f64>,
}

/// `∇H` from the vector field: `ẋ = ∂H/∂P`, `Ṗ = −∂H/∂x`.
pub(crate) fn energy_gradient(s: &RotState) -> Vector6<f64> {
    let f = rhs_unchecked(&s.to_vector());
    Vector6::new(-f[3], -f[4], -f[5], f[0], f[1], f[2])
}

const SYM_COLS: [usize; 3] = [0, 2, 4];

impl Shooting {
    pub fn dim(&self) -> usize {
        match self {
            Shooting::General { .. } => 7,
            Shooting::Symmetric => 3,
        }
    }

    /// Number of residual rows.
    pub fn rows(&self) -> usize {
        match self {
            Shooting::General { .. } => 7,
            Shooting::Symmetric => 2,
        }
    }

    pub fn pack(&self, s: &RotState, period: f64) -> DVector<f64> {
        match self {
            Shooting::General { .. } => {
                let mut u = DVector::zeros(7);
                u.rows_mut(0, 6).copy_from_slice(&s.to_array());
                u[6] = period;
                u
            }
            Shooting::Symmetric => DVector::from_vec(vec![s.x, s.z, s.py]),
        }
    }

    pub fn state(&self, u: &DVector<f64>) -> RotState {
        match self {
            Shooting::General { .. } => {
                RotState::new(u[0], u[1], u[2], u[3], u[4], u[5])
            }
            Shooting::Symmetric => RotState::new(u[0], 0.0, u[1], 0.0, u[2], 0.0),
        }
    }

    /// Evaluate at `u`; `period_hint` sizes the crossing search of the
    /// symmetric formulation.
    pub fn evaluate(&self, u: &DVector<f64>, period_hint: f64, tol: f64) -> Result<Evaluation> {
        let s0 = self.state(u);
        if !s0.is_finite() {
            return Err(Error::Divergence {
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
        let grad_h = energy_gradient(&s0);
        let energy = crate::hill::hamiltonian(&s0)?;
        match *self {
            Shooting::General { y_ref } => {
                let t = u[6];
                if !(t > 0.0) {
                    // only reachable from a Newton update; the corrector checks its input
                    return Err(Error::Divergence {
                        iterations: 0,
                        residual: f64::INFINITY,
                    });
                }
                let (end, phi) = flow_with_stm(&s0, t, tol)?;
                let f_end = rhs_unchecked(&end.to_vector());
                let mut r = DVector::zeros(7);
                let mut jac = DMatrix::zeros(7, 7);
                for i in 0..6 {
                    r[i] = end.to_array()[i] - s0.to_array()[i];
                    for k in 0..6 {
                        jac[(i, k)] = phi[(i, k)] - if i == k { 1.0 } else { 0.0 };
                    }
                    jac[(i, 6)] = f_end[i];
                }
                r[6] = s0.y - y_ref;
                jac[(6, 1)] = 1.0;
                let mut period_grad = DVector::zeros(7);
                period_grad[6] = 1.0;
                let mut energy_grad = DVector::zeros(7);
                energy_grad.rows_mut(0, 6).copy_from(&grad_h);
                Ok(Evaluation {
                    residual: r,
                    jacobian: jac,
                    state: s0,
                    period: t,
                    period_grad,
                    energy,
                    energy_grad,
                    monodromy: phi,
                })
            }
            Shooting::Symmetric => {
                let f0 = rhs_unchecked(&s0.to_vector());
                // the next crossing has ẏ of opposite sign
                let direction = if f0[1] > 0.0 { -1 } else { 1 };
                let hit = flow_to_y_crossing(
                    &s0,
                    direction,
                    0.2 * period_hint,
                    2.0 * period_hint,
                    tol,
                )?;
                let (tc, end, phi) = hit.ok_or_else(|| {
                    Error::NotConverged {
                        iterations: 0,
                        residual: f64::INFINITY,
                    }
                })?;
                let f = rhs_unchecked(&end.to_vector());
                let ydot = f[1];
                if ydot.abs() < 1e-14 {
                    return Err(Error::SingularJacobian(
                        "tangential crossing of y = 0".into(),
                    ));
                }
                let rows = [3usize, 5];
                let mut r = DVector::zeros(2);
                let mut jac = DMatrix::zeros(2, 3);
                let e = end.to_array();
                for (a, &ri) in rows.iter().enumerate() {
                    r[a] = e[ri];
                    for (b, &ck) in SYM_COLS.iter().enumerate() {
                        jac[(a, b)] = phi[(ri, ck)] - f[ri] * phi[(1, ck)] / ydot;
                    }
                }
                let mut period_grad = DVector::zeros(3);
                let mut energy_grad = DVector::zeros(3);
                for (b, &ck) in SYM_COLS.iter().enumerate() {
                    period_grad[b] = -2.0 * phi[(1, ck)] / ydot;
                    energy_grad[b] = grad_h[ck];
                }
                Ok(Evaluation {
                    residual: r,
                    jacobian: jac,
                    state: s0,
                    period: 2.0 * tc,
                    period_grad,
                    energy,
                    energy_grad,
                    monodromy: monodromy_from_half(&phi),
                })
            }
        }
    }
}

/// Whether a state lies on the symmetric section `y = X = Z = 0`.
pub fn on_symmetric_section(s: &RotState, tol: f64) -> bool {
    s.y.abs() <= tol && s.px.abs() <= tol && s.pz.abs() <= tol
}

/// Minimum-norm least-squares solve of `J du = −r`; errors when `J` is
/// rank deficient relative to its largest singular value.
pub(crate) fn gauss_newton_step(jac: &DMatrix<f64>, r: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let expected_rank = jac.ncols().min(jac.nrows());
    if svd.singular_values.len() < expected_rank || !(smin > 1e-13 * smax) {
        return Err(Error::SingularJacobian(format!(
            "condition estimate {:e}",
            smax / smin.max(f64::MIN_POSITIVE)
        )));
    }
    svd.solve(&(-r), 0.0)
        .map_err(|e| Error::SingularJacobian(e.to_string()))
}

/// Unit null direction of an under-determined Jacobian (smallest right
/// singular vector).
pub(crate) fn null_direction(jac: &DMatrix<f64>) -> DVector<f64> {
    let n = jac.ncols();
    // pad to square so the full right basis is available
    let mut sq = DMatrix::zeros(n.max(jac.nrows()), n);
    sq.rows_mut(0, jac.nrows()).copy_from(jac);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    vt.row(k).transpose().normalize()
}
