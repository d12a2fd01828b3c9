use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{rhs_unchecked, RotState};
use crate::propagation::{is_planar, stability_indices};

use super::shooting::{gauss_newton_step, on_symmetric_section, Evaluation, Shooting};
use super::PeriodicOrbit;

/// Extra scalar condition closing the shooting system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Constraint {
    /// Fix the energy; `None` keeps the energy of the seed.
    Energy(Option<f64>),
    /// Fix the period; `None` keeps the period guess.
    Period(Option<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Use the half-period symmetric corrector when the seed lies on `y = X = Z = 0`.
    Auto,
    /// Always use full-period shooting.
    Off,
    /// Project the seed onto `y = X = Z = 0` and use the symmetric corrector.
    Force,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectorOptions {
    pub constraint: Constraint,
    pub symmetry: Symmetry,
    pub tol: f64,
    pub max_iter: usize,
    pub integration_tol: f64,
}

impl Default for CorrectorOptions {
    fn default() -> Self {
        CorrectorOptions {
            constraint: Constraint::Energy(None),
            symmetry: Symmetry::Auto,
            tol: 1e-12,
            max_iter: 15,
            integration_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub orbit: PeriodicOrbit,
    /// Newton updates applied; zero when the seed already converged.
    pub iterations: usize,
    /// Residual norm at every evaluation, starting with the seed.
    pub history: Vec<f64>,
}

pub(crate) fn orbit_from_evaluation(sh: &Shooting, ev: &Evaluation) -> PeriodicOrbit {
    let st = stability_indices(&ev.monodromy, is_planar(&ev.state));
    PeriodicOrbit {
        ic: ev.state,
        period: ev.period,
        energy: ev.energy,
        s1: st.s1,
        s2: st.s2,
        residual: ev.residual.norm(),
        symmetric: matches!(sh, Shooting::Symmetric),
        planar_split: st.planar_split,
    }
}

fn choose_shooting(ic: &RotState, symmetry: Symmetry) -> (Shooting, RotState) {
    match symmetry {
        Symmetry::Off => (Shooting::General { y_ref: ic.y }, *ic),
        Symmetry::Force => (
            Shooting::Symmetric,
            RotState::new(ic.x, 0.0, ic.z, 0.0, ic.py, 0.0),
        ),
        Symmetry::Auto => {
            if on_symmetric_section(ic, 1e-10) {
                (Shooting::Symmetric, *ic)
            } else {
                (Shooting::General { y_ref: ic.y }, *ic)
            }
        }
    }
}

/// Newton shooting from an approximate periodic orbit.
pub fn correct(ic: &RotState, period_guess: f64, opts: &CorrectorOptions) -> Result<Correction> {
    if !(period_guess > 0.0) || !period_guess.is_finite() {
        return Err(Error::Domain(format!(
            "period guess must be positive, got {period_guess}"
        )));
    }
    if !ic.is_finite() {
        return Err(Error::Domain("non-finite initial condition".into()));
    }
    if rhs_unchecked(&ic.to_vector()).norm() < 1e-10 {
        return Err(Error::Domain(
            "initial condition is an equilibrium; nothing to correct".into(),
        ));
    }
    let (sh, seed) = choose_shooting(ic, opts.symmetry);
    let mut u = sh.pack(&seed, period_guess);
    let mut hint = period_guess;
    let mut history = Vec::new();
    let mut growing = 0;
    let mut target = None;
    for it in 0..=opts.max_iter {
        let ev = sh.evaluate(&u, hint, opts.integration_tol).map_err(|e| match e {
            Error::Divergence { residual, .. } => Error::Divergence {
                iterations: it,
                residual,
            },
            other => other,
        })?;
        hint = ev.period;
        let norm = ev.residual.norm();
        log::debug!("corrector iteration {it}: residual {norm:e}, period {}", ev.period);
        if let Some(&prev) = history.last() {
            growing = if norm > prev { growing + 1 } else { 0 };
        }
        history.push(norm);
        if norm <= opts.tol {
            return Ok(Correction {
                orbit: orbit_from_evaluation(&sh, &ev),
                iterations: it,
                history,
            });
        }
        if !norm.is_finite() || growing >= 3 {
            return Err(Error::Divergence {
                iterations: it,
                residual: norm,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let (grad, value) = match opts.constraint {
            Constraint::Energy(e) => {
                let t = *target.get_or_insert(e.unwrap_or(ev.energy));
                (&ev.energy_grad, ev.energy - t)
            }
            Constraint::Period(p) => {
                let t = *target.get_or_insert(p.unwrap_or(period_guess));
                (&ev.period_grad, ev.period - t)
            }
        };
        let rows = ev.residual.len();
        let mut jac = DMatrix::zeros(rows + 1, sh.dim());
        jac.rows_mut(0, rows).copy_from(&ev.jacobian);
        jac.row_mut(rows).copy_from(&grad.transpose());
        let mut r = DVector::zeros(rows + 1);
        r.rows_mut(0, rows).copy_from(&ev.residual);
        r[rows] = value;
        u += gauss_newton_step(&jac, &r)?;
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: *history.last().unwrap_or(&f64::INFINITY),
    })
}
