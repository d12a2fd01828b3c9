use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::corrector::orbit_from_evaluation;
use super::shooting::{gauss_newton_step, null_direction, Evaluation, Shooting};
use super::PeriodicOrbit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// Initial pseudo-arclength step.
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Family size including the seed.
    pub members: usize,
    /// `+1` continues towards increasing energy, `-1` towards decreasing.
    pub direction: i8,
    /// Stop once a member's energy passes this value (in the direction of travel).
    pub energy_limit: Option<f64>,
    pub tol: f64,
    pub integration_tol: f64,
    pub max_iter: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            ds: 2e-3,
            ds_min: 1e-7,
            ds_max: 2e-2,
            members: 50,
            direction: 1,
            energy_limit: None,
            tol: 1e-12,
            integration_tol: 1e-13,
            max_iter: 8,
        }
    }
}

fn shooting_for(orbit: &PeriodicOrbit) -> Shooting {
    if orbit.symmetric {
        Shooting::Symmetric
    } else {
        Shooting::General { y_ref: orbit.ic.y }
    }
}

/// Correct `u_pred` on the hyperplane orthogonal to `tangent`.
fn arclength_correct(
    sh: &Shooting,
    u_pred: &DVector<f64>,
    tangent: &DVector<f64>,
    period_hint: f64,
    tol: f64,
    integration_tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, Evaluation, usize)> {
    let mut u = u_pred.clone();
    let mut hint = period_hint;
    let mut prev = f64::INFINITY;
    for it in 0..=max_iter {
        let ev = sh.evaluate(&u, hint, integration_tol)?;
        hint = ev.period;
        let norm = ev.residual.norm();
        let arc = tangent.dot(&(&u - u_pred));
        if norm <= tol && arc.abs() <= 1e-10 {
            return Ok((u, ev, it));
        }
        if !norm.is_finite() || (it >= 2 && norm > prev) || it == max_iter {
            return Err(Error::NotConverged {
                iterations: it,
                residual: norm,
            });
        }
        prev = norm;
        let rows = ev.residual.len();
        let mut jac = DMatrix::zeros(rows + 1, sh.dim());
        jac.rows_mut(0, rows).copy_from(&ev.jacobian);
        jac.row_mut(rows).copy_from(&tangent.transpose());
        let mut r = DVector::zeros(rows + 1);
        r.rows_mut(0, rows).copy_from(&ev.residual);
        r[rows] = arc;
        u += gauss_newton_step(&jac, &r)?;
    }
    unreachable!("loop returns on its last iteration")
}

/// Members computed before the continuation stopped, and why it stopped
/// early (if it did).
#[derive(Debug, Clone)]
pub struct ContinuationRun {
    pub members: Vec<PeriodicOrbit>,
    pub termination: Option<Error>,
}

/// Pseudo-arclength continuation that keeps the members found before a
/// failure.
pub fn continuation_run(seed: &PeriodicOrbit, opts: &ContinuationOptions) -> Result<ContinuationRun> {
    if !(seed.residual <= 1e-10) {
        return Err(Error::Domain(format!(
            "seed residual {:e} exceeds 1e-10; correct the seed first",
            seed.residual
        )));
    }
    if opts.direction == 0 || !(opts.ds > 0.0) || !(opts.ds_min > 0.0) || opts.ds_min > opts.ds_max {
        return Err(Error::Domain("invalid continuation step control".into()));
    }
    let sh = shooting_for(seed);
    let mut u = sh.pack(&seed.ic, seed.period);
    let ev = sh.evaluate(&u, seed.period, opts.integration_tol)?;
    let mut tangent = null_direction(&ev.jacobian);
    let de = ev.energy_grad.dot(&tangent);
    if de * f64::from(opts.direction) < 0.0 {
        tangent = -tangent;
    }
    let mut members = vec![orbit_from_evaluation(&sh, &ev)];
    let mut ds = opts.ds.min(opts.ds_max);
    let mut hint = ev.period;
    let sign = f64::from(opts.direction.signum());
    while members.len() < opts.members {
        let u_pred = &u + &tangent * ds;
        match arclength_correct(
            &sh,
            &u_pred,
            &tangent,
            hint,
            opts.tol,
            opts.integration_tol,
            opts.max_iter,
        ) {
            Ok((u_new, ev, iterations)) => {
                let mut t_new = null_direction(&ev.jacobian);
                if t_new.dot(&tangent) < 0.0 {
                    t_new = -t_new;
                }
                tangent = t_new;
                u = u_new;
                hint = ev.period;
                let orbit = orbit_from_evaluation(&sh, &ev);
                log::debug!(
                    "member {}: E = {}, T = {}, s = ({}, {}), ds = {ds:e}",
                    members.len(),
                    orbit.energy,
                    orbit.period,
                    orbit.s1,
                    orbit.s2
                );
                let stop = opts
                    .energy_limit
                    .is_some_and(|lim| sign * (orbit.energy - lim) >= 0.0);
                members.push(orbit);
                if stop {
                    break;
                }
                if iterations <= 2 {
                    ds = (ds * 1.5).min(opts.ds_max);
                } else if iterations >= 5 {
                    ds *= 0.5;
                }
            }
            Err(e) => {
                log::debug!("continuation step {ds:e} failed: {e}");
                ds *= 0.5;
                if ds < opts.ds_min {
                    return Ok(ContinuationRun {
                        termination: Some(Error::StepCollapse {
                            step: ds,
                            members: members.len(),
                        }),
                        members,
                    });
                }
            }
        }
    }
    Ok(ContinuationRun {
        members,
        termination: None,
    })
}

/// Pseudo-arclength continuation in the shooting unknowns; every member is
/// corrected to `opts.tol`.
pub fn continue_family(seed: &PeriodicOrbit, opts: &ContinuationOptions) -> Result<Vec<PeriodicOrbit>> {
    let run = continuation_run(seed, opts)?;
    match run.termination {
        Some(e) => Err(e),
        None => Ok(run.members),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityIndex {
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingDirection {
    /// `|s|` grows through 2.
    Destabilizing,
    /// `|s|` drops through 2.
    Stabilizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub energy: f64,
    pub index: StabilityIndex,
    pub direction: CrossingDirection,
    /// `+2` or `−2`: which critical value the index passes.
    pub level: f64,
    /// Energy bracket width after refinement.
    pub bracket: f64,
}

fn index_value(o: &PeriodicOrbit, idx: StabilityIndex) -> f64 {
    match idx {
        StabilityIndex::S1 => o.s1,
        StabilityIndex::S2 => o.s2,
    }
}

const ENERGY_RESOLUTION: f64 = 1e-4;

/// Crossings of `|s_i| = 2` between consecutive members, refined by
/// bisection along the segment joining them until the energy bracket is
/// below `1e-4`.
pub fn locate_bifurcations(family: &[PeriodicOrbit]) -> Result<Vec<Bifurcation>> {
    locate_bifurcations_with(family, &ContinuationOptions::default())
}

pub fn locate_bifurcations_with(
    family: &[PeriodicOrbit],
    opts: &ContinuationOptions,
) -> Result<Vec<Bifurcation>> {
    let mut out = Vec::new();
    for pair in family.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        for idx in [StabilityIndex::S1, StabilityIndex::S2] {
            let fa = index_value(a, idx).abs() - 2.0;
            let fb = index_value(b, idx).abs() - 2.0;
            if !(fa * fb < 0.0) {
                continue;
            }
            let direction = if fa < 0.0 {
                CrossingDirection::Destabilizing
            } else {
                CrossingDirection::Stabilizing
            };
            let (energy, level, bracket) = refine(a, b, idx, opts)?;
            out.push(Bifurcation {
                energy,
                index: idx,
                direction,
                level,
                bracket,
            });
        }
    }
    Ok(out)
}

fn refine(
    a: &PeriodicOrbit,
    b: &PeriodicOrbit,
    idx: StabilityIndex,
    opts: &ContinuationOptions,
) -> Result<(f64, f64, f64)> {
    let sh = shooting_for(a);
    let ua = sh.pack(&a.ic, a.period);
    let ub = sh.pack(&b.ic, b.period);
    let span = &ub - &ua;
    let tangent = span.normalize();
    let f = |o: &PeriodicOrbit| index_value(o, idx).abs() - 2.0;
    let mut lo = (0.0, a.clone());
    let mut hi = (1.0, b.clone());
    let f_lo = f(a);
    for _ in 0..60 {
        if (hi.1.energy - lo.1.energy).abs() <= ENERGY_RESOLUTION {
            break;
        }
        let theta = 0.5 * (lo.0 + hi.0);
        let u_pred = &ua + &span * theta;
        let hint = lo.1.period + theta * (hi.1.period - lo.1.period);
        let (_, ev, _) = arclength_correct(
            &sh,
            &u_pred,
            &tangent,
            hint,
            opts.tol.max(1e-11),
            opts.integration_tol,
            opts.max_iter.max(10),
        )?;
        let mid = orbit_from_evaluation(&sh, &ev);
        if f(&mid) * f_lo > 0.0 {
            lo = (theta, mid);
        } else {
            hi = (theta, mid);
        }
    }
    let energy = 0.5 * (lo.1.energy + hi.1.energy);
    let s = 0.5 * (index_value(&lo.1, idx) + index_value(&hi.1, idx));
    let level = if s >= 0.0 { 2.0 } else { -2.0 };
    Ok((energy, level, (hi.1.energy - lo.1.energy).abs()))
}
