//! Adaptive Verner 9(8) Runge–Kutta integrator with ninth-order dense output
//! and event location.

mod tableau;

use nalgebra::SVector;

use crate::error::{Error, Result};
use tableau::{A, A_DENSE, B_DENSE, B_HIGH, B_LOW, C, C_DENSE, DENSE_ORDER, EXTRA, STAGES};

/// Right-hand side `dy/dt = f(t, y)`. Returning an error aborts the integration.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &SVector<f64, N>) -> Result<SVector<f64, N>>;
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    fn rhs(&self, t: f64, y: &SVector<f64, N>) -> Result<SVector<f64, N>> {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        StepControl {
            rtol: tol,
            atol: tol,
            ..Default::default()
        }
    }
}

/// What to keep from an integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Record {
    /// Only the initial and final states.
    Endpoints,
    /// Every accepted step.
    Steps,
    /// Every accepted step plus the interpolation data.
    Dense,
}

/// Scalar event function; crossings of zero are located on the dense output.
pub struct Event<'a, const N: usize> {
    pub g: &'a dyn Fn(f64, &SVector<f64, N>) -> f64,
    /// `+1` for increasing crossings only, `-1` for decreasing, `0` for both.
    pub direction: i8,
    /// Stop the integration at the first accepted crossing.
    pub terminal: bool,
    /// Crossings with `|t − t0|` below this are ignored.
    pub min_elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit<const N: usize> {
    pub t: f64,
    pub y: SVector<f64, N>,
}

/// Data for evaluating the continuous extension within one step.
#[derive(Debug, Clone)]
pub struct DenseSegment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    y0: SVector<f64, N>,
    k: Vec<SVector<f64, N>>,
}

impl<const N: usize> DenseSegment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> SVector<f64, N> {
        let theta = (t - self.t0) / self.h;
        let mut y = self.y0;
        for (i, k) in self.k.iter().enumerate() {
            let row = &B_DENSE[i];
            let mut w = row[DENSE_ORDER - 1];
            for j in (0..DENSE_ORDER - 1).rev() {
                w = w * theta + row[j];
            }
            w *= theta;
            if w != 0.0 {
                y += k * (w * self.h);
            }
        }
        y
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<SVector<f64, N>>,
    pub segments: Vec<DenseSegment<N>>,
    pub events: Vec<EventHit<N>>,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl<const N: usize> OdeSolution<N> {
    pub fn final_time(&self) -> f64 {
        *self.t.last().expect("solution holds at least the initial state")
    }

    pub fn final_state(&self) -> SVector<f64, N> {
        *self.y.last().expect("solution holds at least the initial state")
    }

    /// Dense-output evaluation; `None` outside the span or without dense data.
    pub fn interpolate(&self, t: f64) -> Option<SVector<f64, N>> {
        let first = self.segments.first()?;
        let forward = first.h > 0.0;
        let idx = self.segments.partition_point(|s| {
            if forward {
                s.t1() < t
            } else {
                s.t1() > t
            }
        });
        let seg = self.segments.get(idx.min(self.segments.len() - 1))?;
        let (lo, hi) = if forward {
            (first.t0, self.segments.last()?.t1())
        } else {
            (self.segments.last()?.t1(), first.t0)
        };
        if t < lo - 1e-12 * lo.abs().max(1.0) || t > hi + 1e-12 * hi.abs().max(1.0) {
            return None;
        }
        Some(seg.eval(t))
    }
}

fn error_norm<const N: usize>(
    err: &SVector<f64, N>,
    y0: &SVector<f64, N>,
    y1: &SVector<f64, N>,
    ctrl: &StepControl,
) -> f64 {
    let mut e: f64 = 0.0;
    for i in 0..N {
        let sc = ctrl.atol + ctrl.rtol * y0[i].abs().max(y1[i].abs());
        e = e.max((err[i] / sc).abs());
    }
    e
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: &SVector<f64, N>,
    f0: &SVector<f64, N>,
    dir: f64,
    ctrl: &StepControl,
) -> Result<f64> {
    let scale = |v: &SVector<f64, N>| {
        let mut s: f64 = 0.0;
        for i in 0..N {
            let sc = ctrl.atol + ctrl.rtol * y0[i].abs();
            s = s.max((v[i] / sc).abs());
        }
        s
    };
    let d0 = scale(y0);
    let d1 = scale(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(ctrl.h_max);
    let y1 = y0 + f0 * (dir * h0);
    let f1 = sys.rhs(t0 + dir * h0, &y1)?;
    let d2 = scale(&(f1 - f0)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 9.0)
    };
    Ok((100.0 * h0).min(h1).min(ctrl.h_max))
}

/// Integrate from `t0` to `t_end` (either direction).
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: SVector<f64, N>,
    t_end: f64,
    ctrl: &StepControl,
    record: Record,
    event: Option<&Event<'_, N>>,
) -> Result<OdeSolution<N>> {
    let span = t_end - t0;
    let mut sol = OdeSolution {
        t: vec![t0],
        y: vec![y0],
        segments: Vec::new(),
        events: Vec::new(),
        accepted: 0,
        rejected: 0,
        evaluations: 0,
    };
    if span == 0.0 {
        return Ok(sol);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut f = sys.rhs(t, &y)?;
    sol.evaluations += 1;
    let mut h = match ctrl.h_init {
        Some(h) => h.abs(),
        None => {
            sol.evaluations += 1;
            initial_step(sys, t0, &y0, &f, dir, ctrl)?
        }
    };
    let mut k: Vec<SVector<f64, N>> = vec![SVector::zeros(); STAGES + EXTRA];
    let mut g_prev = event.map(|e| (e.g)(t, &y));
    let mut last_rejected = false;

    loop {
        let remaining = (t_end - t) * dir;
        if remaining <= 1e-15 * t_end.abs().max(1.0) {
            break;
        }
        if sol.accepted + sol.rejected >= ctrl.max_steps {
            return Err(Error::MaxSteps(ctrl.max_steps));
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let hs = dir * h;

        k[0] = f;
        for i in 1..STAGES {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    ys += kj * (a * hs);
                }
            }
            k[i] = sys.rhs(t + C[i] * hs, &ys)?;
        }
        sol.evaluations += STAGES - 1;
        let mut y_high = y;
        let mut err = SVector::<f64, N>::zeros();
        for i in 0..STAGES {
            if B_HIGH[i] != 0.0 {
                y_high += k[i] * (B_HIGH[i] * hs);
            }
            let db = B_HIGH[i] - B_LOW[i];
            if db != 0.0 {
                err += k[i] * (db * hs);
            }
        }
        let en = error_norm(&err, &y, &y_high, ctrl);
        if !en.is_finite() {
            sol.rejected += 1;
            last_rejected = true;
            h *= 0.2;
            continue;
        }
        if en > 1.0 {
            sol.rejected += 1;
            let fac = (0.9 * en.powf(-1.0 / 9.0)).max(0.2);
            h *= fac;
            last_rejected = true;
            continue;
        }

        // accepted
        let t_new = if last { t_end } else { t + hs };
        let f_new = sys.rhs(t_new, &y_high)?;
        sol.evaluations += 1;
        sol.accepted += 1;

        let mut hit: Option<EventHit<N>> = None;
        let mut g_new = None;
        let mut need_dense = record == Record::Dense;
        if let (Some(ev), Some(gp)) = (event, g_prev) {
            let gn = (ev.g)(t_new, &y_high);
            g_new = Some(gn);
            let crossing = (gp < 0.0 && gn >= 0.0 && ev.direction >= 0)
                || (gp > 0.0 && gn <= 0.0 && ev.direction <= 0);
            if crossing {
                need_dense = true;
            }
        }
        let segment = if need_dense {
            k[STAGES] = f_new;
            for i in 1..EXTRA {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(STAGES + i) {
                    let a = A_DENSE[i][j];
                    if a != 0.0 {
                        ys += kj * (a * hs);
                    }
                }
                k[STAGES + i] = sys.rhs(t + C_DENSE[i] * hs, &ys)?;
            }
            sol.evaluations += EXTRA - 1;
            Some(DenseSegment {
                t0: t,
                h: hs,
                y0: y,
                k: k.clone(),
            })
        } else {
            None
        };

        if let (Some(ev), Some(gp), Some(gn), Some(seg)) = (event, g_prev, g_new, segment.as_ref()) {
            let crossing = (gp < 0.0 && gn >= 0.0 && ev.direction >= 0)
                || (gp > 0.0 && gn <= 0.0 && ev.direction <= 0);
            if crossing {
                let (te, ye) = locate_root(ev, seg, t, t_new, gp, gn);
                if (te - t0).abs() >= ev.min_elapsed {
                    hit = Some(EventHit { t: te, y: ye });
                }
            }
        }

        if let Some(seg) = segment {
            if record == Record::Dense {
                sol.segments.push(seg);
            }
        }

        t = t_new;
        y = y_high;
        f = f_new;
        if let Some(gn) = g_new {
            g_prev = Some(gn);
        }
        if record != Record::Endpoints {
            sol.t.push(t);
            sol.y.push(y);
        }

        if let Some(hit) = hit {
            let terminal = event.map(|e| e.terminal).unwrap_or(false);
            if terminal {
                if record == Record::Endpoints {
                    sol.t.push(hit.t);
                    sol.y.push(hit.y);
                } else {
                    // replace the overshooting step end by the event state
                    *sol.t.last_mut().unwrap() = hit.t;
                    *sol.y.last_mut().unwrap() = hit.y;
                }
                sol.events.push(hit);
                return Ok(sol);
            }
            sol.events.push(hit);
        }

        let mut fac = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(-1.0 / 9.0)).clamp(0.2, 5.0)
        };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(ctrl.h_max);
    }

    if record == Record::Endpoints {
        sol.t.push(t);
        sol.y.push(y);
    }
    Ok(sol)
}

/// Root of the event function inside one step by safeguarded secant
/// (Illinois) iteration on the dense output.
fn locate_root<const N: usize>(
    ev: &Event<'_, N>,
    seg: &DenseSegment<N>,
    ta: f64,
    tb: f64,
    ga: f64,
    gb: f64,
) -> (f64, SVector<f64, N>) {
    let (mut a, mut b, mut fa, mut fb) = (ta, tb, ga, gb);
    if fb == 0.0 {
        return (tb, seg.eval(tb));
    }
    let mut side = 0i8;
    let mut t = b;
    for _ in 0..100 {
        t = (a * fb - b * fa) / (fb - fa);
        let ft = (ev.g)(t, &seg.eval(t));
        if ft == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            break;
        }
        if ft.signum() == fb.signum() {
            b = t;
            fb = ft;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = t;
            fa = ft;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    (t, seg.eval(t))
}
