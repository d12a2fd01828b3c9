//! Reduction of the averaged dynamics to a flow on the sphere
//! `I1² + I2² + I3² = L'²/4`, its equilibria, bifurcations, level curves and
//! the period estimates of the associated orbits.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, Record, StepControl};
use crate::linear::constants;
use crate::lissajous::{normalized_hamiltonian, state_functions, MeanLissajousState};

/// Point on the reduced sphere of parameter `lp = L'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub lp: f64,
}

impl HopfPoint {
    pub fn new(i1: f64, i2: f64, i3: f64, lp: f64) -> Self {
        HopfPoint { i1, i2, i3, lp }
    }

    pub fn radius(&self) -> f64 {
        (self.i1 * self.i1 + self.i2 * self.i2 + self.i3 * self.i3).sqrt()
    }

    /// Relative deviation from the sphere of radius `L'/2`.
    pub fn sphere_defect(&self) -> f64 {
        (self.radius() - 0.5 * self.lp).abs() / (0.5 * self.lp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    VerticalLyapunov,
    PlanarLyapunov,
    HaloNorth,
    HaloSouth,
    BridgeA,
    BridgeB,
}

impl OrbitKind {
    pub const ALL: [OrbitKind; 6] = [
        OrbitKind::VerticalLyapunov,
        OrbitKind::PlanarLyapunov,
        OrbitKind::HaloNorth,
        OrbitKind::HaloSouth,
        OrbitKind::BridgeA,
        OrbitKind::BridgeB,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitKind::VerticalLyapunov => "vertical-lyapunov",
            OrbitKind::PlanarLyapunov => "planar-lyapunov",
            OrbitKind::HaloNorth => "halo-north",
            OrbitKind::HaloSouth => "halo-south",
            OrbitKind::BridgeA => "bridge-a",
            OrbitKind::BridgeB => "bridge-b",
        }
    }

    pub fn family(&self) -> EquilibriumFamily {
        match self {
            OrbitKind::VerticalLyapunov => EquilibriumFamily::EPlus1,
            OrbitKind::PlanarLyapunov => EquilibriumFamily::EMinus1,
            OrbitKind::HaloNorth => EquilibriumFamily::EPlus2,
            OrbitKind::HaloSouth => EquilibriumFamily::EMinus2,
            OrbitKind::BridgeA => EquilibriumFamily::EPlus3,
            OrbitKind::BridgeB => EquilibriumFamily::EMinus3,
        }
    }
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrbitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        OrbitKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == t)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown orbit family '{s}' (expected one of vertical-lyapunov, planar-lyapunov, halo-north, halo-south, bridge-a, bridge-b)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumFamily {
    #[serde(rename = "E+1")]
    EPlus1,
    #[serde(rename = "E-1")]
    EMinus1,
    #[serde(rename = "E+2")]
    EPlus2,
    #[serde(rename = "E-2")]
    EMinus2,
    #[serde(rename = "E+3")]
    EPlus3,
    #[serde(rename = "E-3")]
    EMinus3,
}

impl EquilibriumFamily {
    pub fn label(&self) -> &'static str {
        match self {
            EquilibriumFamily::EPlus1 => "E+1",
            EquilibriumFamily::EMinus1 => "E-1",
            EquilibriumFamily::EPlus2 => "E+2",
            EquilibriumFamily::EMinus2 => "E-2",
            EquilibriumFamily::EPlus3 => "E+3",
            EquilibriumFamily::EMinus3 => "E-3",
        }
    }

    pub fn orbit_kind(&self) -> OrbitKind {
        match self {
            EquilibriumFamily::EPlus1 => OrbitKind::VerticalLyapunov,
            EquilibriumFamily::EMinus1 => OrbitKind::PlanarLyapunov,
            EquilibriumFamily::EPlus2 => OrbitKind::HaloNorth,
            EquilibriumFamily::EMinus2 => OrbitKind::HaloSouth,
            EquilibriumFamily::EPlus3 => OrbitKind::BridgeA,
            EquilibriumFamily::EMinus3 => OrbitKind::BridgeB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedEquilibrium {
    pub family: EquilibriumFamily,
    pub point: HopfPoint,
    pub stability: Stability,
    pub orbit_kind: OrbitKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct BifurcationThresholds {
    pub L0: f64,
    pub L1: f64,
    pub L2: f64,
    pub Ltilde: f64,
}

/// `I1 = ω s'd' cos 2g'`, `I2 = ω s'd' sin 2g'`, `I3 = G'/2`.
pub fn to_hopf(m: &MeanLissajousState) -> Result<HopfPoint> {
    let (s, d) = state_functions(m.L, m.G)?;
    let w = constants().omega;
    let r = w * s * d;
    Ok(HopfPoint::new(
        r * (2.0 * m.g).cos(),
        r * (2.0 * m.g).sin(),
        0.5 * m.G,
        m.L,
    ))
}

/// Mean elements of a sphere point with the supplied mean anomaly. The
/// orientation is recovered modulo `π`; at the poles it is undetermined and
/// reported as zero with the circular flag set.
pub fn from_hopf(p: &HopfPoint, ell: f64) -> (MeanLissajousState, bool) {
    let circular = p.i1.hypot(p.i2) <= 1e-14 * p.lp;
    let g = if circular { 0.0 } else { 0.5 * p.i2.atan2(p.i1) };
    (MeanLissajousState::new(ell, g, p.lp, 2.0 * p.i3), circular)
}

/// `ω(1−δ*/2)L' − k1L'² + (k2L' − ωδ*)I1 + k3(I2² − I1²) + k4I3²`.
pub fn reduced_hamiltonian(p: &HopfPoint) -> f64 {
    let c = constants();
    let lp = p.lp;
    c.omega * (1.0 - 0.5 * c.delta_star) * lp - c.k1 * lp * lp
        + (c.k2 * lp - c.omega * c.delta_star) * p.i1
        + c.k3 * (p.i2 * p.i2 - p.i1 * p.i1)
        + c.k4 * p.i3 * p.i3
}

/// Time derivatives `(İ1, İ2, İ3)`.
pub fn reduced_flow(p: &HopfPoint) -> [f64; 3] {
    let c = constants();
    let a = c.delta_star * c.omega - c.k2 * p.lp;
    [
        2.0 * (c.k3 - c.k4) * p.i2 * p.i3,
        (a + 2.0 * (c.k3 + c.k4) * p.i1) * p.i3,
        -(a + 4.0 * c.k3 * p.i1) * p.i2,
    ]
}

fn flow_jacobian(p: &HopfPoint) -> Matrix3<f64> {
    let c = constants();
    let a = c.delta_star * c.omega - c.k2 * p.lp;
    let b = 2.0 * (c.k3 - c.k4);
    Matrix3::new(
        0.0,
        b * p.i3,
        b * p.i2,
        2.0 * (c.k3 + c.k4) * p.i3,
        0.0,
        a + 2.0 * (c.k3 + c.k4) * p.i1,
        -4.0 * c.k3 * p.i2,
        -(a + 4.0 * c.k3 * p.i1),
        0.0,
    )
}

/// Stability from the linearized flow. The Jacobian at an equilibrium has
/// eigenvalues `0, ±√(−m)` with `m` the sum of its principal 2×2 minors;
/// `None` when `m` vanishes to rounding (degenerate, at a bifurcation).
pub fn linear_stability(p: &HopfPoint) -> Option<Stability> {
    let j = flow_jacobian(p);
    let minor = |a: usize, b: usize| j[(a, a)] * j[(b, b)] - j[(a, b)] * j[(b, a)];
    let m = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let c = constants();
    let scale = (c.k4 * p.lp).powi(2).max(1e-300);
    if m.abs() <= 1e-12 * scale {
        None
    } else if m > 0.0 {
        Some(Stability::Elliptic)
    } else {
        Some(Stability::Hyperbolic)
    }
}

pub fn thresholds() -> BifurcationThresholds {
    let c = constants();
    let num = c.delta_star * c.omega;
    BifurcationThresholds {
        L0: num / (c.k2 + c.k3 + c.k4),
        L1: num / (c.k2 + 2.0 * c.k3),
        L2: num / (c.k2 - 2.0 * c.k3),
        Ltilde: num / c.k2,
    }
}

/// `I1` of the halo equilibria.
pub fn halo_i1(lp: f64) -> f64 {
    let c = constants();
    (c.k2 * lp - c.delta_star * c.omega) / (2.0 * (c.k3 + c.k4))
}

/// `I1` of the bridge equilibria.
pub fn bridge_i1(lp: f64) -> f64 {
    let c = constants();
    (c.k2 * lp - c.delta_star * c.omega) / (4.0 * c.k3)
}

fn closed_form_stability(f: EquilibriumFamily, lp: f64, th: &BifurcationThresholds) -> Stability {
    use EquilibriumFamily::*;
    match f {
        EPlus1 => {
            if lp < th.L2 {
                Stability::Elliptic
            } else {
                Stability::Hyperbolic
            }
        }
        EMinus1 => {
            if lp > th.L0 && lp < th.L1 {
                Stability::Hyperbolic
            } else {
                Stability::Elliptic
            }
        }
        EPlus2 | EMinus2 => Stability::Elliptic,
        EPlus3 | EMinus3 => Stability::Hyperbolic,
    }
}

/// Equilibria of the reduced flow at `L' = lp`, labelled by the closed-form
/// rules and cross-checked against the linearized flow.
pub fn equilibria(lp: f64) -> Result<Vec<ReducedEquilibrium>> {
    if !(lp > 0.0) || !lp.is_finite() {
        return Err(Error::Domain(format!("L' must be positive, got {lp}")));
    }
    use EquilibriumFamily::*;
    let th = thresholds();
    let half = 0.5 * lp;
    let mut pts = vec![
        (EPlus1, HopfPoint::new(half, 0.0, 0.0, lp)),
        (EMinus1, HopfPoint::new(-half, 0.0, 0.0, lp)),
    ];
    if lp >= th.L0 {
        let i1 = halo_i1(lp).clamp(-half, half);
        let i3 = (half * half - i1 * i1).max(0.0).sqrt();
        pts.push((EPlus2, HopfPoint::new(i1, 0.0, i3, lp)));
        pts.push((EMinus2, HopfPoint::new(i1, 0.0, -i3, lp)));
    }
    if lp >= th.L1 && lp <= th.L2 {
        let i1 = bridge_i1(lp).clamp(-half, half);
        let i2 = (half * half - i1 * i1).max(0.0).sqrt();
        pts.push((EPlus3, HopfPoint::new(i1, i2, 0.0, lp)));
        pts.push((EMinus3, HopfPoint::new(i1, -i2, 0.0, lp)));
    }
    let out = pts
        .into_iter()
        .map(|(f, p)| {
            let stability = closed_form_stability(f, lp, &th);
            if let Some(lin) = linear_stability(&p) {
                if lin != stability {
                    log::warn!(
                        "{} at L' = {lp}: closed-form label {:?} disagrees with linearization {:?}",
                        f.label(),
                        stability,
                        lin
                    );
                }
            }
            ReducedEquilibrium {
                family: f,
                point: p,
                stability,
                orbit_kind: f.orbit_kind(),
            }
        })
        .collect();
    Ok(out)
}

/// Equilibrium of a given family, or an error if the family does not exist at `lp`.
pub fn equilibrium_of(kind: OrbitKind, lp: f64) -> Result<ReducedEquilibrium> {
    let fam = kind.family();
    equilibria(lp)?
        .into_iter()
        .find(|e| e.family == fam)
        .ok_or_else(|| {
            let th = thresholds();
            let reason = match fam {
                EquilibriumFamily::EPlus2 | EquilibriumFamily::EMinus2 => {
                    format!("halo equilibria require L' ≥ L0 = {}", th.L0)
                }
                _ => format!("bridge equilibria require {} ≤ L' ≤ {}", th.L1, th.L2),
            };
            Error::FamilyNotPresent {
                family: kind,
                lp,
                reason,
            }
        })
}

/// `I2²` and `I3²` on the level set `H = h` as functions of `I1`.
pub fn level_radicands(lp: f64, h: f64, i1: f64) -> (f64, f64) {
    let c = constants();
    let c0 = c.omega * (1.0 - 0.5 * c.delta_star) * lp - c.k1 * lp * lp;
    let b = c.k2 * lp - c.omega * c.delta_star;
    let r = 0.25 * lp * lp - i1 * i1;
    let den = c.k4 - c.k3;
    let i2sq = (c0 + b * i1 - c.k3 * i1 * i1 + c.k4 * r - h) / den;
    let i3sq = (h - c0 - b * i1 + c.k3 * i1 * i1 - c.k3 * r) / den;
    (i2sq, i3sq)
}

/// Sample of a level curve; `branch` encodes the signs of `(I2, I3)` as
/// 0 `(+,+)`, 1 `(+,−)`, 2 `(−,+)`, 3 `(−,−)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub point: HopfPoint,
    pub h: f64,
    pub branch: u8,
}

const RADICAND_FLOOR: f64 = -1e-12;

fn i1_nodes(lp: f64, n: usize) -> impl Iterator<Item = f64> {
    let half = 0.5 * lp;
    (0..n).map(move |k| {
        if n == 1 {
            0.0
        } else {
            -half + lp * k as f64 / (n - 1) as f64
        }
    })
}

/// Samples of the level set `H = h` on the sphere of parameter `lp`, taken on
/// `n` equispaced `I1` nodes. Empty when the level misses the sphere.
pub fn level_curve(lp: f64, h: f64, n: usize) -> Result<Vec<LevelPoint>> {
    if !(lp > 0.0) || !lp.is_finite() {
        return Err(Error::Domain(format!("L' must be positive, got {lp}")));
    }
    if n < 2 {
        return Err(Error::Domain("level curves need at least two nodes".into()));
    }
    let scale = lp * lp;
    let mut out = Vec::new();
    for i1 in i1_nodes(lp, n) {
        let (a, b) = level_radicands(lp, h, i1);
        if a < RADICAND_FLOOR * scale || b < RADICAND_FLOOR * scale {
            continue;
        }
        let (i2, i3) = (a.max(0.0).sqrt(), b.max(0.0).sqrt());
        for (branch, (s2, s3)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            out.push(LevelPoint {
                point: HopfPoint::new(i1, s2 * i2, s3 * i3, lp),
                h,
                branch: branch as u8,
            });
        }
    }
    Ok(out)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra] = rb;
    }
}

/// Number of connected components of the level set `H = h`, from the
/// `I1`-runs of the sampler joined where a radicand vanishes.
pub fn level_set_components(lp: f64, h: f64, n: usize) -> Result<usize> {
    if !(lp > 0.0) || n < 3 {
        return Err(Error::Domain("need L' > 0 and at least three nodes".into()));
    }
    let nodes: Vec<f64> = i1_nodes(lp, n).collect();
    let rad: Vec<(f64, f64)> = nodes.iter().map(|&x| level_radicands(lp, h, x)).collect();
    let ok: Vec<bool> = rad.iter().map(|&(a, b)| a >= 0.0 && b >= 0.0).collect();

    // runs of consecutive valid nodes
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut k = 0;
    while k < n {
        if ok[k] {
            let start = k;
            while k + 1 < n && ok[k + 1] {
                k += 1;
            }
            runs.push((start, k));
        }
        k += 1;
    }
    if runs.is_empty() {
        return Ok(0);
    }
    // piece index: run * 4 + (sign I2 bit) * 2 + (sign I3 bit)
    let mut parent: Vec<usize> = (0..runs.len() * 4).collect();
    for (r, &(a, b)) in runs.iter().enumerate() {
        for outside in [a.checked_sub(1), (b + 1 < n).then_some(b + 1)] {
            // which radicands vanish at this end of the run; the ends of the
            // I1 range are the poles I2 = I3 = 0
            let (i2_zero, i3_zero) = match outside {
                None => (true, true),
                Some(o) => (rad[o].0 < 0.0, rad[o].1 < 0.0),
            };
            for s3 in 0..2 {
                if i2_zero {
                    union(&mut parent, r * 4 + s3, r * 4 + 2 + s3);
                }
            }
            for s2 in 0..2 {
                if i3_zero {
                    union(&mut parent, r * 4 + s2 * 2, r * 4 + s2 * 2 + 1);
                }
            }
        }
        // a radicand that stays at zero along the run identifies its sign pieces
        if rad[a..=b].iter().all(|&(x, _)| x <= 1e-14 * lp * lp) {
            for s3 in 0..2 {
                union(&mut parent, r * 4 + s3, r * 4 + 2 + s3);
            }
        }
        if rad[a..=b].iter().all(|&(_, y)| y <= 1e-14 * lp * lp) {
            for s2 in 0..2 {
                union(&mut parent, r * 4 + s2 * 2, r * 4 + s2 * 2 + 1);
            }
        }
    }
    let mut roots: Vec<usize> = (0..parent.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// First-order period estimate of the orbit attached to an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Mean-anomaly rate `dℓ'/dt`.
    pub ell_rate: f64,
    /// Set when the estimate is not resolvable (circular limit).
    pub diverged: bool,
}

/// `T = 2π/ℓ̇'` with `ℓ̇' = ω − ω(δ/4)(1 + L'I1/(2(I1² + I2²)))`.
pub fn period_estimate(eq: &ReducedEquilibrium) -> PeriodEstimate {
    period_at(&eq.point)
}

pub fn period_at(p: &HopfPoint) -> PeriodEstimate {
    let c = constants();
    let lp = p.lp;
    // L'² − G'² = 4(I1² + I2²)
    let den = 4.0 * (p.i1 * p.i1 + p.i2 * p.i2);
    let diverged = den < 1e-9 * lp * lp;
    if diverged {
        log::warn!(
            "period estimate diverges near the circular limit (L'² − G'² = {den:e}, I1 = {:e})",
            p.i1
        );
        return PeriodEstimate {
            period: f64::NAN,
            ell_rate: f64::NAN,
            diverged,
        };
    }
    let ratio = 2.0 * lp * p.i1 / den;
    let rate = c.omega - 0.25 * c.omega * c.delta * (1.0 + ratio);
    PeriodEstimate {
        period: 2.0 * PI / rate,
        ell_rate: rate,
        diverged,
    }
}

/// Period from the full averaged Hamiltonian, `T = 2π/(∂B/∂L')` at fixed
/// `(g', G')`; includes the second-order frequency corrections.
pub fn period_second_order(p: &HopfPoint) -> Result<f64> {
    let (m, _) = from_hopf(p, 0.0);
    let hstep = 1e-6 * m.L.max(1e-8);
    let up = MeanLissajousState::new(0.0, m.g, m.L + hstep, m.G);
    let mut dn = MeanLissajousState::new(0.0, m.g, m.L - hstep, m.G);
    // stay inside |G| ≤ L for circular states
    let one_sided = dn.G.abs() > dn.L;
    if one_sided {
        dn = MeanLissajousState::new(0.0, m.g, m.L, m.G);
    }
    let b_up = normalized_hamiltonian(&up)?;
    let b_dn = normalized_hamiltonian(&dn)?;
    let rate = (b_up - b_dn) / (if one_sided { hstep } else { 2.0 * hstep });
    Ok(2.0 * PI / rate)
}

/// Integrate the reduced flow, returning `n_out + 1` equispaced samples.
pub fn integrate_reduced(p0: &HopfPoint, t_end: f64, n_out: usize) -> Result<Vec<(f64, HopfPoint)>> {
    let lp = p0.lp;
    let rhs = move |_t: f64, y: &SVector<f64, 3>| -> Result<SVector<f64, 3>> {
        let f = reduced_flow(&HopfPoint::new(y[0], y[1], y[2], lp));
        Ok(Vector3::new(f[0], f[1], f[2]))
    };
    let ctrl = StepControl {
        rtol: 1e-14,
        atol: 1e-16 * lp.max(1e-3),
        ..Default::default()
    };
    let y0 = Vector3::new(p0.i1, p0.i2, p0.i3);
    let n_out = n_out.max(1);
    let mut out = Vec::with_capacity(n_out + 1);
    out.push((0.0, *p0));
    let mut y = y0;
    let mut t = 0.0;
    for k in 1..=n_out {
        let t1 = t_end * k as f64 / n_out as f64;
        let sol = integrate(&rhs, t, y, t1, &ctrl, Record::Endpoints, None)?;
        y = sol.final_state();
        t = t1;
        out.push((t, HopfPoint::new(y[0], y[1], y[2], lp)));
    }
    Ok(out)
}
