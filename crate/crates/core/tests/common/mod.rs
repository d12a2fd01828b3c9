#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

use hill_libration::workbench::{
    continuation_run, correct, synthesize, synthesize_state, recommended_seed, Constraint,
    ContinuationOptions, Correction, CorrectorOptions, PeriodicOrbit, Symmetry,
};
use hill_libration::OrbitKind;

/// Analytic seed at the recommended phase, corrected with the given options.
pub fn corrected(kind: OrbitKind, lp: f64, symmetry: Symmetry) -> Correction {
    let o = synthesize(kind, lp, 4).unwrap();
    let ic = synthesize_state(kind, lp, recommended_seed(kind)).unwrap();
    let opts = CorrectorOptions {
        symmetry,
        constraint: Constraint::Energy(None),
        ..Default::default()
    };
    correct(&ic, o.period, &opts).unwrap()
}

/// Planar Lyapunov family from a small-amplitude orbit up past energy 0.2.
pub fn planar_family() -> Vec<PeriodicOrbit> {
    let seed = corrected(OrbitKind::PlanarLyapunov, 0.001, Symmetry::Force).orbit;
    let opts = ContinuationOptions {
        members: 400,
        energy_limit: Some(0.2),
        ..Default::default()
    };
    let run = continuation_run(&seed, &opts).unwrap();
    run.members
}

use hill_libration::center_manifold::{cm_hamiltonian, cm_to_decoupled, CmState};
use hill_libration::hill::expanded_hamiltonian;
use hill_libration::linear::t2_inverse;
use hill_libration::lissajous::short_period_deltas;

/// Log-log slope of `|H_expanded(T3(s)) − K(s)| / |K(s)|` along a ray in the
/// center manifold.
pub fn t3_relative_slope(dir: [f64; 4]) -> f64 {
    let amps = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    let res: Vec<f64> = amps
        .iter()
        .map(|a| {
            let c = CmState::new(a * dir[0], a * dir[1], a * dir[2], a * dir[3]);
            let l = t2_inverse(&cm_to_decoupled(&c));
            let k = cm_hamiltonian(&c);
            (expanded_hamiltonian(&l, 2) - k).abs() / k.abs()
        })
        .collect();
    loglog_slope(&amps, &res)
}

/// Slope in `ε` of the mean → osculating → mean residual when the short-period
/// corrections are scaled by `ε` (actions measured relative to `L`).
pub fn t5_epsilon_slope((l, g, ll, gg): (f64, f64, f64, f64)) -> f64 {
    let eps = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let res: Vec<f64> = eps
        .iter()
        .map(|e| {
            let d0 = short_period_deltas(l, g, ll, gg).unwrap();
            let osc = [l + e * d0[0], g + e * d0[1], ll + e * d0[2], gg + e * d0[3]];
            let d1 = short_period_deltas(osc[0], osc[1], osc[2], osc[3]).unwrap();
            let back = [
                osc[0] - e * d1[0],
                osc[1] - e * d1[1],
                (osc[2] - e * d1[2]) / ll,
                (osc[3] - e * d1[3]) / ll,
            ];
            let want = [l, g, 1.0, gg / ll];
            back.iter()
                .zip(want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    loglog_slope(&eps, &res)
}

use hill_libration::hopf::{
    equilibria, level_set_components, reduced_hamiltonian, thresholds, EquilibriumFamily,
};
use hill_libration::linear::constants;
use nalgebra::{Matrix4, Vector4};

/// Critical points of the reduced Hamiltonian on the sphere `|I| = L'/2`,
/// found by Newton on the Lagrange system from a grid of starts. Independent
/// of the closed-form equilibrium formulas.
pub fn count_sphere_equilibria(lp: f64) -> usize {
    let c = constants();
    let b = c.k2 * lp - c.omega * c.delta_star;
    let r = 0.5 * lp;
    let mut found: Vec<[f64; 3]> = Vec::new();
    let n = 12;
    for i in 0..=n {
        for j in 0..2 * n {
            let th = std::f64::consts::PI * i as f64 / n as f64;
            let ph = std::f64::consts::PI * j as f64 / n as f64;
            let mut v = Vector4::new(
                r * th.sin() * ph.cos(),
                r * th.sin() * ph.sin(),
                r * th.cos(),
                0.0,
            );
            let mut ok = false;
            for _ in 0..60 {
                let (i1, i2, i3, mu) = (v[0], v[1], v[2], v[3]);
                let f = Vector4::new(
                    b - 2.0 * c.k3 * i1 - mu * i1,
                    2.0 * c.k3 * i2 - mu * i2,
                    2.0 * c.k4 * i3 - mu * i3,
                    i1 * i1 + i2 * i2 + i3 * i3 - r * r,
                );
                if f.norm() < 1e-15 * lp.max(1.0) {
                    ok = true;
                    break;
                }
                let jm = Matrix4::new(
                    -2.0 * c.k3 - mu, 0.0, 0.0, -i1,
                    0.0, 2.0 * c.k3 - mu, 0.0, -i2,
                    0.0, 0.0, 2.0 * c.k4 - mu, -i3,
                    2.0 * i1, 2.0 * i2, 2.0 * i3, 0.0,
                );
                match jm.lu().solve(&f) {
                    Some(dv) => v -= dv,
                    None => break,
                }
            }
            if ok && !found.iter().any(|p| {
                ((p[0] - v[0]).powi(2) + (p[1] - v[1]).powi(2) + (p[2] - v[2]).powi(2)).sqrt()
                    < 1e-9 * lp.max(1e-3)
            }) {
                found.push([v[0], v[1], v[2]]);
            }
        }
    }
    found.len()
}

pub fn equilibrium_energy(lp: f64, f: EquilibriumFamily) -> f64 {
    let e = equilibria(lp).unwrap();
    reduced_hamiltonian(&e.iter().find(|q| q.family == f).unwrap().point)
}

#[derive(Debug)]
pub struct LevelRow {
    pub lp: f64,
    pub h: f64,
    pub expected: usize,
    pub got: usize,
}

/// Connected components of level sets at energies bracketing the separatrices
/// of the five reference sphere portraits.
pub fn level_set_table() -> Vec<LevelRow> {
    use EquilibriumFamily::*;
    let mid = |a: f64, b: f64| 0.5 * (a + b);
    let e = equilibrium_energy;
    let lt = thresholds().Ltilde;
    let cases = [
        // below L0: every level between the poles is one loop
        (0.05, mid(e(0.05, EPlus1), e(0.05, EMinus1)), 1),
        // halo lobes inside the separatrix through E−1, one loop outside
        (0.1, mid(e(0.1, EMinus1), e(0.1, EPlus2)), 2),
        (0.1, mid(e(0.1, EPlus1), e(0.1, EMinus1)), 1),
        (0.7, mid(e(0.7, EMinus1), e(0.7, EPlus2)), 2),
        (0.7, mid(e(0.7, EPlus1), e(0.7, EMinus1)), 1),
        // bridge saddles: two loops on either side of the separatrix
        (lt, mid(e(lt, EPlus3), e(lt, EPlus2)), 2),
        (lt, mid(e(lt, EPlus1).max(e(lt, EMinus1)), e(lt, EPlus3)), 2),
        // above L2 the separatrix passes through E+1
        (2.5, mid(e(2.5, EPlus1), e(2.5, EPlus2)), 2),
        (2.5, mid(e(2.5, EMinus1), e(2.5, EPlus1)), 1),
    ];
    cases
        .iter()
        .map(|&(lp, h, expected)| LevelRow {
            lp,
            h,
            expected,
            got: level_set_components(lp, h, 4000).unwrap(),
        })
        .collect()
}
