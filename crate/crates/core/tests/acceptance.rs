//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    corrected, count_sphere_equilibria, level_set_table, planar_family, rel, rng,
    t3_relative_slope, t5_epsilon_slope,
};
use hill_libration::center_manifold::{cm_hamiltonian, detuned_split};
use hill_libration::hopf::{
    equilibria, integrate_reduced, linear_stability, reduced_flow, reduced_hamiltonian,
    thresholds, HopfPoint,
};
use hill_libration::linear::{constants, symplectic_j4};
use hill_libration::lissajous::{
    first_order_term, lissajous_hamiltonian, lissajous_to_cm, normalized_parts, LissajousState,
    MeanLissajousState,
};
use hill_libration::propagation::flow;
use hill_libration::workbench::{locate_bifurcations, synthesize, synthesize_state, Symmetry};
use hill_libration::OrbitKind;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Same number of decimals as the printed value.
fn matches_printed(value: f64, printed: &str) -> bool {
    let p: f64 = printed.parse().unwrap();
    if printed.contains('e') {
        let mant = printed.split('e').next().unwrap();
        let digits = mant.split('.').nth(1).map_or(0, str::len) as i32;
        let exp = p.abs().log10().floor() as i32;
        let unit = 10f64.powi(exp - digits);
        return (value - p).abs() <= 0.5 * unit * (1.0 + 1e-9);
    }
    let digits = printed.split('.').nth(1).map_or(0, str::len) as i32;
    (value - p).abs() <= 0.5 * 10f64.powi(-digits) * (1.0 + 1e-9)
}

fn criterion_1() -> Check {
    let c = constants();
    let printed = [
        ("rho", c.rho, "0.693"),
        ("lambda", c.lambda, "2.508"),
        ("omega", c.omega, "2.0716"),
        ("delta", c.delta, "0.068"),
        ("delta*", c.delta_star, "0.03454"),
        ("k0", c.k0, "6.5e-7"),
        ("k1", c.k1, "0.17"),
        ("k2", c.k2, "0.055"),
        ("k3", c.k3, "0.003"),
        ("k4", c.k4, "0.87"),
    ];
    for (name, v, p) in printed {
        if !matches_printed(v, p) {
            return Err(format!("{name} = {v} does not round to {p}"));
        }
    }
    let th = thresholds();
    let want = [
        ("L0", th.L0, 0.0768606),
        ("L1", th.L1, 1.17113),
        ("Ltilde", th.Ltilde, 1.29839),
        ("L2", th.L2, 1.45668),
    ];
    let worst = want.iter().map(|(_, a, b)| rel(*a, *b)).fold(0.0, f64::max);
    ensure(worst <= 1e-4, format!("10 constants to printed digits; thresholds max rel {worst:.1e}"))
}

fn criterion_2() -> Check {
    let c = constants();
    let mut r = rng(2024);
    let random_liss = |r: &mut rand_chacha::ChaCha8Rng, lmax: f64| {
        let l = r.gen_range(0.01 * lmax..lmax);
        let g = r.gen_range(-0.95..0.95) * l;
        LissajousState::new(r.gen_range(0.0..2.0 * PI), r.gen_range(0.0..2.0 * PI), l, g)
    };
    let mut table = 0.0f64;
    for _ in 0..200 {
        let s = random_liss(&mut r, 0.3);
        let want = cm_hamiltonian(&lissajous_to_cm(&s).map_err(|e| e.to_string())?);
        let got = lissajous_hamiltonian(&s).map_err(|e| e.to_string())?;
        table = table.max(rel(got, want));
    }
    let mut avg_err = 0.0f64;
    for _ in 0..50 {
        let s = random_liss(&mut r, 0.5);
        let n = 64;
        let avg = (0..n)
            .map(|k| {
                let l = 2.0 * PI * k as f64 / n as f64;
                first_order_term(&LissajousState::new(l, s.g, s.L, s.G)).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        let (_, b1, _) = normalized_parts(&MeanLissajousState::new(0.0, s.g, s.L, s.G)).unwrap();
        avg_err = avg_err.max((avg - b1).abs() / b1.abs().max(1e-3));
    }
    let mut quad = 0.0f64;
    for _ in 0..200 {
        let s = random_liss(&mut r, 1.0);
        let (principal, _) = detuned_split(&lissajous_to_cm(&s).unwrap());
        quad = quad.max(rel(principal, c.omega * s.L));
    }
    let j = symplectic_j4();
    let sympl = (c.a.transpose() * j * c.a - j).amax();
    let t3 = [[0.5, 0.3, -0.6, 0.55], [0.1, -0.7, 0.2, 0.68], [-0.4, 0.4, 0.6, -0.57]]
        .map(t3_relative_slope)
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let t5 = [(0.7, 0.4, 0.001, 0.0003), (2.0, 1.2, 0.01, -0.004)]
        .map(t5_epsilon_slope)
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let msg = format!(
        "table {table:.1e}, <A1>=B1 {avg_err:.1e}, omega*L {quad:.1e}, A'JA-J {sympl:.1e}, T3 slope {t3:.2}, T5 slope {t5:.2}"
    );
    ensure(
        table <= 1e-9 && avg_err <= 1e-12 && quad <= 1e-13 && sympl <= 1e-12 && t3 >= 1.8 && t5 >= 1.8,
        msg,
    )
}

fn criterion_3() -> Check {
    let mut r = rng(3);
    let mut conservation = 0.0f64;
    for _ in 0..4 {
        let lp = r.gen_range(0.05..2.0);
        let (th, ph): (f64, f64) = (r.gen_range(0.1..3.0), r.gen_range(0.0..2.0 * PI));
        let p0 = HopfPoint::new(
            0.5 * lp * th.sin() * ph.cos(),
            0.5 * lp * th.sin() * ph.sin(),
            0.5 * lp * th.cos(),
            lp,
        );
        let h0 = reduced_hamiltonian(&p0);
        for (_, p) in integrate_reduced(&p0, 1e4, 50).map_err(|e| e.to_string())? {
            conservation = conservation
                .max((p.radius() - 0.5 * lp).abs())
                .max((reduced_hamiltonian(&p) - h0).abs());
        }
    }
    let mut residual = 0.0f64;
    for lp in [0.05, 0.1, 0.7, 1.29839, 2.5] {
        for e in equilibria(lp).unwrap() {
            let f = reduced_flow(&e.point);
            residual = residual.max(f.iter().map(|v| v.abs()).fold(0.0, f64::max) / (lp * lp).max(1e-3));
        }
    }
    let th = thresholds();
    let mut counts = Vec::new();
    for (l, below, above) in [(th.L0, 2, 4), (th.L1, 4, 6), (th.L2, 6, 4)] {
        let got = (count_sphere_equilibria(l - 1e-4), count_sphere_equilibria(l + 1e-4));
        if got != (below, above) {
            return Err(format!("count near {l}: {got:?}, expected ({below}, {above})"));
        }
        counts.push(format!("{below}->{above}"));
    }
    let mut labels = 0;
    for k in 0..100 {
        let lp = 0.01 * (300f64).powf(k as f64 / 99.0);
        for e in equilibria(lp).unwrap() {
            match linear_stability(&e.point) {
                Some(s) if s == e.stability => labels += 1,
                None => {}
                Some(s) => return Err(format!("{:?} at L'={lp}: {s:?} vs {:?}", e.family, e.stability)),
            }
        }
    }
    ensure(
        conservation <= 1e-10 && residual <= 1e-12,
        format!(
            "conservation {conservation:.1e}, eq residual {residual:.1e}, transitions {}, {labels} labels agree",
            counts.join(",")
        ),
    )
}

fn closure(kind: OrbitKind, lp: f64) -> Result<(f64, f64), String> {
    let o = synthesize(kind, lp, 8).map_err(|e| e.to_string())?;
    let s = o.seed().map_err(|e| e.to_string())?;
    let end = flow(&s, o.period, 1e-13).map_err(|e| e.to_string())?;
    Ok((o.period, (end.to_vector() - s.to_vector()).norm()))
}

fn criterion_4() -> Check {
    let (t, err) = closure(OrbitKind::VerticalLyapunov, 0.001)?;
    ensure(
        (t - 3.13965).abs() <= 1e-3 && err <= 1e-3,
        format!("analytic period {t:.6}, closure after one period {err:.2e}"),
    )
}

fn criterion_5() -> Check {
    let (_, seed_err) = closure(OrbitKind::VerticalLyapunov, 0.02)?;
    let c = catch_unwind(|| corrected(OrbitKind::VerticalLyapunov, 0.02, Symmetry::Auto))
        .map_err(|_| "corrector failed".to_string())?;
    ensure(
        (1e-4..=1e-1).contains(&seed_err) && c.iterations <= 10 && c.orbit.residual <= 1e-12,
        format!(
            "seed error {seed_err:.2e}, {} iterations to residual {:.1e}",
            c.iterations, c.orbit.residual
        ),
    )
}

fn criterion_6() -> Check {
    let fam = planar_family();
    let last = fam.last().map(|o| o.energy).unwrap_or(f64::NAN);
    let b = locate_bifurcations(&fam).map_err(|e| e.to_string())?;
    let energies: Vec<f64> = b.iter().map(|x| x.energy).collect();
    let want = [-2.0, -0.6, 0.0];
    let ok = last > 0.0
        && energies.len() == 3
        && energies.iter().zip(want).all(|(e, w)| (e - w).abs() <= 0.15);
    ensure(
        ok,
        format!(
            "{} members up to energy {last:.3}; crossings at {}",
            fam.len(),
            energies.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_7() -> Check {
    let rows = level_set_table();
    let mut bad = Vec::new();
    for r in &rows {
        if r.got != r.expected {
            bad.push(format!("L'={} h={}: {} components, expected {}", r.lp, r.h, r.got, r.expected));
        }
    }
    let eq_counts: Vec<usize> = [0.05, 0.1, 0.7, 1.29839, 2.5]
        .iter()
        .map(|&lp| equilibria(lp).unwrap().len())
        .collect();
    let indep: Vec<usize> = [0.05, 0.1, 0.7, 1.29839, 2.5]
        .iter()
        .map(|&lp| count_sphere_equilibria(lp))
        .collect();
    if eq_counts != [2, 4, 4, 6, 4] || indep != eq_counts {
        bad.push(format!("equilibrium counts {eq_counts:?} / {indep:?}"));
    }
    if bad.is_empty() {
        Ok(format!("equilibria {eq_counts:?}; {} level sets with expected component counts", rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_8() -> Check {
    let (_, err) = closure(OrbitKind::HaloNorth, 0.08)?;
    let a = synthesize_state(OrbitKind::HaloNorth, 0.08, 0.3).map_err(|e| e.to_string())?;
    let b = synthesize_state(OrbitKind::HaloNorth, 0.08, 0.3 + 2.0 * PI).map_err(|e| e.to_string())?;
    let loop_gap = (a.to_vector() - b.to_vector()).amax();
    ensure(
        err > 1e-2 && loop_gap <= 1e-13,
        format!("numerical closure {err:.2e}, analytic loop gap {loop_gap:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 8] = [
        ("constants and thresholds", Duration::from_secs(1), criterion_1),
        ("transformation-chain identities", Duration::from_secs(10), criterion_2),
        ("reduced-flow suite", Duration::from_secs(30), criterion_3),
        ("vertical Lyapunov at L'=0.001", Duration::from_secs(5), criterion_4),
        ("differential correction at L'=0.02", Duration::from_secs(10), criterion_5),
        ("planar Lyapunov family bifurcations", Duration::from_secs(600), criterion_6),
        ("sphere portraits", Duration::from_secs(60), criterion_7),
        ("halo seed departs from periodicity", Duration::from_secs(5), criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {budget:?}")),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} -- {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
