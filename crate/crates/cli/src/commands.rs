use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use hill_libration::center_manifold::cm_hamiltonian;
use hill_libration::hill::{hamiltonian, libration_points};
use hill_libration::hopf::{
    equilibria, level_curve, level_set_components, period_estimate, reduced_hamiltonian,
    thresholds, LevelPoint, ReducedEquilibrium, Stability,
};
use hill_libration::io::{
    equilibria_csv, family_csv, level_curve_csv, parse_config, parse_family_kind,
    parse_ic_argument, parse_orbit_record, synthesized_csv, trajectory_csv, InitialCondition,
    RunConfig,
};
use hill_libration::linear::{constants, symplectic_j4};
use hill_libration::lissajous::{
    first_order_term, lissajous_hamiltonian, lissajous_to_cm, normalized_parts, LissajousState,
    MeanLissajousState,
};
use hill_libration::propagation::{propagate_with, DEFAULT_R_MIN, DEFAULT_TOL};
use hill_libration::tables;
use hill_libration::workbench::{
    continuation_run, correct, locate_bifurcations_with, synthesize, synthesize_state, Constraint,
    ContinuationOptions, CorrectorOptions, OrbitRecord, PeriodicOrbit, Symmetry, DEFAULT_SAMPLES,
};
use hill_libration::Error;

use crate::output::{emit, json as to_json};
use crate::{Cli, Command, Format, SymmetryArg};

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let out = cli.out.as_deref();
    let text = match &cli.command {
        Command::Constants => cmd_constants(cli.format.unwrap_or(Format::Json))?,
        Command::Tables => to_json(&tables_document())?,
        Command::Equilibria { lp } => cmd_equilibria(*lp, cli.format.unwrap_or(Format::Csv))?,
        Command::Sphere { lp, h, points } => {
            cmd_sphere(*lp, h, *points, cli.format.unwrap_or(Format::Csv))?
        }
        Command::Orbit {
            family,
            lp,
            phase,
            samples,
        } => {
            let n = samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES);
            cmd_orbit(family, *lp, *phase, n, cli.format.unwrap_or(Format::Json))?
        }
        Command::Propagate {
            ic,
            t,
            tol,
            samples,
        } => {
            let tol = tol.or(cfg.integration_tol).unwrap_or(DEFAULT_TOL);
            let r_min = cfg.r_min.unwrap_or(DEFAULT_R_MIN);
            cmd_propagate(ic, *t, tol, r_min, *samples, cli.format.unwrap_or(Format::Csv))?
        }
        Command::Correct {
            ic,
            period,
            energy,
            fixed_period,
            symmetry,
        } => {
            let constraint = if *fixed_period {
                Constraint::Period(None)
            } else {
                Constraint::Energy(*energy)
            };
            let opts = corrector_options(&cfg, constraint, *symmetry);
            cmd_correct(ic, *period, &opts, cli.format.unwrap_or(Format::Json))?
        }
        Command::Family {
            start,
            members,
            descending,
            energy_limit,
            symmetry,
        } => {
            let mut opts = ContinuationOptions {
                members: *members,
                direction: if *descending { -1 } else { 1 },
                energy_limit: *energy_limit,
                ..Default::default()
            };
            if let Some(v) = cfg.ds {
                opts.ds = v;
            }
            if let Some(v) = cfg.ds_min {
                opts.ds_min = v;
            }
            if let Some(v) = cfg.ds_max {
                opts.ds_max = v;
            }
            if let Some(v) = cfg.corrector_tol {
                opts.tol = v;
            }
            if let Some(v) = cfg.integration_tol {
                opts.integration_tol = v;
            }
            let corr = corrector_options(&cfg, Constraint::Energy(None), *symmetry);
            return cmd_family(start, &opts, &corr, cli.format.unwrap_or(Format::Csv), out);
        }
    };
    emit(out, &text)
}

fn corrector_options(cfg: &RunConfig, constraint: Constraint, sym: SymmetryArg) -> CorrectorOptions {
    let d = CorrectorOptions::default();
    CorrectorOptions {
        constraint,
        symmetry: match sym {
            SymmetryArg::Auto => Symmetry::Auto,
            SymmetryArg::Off => Symmetry::Off,
            SymmetryArg::Force => Symmetry::Force,
        },
        tol: cfg.corrector_tol.unwrap_or(d.tol),
        max_iter: cfg.max_iter.unwrap_or(d.max_iter),
        integration_tol: cfg.integration_tol.unwrap_or(d.integration_tol),
    }
}

fn check_lp(lp: f64) -> Result<()> {
    if !(lp > 0.0) || !lp.is_finite() {
        return Err(Error::Domain(format!("L' must be positive and finite, got {lp}")).into());
    }
    Ok(())
}

fn constants_document() -> Result<serde_json::Value> {
    let c = constants();
    let th = thresholds();
    let (l1, l2) = libration_points();
    let j = symplectic_j4();
    // table self-consistency at a fixed reference state
    let s = LissajousState::new(0.7, 0.3, 0.2, 0.05);
    let via_tables = lissajous_hamiltonian(&s)?;
    let via_cm = cm_hamiltonian(&lissajous_to_cm(&s)?);
    let n = 64;
    let avg = (0..n)
        .map(|k| first_order_term(&LissajousState::new(2.0 * PI * k as f64 / n as f64, s.g, s.L, s.G)))
        .sum::<hill_libration::Result<f64>>()?
        / n as f64;
    let (_, b1, _) = normalized_parts(&MeanLissajousState::new(0.0, s.g, s.L, s.G))?;
    let a: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|k| c.a[(i, k)]).collect()).collect();
    Ok(json!({
        "constants": {
            "rho": c.rho,
            "lambda": c.lambda,
            "omega": c.omega,
            "nu": c.nu,
            "delta": c.delta,
            "delta_star": c.delta_star,
            "sigma": c.sigma,
            "tau": c.tau,
            "k0": c.k0,
            "k1": c.k1,
            "k2": c.k2,
            "k3": c.k3,
            "k4": c.k4,
        },
        "thresholds": {
            "L0": th.L0,
            "L1": th.L1,
            "L2": th.L2,
            "Ltilde": th.Ltilde,
        },
        "libration_points": {
            "L1": l1,
            "L2": l2,
            "energy": hamiltonian(&l1)?,
        },
        "normalization_matrix": a,
        "audit": {
            "symplectic_defect": (c.a.transpose() * j * c.a - j).amax(),
            "reference_state": { "ell": s.ell, "g": s.g, "L": s.L, "G": s.G },
            "lissajous_table_minus_center_manifold": via_tables - via_cm,
            "first_order_average_minus_b1": avg - b1,
        },
    }))
}

fn cmd_constants(format: Format) -> Result<String> {
    let doc = constants_document()?;
    match format {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut out = String::from("name,value\n");
            for group in ["constants", "thresholds"] {
                if let Some(obj) = doc[group].as_object() {
                    for (k, v) in obj {
                        out.push_str(&format!("{k},{v}\n"));
                    }
                }
            }
            Ok(out)
        }
    }
}

fn tables_document() -> serde_json::Value {
    json!({
        "C1": tables::C1,
        "C2": tables::C2,
        "DELTA1": tables::DELTA1,
        "DELTA2": tables::DELTA2,
        "A1_COS": tables::A1_COS,
        "A1_SIN": tables::A1_SIN,
        "A2_COS": tables::A2_COS,
        "SP_FIRST": tables::SP_FIRST,
        "SP_SECOND": tables::SP_SECOND,
        "K": {
            "K0": tables::K0,
            "K1": tables::K1,
            "K2": tables::K2,
            "K3": tables::K3,
            "K4": tables::K4,
        },
    })
}

#[derive(Serialize)]
struct EquilibriumRow<'a> {
    #[serde(flatten)]
    eq: &'a ReducedEquilibrium,
    energy: f64,
    period: f64,
}

fn cmd_equilibria(lp: f64, format: Format) -> Result<String> {
    check_lp(lp)?;
    let eqs = equilibria(lp)?;
    match format {
        Format::Csv => Ok(equilibria_csv(&eqs)),
        Format::Json => {
            let rows: Vec<EquilibriumRow> = eqs
                .iter()
                .map(|e| EquilibriumRow {
                    eq: e,
                    energy: reduced_hamiltonian(&e.point),
                    period: period_estimate(e).period,
                })
                .collect();
            to_json(&json!({ "Lp": lp, "equilibria": rows }))
        }
    }
}

/// Saddle energies (separatrices) plus interior levels between consecutive
/// equilibrium energies.
fn auto_levels(eqs: &[ReducedEquilibrium]) -> Vec<f64> {
    let mut e: Vec<f64> = eqs.iter().map(|q| reduced_hamiltonian(&q.point)).collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    let span = e.last().unwrap_or(&0.0) - e.first().unwrap_or(&0.0);
    let mut levels = Vec::new();
    // bands far below the sampler's resolution (e.g. the near-degenerate
    // poles at L~) carry no visible curves
    for w in e.windows(2).filter(|w| w[1] - w[0] > 1e-4 * span) {
        for f in [0.25, 0.5, 0.75] {
            levels.push(w[0] + f * (w[1] - w[0]));
        }
    }
    for q in eqs.iter().filter(|q| q.stability == Stability::Hyperbolic) {
        levels.push(reduced_hamiltonian(&q.point));
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    levels
}

#[derive(Serialize)]
struct Level {
    h: f64,
    components: usize,
    points: Vec<LevelPoint>,
}

fn cmd_sphere(lp: f64, h: &str, points: usize, format: Format) -> Result<String> {
    check_lp(lp)?;
    if points < 8 {
        return Err(Error::Domain(format!("need at least 8 points per level, got {points}")).into());
    }
    let eqs = equilibria(lp)?;
    let levels = if h.trim().eq_ignore_ascii_case("auto") {
        auto_levels(&eqs)
    } else {
        let v: f64 = h
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("--h expects a number or 'auto', got '{h}'")))?;
        vec![v]
    };
    let mut out = Vec::with_capacity(levels.len());
    for h in levels {
        out.push(Level {
            h,
            components: level_set_components(lp, h, points.max(1000))?,
            points: level_curve(lp, h, points)?,
        });
    }
    match format {
        Format::Csv => {
            let all: Vec<LevelPoint> = out.into_iter().flat_map(|l| l.points).collect();
            Ok(level_curve_csv(&all))
        }
        Format::Json => to_json(&json!({ "Lp": lp, "equilibria": eqs, "levels": out })),
    }
}

fn cmd_orbit(family: &str, lp: f64, phase: Option<f64>, n: usize, format: Format) -> Result<String> {
    check_lp(lp)?;
    let kind = parse_family_kind(family)?;
    let mut orbit = synthesize(kind, lp, n)?;
    if let Some(p) = phase {
        if !p.is_finite() {
            return Err(Error::Domain(format!("phase must be finite, got {p}")).into());
        }
        orbit.seed_phase = p;
    }
    let ic = synthesize_state(kind, lp, orbit.seed_phase)?;
    match format {
        Format::Csv => Ok(synthesized_csv(&orbit)?),
        Format::Json => to_json(&json!({
            "family": kind,
            "Lp": lp,
            "period": orbit.period,
            "seed_phase": orbit.seed_phase,
            "ic": ic,
            "energy": hamiltonian(&ic)?,
            "short_period_applied": orbit.short_period_applied,
            "equilibrium": orbit.equilibrium,
            "samples": orbit.samples,
        })),
    }
}

/// `--ic` value: a path to a JSON document, inline numbers, or JSON text.
fn read_ic(arg: &str) -> Result<InitialCondition> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return Ok(parse_ic_argument(&text)?);
    }
    Ok(parse_ic_argument(arg)?)
}

fn cmd_propagate(ic: &str, t: f64, tol: f64, r_min: f64, samples: usize, format: Format) -> Result<String> {
    let ic = read_ic(ic)?;
    let tr = propagate_with(&ic.state, t, tol, r_min)?;
    let rows = tr.resample(samples)?;
    match format {
        Format::Csv => Ok(trajectory_csv(&rows)),
        Format::Json => {
            let samples: Vec<_> = rows
                .iter()
                .map(|(t, s, h)| json!({ "t": t, "state": s, "H": h }))
                .collect();
            to_json(&json!({
                "ic": ic.state,
                "t_end": t,
                "tol": tol,
                "steps": tr.times.len() - 1,
                "energy_drift": tr.energy_drift()?,
                "final": tr.final_state(),
                "samples": samples,
            }))
        }
    }
}

fn cmd_correct(ic: &str, period: Option<f64>, opts: &CorrectorOptions, format: Format) -> Result<String> {
    let ic = read_ic(ic)?;
    let Some(t) = period.or(ic.period) else {
        bail!(Error::Domain(
            "a period guess is required (--T, or a \"period\" field in the document)".into()
        ));
    };
    let c = correct(&ic.state, t, opts)?;
    match format {
        Format::Csv => Ok(family_csv(std::slice::from_ref(&c.orbit))),
        Format::Json => {
            let rec = OrbitRecord::from_periodic(&c.orbit, ic.family, ic.lp);
            let mut doc = serde_json::to_value(&rec)?;
            doc["iterations"] = json!(c.iterations);
            doc["history"] = json!(c.history);
            to_json(&doc)
        }
    }
}

fn start_orbit(path: &Path, corr: &CorrectorOptions) -> Result<PeriodicOrbit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rec = parse_orbit_record(&text)?;
    match rec.to_periodic() {
        Some(o) if o.residual <= 1e-10 => Ok(o),
        _ => {
            log::info!("start orbit is not corrected; correcting it first");
            Ok(correct(&rec.ic, rec.period, corr)?.orbit)
        }
    }
}

fn cmd_family(
    start: &Path,
    opts: &ContinuationOptions,
    corr: &CorrectorOptions,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    if opts.members < 2 {
        return Err(Error::Domain(format!("need at least 2 members, got {}", opts.members)).into());
    }
    let seed = start_orbit(start, corr)?;
    let run = continuation_run(&seed, opts)?;
    let bifurcations = locate_bifurcations_with(&run.members, opts)?;
    let text = match format {
        Format::Csv => family_csv(&run.members),
        Format::Json => {
            let members: Vec<OrbitRecord> = run
                .members
                .iter()
                .map(|o| OrbitRecord::from_periodic(o, None, None))
                .collect();
            let scaled: Vec<(f64, f64)> = run.members.iter().map(|o| o.scaled_indices()).collect();
            to_json(&json!({
                "members": members,
                "scaled_indices": scaled,
                "bifurcations": bifurcations,
                "termination": run.termination.as_ref().map(|e| e.to_string()),
            }))?
        }
    };
    emit(out, &text)?;
    match run.termination {
        // partial families are still written before reporting the failure
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
