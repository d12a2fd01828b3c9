//! Text formats: inline states, JSON orbit documents, `key = value`
//! configuration files and CSV tables.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{hamiltonian, RotState};
use crate::hopf::{LevelPoint, OrbitKind, ReducedEquilibrium};
use crate::workbench::{OrbitRecord, PeriodicOrbit, SynthesizedOrbit};

fn parse_f64(tok: &str, what: &str) -> Result<f64> {
    let t = tok.trim();
    let v = f64::from_str(t).map_err(|_| Error::Parse(format!("{what}: '{t}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what}: '{t}' is not finite")));
    }
    Ok(v)
}

/// Six comma-separated numbers `x,y,z,X,Y,Z`.
pub fn parse_inline_state(s: &str) -> Result<RotState> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err(Error::Parse(format!(
            "inline state needs 6 comma-separated values, got {}",
            parts.len()
        )));
    }
    let mut a = [0.0; 6];
    for (k, p) in parts.iter().enumerate() {
        a[k] = parse_f64(p, "inline state")?;
    }
    Ok(RotState::from_array(a))
}

/// Initial condition with an optional period, as read from a document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub state: RotState,
    pub period: Option<f64>,
    pub family: Option<OrbitKind>,
    pub lp: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IcDoc {
    Orbit {
        ic: RotState,
        #[serde(default)]
        period: Option<f64>,
        #[serde(default)]
        family: Option<OrbitKind>,
        #[serde(default, rename = "Lp")]
        lp: Option<f64>,
    },
    State(RotState),
    Array([f64; 6]),
}

/// JSON initial condition: an orbit record (`{"ic": {...}, "period": ...}`),
/// a bare state object `{"x": .., "y": .., ..}` or an array of six numbers.
pub fn parse_ic_document(s: &str) -> Result<InitialCondition> {
    let doc: IcDoc = serde_json::from_str(s)
        .map_err(|e| Error::Parse(format!("initial-condition document: {e}")))?;
    let ic = match doc {
        IcDoc::Orbit {
            ic,
            period,
            family,
            lp,
        } => InitialCondition {
            state: ic,
            period,
            family,
            lp,
        },
        IcDoc::State(state) => InitialCondition {
            state,
            period: None,
            family: None,
            lp: None,
        },
        IcDoc::Array(a) => InitialCondition {
            state: RotState::from_array(a),
            period: None,
            family: None,
            lp: None,
        },
    };
    if !ic.state.is_finite() {
        return Err(Error::Parse("initial condition has non-finite components".into()));
    }
    if let Some(t) = ic.period {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Parse(format!("period must be positive, got {t}")));
        }
    }
    Ok(ic)
}

/// `--ic` argument: an inline state when it contains commas and no braces,
/// otherwise JSON text.
pub fn parse_ic_argument(s: &str) -> Result<InitialCondition> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        parse_ic_document(t)
    } else {
        Ok(InitialCondition {
            state: parse_inline_state(t)?,
            period: None,
            family: None,
            lp: None,
        })
    }
}

pub fn parse_orbit_record(s: &str) -> Result<OrbitRecord> {
    let rec: OrbitRecord =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("orbit record: {e}")))?;
    if !rec.ic.is_finite() || !(rec.period > 0.0) || !rec.period.is_finite() {
        return Err(Error::Parse(
            "orbit record needs a finite ic and a positive period".into(),
        ));
    }
    Ok(rec)
}

pub fn parse_family_kind(s: &str) -> Result<OrbitKind> {
    OrbitKind::from_str(s)
}

/// Tolerances and step controls read from a `key = value` file.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub integration_tol: Option<f64>,
    pub corrector_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub r_min: Option<f64>,
    pub samples: Option<usize>,
    pub ds: Option<f64>,
    pub ds_min: Option<f64>,
    pub ds_max: Option<f64>,
}

pub const CONFIG_KEYS: [&str; 8] = [
    "integration_tol",
    "corrector_tol",
    "max_iter",
    "r_min",
    "samples",
    "ds",
    "ds_min",
    "ds_max",
];

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Parse(format!("{key} must be positive, got {v}")))
    }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are ignored,
/// unknown or repeated keys are rejected.
pub fn parse_config(s: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = Vec::new();
    for (n, raw) in s.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if seen.contains(&key) {
            return Err(Error::Parse(format!("line {}: duplicate key '{key}'", n + 1)));
        }
        let ctx = format!("line {}: {key}", n + 1);
        match key {
            "integration_tol" => {
                let v = parse_f64(value, &ctx)?;
                if !(1e-14..=1e-6).contains(&v) {
                    return Err(Error::Parse(format!(
                        "{ctx}: {v:e} outside [1e-14, 1e-6]"
                    )));
                }
                cfg.integration_tol = Some(v);
            }
            "corrector_tol" => cfg.corrector_tol = Some(positive(&ctx, parse_f64(value, &ctx)?)?),
            "r_min" => cfg.r_min = Some(positive(&ctx, parse_f64(value, &ctx)?)?),
            "ds" => cfg.ds = Some(positive(&ctx, parse_f64(value, &ctx)?)?),
            "ds_min" => cfg.ds_min = Some(positive(&ctx, parse_f64(value, &ctx)?)?),
            "ds_max" => cfg.ds_max = Some(positive(&ctx, parse_f64(value, &ctx)?)?),
            "max_iter" | "samples" => {
                let v = usize::from_str(value)
                    .map_err(|_| Error::Parse(format!("{ctx}: '{value}' is not a count")))?;
                if v == 0 {
                    return Err(Error::Parse(format!("{ctx}: must be at least 1")));
                }
                if key == "max_iter" {
                    cfg.max_iter = Some(v);
                } else {
                    cfg.samples = Some(v);
                }
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key '{key}' (known: {})",
                    n + 1,
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        seen.push(key);
    }
    Ok(cfg)
}

// Numbers use `{:?}`: shortest round-trip digits, with an exponent for very
// small or large magnitudes.
const STATE_HEADER: &str = "x,y,z,X,Y,Z";

fn push_state(out: &mut String, s: &RotState) {
    let a = s.to_array();
    let _ = write!(out, "{:?},{:?},{:?},{:?},{:?},{:?}", a[0], a[1], a[2], a[3], a[4], a[5]);
}

/// Trajectory table `t,x,y,z,X,Y,Z,H`.
pub fn trajectory_csv(rows: &[(f64, RotState, f64)]) -> String {
    let mut out = format!("t,{STATE_HEADER},H\n");
    for (t, s, h) in rows {
        let _ = write!(out, "{t:?},");
        push_state(&mut out, s);
        let _ = writeln!(out, ",{h:?}");
    }
    out
}

/// Analytic orbit table `ell,x,y,z,X,Y,Z,H`.
pub fn synthesized_csv(orbit: &SynthesizedOrbit) -> Result<String> {
    let mut out = format!("ell,{STATE_HEADER},H\n");
    for smp in &orbit.samples {
        let _ = write!(out, "{:?},", smp.ell);
        push_state(&mut out, &smp.state);
        let _ = writeln!(out, ",{:?}", hamiltonian(&smp.state)?);
    }
    Ok(out)
}

/// Family table `energy,period,s1_scaled,s2_scaled` followed by the raw data.
pub fn family_csv(members: &[PeriodicOrbit]) -> String {
    let mut out = format!("energy,period,s1_scaled,s2_scaled,s1,s2,{STATE_HEADER},residual\n");
    for m in members {
        let (a, b) = m.scaled_indices();
        let _ = write!(out, "{:?},{:?},{a:?},{b:?},{:?},{:?},", m.energy, m.period, m.s1, m.s2);
        push_state(&mut out, &m.ic);
        let _ = writeln!(out, ",{:?}", m.residual);
    }
    out
}

pub fn equilibria_csv(eqs: &[ReducedEquilibrium]) -> String {
    let mut out = String::from("family,orbit,I1,I2,I3,Lp,stability,energy\n");
    for e in eqs {
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{:?},{:?},{},{:?}",
            e.family.label(),
            e.orbit_kind,
            e.point.i1,
            e.point.i2,
            e.point.i3,
            e.point.lp,
            match e.stability {
                crate::hopf::Stability::Elliptic => "elliptic",
                crate::hopf::Stability::Hyperbolic => "hyperbolic",
            },
            crate::hopf::reduced_hamiltonian(&e.point)
        );
    }
    out
}

/// Level-curve samples `h,branch,I1,I2,I3`.
pub fn level_curve_csv(points: &[LevelPoint]) -> String {
    let mut out = String::from("h,branch,I1,I2,I3\n");
    for p in points {
        let _ = writeln!(
            out,
            "{:?},{},{:?},{:?},{:?}",
            p.h, p.branch, p.point.i1, p.point.i2, p.point.i3
        );
    }
    out
}
