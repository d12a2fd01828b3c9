//! Lissajous variables for the 1:1 resonant oscillator, the Hamiltonian in
//! those variables, its average over the elliptic anomaly, and the
//! first-order short-period corrections between mean and osculating elements.

use serde::{Deserialize, Serialize};

use crate::center_manifold::CmState;
use crate::error::{Error, Result};
use crate::linear::{constants, Harmonic};
use crate::tables::{self, CorrectionRow, Trig};

/// Osculating Lissajous elements: elliptic anomaly `ell`, ellipse orientation
/// `g`, total action `L` and signed angular momentum `G` (`|G| ≤ L`).
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LissajousState {
    pub ell: f64,
    pub g: f64,
    pub L: f64,
    pub G: f64,
}

/// Mean (averaged) Lissajous elements.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanLissajousState {
    pub ell: f64,
    pub g: f64,
    pub L: f64,
    pub G: f64,
}

#[allow(non_snake_case)]
impl LissajousState {
    pub fn new(ell: f64, g: f64, L: f64, G: f64) -> Self {
        LissajousState { ell, g, L, G }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.ell, self.g, self.L, self.G]
    }
}

#[allow(non_snake_case)]
impl MeanLissajousState {
    pub fn new(ell: f64, g: f64, L: f64, G: f64) -> Self {
        MeanLissajousState { ell, g, L, G }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.ell, self.g, self.L, self.G]
    }

    /// Same numbers read as osculating elements.
    pub fn as_osculating(&self) -> LissajousState {
        LissajousState::new(self.ell, self.g, self.L, self.G)
    }
}

/// State functions `s = √((L+G)/(2ω))`, `d = √((L−G)/(2ω))`.
#[allow(non_snake_case)]
pub fn state_functions(L: f64, G: f64) -> Result<(f64, f64)> {
    if !(L >= 0.0) || !G.is_finite() || !L.is_finite() {
        return Err(Error::Domain(format!("action L = {L} must be finite and non-negative")));
    }
    let slack = 1e-12 * L.max(f64::MIN_POSITIVE);
    if G.abs() > L + slack {
        return Err(Error::Domain(format!("|G| = {} exceeds L = {L}", G.abs())));
    }
    let w = constants().omega;
    let s = ((L + G).max(0.0) / (2.0 * w)).sqrt();
    let d = ((L - G).max(0.0) / (2.0 * w)).sqrt();
    Ok((s, d))
}

pub fn lissajous_to_cm(s: &LissajousState) -> Result<CmState> {
    let (ss, dd) = state_functions(s.L, s.G)?;
    let w = constants().omega;
    let (sa, ca) = (s.g + s.ell).sin_cos();
    let (sb, cb) = (s.g - s.ell).sin_cos();
    Ok(CmState::new(
        ss * ca - dd * cb,
        ss * sa - dd * sb,
        -w * (ss * sa + dd * sb),
        w * (ss * ca + dd * cb),
    ))
}

/// Inverse of [`lissajous_to_cm`]. On circular states (`|G| = L`) the
/// orientation is undetermined; `g = 0` is reported and the whole phase goes
/// into `ell`.
pub fn cm_to_lissajous(c: &CmState) -> Result<LissajousState> {
    let w = constants().omega;
    // u = y + iz = s e^{iα} − d e^{iβ};  (Y + iZ)/(iω) = s e^{iα} + d e^{iβ}
    let (ur, ui) = (c.y2, c.z2);
    let (vr, vi) = (c.pz2 / w, -c.py2 / w);
    let (pr, pi) = (0.5 * (ur + vr), 0.5 * (ui + vi));
    let (qr, qi) = (0.5 * (vr - ur), 0.5 * (vi - ui));
    let s = pr.hypot(pi);
    let d = qr.hypot(qi);
    let scale = s + d;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Degenerate(
            "zero center-manifold state has no Lissajous elements".into(),
        ));
    }
    let l = w * (s * s + d * d);
    let gg = w * (s * s - d * d);
    let alpha = pi.atan2(pr);
    let beta = qi.atan2(qr);
    let (ell, g) = if d <= 1e-13 * scale {
        (alpha, 0.0)
    } else if s <= 1e-13 * scale {
        (-beta, 0.0)
    } else {
        (0.5 * (alpha - beta), 0.5 * (alpha + beta))
    };
    Ok(LissajousState::new(ell, g, l, gg))
}

fn harmonic_sum(terms: &[Harmonic], ell: f64, g: f64, s: f64, d: f64) -> f64 {
    terms
        .iter()
        .map(|h| {
            let arg = h.g_mult * g + h.l_mult * ell;
            let t = match h.trig {
                Trig::Cos => arg.cos(),
                Trig::Sin => arg.sin(),
            };
            h.poly.eval(s, d) * t
        })
        .sum()
}

/// First-order part `A1` of the Lissajous Hamiltonian.
pub fn first_order_term(s: &LissajousState) -> Result<f64> {
    let (ss, dd) = state_functions(s.L, s.G)?;
    Ok(harmonic_sum(&constants().a1, s.ell, s.g, ss, dd))
}

/// Second-order part `A2` of the Lissajous Hamiltonian.
pub fn second_order_term(s: &LissajousState) -> Result<f64> {
    let (ss, dd) = state_functions(s.L, s.G)?;
    Ok(harmonic_sum(&constants().a2, s.ell, s.g, ss, dd))
}

/// `ωL + A1 + A2/2`.
pub fn lissajous_hamiltonian(s: &LissajousState) -> Result<f64> {
    let w = constants().omega;
    Ok(w * s.L + first_order_term(s)? + 0.5 * second_order_term(s)?)
}

/// The three orders `(B0, B1, B2)` of the averaged Hamiltonian.
pub fn normalized_parts(m: &MeanLissajousState) -> Result<(f64, f64, f64)> {
    let c = constants();
    let (s, d) = state_functions(m.L, m.G)?;
    let w = c.omega;
    let b0 = w * m.L;
    let b1 = -0.25 * c.delta * w * (m.L + 2.0 * w * d * s * (2.0 * m.g).cos());
    let b2 = 2.0
        * (0.25 * c.delta * b1 - c.k1 * m.L * m.L
            + c.k2 * m.L * w * s * d * (2.0 * m.g).cos()
            - c.k3 * w * w * s * s * d * d * (4.0 * m.g).cos()
            + 0.25 * c.k4 * m.G * m.G);
    Ok((b0, b1, b2))
}

/// `B0 + B1 + B2/2`, independent of the mean anomaly.
pub fn normalized_hamiltonian(m: &MeanLissajousState) -> Result<f64> {
    let (b0, b1, b2) = normalized_parts(m)?;
    Ok(b0 + b1 + 0.5 * b2)
}

fn check_not_circular(l: f64, s: f64, d: f64) -> Result<()> {
    if !(s * d >= 1e-9 * l) || s * d == 0.0 {
        return Err(Error::Degenerate(format!(
            "short-period corrections are singular on circular states (s·d = {:e}, L = {l:e})",
            s * d
        )));
    }
    Ok(())
}

/// Corrections `(Δℓ, Δg, ΔL, ΔG)` evaluated at the given elements.
#[allow(non_snake_case)]
pub fn short_period_deltas(ell: f64, g: f64, L: f64, G: f64) -> Result<[f64; 4]> {
    let c = constants();
    let (s, d) = state_functions(L, G)?;
    check_not_circular(L, s, d)?;
    let w = c.omega;
    let mut out = [0.0; 4];
    for r in &c.sp_first {
        let arg = r.g_mult * g + r.l_mult * ell;
        let (sn, cs) = arg.sin_cos();
        let dl = w * r.l_col.eval(s, d);
        out[2] += dl * cs;
        out[3] += r.g_mult / r.l_mult * dl * cs;
        out[0] += 0.25 * r.ell.eval_over_sd(s, d) * sn;
        out[1] += 0.25 * r.g.eval_over_sd(s, d) * sn;
    }
    for r in &c.sp_second {
        let arg = r.g_mult * g + r.l_mult * ell;
        let (sn, cs) = arg.sin_cos();
        let dl = w * r.l_col.eval(s, d);
        out[2] += dl * sn;
        out[3] += r.g_mult / r.l_mult * dl * sn;
        out[0] += 0.25 * r.ell.eval_over_sd(s, d) * cs;
        out[1] += 0.25 * r.g.eval_over_sd(s, d) * cs;
    }
    Ok(out)
}

/// Mean → osculating elements.
pub fn short_period_corrections(m: &MeanLissajousState) -> Result<LissajousState> {
    let dl = short_period_deltas(m.ell, m.g, m.L, m.G)?;
    Ok(LissajousState::new(
        m.ell + dl[0],
        m.g + dl[1],
        m.L + dl[2],
        m.G + dl[3],
    ))
}

/// Osculating → mean elements, to first order.
pub fn inverse_short_period_corrections(s: &LissajousState) -> Result<MeanLissajousState> {
    let dl = short_period_deltas(s.ell, s.g, s.L, s.G)?;
    Ok(MeanLissajousState::new(
        s.ell - dl[0],
        s.g - dl[1],
        s.L - dl[2],
        s.G - dl[3],
    ))
}

/// Mean → osculating, skipping the corrections (with a warning) on
/// near-circular states where they are singular. The flag reports whether
/// corrections were applied.
pub fn to_osculating(m: &MeanLissajousState) -> Result<(LissajousState, bool)> {
    match short_period_corrections(m) {
        Ok(s) => Ok((s, true)),
        Err(Error::Degenerate(msg)) => {
            log::warn!("{msg}; using mean elements unchanged");
            Ok((m.as_osculating(), false))
        }
        Err(e) => Err(e),
    }
}

/// Correction-table entry whose division by `4sd` is unbounded in a circular limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularRow {
    pub row: &'static str,
    pub column: &'static str,
    /// `"d->0"` (`G → L`) or `"s->0"` (`G → −L`).
    pub limit: &'static str,
}

/// Scan the angle columns of the correction tables for entries lacking the
/// `s` or `d` factor needed to cancel the `1/(4sd)` divisor.
pub fn correction_singularities() -> Vec<SingularRow> {
    let mut out = Vec::new();
    let rows: Vec<&CorrectionRow> = tables::SP_FIRST.iter().chain(tables::SP_SECOND).collect();
    for r in rows {
        for (name, poly) in [("ell", r.ell), ("g", r.g)] {
            if poly.iter().any(|m| m.d == 0) {
                out.push(SingularRow {
                    row: r.label,
                    column: name,
                    limit: "d->0",
                });
            }
            if poly.iter().any(|m| m.s == 0) {
                out.push(SingularRow {
                    row: r.label,
                    column: name,
                    limit: "s->0",
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_when_g_equals_l() {
        let st = LissajousState::new(0.3, 0.2, 0.01, 0.01);
        let c = lissajous_to_cm(&st).unwrap();
        let (s, d) = state_functions(0.01, 0.01).unwrap();
        assert_eq!(d, 0.0);
        assert!((c.y2 - s * 0.5f64.cos()).abs() < 1e-16);
        assert!((c.z2 - s * 0.5f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn quadratic_identity_and_angular_momentum() {
        let w = constants().omega;
        let st = LissajousState::new(1.1, -0.7, 0.02, -0.006);
        let c = lissajous_to_cm(&st).unwrap();
        let q = 0.5 * (c.py2 * c.py2 + c.pz2 * c.pz2) + 0.5 * w * w * (c.y2 * c.y2 + c.z2 * c.z2);
        assert!((q - w * st.L).abs() < 1e-13 * w * st.L);
        let g = c.y2 * c.pz2 - c.z2 * c.py2;
        assert!((g - st.G).abs() < 1e-13 * st.L);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            lissajous_to_cm(&LissajousState::new(0.0, 0.0, 0.01, 0.02)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            cm_to_lissajous(&CmState::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn cm_roundtrip() {
        let st = LissajousState::new(0.4, 1.2, 0.03, 0.011);
        let back = cm_to_lissajous(&lissajous_to_cm(&st).unwrap()).unwrap();
        let c1 = lissajous_to_cm(&st).unwrap();
        let c2 = lissajous_to_cm(&back).unwrap();
        assert!((back.L - st.L).abs() < 1e-15);
        assert!((back.G - st.G).abs() < 1e-15);
        for (a, b) in c1.vars().iter().zip(c2.vars()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn circular_roundtrip_reports_zero_orientation() {
        let st = LissajousState::new(0.4, 1.2, 0.03, 0.03);
        let back = cm_to_lissajous(&lissajous_to_cm(&st).unwrap()).unwrap();
        assert_eq!(back.g, 0.0);
        assert!((back.ell - 1.6).abs() < 1e-12);
    }

    #[test]
    fn circular_b1() {
        let c = constants();
        let m = MeanLissajousState::new(0.0, 0.3, 0.01, 0.01);
        let (_, b1, _) = normalized_parts(&m).unwrap();
        assert!((b1 + 0.25 * c.delta * c.omega * 0.01).abs() < 1e-18);
    }

    #[test]
    fn normalized_is_pi_periodic_in_g() {
        let a = MeanLissajousState::new(0.0, 0.3, 0.05, 0.01);
        let b = MeanLissajousState::new(2.0, 0.3 + std::f64::consts::PI, 0.05, 0.01);
        let (ha, hb) = (
            normalized_hamiltonian(&a).unwrap(),
            normalized_hamiltonian(&b).unwrap(),
        );
        assert!((ha - hb).abs() < 1e-15);
    }

    #[test]
    fn circular_states_rejected_by_corrections() {
        let m = MeanLissajousState::new(0.0, 0.0, 0.01, 0.01);
        assert!(matches!(
            short_period_corrections(&m),
            Err(Error::Degenerate(_))
        ));
        let (s, applied) = to_osculating(&m).unwrap();
        assert!(!applied);
        assert_eq!(s, m.as_osculating());
    }

    #[test]
    fn singular_rows_reported() {
        let rows = correction_singularities();
        // (2,0) carries d² ± s² in both angle columns
        assert!(rows.iter().any(|r| r.row == "(2,0)" && r.column == "ell" && r.limit == "d->0"));
        assert!(rows.iter().any(|r| r.row == "(2,0)" && r.column == "g" && r.limit == "s->0"));
        // (3,3) is regular in both limits
        assert!(!rows.iter().any(|r| r.row == "(3,3)"));
    }
}
