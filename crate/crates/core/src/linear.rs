//! Linear dynamics about the libration point: characteristic exponents,
//! detuning, the canonical decoupling matrix `A`, and the shared record of
//! model constants.
//!
//! Symplectic convention throughout: coordinates `(x, y)`, momenta `(X, Y)`,
//! `J = [[0, I], [−I, 0]]`.

use std::sync::OnceLock;

use nalgebra::{Complex, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{hill_radius, LocalState};
use crate::tables::{self, CmPoly, CorrectionRow, HarmonicEntry, SdPoly, Trig};

/// Harmonic with prefactor folded into its polynomial.
#[derive(Debug, Clone)]
pub struct Harmonic {
    pub g_mult: f64,
    pub l_mult: f64,
    pub trig: Trig,
    pub poly: SdPoly,
}

/// Short-period correction row with its prefactor folded in.
#[derive(Debug, Clone)]
pub struct SpRow {
    pub g_mult: f64,
    pub l_mult: f64,
    pub l_col: SdPoly,
    pub ell: SdPoly,
    pub g: SdPoly,
}

#[derive(Debug, Clone)]
pub struct ModelConstants {
    pub rho: f64,
    pub lambda: f64,
    pub omega: f64,
    pub nu: f64,
    pub delta: f64,
    pub delta_star: f64,
    pub sigma: f64,
    pub tau: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub a: Matrix4<f64>,
    pub a_inv: Matrix4<f64>,
    pub(crate) c1: CmPoly,
    pub(crate) c2: CmPoly,
    pub(crate) delta1: CmPoly,
    pub(crate) delta2: CmPoly,
    pub(crate) a1: Vec<Harmonic>,
    pub(crate) a2: Vec<Harmonic>,
    /// Rows with argument `2i·g + 2ℓ`; prefactor `δ/4`.
    pub(crate) sp_first: Vec<SpRow>,
    /// Rows with argument `m·g + n·ℓ`; prefactor `ρ²τω/4032`.
    pub(crate) sp_second: Vec<SpRow>,
}

fn harmonics(entries: &[HarmonicEntry], w2: f64, pre: f64) -> Vec<Harmonic> {
    entries
        .iter()
        .map(|e| Harmonic {
            g_mult: e.g_mult as f64,
            l_mult: e.l_mult as f64,
            trig: e.trig,
            poly: SdPoly::build(e.poly, w2, pre),
        })
        .collect()
}

fn sp_rows(rows: &[CorrectionRow], w2: f64, pre: f64) -> Vec<SpRow> {
    rows.iter()
        .map(|r| SpRow {
            g_mult: r.g_mult as f64,
            l_mult: r.l_mult as f64,
            l_col: SdPoly::build(r.l_col, w2, pre),
            ell: SdPoly::build(r.ell, w2, pre),
            g: SdPoly::build(r.g, w2, pre),
        })
        .collect()
}

/// 4×4 symplectic unit in `(x, y, X, Y)` ordering.
pub fn symplectic_j4() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

/// Matrix of the planar linear system `d/dt (x, y, X, Y)`.
pub fn planar_linear_matrix() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 1.0, 0.0, //
        -1.0, 0.0, 0.0, 1.0, //
        8.0, 0.0, 0.0, 1.0, //
        0.0, -4.0, -1.0, 0.0,
    )
}

/// Decoupling matrix with unit column normalization; columns map
/// `(x1, y1, X1, Y1)`.
fn unnormalized_a(lambda: f64, omega: f64) -> Matrix4<f64> {
    let l2 = lambda * lambda;
    let w2 = omega * omega;
    Matrix4::new(
        2.0 * lambda, 0.0, -2.0 * lambda, 2.0,
        l2 - 9.0, -(w2 + 9.0), l2 - 9.0, 0.0,
        l2 + 9.0, 9.0 - w2, l2 + 9.0, 0.0,
        lambda * (l2 - 7.0), 0.0, lambda * (7.0 - l2), -(w2 + 7.0),
    )
}

impl ModelConstants {
    pub fn build() -> Result<Self> {
        let rho = hill_radius();
        let s7 = 7f64.sqrt();
        let lambda = (2.0 * s7 + 1.0).sqrt();
        let omega = (2.0 * s7 - 1.0).sqrt();
        let nu = 2.0;
        let w2 = omega * omega;
        let delta = 1.0 - (nu / omega).powi(2);
        let delta_star = 0.5 * delta * (1.0 + 0.25 * delta);

        // Column normalizations follow from requiring AᵀJA = J: the
        // unnormalized template gives ⟨u_x1, J u_X1⟩ = σ² and ⟨u_y1, J u_Y1⟩ = τ².
        let raw = unnormalized_a(lambda, omega);
        let g = raw.transpose() * symplectic_j4() * raw;
        let (s2, t2) = (g[(0, 2)], g[(1, 3)]);
        if !(s2 > 0.0 && t2 > 0.0) {
            return Err(Error::Domain(format!(
                "canonical normalization has no positive solution (σ² = {s2}, τ² = {t2})"
            )));
        }
        let sigma = s2.sqrt();
        let tau = t2.sqrt();
        let mut a = raw;
        for i in 0..4 {
            a[(i, 0)] /= sigma;
            a[(i, 2)] /= sigma;
            a[(i, 1)] /= tau;
            a[(i, 3)] /= tau;
        }
        // inverse of a symplectic matrix: A⁻¹ = −J Aᵀ J
        let j = symplectic_j4();
        let a_inv = -j * a.transpose() * j;

        let k0 = tables::K0.value(w2) * rho;
        let k1 = tables::K1.value(w2) * k0;
        let k2 = tables::K2.value(w2) * k0;
        let k3 = tables::K3.value(w2) * k0;
        let k4 = tables::K4.value(w2) * k0;

        let rho2 = rho * rho;
        let mut a1 = harmonics(tables::A1_COS, w2, 0.25 * delta * w2);
        a1.extend(harmonics(
            tables::A1_SIN,
            w2,
            3.0 / 448.0 * rho2 * tau * omega,
        ));
        let a2 = harmonics(tables::A2_COS, w2, 9.0 * rho / 62842304.0);

        Ok(ModelConstants {
            rho,
            lambda,
            omega,
            nu,
            delta,
            delta_star,
            sigma,
            tau,
            k0,
            k1,
            k2,
            k3,
            k4,
            a,
            a_inv,
            c1: CmPoly::build(tables::C1, w2, rho2 * tau / 56.0),
            c2: CmPoly::build(tables::C2, w2, rho),
            delta1: CmPoly::build(tables::DELTA1, w2, 1.0),
            delta2: CmPoly::build(tables::DELTA2, w2, 1.0),
            a1,
            a2,
            sp_first: sp_rows(tables::SP_FIRST, w2, 0.25 * delta),
            sp_second: sp_rows(tables::SP_SECOND, w2, rho2 * tau * omega / 4032.0),
        })
    }

    pub fn omega2(&self) -> f64 {
        self.omega * self.omega
    }
}

/// Shared constants, built on first use.
pub fn constants() -> &'static ModelConstants {
    static CELL: OnceLock<ModelConstants> = OnceLock::new();
    CELL.get_or_init(|| ModelConstants::build().expect("model constants are well defined"))
}

/// Variables after the linear decoupling: `(x1, X1)` span the saddle,
/// `(y1, Y1)` the planar center and `(z1, Z1)` the vertical center.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoupledState {
    pub x1: f64,
    pub y1: f64,
    pub z1: f64,
    pub px1: f64,
    pub py1: f64,
    pub pz1: f64,
}

impl DecoupledState {
    pub fn to_array(&self) -> [f64; 6] {
        [self.x1, self.y1, self.z1, self.px1, self.py1, self.pz1]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        DecoupledState {
            x1: a[0],
            y1: a[1],
            z1: a[2],
            px1: a[3],
            py1: a[4],
            pz1: a[5],
        }
    }
}

/// Local → decoupled: `(x1, y1, X1, Y1) = A⁻¹(x, y, X, Y)`; `z`, `Z` unchanged.
pub fn t2_forward(l: &LocalState) -> DecoupledState {
    let c = constants();
    let v = c.a_inv * Vector4::new(l.x, l.y, l.px, l.py);
    DecoupledState {
        x1: v[0],
        y1: v[1],
        z1: l.z,
        px1: v[2],
        py1: v[3],
        pz1: l.pz,
    }
}

/// Decoupled → local: `(x, y, X, Y) = A(x1, y1, X1, Y1)`.
pub fn t2_inverse(d: &DecoupledState) -> LocalState {
    let c = constants();
    let v = c.a * Vector4::new(d.x1, d.y1, d.px1, d.py1);
    LocalState::new(v[0], v[1], d.z1, v[2], v[3], d.pz1)
}

/// Quadratic Hamiltonian in decoupled variables:
/// `λ x1 X1 + ½(Y1² + ω² y1²) + ½(Z1² + ν² z1²)`.
pub fn decoupled_quadratic(d: &DecoupledState) -> f64 {
    let c = constants();
    c.lambda * d.x1 * d.px1
        + 0.5 * (d.py1 * d.py1 + c.omega2() * d.y1 * d.y1)
        + 0.5 * (d.pz1 * d.pz1 + c.nu * c.nu * d.z1 * d.z1)
}

/// Eigenvalues of the planar linear system, sorted by (real, imaginary) part.
pub fn linear_eigenstructure() -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = planar_linear_matrix()
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}
