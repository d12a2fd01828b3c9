//! Exact coefficient tables.
//!
//! Every coefficient of the normal-form chain is a rational function of the
//! planar frequency of the form `(c + w·ω²)/den` with integer `c`, `w`, `den`.
//! Keeping them as integers makes the tables auditable line by line; they are
//! turned into floats once, inside [`crate::linear::ModelConstants`].

use serde::Serialize;

/// `(constant + omega2·ω²) / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OmegaRational {
    pub constant: i64,
    pub omega2: i64,
    pub denominator: i64,
}

impl OmegaRational {
    pub const fn new(constant: i64, omega2: i64, denominator: i64) -> Self {
        OmegaRational {
            constant,
            omega2,
            denominator,
        }
    }

    pub const fn int(n: i64) -> Self {
        OmegaRational::new(n, 0, 1)
    }

    pub const fn scale(self, n: i64) -> Self {
        OmegaRational::new(self.constant * n, self.omega2 * n, self.denominator)
    }

    pub fn value(&self, omega2: f64) -> f64 {
        (self.constant as f64 + self.omega2 as f64 * omega2) / self.denominator as f64
    }
}

/// Monomial `coeff · y^a Y^b z^c Z^d` in center-manifold variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmMonomial {
    pub coeff: OmegaRational,
    /// Powers of (y, Y, z, Z).
    pub powers: [u8; 4],
}

/// Monomial `coeff · s^a d^b` in the Lissajous state functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdMonomial {
    pub coeff: OmegaRational,
    pub s: u8,
    pub d: u8,
}

const fn cm(coeff: OmegaRational, powers: [u8; 4]) -> CmMonomial {
    CmMonomial { coeff, powers }
}

const fn sd(coeff: OmegaRational, s: u8, d: u8) -> SdMonomial {
    SdMonomial { coeff, s, d }
}

const fn r(c: i64, w: i64, den: i64) -> OmegaRational {
    OmegaRational::new(c, w, den)
}

const fn n(k: i64) -> OmegaRational {
    OmegaRational::int(k)
}

pub fn eval_cm(poly: &[CmMonomial], omega2: f64, v: [f64; 4]) -> f64 {
    poly.iter()
        .map(|m| {
            let mut t = m.coeff.value(omega2);
            for (x, p) in v.iter().zip(m.powers) {
                t *= x.powi(p as i32);
            }
            t
        })
        .sum()
}

pub fn eval_sd(poly: &[SdMonomial], omega2: f64, s: f64, d: f64) -> f64 {
    poly.iter()
        .map(|m| m.coeff.value(omega2) * s.powi(m.s as i32) * d.powi(m.d as i32))
        .sum()
}

/// Polynomial in (y, Y, z, Z) with floating coefficients (prefactors folded in).
#[derive(Debug, Clone, PartialEq)]
pub struct CmPoly(pub Vec<(f64, [i32; 4])>);

impl CmPoly {
    pub fn build(poly: &[CmMonomial], omega2: f64, prefactor: f64) -> Self {
        CmPoly(
            poly.iter()
                .map(|m| {
                    let p = m.powers.map(|k| k as i32);
                    (prefactor * m.coeff.value(omega2), p)
                })
                .collect(),
        )
    }

    pub fn eval(&self, v: [f64; 4]) -> f64 {
        self.0
            .iter()
            .map(|(c, p)| c * v[0].powi(p[0]) * v[1].powi(p[1]) * v[2].powi(p[2]) * v[3].powi(p[3]))
            .sum()
    }

    /// Gradient with respect to (y, Y, z, Z).
    pub fn gradient(&self, v: [f64; 4]) -> [f64; 4] {
        let mut g = [0.0; 4];
        for (c, p) in &self.0 {
            for k in 0..4 {
                if p[k] == 0 {
                    continue;
                }
                let mut t = c * p[k] as f64;
                for j in 0..4 {
                    let e = if j == k { p[j] - 1 } else { p[j] };
                    t *= v[j].powi(e);
                }
                g[k] += t;
            }
        }
        g
    }
}

/// Polynomial in (s, d) with floating coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SdPoly(pub Vec<(f64, i32, i32)>);

impl SdPoly {
    pub fn build(poly: &[SdMonomial], omega2: f64, prefactor: f64) -> Self {
        SdPoly(
            poly.iter()
                .map(|m| (prefactor * m.coeff.value(omega2), m.s as i32, m.d as i32))
                .collect(),
        )
    }

    pub fn eval(&self, s: f64, d: f64) -> f64 {
        self.0.iter().map(|(c, a, b)| c * s.powi(*a) * d.powi(*b)).sum()
    }

    /// Evaluate `P(s, d)/(s d)`, requiring every monomial to carry at least
    /// one power of `s` and of `d` for the limit to exist; used with
    /// nonzero `s`, `d` otherwise.
    pub fn eval_over_sd(&self, s: f64, d: f64) -> f64 {
        self.0
            .iter()
            .map(|(c, a, b)| c * s.powi(*a - 1) * d.powi(*b - 1))
            .sum()
    }
}

// --- center manifold -------------------------------------------------------

/// Cubic part, to be multiplied by `ρ²τ/56`.
pub const C1: &[CmMonomial] = &[
    cm(r(-27, 0, 2), [2, 1, 0, 0]),
    cm(r(15, -6, 1), [0, 1, 2, 0]),
    cm(r(19, -4, 9), [0, 3, 0, 0]),
];

/// Quartic part, to be multiplied by `ρ`.
pub const C2: &[CmMonomial] = &[
    cm(r(-81 * 22707, -81 * 1322, 1083488), [4, 0, 0, 0]),
    cm(r(27 * 22588, 27 * 643, 270872), [2, 2, 0, 0]),
    cm(r(-27 * -16, -27, 812), [1, 1, 1, 1]),
    cm(r(-27 * -19773, -27 * 36962, 1122184), [2, 0, 2, 0]),
    cm(r(27 * 36, 27 * 5, 1624), [2, 0, 0, 2]),
    cm(r(-445831, 82144, 2437848), [0, 4, 0, 0]),
    cm(r(9 * -137470, 9 * 55909, 561092), [0, 2, 2, 0]),
    cm(r(3 * -16, 3, 812), [0, 2, 0, 2]),
    cm(r(27 * -225, 27 * 34, 1624), [0, 0, 4, 0]),
    cm(r(27 * 10, 27 * 3, 812), [0, 0, 2, 2]),
];

/// First quadratic generator of the saddle corrections.
pub const DELTA1: &[CmMonomial] = &[
    cm(r(31536, 12109, 1393056), [2, 0, 0, 0]),
    cm(r(2106, 107, 696528), [0, 2, 0, 0]),
    cm(r(918, 113, 29232), [0, 0, 2, 0]),
    cm(r(81, 4, 14616), [0, 0, 0, 2]),
];

/// Second quadratic generator of the saddle corrections.
pub const DELTA2: &[CmMonomial] = &[
    cm(r(9 * 159, 9 * 13, 38696), [1, 1, 0, 0]),
    cm(r(3 * 10, 3 * 3, 1624), [0, 0, 1, 1]),
];

// --- Lissajous Hamiltonian -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

/// One harmonic `Q(s, d) · trig(g_mult·g + l_mult·ℓ)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HarmonicEntry {
    pub label: &'static str,
    pub g_mult: i32,
    pub l_mult: i32,
    pub trig: Trig,
    pub poly: &'static [SdMonomial],
}

const fn h(
    label: &'static str,
    g_mult: i32,
    l_mult: i32,
    trig: Trig,
    poly: &'static [SdMonomial],
) -> HarmonicEntry {
    HarmonicEntry {
        label,
        g_mult,
        l_mult,
        trig,
        poly,
    }
}

/// First-order cosine terms, prefactor `¼δω²`.
pub const A1_COS: &[HarmonicEntry] = &[
    h("Q_{1,0,-2}", 0, -2, Trig::Cos, &[sd(n(1), 1, 1)]),
    h("Q_{1,0,0}", 0, 0, Trig::Cos, &[sd(n(-1), 0, 2), sd(n(-1), 2, 0)]),
    h("Q_{1,0,2}", 0, 2, Trig::Cos, &[sd(n(1), 1, 1)]),
    h("Q_{1,2,-2}", 2, -2, Trig::Cos, &[sd(n(1), 0, 2)]),
    h("Q_{1,2,0}", 2, 0, Trig::Cos, &[sd(n(-2), 1, 1)]),
    h("Q_{1,2,2}", 2, 2, Trig::Cos, &[sd(n(1), 2, 0)]),
];

/// First-order sine terms, prefactor `(3/448)ρ²τω`.
pub const A1_SIN: &[HarmonicEntry] = &[
    h("Q_{1,1,-3}", 1, -3, Trig::Sin, &[sd(r(7, -10, 1), 1, 2)]),
    h(
        "Q_{1,1,-1}",
        1,
        -1,
        Trig::Sin,
        &[sd(r(86, -20, 1), 2, 1), sd(r(3, 6, 1), 0, 3)],
    ),
    h(
        "Q_{1,1,1}",
        1,
        1,
        Trig::Sin,
        &[sd(r(86, -20, 1), 1, 2), sd(r(3, 6, 1), 3, 0)],
    ),
    h("Q_{1,1,3}", 1, 3, Trig::Sin, &[sd(r(7, -10, 1), 2, 1)]),
    h("Q_{1,3,-3}", 3, -3, Trig::Sin, &[sd(r(11, -2, 1), 0, 3)]),
    h("Q_{1,3,-1}", 3, -1, Trig::Sin, &[sd(r(-43, 10, 1), 1, 2)]),
    h("Q_{1,3,1}", 3, 1, Trig::Sin, &[sd(r(-43, 10, 1), 2, 1)]),
    h("Q_{1,3,3}", 3, 3, Trig::Sin, &[sd(r(11, -2, 1), 3, 0)]),
];

const Q200_DS: OmegaRational = r(-9 * 29767905, 9 * 454826, 4);
const Q201: OmegaRational = r(-3 * 7248069, 3 * 4601090, 2);
const Q212: OmegaRational = r(13096395, 4343546, 1);
const Q211_DS: OmegaRational = r(3 * 56290797, -3 * 12398698, 1);
const Q211_P: OmegaRational = r(-45973827, 8226998, 1);
const Q210: OmegaRational = r(9 * 5859465, -9 * 1640482, 1);
const Q222: OmegaRational = r(35821341, -9394466, 4);
const Q221: OmegaRational = r(3324843, -622142, 1);

/// Second-order cosine terms `Q_{2,i,j} cos(2i·g + 2j·ℓ)`, prefactor `9ρ/62842304`.
/// The `±j` pairs of the published layout are listed as separate rows.
pub const A2_COS: &[HarmonicEntry] = &[
    h("Q_{2,0,-2}", 0, -4, Trig::Cos, &[sd(Q200_DS, 2, 2)]),
    h("Q_{2,0,-1}", 0, -2, Trig::Cos, &[sd(Q201, 1, 3), sd(Q201, 3, 1)]),
    h(
        "Q_{2,0,0}",
        0,
        0,
        Trig::Cos,
        &[
            sd(r(3 * 54449757, -3 * 4733570, 4), 0, 4),
            sd(r(3 * 54449757, -3 * 4733570, 4), 4, 0),
            sd(r(-27 * 7866699, 27 * 1473422, 1), 2, 2),
        ],
    ),
    h("Q_{2,0,1}", 0, 2, Trig::Cos, &[sd(Q201, 1, 3), sd(Q201, 3, 1)]),
    h("Q_{2,0,2}", 0, 4, Trig::Cos, &[sd(Q200_DS, 2, 2)]),
    h("Q_{2,1,-2}", 2, -4, Trig::Cos, &[sd(Q212, 1, 3)]),
    h(
        "Q_{2,1,-1}",
        2,
        -2,
        Trig::Cos,
        &[sd(Q211_DS, 2, 2), sd(Q211_P, 0, 4)],
    ),
    h("Q_{2,1,0}", 2, 0, Trig::Cos, &[sd(Q210, 1, 3), sd(Q210, 3, 1)]),
    h(
        "Q_{2,1,1}",
        2,
        2,
        Trig::Cos,
        &[sd(Q211_DS, 2, 2), sd(Q211_P, 4, 0)],
    ),
    h("Q_{2,1,2}", 2, 4, Trig::Cos, &[sd(Q212, 3, 1)]),
    h("Q_{2,2,-2}", 4, -4, Trig::Cos, &[sd(Q222, 0, 4)]),
    h("Q_{2,2,-1}", 4, -2, Trig::Cos, &[sd(Q221, 1, 3)]),
    h(
        "Q_{2,2,0}",
        4,
        0,
        Trig::Cos,
        &[sd(r(-27 * 6951883, 27 * 1658222, 2), 2, 2)],
    ),
    h("Q_{2,2,1}", 4, 2, Trig::Cos, &[sd(Q221, 3, 1)]),
    h("Q_{2,2,2}", 4, 4, Trig::Cos, &[sd(Q222, 4, 0)]),
];

// --- short-period corrections ----------------------------------------------

pub const C13: OmegaRational = r(-256, 7, 3);
pub const C31: OmegaRational = r(-184, 43, 1);
pub const C33: OmegaRational = r(-32, 11, 1);
/// `c31 − 4 c33`
pub const C0: OmegaRational = r(-184 + 128, 43 - 44, 1);
/// `5 c31 − 36 c33`
pub const C2C: OmegaRational = r(-5 * 184 + 36 * 32, 5 * 43 - 36 * 11, 1);

/// Row of the short-period correction table. `l_col` holds `L_{i,j}/(4sdω)`;
/// `ell` and `g` hold the angle coefficients before division by `4sd`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrectionRow {
    pub label: &'static str,
    pub g_mult: i32,
    pub l_mult: i32,
    pub l_col: &'static [SdMonomial],
    pub ell: &'static [SdMonomial],
    pub g: &'static [SdMonomial],
}

const fn row(
    label: &'static str,
    g_mult: i32,
    l_mult: i32,
    l_col: &'static [SdMonomial],
    ell: &'static [SdMonomial],
    g: &'static [SdMonomial],
) -> CorrectionRow {
    CorrectionRow {
        label,
        g_mult,
        l_mult,
        l_col,
        ell,
        g,
    }
}

/// Rows with argument `2i·g + 2ℓ`, prefactor `δ/4`.
pub const SP_FIRST: &[CorrectionRow] = &[
    row(
        "(2,-1)",
        -2,
        2,
        &[sd(n(-1), 0, 2)],
        &[sd(n(1), 1, 1)],
        &[sd(n(-1), 1, 1)],
    ),
    row(
        "(2,0)",
        0,
        2,
        &[sd(n(-2), 1, 1)],
        &[sd(n(1), 0, 2), sd(n(1), 2, 0)],
        &[sd(n(1), 0, 2), sd(n(-1), 2, 0)],
    ),
    row(
        "(2,1)",
        2,
        2,
        &[sd(n(-1), 2, 0)],
        &[sd(n(1), 1, 1)],
        &[sd(n(1), 1, 1)],
    ),
];

/// Rows with argument `m·g + n·ℓ`, prefactor `ρ²τω/4032`.
pub const SP_SECOND: &[CorrectionRow] = &[
    row(
        "(1,-3)",
        1,
        -3,
        &[sd(C13.scale(-3), 1, 2)],
        &[sd(C13, 0, 3), sd(C13.scale(2), 2, 1)],
        &[sd(C13, 0, 3), sd(C13.scale(-2), 2, 1)],
    ),
    row(
        "(1,-1)",
        1,
        -1,
        &[sd(C0.scale(3), 0, 3), sd(C31.scale(-2), 2, 1)],
        &[sd(C31.scale(2), 3, 0), sd(C2C.scale(-1), 1, 2)],
        &[
            sd(C31.scale(8), 1, 2),
            sd(C31.scale(-2), 3, 0),
            sd(C2C, 1, 2),
        ],
    ),
    row(
        "(1,1)",
        1,
        1,
        &[sd(C0.scale(3), 3, 0), sd(C31.scale(-2), 1, 2)],
        &[sd(C2C, 2, 1), sd(C31.scale(-2), 0, 3)],
        &[
            sd(C31.scale(8), 2, 1),
            sd(C2C, 2, 1),
            sd(C31.scale(-2), 0, 3),
        ],
    ),
    row(
        "(1,3)",
        1,
        3,
        &[sd(C13.scale(-3), 2, 1)],
        &[sd(C13.scale(-2), 1, 2), sd(C13.scale(-1), 3, 0)],
        &[sd(C13, 3, 0), sd(C13.scale(-2), 1, 2)],
    ),
    row(
        "(3,-3)",
        3,
        -3,
        &[sd(C33.scale(-1), 0, 3)],
        &[sd(C33, 1, 2)],
        &[sd(C33.scale(-1), 1, 2)],
    ),
    row(
        "(3,-1)",
        3,
        -1,
        &[sd(C31, 1, 2)],
        &[sd(C31.scale(-1), 0, 3), sd(C31.scale(-2), 2, 1)],
        &[sd(C31.scale(2), 2, 1), sd(C31.scale(-1), 0, 3)],
    ),
    row(
        "(3,1)",
        3,
        1,
        &[sd(C31, 2, 1)],
        &[sd(C31.scale(2), 1, 2), sd(C31, 3, 0)],
        &[sd(C31.scale(2), 1, 2), sd(C31.scale(-1), 3, 0)],
    ),
    row(
        "(3,3)",
        3,
        3,
        &[sd(C33.scale(-1), 3, 0)],
        &[sd(C33.scale(-1), 2, 1)],
        &[sd(C33.scale(-1), 2, 1)],
    ),
];

// --- normalized Hamiltonian constants --------------------------------------

/// `k0 = (ω² + 2)ρ / 6733104`, kept apart since it carries the factor `ρ`.
pub const K0: OmegaRational = r(2, 1, 6733104);
/// `k1..k4` as multiples of `k0`.
pub const K1: OmegaRational = r(6829135, -609646, 16);
pub const K2: OmegaRational = r(126184, -9583, 1);
pub const K3: OmegaRational = r(-3 * 439957, 3 * 103954, 4);
pub const K4: OmegaRational = r(3 * 7293079, -3 * 1280862, 4);
