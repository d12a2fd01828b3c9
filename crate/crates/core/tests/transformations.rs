mod common;

use std::f64::consts::PI;

use common::{loglog_slope, rel, rng, t3_relative_slope, t5_epsilon_slope};
use hill_libration::center_manifold::{
    cm_hamiltonian, cm_to_decoupled, cubic_part, delta1, delta2, detuned_split, quadratic_part,
    t3_inverse_corrections, CmState,
};
use hill_libration::hill::{expanded_hamiltonian, perturbation_term, LocalState};
use hill_libration::hopf::{reduced_hamiltonian, to_hopf};
use hill_libration::linear::{constants, symplectic_j4, t2_inverse, DecoupledState};
use hill_libration::lissajous::{
    first_order_term, inverse_short_period_corrections, lissajous_hamiltonian, lissajous_to_cm,
    normalized_hamiltonian, normalized_parts, second_order_term, short_period_corrections,
    short_period_deltas, LissajousState, MeanLissajousState,
};
use rand::Rng;

fn random_liss(r: &mut impl Rng, lmax: f64) -> LissajousState {
    let l = r.gen_range(0.01 * lmax..lmax);
    let g = r.gen_range(-0.95..0.95) * l;
    LissajousState::new(r.gen_range(0.0..2.0 * PI), r.gen_range(0.0..2.0 * PI), l, g)
}

#[test]
fn lissajous_tables_reproduce_center_manifold_hamiltonian() {
    let mut r = rng(11);
    for _ in 0..200 {
        let s = random_liss(&mut r, 0.3);
        let cm = lissajous_to_cm(&s).unwrap();
        let want = cm_hamiltonian(&cm);
        let got = lissajous_hamiltonian(&s).unwrap();
        assert!(rel(got, want) <= 1e-9, "{s:?}: {got} vs {want}");
    }
}

#[test]
fn cubic_table_is_the_substituted_cubic_term() {
    let mut r = rng(12);
    for _ in 0..200 {
        let c = CmState::new(
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
        );
        let d = DecoupledState {
            x1: 0.0,
            y1: c.y2,
            z1: c.z2,
            px1: 0.0,
            py1: c.py2,
            pz1: c.pz2,
        };
        let h1 = perturbation_term(1, &t2_inverse(&d)).unwrap();
        assert!((h1 - cubic_part(&c)).abs() <= 1e-9 * h1.abs().max(1e-12));
    }
}

#[test]
fn quadratic_identity_is_omega_l() {
    let mut r = rng(13);
    let w = constants().omega;
    for _ in 0..500 {
        let s = random_liss(&mut r, 1.0);
        let cm = lissajous_to_cm(&s).unwrap();
        let (principal, _) = detuned_split(&cm);
        assert!(rel(principal, w * s.L) <= 1e-13);
        // the full quadratic part carries the vertical detuning
        let detune = 0.5 * constants().omega2() * constants().delta * cm.z2 * cm.z2;
        assert!(rel(quadratic_part(&cm) + detune, w * s.L) <= 1e-13);
    }
}

#[test]
fn symplectic_normalization_matrix() {
    let c = constants();
    let j = symplectic_j4();
    assert!((c.a.transpose() * j * c.a - j).amax() <= 1e-12);
    assert!((c.a * c.a_inv - nalgebra::Matrix4::identity()).amax() <= 1e-13);
}

#[test]
fn average_of_first_order_term_is_b1() {
    let mut r = rng(14);
    let n = 64;
    for _ in 0..50 {
        let s = random_liss(&mut r, 0.5);
        let avg: f64 = (0..n)
            .map(|k| {
                let l = 2.0 * PI * k as f64 / n as f64;
                first_order_term(&LissajousState::new(l, s.g, s.L, s.G)).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        let (_, b1, _) = normalized_parts(&MeanLissajousState::new(0.0, s.g, s.L, s.G)).unwrap();
        assert!((avg - b1).abs() <= 1e-12 * b1.abs().max(1e-3));
    }
}

/// Zero-average antiderivative of `A1` in `ℓ`, divided by `ω`, from a
/// discrete Fourier projection over `ℓ` (exact for the low harmonics of `A1`).
fn generator(ell: f64, g: f64, l: f64, gg: f64) -> f64 {
    let n = 32;
    let w = constants().omega;
    let samples: Vec<f64> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            first_order_term(&LissajousState::new(t, g, l, gg)).unwrap()
        })
        .collect();
    let mut out = 0.0;
    for m in 1..=6 {
        let (mut a, mut b) = (0.0, 0.0);
        for (k, v) in samples.iter().enumerate() {
            let t = 2.0 * PI * k as f64 / n as f64;
            a += v * (m as f64 * t).cos();
            b += v * (m as f64 * t).sin();
        }
        a *= 2.0 / n as f64;
        b *= 2.0 / n as f64;
        let mf = m as f64;
        out += (a * (mf * ell).sin() - b * (mf * ell).cos()) / mf;
    }
    out / w
}

#[test]
fn correction_table_is_generator_gradient() {
    let mut r = rng(15);
    for _ in 0..20 {
        let s = random_liss(&mut r, 0.3);
        let (l, g, ll, gg) = (s.ell, s.g, s.L, s.G);
        let h = 1e-6 * ll;
        let ha = 1e-5;
        let want = [
            (generator(l, g, ll + h, gg) - generator(l, g, ll - h, gg)) / (2.0 * h),
            (generator(l, g, ll, gg + h) - generator(l, g, ll, gg - h)) / (2.0 * h),
            -(generator(l + ha, g, ll, gg) - generator(l - ha, g, ll, gg)) / (2.0 * ha),
            -(generator(l, g + ha, ll, gg) - generator(l, g - ha, ll, gg)) / (2.0 * ha),
        ];
        let got = short_period_deltas(l, g, ll, gg).unwrap();
        let scale = [1.0, 1.0, ll, ll];
        for k in 0..4 {
            assert!(
                (got[k] - want[k]).abs() <= 1e-6 * scale[k],
                "component {k}: {} vs {}",
                got[k],
                want[k]
            );
        }
    }
}

fn poisson(
    f: &dyn Fn(f64, f64, f64, f64) -> f64,
    h: &dyn Fn(f64, f64, f64, f64) -> f64,
    v: [f64; 4],
) -> f64 {
    let d = |fun: &dyn Fn(f64, f64, f64, f64) -> f64, i: usize| {
        let e = if i < 2 { 1e-5 } else { 1e-6 * v[2] };
        let mut p = v;
        let mut m = v;
        p[i] += e;
        m[i] -= e;
        (fun(p[0], p[1], p[2], p[3]) - fun(m[0], m[1], m[2], m[3])) / (2.0 * e)
    };
    d(f, 0) * d(h, 2) - d(f, 2) * d(h, 0) + d(f, 1) * d(h, 3) - d(f, 3) * d(h, 1)
}

#[test]
fn second_order_average_matches_normalized_hamiltonian() {
    let w = constants().omega;
    let a1 = |l: f64, g: f64, ll: f64, gg: f64| {
        first_order_term(&LissajousState::new(l, g, ll, gg)).unwrap()
    };
    let a2 = |l: f64, g: f64, ll: f64, gg: f64| {
        second_order_term(&LissajousState::new(l, g, ll, gg)).unwrap()
    };
    let n = 32;
    for (ll, frac, g) in [(0.02, 0.3, 0.4), (0.05, -0.5, 1.1), (0.1, 0.1, 2.0)] {
        let gg = frac * ll;
        let mut sum = 0.0;
        for k in 0..n {
            let l = 2.0 * PI * k as f64 / n as f64;
            sum += a1(l, g, ll, gg) + 0.5 * a2(l, g, ll, gg)
                + 0.5 * poisson(&a1, &generator, [l, g, ll, gg]);
        }
        let numeric = w * ll + sum / n as f64;
        let m = MeanLissajousState::new(0.0, g, ll, gg);
        let (_, _, b2) = normalized_parts(&m).unwrap();
        let b = normalized_hamiltonian(&m).unwrap();
        assert!((numeric - b).abs() <= 1e-6 * b2.abs(), "{numeric} vs {b}");
    }
}

#[test]
fn reduced_hamiltonian_equals_normalized_hamiltonian() {
    let mut r = rng(16);
    for _ in 0..200 {
        let s = random_liss(&mut r, 2.0);
        let m = MeanLissajousState::new(s.ell, s.g, s.L, s.G);
        let p = to_hopf(&m).unwrap();
        let a = reduced_hamiltonian(&p);
        let b = normalized_hamiltonian(&m).unwrap();
        assert!(rel(a, b) <= 1e-13);
    }
}

#[test]
fn t3_first_order_consistency() {
    for d in [[0.5, 0.3, -0.6, 0.55], [0.1, -0.7, 0.2, 0.68], [-0.4, 0.4, 0.6, -0.57]] {
        let slope = t3_relative_slope(d);
        assert!(slope >= 1.8, "slope {slope}");
    }
}

#[test]
fn t3_round_trip_is_exact() {
    let mut r = rng(17);
    for _ in 0..1000 {
        let c = CmState::new(
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
            r.gen_range(-0.1..0.1),
        );
        let (x2, px2) = t3_inverse_corrections(&cm_to_decoupled(&c));
        assert!(x2.abs() <= 1e-11 && px2.abs() <= 1e-11);
    }
}

/// Second-order lift: the center variables move by `½{·, W}` with the
/// generator `W = a·b` built from the saddle corrections, after which the
/// expansion agrees to fifth order.
#[test]
fn t3_second_order_oracle() {
    let c = constants();
    let f = c.rho * c.rho * c.sigma;
    let a_of = |v: [f64; 4]| {
        let s = CmState::new(v[0], v[2], v[1], v[3]);
        -f * (c.lambda * delta1(&s) - delta2(&s))
    };
    let b_of = |v: [f64; 4]| {
        let s = CmState::new(v[0], v[2], v[1], v[3]);
        -f * (c.lambda * delta1(&s) + delta2(&s))
    };
    let grad = |fun: &dyn Fn([f64; 4]) -> f64, v: [f64; 4]| {
        // exact for quadratics
        let mut g = [0.0; 4];
        for i in 0..4 {
            let mut p = v;
            let mut m = v;
            p[i] += 1e-3;
            m[i] -= 1e-3;
            g[i] = (fun(p) - fun(m)) / 2e-3;
        }
        g
    };
    let lift = |s: &CmState| {
        let v = [s.y2, s.py2, s.z2, s.pz2];
        let (a, b) = (a_of(v), b_of(v));
        let (ga, gb) = (grad(&a_of, v), grad(&b_of, v));
        let d = cm_to_decoupled(s);
        DecoupledState {
            x1: d.x1,
            px1: d.px1,
            y1: s.y2 + 0.5 * (ga[1] * b - gb[1] * a),
            py1: s.py2 - 0.5 * (ga[0] * b - gb[0] * a),
            z1: s.z2 + 0.5 * (ga[3] * b - gb[3] * a),
            pz1: s.pz2 - 0.5 * (ga[2] * b - gb[2] * a),
        }
    };
    let amps = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    for dir in [[0.5, 0.3, -0.6, 0.55], [0.1, -0.7, 0.2, 0.68]] {
        let res: Vec<f64> = amps
            .iter()
            .map(|a| {
                let s = CmState::new(a * dir[0], a * dir[1], a * dir[2], a * dir[3]);
                let l: LocalState = t2_inverse(&lift(&s));
                (expanded_hamiltonian(&l, 2) - cm_hamiltonian(&s)).abs()
            })
            .collect();
        let slope = loglog_slope(&amps, &res);
        assert!(slope >= 4.7, "slope {slope}");
    }
}

#[test]
fn t5_round_trip_is_second_order_in_the_perturbation() {
    for p in [(0.7, 0.4, 0.001, 0.0003), (2.0, 1.2, 0.01, -0.004)] {
        let slope = t5_epsilon_slope(p);
        assert!(slope >= 1.8, "slope {slope}");
    }
}

#[test]
fn t5_public_round_trip_is_small() {
    let m = MeanLissajousState::new(0.7, 0.4, 0.001, 0.0003);
    let back = inverse_short_period_corrections(&short_period_corrections(&m).unwrap()).unwrap();
    for (a, b) in m.to_array().iter().zip(back.to_array()) {
        assert!((a - b).abs() < 1e-3);
    }
}
