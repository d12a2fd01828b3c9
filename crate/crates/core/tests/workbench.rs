mod common;

use common::{corrected, planar_family};
use hill_libration::hill::{hamiltonian, libration_points};
use hill_libration::propagation::{flow, monodromy};
use hill_libration::workbench::{
    continue_family, correct, locate_bifurcations, synthesize, synthesize_state, Constraint,
    ContinuationOptions, CorrectorOptions, CrossingDirection, OrbitRecord, StabilityIndex,
    Symmetry,
};
use hill_libration::{Error, OrbitKind};

fn closure(kind: OrbitKind, lp: f64) -> f64 {
    let o = synthesize(kind, lp, 8).unwrap();
    let s = o.seed().unwrap();
    let end = flow(&s, o.period, 1e-13).unwrap();
    (end.to_vector() - s.to_vector()).norm()
}

#[test]
fn small_vertical_orbit_closes() {
    let o = synthesize(OrbitKind::VerticalLyapunov, 0.001, 256).unwrap();
    assert_eq!(o.samples.len(), 256);
    assert!((o.period - 3.13965).abs() < 1e-3);
    assert!(closure(OrbitKind::VerticalLyapunov, 0.001) < 1e-3);
    for lp in [0.002, 0.005] {
        assert!(closure(OrbitKind::VerticalLyapunov, lp) < 1e-3, "L' = {lp}");
    }
}

#[test]
fn vertical_seed_corrects_quickly() {
    let seed_error = closure(OrbitKind::VerticalLyapunov, 0.02);
    assert!((1e-4..=1e-1).contains(&seed_error), "{seed_error:e}");
    let c = corrected(OrbitKind::VerticalLyapunov, 0.02, Symmetry::Auto);
    assert!(c.iterations <= 10);
    assert!(c.orbit.residual <= 1e-12);
    assert!((c.history[0] - c.orbit.residual).abs() > 0.0);
    // independent closure check over the full period
    let end = flow(&c.orbit.ic, c.orbit.period, 1e-13).unwrap();
    assert!((end.to_vector() - c.orbit.ic.to_vector()).norm() < 1e-10);
}

#[test]
fn corrected_orbit_is_a_fixed_point() {
    let c = corrected(OrbitKind::VerticalLyapunov, 0.02, Symmetry::Auto);
    let again = correct(&c.orbit.ic, c.orbit.period, &CorrectorOptions::default()).unwrap();
    assert!(again.iterations <= 1);
    let step = (again.orbit.ic.to_vector() - c.orbit.ic.to_vector()).norm();
    assert!(step < 1e-11, "{step:e}");
    assert!((again.orbit.period - c.orbit.period).abs() < 1e-11);
}

#[test]
fn planar_seed_uses_symmetry() {
    let c = corrected(OrbitKind::PlanarLyapunov, 0.02, Symmetry::Auto);
    assert!(c.orbit.symmetric);
    assert!(c.orbit.planar_split);
    assert!(c.orbit.residual <= 1e-12);
    let m = monodromy(&c.orbit.ic, c.orbit.period, 1e-13).unwrap();
    assert!((m.determinant() - 1.0).abs() <= 1e-7);
}

#[test]
fn fixed_period_constraint() {
    let o = synthesize(OrbitKind::VerticalLyapunov, 0.02, 4).unwrap();
    let opts = CorrectorOptions {
        constraint: Constraint::Period(Some(3.15)),
        ..Default::default()
    };
    let c = correct(&o.seed().unwrap(), o.period, &opts).unwrap();
    assert!((c.orbit.period - 3.15).abs() < 1e-12);
}

#[test]
fn invalid_inputs_are_domain_errors() {
    let (l1, _) = libration_points();
    let o = synthesize(OrbitKind::VerticalLyapunov, 0.02, 4).unwrap();
    let s = o.seed().unwrap();
    let opts = CorrectorOptions::default();
    assert!(matches!(correct(&s, -1.0, &opts), Err(Error::Domain(_))));
    assert!(matches!(correct(&l1, 3.0, &opts), Err(Error::Domain(_))));
}

#[test]
fn vertical_family_members() {
    let seed = corrected(OrbitKind::VerticalLyapunov, 0.001, Symmetry::Auto).orbit;
    let (l1, _) = libration_points();
    assert!((seed.period - std::f64::consts::PI).abs() < 1e-2);
    assert!((seed.energy - hamiltonian(&l1).unwrap()).abs() < 1e-2);
    let fam = continue_family(
        &seed,
        &ContinuationOptions {
            members: 20,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(fam.len(), 20);
    assert!(fam.windows(2).all(|w| w[1].energy > w[0].energy));
    for o in &fam {
        assert!(o.residual <= 1e-12);
        let m = monodromy(&o.ic, o.period, 1e-13).unwrap();
        assert!((m.determinant() - 1.0).abs() <= 1e-7);
    }
}

#[test]
fn planar_family_bifurcations() {
    let fam = planar_family();
    assert!(fam.last().unwrap().energy > 0.0);
    assert!(fam[..20].windows(2).all(|w| w[1].energy > w[0].energy));
    let b = locate_bifurcations(&fam).unwrap();
    assert_eq!(b.len(), 3, "{b:?}");
    let expect = [
        (-2.0, CrossingDirection::Destabilizing, 2.0),
        (-0.6, CrossingDirection::Stabilizing, 2.0),
        (0.0, CrossingDirection::Destabilizing, -2.0),
    ];
    for (got, (e, dir, level)) in b.iter().zip(expect) {
        assert!((got.energy - e).abs() < 0.15, "{got:?}");
        assert_eq!(got.index, StabilityIndex::S2);
        assert_eq!(got.direction, dir);
        assert_eq!(got.level, level);
        assert!(got.bracket <= 1e-4);
    }
}

#[test]
fn halo_seed_is_shape_only() {
    let err = closure(OrbitKind::HaloNorth, 0.08);
    assert!(err > 1e-2, "{err:e}");
    let a = synthesize_state(OrbitKind::HaloNorth, 0.08, 0.3).unwrap();
    let b = synthesize_state(OrbitKind::HaloNorth, 0.08, 0.3 + 2.0 * std::f64::consts::PI).unwrap();
    assert!((a.to_vector() - b.to_vector()).amax() <= 1e-13);
}

#[test]
fn bridge_orbits_synthesize() {
    for kind in [OrbitKind::BridgeA, OrbitKind::BridgeB] {
        let o = synthesize(kind, 1.35, 16).unwrap();
        assert!(o.samples.iter().all(|s| s.state.is_finite()));
        assert!(o.period.is_finite());
    }
    assert!(matches!(
        synthesize(OrbitKind::BridgeA, 0.5, 16),
        Err(Error::FamilyNotPresent { .. })
    ));
}

#[test]
fn orbit_record_round_trip() {
    let c = corrected(OrbitKind::VerticalLyapunov, 0.02, Symmetry::Auto);
    let rec = OrbitRecord::from_periodic(&c.orbit, Some(OrbitKind::VerticalLyapunov), Some(0.02));
    let text = serde_json::to_string(&rec).unwrap();
    for key in ["\"family\"", "\"Lp\"", "\"ic\"", "\"period\"", "\"energy\"", "\"s1\"", "\"s2\"", "\"residual\""] {
        assert!(text.contains(key), "{key} missing in {text}");
    }
    let back: OrbitRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rec);
    assert_eq!(back.to_periodic().unwrap(), c.orbit);
}
