mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use convrad::cutlocus::{cut_locus, CutOptions};
use convrad::profiles::*;
use convrad::radii::*;
use proptest::prelude::*;

fn sphere() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_sphere_profile())
}

fn cone() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_cone_profile(0.05, CONE_R_CAP).unwrap())
}

fn gulliver() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap())
}

fn finite(r: Radius) -> f64 {
    r.value().unwrap_or_else(|| panic!("expected a finite radius, got {r:?}"))
}

#[test]
fn sphere_radii_are_classical() {
    let m = sphere();
    for r in [0.0, 0.4, FRAC_PI_2, 2.5] {
        let jr = jacobi_radii(&m, Point::new(r, 0.7), &ScanOptions::default()).unwrap();
        assert!((finite(jr.conj) - PI).abs() < 1e-7, "conj at r={r}: {:?}", jr.conj);
        assert!((finite(jr.foc) - FRAC_PI_2).abs() < 1e-7, "foc at r={r}: {:?}", jr.foc);
        assert!((finite(jr.foc_e) - FRAC_PI_2).abs() < 1e-7);
    }
}

#[test]
fn flat_and_hyperbolic_radii_are_beyond_the_horizon() {
    for m in [SurfaceMetric::new(build_plane_profile()), SurfaceMetric::new(build_hyperbolic_profile())] {
        let jr = jacobi_radii(&m, Point::new(0.8, 0.0), &ScanOptions::default()).unwrap();
        for v in [jr.conj, jr.foc, jr.foc_e] {
            assert_eq!(v, Radius::beyond(DEFAULT_HORIZON), "{}", m.profile.name());
        }
    }
}

#[test]
fn beyond_horizon_serializes_with_the_horizon() {
    let json = serde_json::to_string(&Radius::beyond(20.0)).unwrap();
    assert_eq!(json, r#"{"beyond_horizon":20.0}"#);
    assert_eq!(serde_json::to_string(&Radius::Finite(1.5)).unwrap(), "1.5");
}

#[test]
fn gulliver_pole_sees_nothing_within_the_horizon() {
    let m = gulliver();
    let jr = jacobi_radii(&m, Point::new(0.0, 0.0), &ScanOptions::default()).unwrap();
    assert!(!jr.conj.is_finite() && !jr.foc.is_finite() && !jr.foc_e.is_finite(), "{jr:?}");
}

#[test]
fn gulliver_focal_radius_jumps_across_the_glue() {
    let m = gulliver();
    let opts = ScanOptions::default();
    let inner = focal_radius(&m, Point::new(0.70, 0.0), &opts).unwrap();
    assert!(!inner.is_finite(), "{inner:?}");
    let outer = focal_radius(&m, Point::new(0.785, 0.0), &opts).unwrap();
    assert!((finite(outer) - FRAC_PI_2).abs() < 1e-3, "{outer:?}");
}

#[test]
fn cone_has_no_jacobi_events_off_the_core() {
    let m = cone();
    let p = Point::new(2.0, 0.0);
    assert!(m.enters_core(p, PI) && m.enters_core(p, PI + 1e-5));
    assert!(!m.enters_core(p, PI - 1e-3) && !m.enters_core(p, 0.0));
    let jr = jacobi_radii(&m, p, &ScanOptions::default()).unwrap();
    for v in [jr.conj, jr.foc, jr.foc_e] {
        assert!(!v.is_finite(), "{jr:?}");
    }
    // the smoothed vertex itself still focuses radial geodesics
    let ev = convrad::odes::scan_events(&m, p, PI, 20.0, 1e-7).unwrap();
    assert!((ev.conj.unwrap() - 2.0).abs() < 10.0 * CONE_R_CAP);
}

#[test]
fn ball_focal_radius_on_the_sphere() {
    let m = sphere();
    let b = ball_focal_radius(&m, Point::new(0.0, 0.0), FRAC_PI_2, 8, &ScanOptions::with_dirs(32)).unwrap();
    assert!((finite(b.value) - FRAC_PI_2).abs() < 1e-7);
    let plane = SurfaceMetric::new(build_plane_profile());
    let b = ball_focal_radius(&plane, Point::new(1.0, 0.0), 2.0, 8, &ScanOptions::with_dirs(32)).unwrap();
    assert!(!b.value.is_finite());
}

#[test]
fn ball_radii_cover_the_ball() {
    let m = sphere();
    let rs = ball_radii(&m, Point::new(0.3, 0.0), 0.5, 10);
    assert_eq!(rs.first(), Some(&0.0));
    assert!(rs.contains(&0.3));
    assert!(rs.iter().all(|&r| (0.0..0.8).contains(&r)));
}

#[test]
fn radial_sweep_is_ordered_and_evenly_spaced() {
    let rows = radial_sweep(&sphere(), 0.2, 1.2, 5, &ScanOptions::with_dirs(16)).unwrap();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert!((row.r - (0.2 + 0.25 * i as f64)).abs() < 1e-12);
        assert!((finite(row.conj) - PI).abs() < 1e-6);
    }
}

#[test]
fn psi_grid_refinement_is_stable() {
    let m = gulliver();
    let p = Point::new(0.79, 0.0);
    let a = jacobi_radii(&m, p, &ScanOptions::with_dirs(64)).unwrap();
    let b = jacobi_radii(&m, p, &ScanOptions::with_dirs(128)).unwrap();
    for (x, y) in [(a.conj, b.conj), (a.foc, b.foc), (a.foc_e, b.foc_e)] {
        match (x.value(), y.value()) {
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-4, "{x} vs {y}"),
            (None, None) => {}
            _ => panic!("{x:?} vs {y:?}"),
        }
    }
}

#[test]
fn totally_conjugate_scan_finds_the_antipode() {
    let m = sphere();
    let q = Point::new(0.0, 0.0);
    let cut = cut_locus(&m, q, 16, &CutOptions::default()).unwrap();
    let ct = totally_conjugate_scan(&m, q, &cut, DEFAULT_HORIZON, 1e-5).unwrap();
    assert!((finite(ct.value) - PI).abs() < 1e-7);
    assert!(ct.flagged > 0 && ct.best_effort);

    let plane = SurfaceMetric::new(build_plane_profile());
    let cut = cut_locus(&plane, q, 16, &CutOptions::default()).unwrap();
    let ct = totally_conjugate_scan(&plane, q, &cut, DEFAULT_HORIZON, 1e-5).unwrap();
    assert!(!ct.value.is_finite());
    assert_eq!(ct.examined, 0);
}

#[test]
fn sphere_report_is_consistent() {
    let m = sphere();
    let opts = ReportOptions::default().with_dirs(32);
    let rep = radius_report(&m, Point::new(0.6, 0.0), &opts).unwrap();
    assert!((finite(rep.inj) - PI).abs() < 1e-7);
    assert!((finite(rep.inj_direct) - PI).abs() < 1e-4);
    assert!((finite(rep.l_loop) - 2.0 * PI).abs() < 1e-7);
    assert!((finite(rep.r_c) - FRAC_PI_2).abs() < 1e-3);
    assert_eq!(rep.conv_ct, rep.foc_e.min(rep.r_c));
    assert!(rep.conv_lower.or_inf() <= rep.conv_upper.or_inf() + 1e-9);
    assert!((finite(rep.conj_t.value) - PI).abs() < 1e-6);
}

#[test]
fn cone_report_matches_the_developed_cone() {
    let m = cone();
    let beta = common::cone_beta(0.05);
    let opts = ReportOptions::default().with_dirs(32);
    let rep = radius_report(&m, Point::new(2.0, 0.0), &opts).unwrap();
    // shortest loop: the chord around the tip on the developed cone
    let loop_len = 2.0 * 2.0 * (PI * beta).sin();
    assert!((finite(rep.l_loop) - loop_len).abs() < 1e-6, "{:?}", rep.l_loop);
    assert!((finite(rep.inj) - 0.5 * loop_len).abs() < 1e-6);
    assert!((finite(rep.inj_direct) - 0.5 * loop_len).abs() < 1e-4);
    let rc = common::cone_decay_radius(beta, 2.0);
    assert!((finite(rep.r_c) - rc).abs() < 1e-3, "{:?} vs {rc}", rep.r_c);
}

fn profile_and_point() -> impl Strategy<Value = (usize, f64, f64)> {
    (0usize..4, 0.0f64..1.0, 0.0f64..(2.0 * PI))
}

fn pick(i: usize, u: f64) -> (SurfaceMetric<f64>, f64) {
    match i {
        0 => (sphere(), 0.05 + 3.0 * u),
        1 => (gulliver(), 0.6 + 0.4 * u),
        2 => (cone(), 0.5 + 2.0 * u),
        _ => (SurfaceMetric::new(build_paraboloid_profile()), 2.0 * u),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn focal_radii_are_ordered((i, u, theta) in profile_and_point()) {
        let (m, r) = pick(i, u);
        let jr = jacobi_radii(&m, Point::new(r, theta), &ScanOptions::with_dirs(32)).unwrap();
        prop_assert!(jr.foc.or_inf() <= jr.foc_e.or_inf() + 1e-9, "{:?}", jr);
        prop_assert!(jr.foc_e.or_inf() <= jr.conj.or_inf() + 1e-9, "{:?}", jr);
    }

    #[test]
    fn radii_are_rotation_invariant((i, u, theta) in profile_and_point()) {
        let (m, r) = pick(i, u);
        let opts = ScanOptions::with_dirs(32);
        let a = jacobi_radii(&m, Point::new(r, 0.0), &opts).unwrap();
        let b = jacobi_radii(&m, Point::new(r, theta), &opts).unwrap();
        for (x, y) in [(a.conj, b.conj), (a.foc, b.foc), (a.foc_e, b.foc_e)] {
            match (x.value(), y.value()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-8),
                (None, None) => {}
                _ => prop_assert!(false, "{:?} vs {:?}", x, y),
            }
        }
    }
}
