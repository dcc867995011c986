mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use convrad::cutlocus::*;
use convrad::profiles::*;
use convrad::radii::Radius;
use proptest::prelude::*;

const DELTA: f64 = 0.05;

fn sphere() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_sphere_profile())
}

fn plane() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_plane_profile())
}

fn cone() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_cone_profile(DELTA, CONE_R_CAP).unwrap())
}

fn gulliver() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap())
}

fn d(m: &SurfaceMetric<f64>, a: (f64, f64), b: (f64, f64)) -> f64 {
    distance(m, Point::new(a.0, a.1), Point::new(b.0, b.1), &DistanceOptions::default()).unwrap()
}

#[test]
fn distance_spot_values() {
    assert!((d(&sphere(), (0.0, 0.0), (1.0, 0.0)) - 1.0).abs() < 1e-9);
    assert!((d(&plane(), (1.0, 0.0), (1.0, PI)) - 2.0).abs() < 1e-9);
    assert!((d(&plane(), (3.0, 0.2), (3.0, 0.2)) - 0.0).abs() < 1e-12);
    let beta = common::cone_beta(DELTA);
    let want = common::cone_distance(beta, 2.0, 0.0, 2.0, PI);
    assert!((d(&cone(), (2.0, 0.0), (2.0, PI)) - want).abs() < 1e-8);
}

#[test]
fn sphere_antipodes_form_a_continuum() {
    let g = minimal_geodesics(&sphere(), Point::new(0.4, 0.0), Point::new(PI - 0.4, PI), &DistanceOptions::default())
        .unwrap();
    assert!((g.distance - PI).abs() < 1e-7);
    assert!(g.continuum);
    assert!(g.minimal.iter().all(|c| c.j_end.abs() < 1e-6));
}

#[test]
fn cone_opposite_points_have_two_mirror_geodesics() {
    let g = minimal_geodesics(&cone(), Point::new(2.0, 0.0), Point::new(2.0, PI), &DistanceOptions::default()).unwrap();
    assert_eq!(g.minimal.len(), 2, "{g:?}");
    let (a, b) = (&g.minimal[0], &g.minimal[1]);
    assert!((a.psi + b.psi - 2.0 * PI).abs() < 1e-7);
    assert!((a.tangent[0] - b.tangent[0]).abs() < 1e-7 && (a.tangent[1] + b.tangent[1]).abs() < 1e-7);
}

#[test]
fn cut_time_on_the_sphere_is_pi() {
    let m = sphere();
    for (r, psi) in [(0.0, 0.3), (0.7, 1.0), (1.2, 2.9), (2.0, 4.0)] {
        let c = cut_time(&m, Point::new(r, 0.0), psi, &CutOptions::default()).unwrap();
        assert!((c.t_cut.value().unwrap() - PI).abs() < 1e-7, "r={r} psi={psi}: {c:?}");
        assert_eq!(c.kind, CutKind::Conjugate);
    }
}

#[test]
fn plane_has_no_cut_points() {
    let c = cut_time(&plane(), Point::new(1.0, 0.0), 1.0, &CutOptions::default()).unwrap();
    assert_eq!(c.t_cut, Radius::beyond(20.0));
    assert_eq!(c.kind, CutKind::BeyondHorizon);
}

#[test]
fn cone_cut_times_match_the_development() {
    // q = (2, 0) develops to (2, 0) in the plane and Cut(q) to the ray at angle ±πβ;
    // a ray launched at ψ meets it after 2 sin(πβ) / sin(ψ - πβ); the ψ = π/2 crossing
    // lies at r ≈ 25.5, past the default domain
    let m = SurfaceMetric::new(build_cone_profile(DELTA, CONE_R_CAP).unwrap().with_r_max(60.0));
    let a = PI * common::cone_beta(DELTA);
    let opts = CutOptions::default().with_horizon(60.0);
    for psi in [0.3, 0.5, 1.0, FRAC_PI_2, 2.0, 2.8] {
        let want = if psi > a { 2.0 * a.sin() / (psi - a).sin() } else { f64::INFINITY };
        let c = cut_time(&m, Point::new(2.0, 0.0), psi, &opts).unwrap();
        if want <= 60.0 {
            let got = c.t_cut.value().unwrap();
            assert!((got - want).abs() < 1e-6 * want.max(1.0), "psi={psi}: {got} vs {want}");
            assert_eq!(c.kind, CutKind::Crossing);
        } else {
            assert!(!c.t_cut.is_finite());
        }
    }
}

#[test]
fn verified_cut_times_agree() {
    let m = cone();
    let q = Point::new(2.0, 0.0);
    for psi in [1.7, 2.0, 2.8] {
        let plain = cut_time(&m, q, psi, &CutOptions::default().with_horizon(60.0)).unwrap();
        let checked = cut_time(&m, q, psi, &CutOptions::default().with_horizon(60.0).verified()).unwrap();
        assert!(checked.verified);
        assert!((plain.t_cut.or_inf() - checked.t_cut.or_inf()).abs() < 1e-6);
    }
}

#[test]
fn cut_locus_is_mirror_symmetric_and_exports_csv() {
    let m = gulliver();
    let cl = cut_locus(&m, Point::new(0.79, 0.0), 32, &CutOptions::default()).unwrap();
    assert_eq!(cl.len(), 32);
    for (i, c) in cl.iter().enumerate().skip(1) {
        let mirror = &cl[32 - i];
        assert!((c.psi + mirror.psi - 2.0 * PI).abs() < 1e-12);
        assert!((c.t_cut.or_inf() - mirror.t_cut.or_inf()).abs() < 1e-12 || !c.t_cut.is_finite());
    }
    let csv = cut_locus_csv(&cl);
    assert!(csv.starts_with("psi,t_cut,kind,r,theta\n"));
    assert_eq!(csv.lines().count(), 33);
}

#[test]
fn shortest_loops() {
    let l = shortest_loop(&sphere(), Point::new(0.5, 0.0), 64, 20.0).unwrap();
    assert!((l.length.value().unwrap() - 2.0 * PI).abs() < 1e-7);
    let beta = common::cone_beta(DELTA);
    let l = shortest_loop(&cone(), Point::new(2.0, 0.0), 256, 20.0).unwrap();
    assert!((l.length.value().unwrap() - 4.0 * (PI * beta).sin()).abs() < 1e-7, "{l:?}");
    let l = shortest_loop(&plane(), Point::new(2.0, 0.0), 64, 20.0).unwrap();
    assert!(!l.length.is_finite());
}

#[test]
fn cone_nearest_cut_point_closes_a_loop() {
    let beta = common::cone_beta(DELTA);
    let nc = nearest_cut_point(&cone(), Point::new(2.0, 0.0), 64, &PerimeterOptions::default()).unwrap();
    assert!((nc.distance - 2.0 * (PI * beta).sin()).abs() < 1e-5, "{nc:?}");
    assert!((nc.z.r - 2.0 * (PI * beta).cos()).abs() < 1e-4);
    assert!(nc.loop_closes);
    assert!(!nc.conjugate);
}

#[test]
fn sphere_perimeter_is_totally_conjugate() {
    let res = minimize_perimeter(&sphere(), Point::new(0.3, 0.0), Point::new(0.0, 0.0), &PerimeterOptions::default())
        .unwrap();
    assert!((res.value - 2.0 * PI).abs() < 1e-7, "{}", res.value);
    assert_eq!(res.case, PerimeterCase::TotallyConjugate);
    assert!(res.alignment_holds);
    assert!(!res.p_is_x0);
}

#[test]
fn distance_to_a_point_just_short_of_the_antipode() {
    // arrival is near-radial, so the meridian hit radius carries a small jump at the root
    let q = Point::new(2.0210313322399025, 5.112763162981426);
    let x = Point::new(1.1205603217294122, 1.9711705073212897);
    let want = common::sphere_distance(q.r, q.theta, x.r, x.theta);
    let g = minimal_geodesics(&sphere(), q, x, &DistanceOptions::default()).unwrap();
    assert!((g.distance - want).abs() < 1e-6, "{} vs {want}", g.distance);
}

#[test]
fn cone_perimeter_matches_the_development() {
    let beta = common::cone_beta(DELTA);
    let (p, q) = ((2.0, 0.0), (2.0, 0.3));
    let d_pq = common::cone_distance(beta, p.0, p.1, q.0, q.1);
    // Cut(q) is the ray opposite q
    let y = q.1 + PI;
    let (_, want) = common::minimize(
        |rho| common::cone_distance(beta, p.0, p.1, rho, y) + common::cone_distance(beta, q.0, q.1, rho, y) + d_pq,
        0.0,
        10.0,
    );
    let res = minimize_perimeter(&cone(), Point::new(p.0, p.1), Point::new(q.0, q.1), &PerimeterOptions::default())
        .unwrap();
    assert!((res.value - want).abs() < 1e-6, "{} vs {want}", res.value);
    assert!(res.alignment_holds);
    assert!(matches!(res.case, PerimeterCase::OneToOne | PerimeterCase::OneToTwo), "{:?}", res.case);
}

#[test]
fn perimeter_is_stable_under_grid_doubling() {
    let (p, q) = (Point::new(2.0, 0.0), Point::new(2.5, 0.9));
    let at = |n_psi| {
        let opts = PerimeterOptions {
            n_psi,
            ..PerimeterOptions::default()
        };
        minimize_perimeter(&cone(), p, q, &opts).unwrap().value
    };
    let (a, b) = (at(64), at(128));
    assert!((a - b).abs() < 1e-4, "{a} vs {b}");
}

#[test]
fn dijkstra_oracle_tracks_closed_forms() {
    let grid = GridSpec { h: 0.04, r_max: 4.0 };
    let f = dijkstra_oracle(&plane(), Point::new(0.0, 0.0), &grid);
    assert_eq!(f.method, FieldMethod::DijkstraOracle);
    let v = f.value_at(&plane(), Point::new(3.0, 1.0));
    assert!((v - 3.0).abs() < 0.02 * 3.0, "{v}");

    let m = cone();
    let beta = common::cone_beta(DELTA);
    let f = dijkstra_oracle(&m, Point::new(2.0, 0.0), &grid);
    for (r, t) in [(2.0, PI), (1.0, 2.0), (3.0, 0.5), (0.5, 1.0)] {
        let want = common::cone_distance(beta, 2.0, 0.0, r, t);
        let got = f.value_at(&m, Point::new(r, t));
        assert!(((got - want) / want).abs() < 0.02, "({r}, {t}): {got} vs {want}");
    }
}

#[test]
fn shooting_field_interpolates_distance() {
    let m = sphere();
    let src = Point::new(0.8, 0.0);
    let f = shooting_field(&m, src, 0.1, 2.5, 33, 96, &DistanceOptions::default()).unwrap();
    assert_eq!(f.method, FieldMethod::Shooting);
    for (r, t) in [(0.5, 1.0), (1.5, 2.5), (2.2, -0.7)] {
        let want = common::sphere_distance(0.8, 0.0, r, t);
        assert!((f.value_at(&m, Point::new(r, t)) - want).abs() < 1e-3);
    }
    assert!(f.to_csv().lines().count() > 33);
}

#[test]
fn cut_decay_radius_spot_values() {
    let opts = DecayOptions {
        n_ball: 32,
        n_psi: 32,
        ..DecayOptions::default()
    };
    let rc = cut_decay_radius(&sphere(), Point::new(0.0, 0.0), &opts).unwrap();
    assert!((rc.value.value().unwrap() - FRAC_PI_2).abs() < 1e-3, "{rc:?}");
    let rc = cut_decay_radius(&plane(), Point::new(1.0, 0.0), &opts).unwrap();
    assert!(!rc.value.is_finite());
}

fn sphere_pair() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0f64..PI, -PI..PI, 0.0f64..PI, -PI..PI)
}

fn cone_pair() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3f64..4.0, -PI..PI, 0.3f64..4.0, -PI..PI)
}

fn generic_profile() -> impl Strategy<Value = (usize, [f64; 6])> {
    (0usize..3, prop::array::uniform6(0.0f64..1.0))
}

fn pick(i: usize) -> (SurfaceMetric<f64>, f64) {
    match i {
        0 => (gulliver(), 1.5),
        1 => (SurfaceMetric::new(build_paraboloid_profile()), 3.0),
        _ => (SurfaceMetric::new(build_hyperbolic_profile()), 2.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sphere_distance_matches_spherical_trig((r1, t1, r2, t2) in sphere_pair()) {
        let got = d(&sphere(), (r1, t1), (r2, t2));
        let want = common::sphere_distance(r1, t1, r2, t2);
        prop_assert!((got - want).abs() < 1e-7, "{} vs {}", got, want);
    }

    #[test]
    fn cone_distance_matches_the_development((r1, t1, r2, t2) in cone_pair()) {
        let got = d(&cone(), (r1, t1), (r2, t2));
        let want = common::cone_distance(common::cone_beta(DELTA), r1, t1, r2, t2);
        prop_assert!((got - want).abs() < 1e-6, "{} vs {}", got, want);
    }

    #[test]
    fn distance_is_symmetric_and_rotation_invariant((i, u) in generic_profile()) {
        let (m, rmax) = pick(i);
        let a = (rmax * u[0], 2.0 * PI * u[1]);
        let b = (rmax * u[2], 2.0 * PI * u[3]);
        let ab = d(&m, a, b);
        prop_assert!((ab - d(&m, b, a)).abs() < 1e-7);
        let rot = 2.0 * PI * u[4];
        prop_assert!((ab - d(&m, (a.0, a.1 + rot), (b.0, b.1 + rot))).abs() < 1e-7);
        // reflection θ ↦ -θ
        prop_assert!((ab - d(&m, (a.0, -a.1), (b.0, -b.1))).abs() < 1e-7);
    }

    #[test]
    fn distance_obeys_the_triangle_inequality((i, u) in generic_profile()) {
        let (m, rmax) = pick(i);
        let a = (rmax * u[0], 2.0 * PI * u[1]);
        let b = (rmax * u[2], 2.0 * PI * u[3]);
        let c = (rmax * u[4], 2.0 * PI * u[5]);
        prop_assert!(d(&m, a, c) <= d(&m, a, b) + d(&m, b, c) + 1e-8);
        prop_assert!(d(&m, a, b) >= (a.0 - b.0).abs() - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cut_time_never_exceeds_conjugate_time(i in 0usize..3, u in 0.0f64..1.0, psi in 0.0f64..PI) {
        let (m, rmax) = match i {
            0 => (sphere(), 3.0),
            1 => (gulliver(), 1.2),
            _ => (cone(), 3.0),
        };
        let c = cut_time(&m, Point::new(0.05 + rmax * u, 0.0), psi, &CutOptions::default()).unwrap();
        prop_assert!(c.t_cut.or_inf() <= c.t_conj.or_inf() + 1e-9, "{:?}", c);
    }
}
