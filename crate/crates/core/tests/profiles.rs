use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use convrad::profiles::{
    ProfileConfig, ProfileKind,
    build_cone_profile, build_gulliver_profile, build_hyperbolic_profile,
    build_paraboloid_profile, build_plane_profile, build_sphere_profile, Profile, ProfileError,
    GULLIVER_EPSILON, GULLIVER_R1,
};

fn all_profiles() -> Vec<Profile<f64>> {
    vec![
        build_sphere_profile(),
        build_plane_profile(),
        build_hyperbolic_profile(),
        build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap(),
        build_cone_profile(0.05, 1e-3).unwrap(),
        build_cone_profile(0.3, 1e-3).unwrap(),
        build_paraboloid_profile(),
    ]
}

/// Bisection for `sin r1 = sinh(r1 - r2)` in r2.
fn r2_oracle(r1: f64) -> f64 {
    let f = |r2: f64| (r1 - r2).sinh() - r1.sin();
    let (mut lo, mut hi) = (-1.0, r1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn closed_form_examples() {
    let s = build_sphere_profile();
    assert!((s.gauss_curvature(0.7).unwrap() - 1.0).abs() < 1e-14);
    assert!((s.phi(FRAC_PI_2) - 1.0).abs() < 1e-15);
    let p = build_plane_profile();
    assert_eq!(p.gauss_curvature(1.3).unwrap(), 0.0);
    assert_eq!(p.phi_prime(5.0), 1.0);
    let h = build_hyperbolic_profile();
    for r in [0.0, 0.3, 2.0, 11.0] {
        assert!((h.gauss_curvature(r).unwrap() + 1.0).abs() < 1e-12, "r = {r}");
    }
    assert!((s.r_max() - (PI - 1e-9)).abs() < 1e-15);
    assert_eq!(p.r_max(), 20.0);
}

#[test]
fn curvature_domain_errors() {
    let p = build_plane_profile();
    assert!(matches!(
        p.gauss_curvature(25.0),
        Err(ProfileError::Domain { .. })
    ));
    assert!(p.gauss_curvature(-0.1).is_err());
}

#[test]
fn finite_differences_match_derivatives() {
    let h = 1e-4;
    for prof in all_profiles() {
        let joints = prof.joints();
        let r_hi = prof.r_max().min(15.0);
        let mut r = 0.01;
        while r < r_hi - 2.0 * h {
            if joints.iter().all(|j| (r - j).abs() > 3.0 * h) && (prof.name() != "cone" || r > 2e-3)
            {
                let w = prof.warp(r);
                // the glue varies on a scale of ε, so difference it with a finer step
                let in_glue = joints.len() == 2 && r > joints[0] && r < joints[1];
                let h = if in_glue { 4e-5 } else { h };
                // central differences at h and h/2, Richardson-combined
                let c1 = |h: f64| (prof.phi(r + h) - prof.phi(r - h)) / (2.0 * h);
                let c2 = |h: f64| (prof.phi(r + h) - 2.0 * prof.phi(r) + prof.phi(r - h)) / (h * h);
                let d1 = (4.0 * c1(0.5 * h) - c1(h)) / 3.0;
                let d2 = (4.0 * c2(0.5 * h) - c2(h)) / 3.0;
                // relative to the local size of the jet, so zero crossings of φ'' are fair
                let scale = w.phi.abs().max(w.dphi.abs()).max(w.ddphi.abs()).max(1.0);
                let e1 = (d1 - w.dphi).abs() / scale;
                let e2 = (d2 - w.ddphi).abs() / scale;
                assert!(e1 < 1e-6, "{} phi' at r = {r}: rel err {e1}", prof.name());
                assert!(e2 < 1e-6, "{} phi'' at r = {r}: rel err {e2}", prof.name());
            }
            r += 0.0137;
        }
    }
}

#[test]
fn cone_cap_finite_differences() {
    // inside the cap the natural scale is r_cap, so sample with a proportionally finer step
    let prof = build_cone_profile(0.05, 1e-3).unwrap();
    let h = 1e-8;
    for i in 1..40 {
        let r = i as f64 * 2.5e-5;
        let w = prof.warp(r);
        let d1 = (prof.phi(r + h) - prof.phi(r - h)) / (2.0 * h);
        assert!((d1 - w.dphi).abs() < 1e-6, "r = {r}");
        let d2 = (prof.phi_prime(r + h) - prof.phi_prime(r - h)) / (2.0 * h);
        assert!((d2 - w.ddphi).abs() / w.ddphi.abs().max(1.0) < 1e-6, "r = {r}");
    }
}

#[test]
fn smooth_poles() {
    for prof in all_profiles() {
        let w = prof.warp(0.0);
        assert!(w.phi.abs() < 1e-15, "{}", prof.name());
        assert!((w.dphi - 1.0).abs() < 1e-12, "{}", prof.name());
        assert!(w.ddphi.abs() < 1e-12, "{}", prof.name());
        let r = 1e-4 * prof.pole_scale();
        let ratio = prof.phi(r) / r;
        assert!((ratio - 1.0).abs() < 1e-6, "{}: {ratio}", prof.name());
        // the series curvature agrees with the closed form just outside the series radius
        let rs = 2.0 * prof.pole_series().radius;
        let w = prof.warp(rs);
        let exact = -w.ddphi / w.phi;
        let series = prof.pole_series().curvature(rs * rs);
        assert!(
            (exact - series).abs() < 1e-6 * exact.abs().max(1.0),
            "{}: {exact} vs {series}",
            prof.name()
        );
    }
}

#[test]
fn phi_positive_on_domain() {
    for prof in all_profiles() {
        let n = 4000;
        for i in 1..=n {
            let r = prof.r_max() * i as f64 / n as f64;
            assert!(prof.phi(r) > 0.0, "{} at r = {r}", prof.name());
        }
    }
}

#[test]
fn gulliver_literal_defaults_violate_preconditions() {
    // r1 - epsilon = 0.70 < pi/4
    assert!(matches!(
        build_gulliver_profile(0.75, 0.05),
        Err(ProfileError::Precondition(_))
    ));
    assert!(build_gulliver_profile(0.79, 0.06).is_err());
    assert!(build_gulliver_profile(0.81, 0.001).is_err());
    assert!(build_gulliver_profile(FRAC_PI_4, 0.001).is_err());
}

#[test]
fn gulliver_branches_and_matching() {
    let prof = build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap();
    let gp = prof.gulliver_params().unwrap().clone();
    assert!((prof.phi(0.5) - 0.5f64.sin()).abs() < 1e-15);
    assert!((prof.phi(0.5) - 0.479426).abs() < 1e-6);
    assert!((gp.r2 - r2_oracle(gp.r1)).abs() < 1e-12);
    // the corresponding value for r1 = 0.75 from the same oracle
    assert!((r2_oracle(0.75) - 0.112440).abs() < 1e-6);
    assert!(gp.residual[0].abs() < 1e-8 && gp.residual[1].abs() < 1e-8);

    let a = gp.r1 - gp.epsilon;
    let b = gp.r1 + gp.epsilon;
    for r in [0.1, 0.4, a - 1e-9] {
        assert!((prof.phi(r) - r.sin()).abs() < 1e-14);
    }
    for r in [b + 1e-9, 1.0, 3.0, 10.0] {
        assert!((prof.phi(r) - (r - gp.r2).sinh()).abs() < 1e-12 * (r - gp.r2).sinh().max(1.0));
        assert!((prof.gauss_curvature(r).unwrap() + 1.0).abs() < 1e-12);
    }
    // both branches are met in value and slope by the glue table
    for &(r, phi, dphi) in &[
        (a, a.sin(), a.cos()),
        (b, (b - gp.r2).sinh(), (b - gp.r2).cosh()),
    ] {
        let inside = if r == a { r + 1e-12 } else { r - 1e-12 };
        let w = prof.warp(inside);
        assert!((w.phi - phi).abs() < 1e-8, "phi at {r}");
        assert!((w.dphi - dphi).abs() < 1e-8, "phi' at {r}");
    }
}

#[test]
fn gulliver_curvature_continuous_and_bounded() {
    let prof = build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap();
    let gp = prof.gulliver_params().unwrap();
    let a = gp.r1 - gp.epsilon;
    let b = gp.r1 + gp.epsilon;
    for j in [a, b] {
        let jump = (prof.curvature(j - 1e-10) - prof.curvature(j + 1e-10)).abs();
        assert!(jump < 1e-6, "curvature jump {jump} at {j}");
    }
    // fine scan: no jumps between neighbours beyond what the local slope explains
    let h = 1e-6;
    let mut r = a - 1e-4;
    let mut prev = prof.curvature(r);
    let mut max_k: f64 = f64::NEG_INFINITY;
    while r < b + 1e-4 {
        r += h;
        let k = prof.curvature(r);
        assert!((k - prev).abs() < 0.05, "jump at r = {r}: {prev} -> {k}");
        prev = k;
        max_k = max_k.max(k);
    }
    assert!(max_k <= 1.0 + 1e-9);
    // sec <= G with G the least non-increasing majorant, and G runs from 1 down to -1
    let samples: Vec<f64> = (0..=2000).map(|i| i as f64 * 1.5 / 2000.0).collect();
    let ks: Vec<f64> = samples.iter().map(|&r| prof.curvature(r)).collect();
    let mut g = vec![f64::NEG_INFINITY; ks.len()];
    let mut run = f64::NEG_INFINITY;
    for i in (0..ks.len()).rev() {
        run = run.max(ks[i]);
        g[i] = run;
    }
    assert!((g[0] - 1.0).abs() < 1e-12);
    assert!((g[g.len() - 1] + 1.0).abs() < 1e-12);
    for i in 1..g.len() {
        assert!(g[i] <= g[i - 1]);
        assert!(ks[i] <= g[i]);
    }
}

#[test]
fn gulliver_glue_table_export() {
    let prof = build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap();
    let table = prof.glue_table().unwrap();
    let gp = prof.gulliver_params().unwrap();
    assert!((table[0].r - (gp.r1 - gp.epsilon)).abs() < 1e-15);
    assert!((table.last().unwrap().r - (gp.r1 + gp.epsilon)).abs() < 1e-15);
    for w in table.windows(2) {
        assert!(w[1].r - w[0].r <= 2.5e-5 + 1e-15);
    }
    assert!((table[0].k - 1.0).abs() < 1e-9);
    assert!((table.last().unwrap().k + 1.0).abs() < 1e-9);
}

#[test]
fn cone_profile() {
    let delta = 0.05;
    let rc = 1e-3;
    let prof = build_cone_profile(delta, rc).unwrap();
    let beta = 0.5 * (1.0 - delta);
    assert!((prof.phi(2.0) - 0.95).abs() < 1e-15);
    for r in [rc, 0.01, 1.0, 7.0] {
        assert_eq!(prof.gauss_curvature(r).unwrap(), 0.0);
    }
    // C² at the joint
    let inner = prof.warp(rc * (1.0 - 1e-12));
    assert!((inner.phi - beta * rc).abs() < 1e-14);
    assert!((inner.dphi - beta).abs() < 1e-10);
    assert!(inner.ddphi.abs() < 1e-6);
    // φ = βr exactly outside forces φ' - β to change sign in the cap: φ' falls from 1
    // until r_cap/√3, then climbs back to β
    let knee = rc / 3f64.sqrt();
    let mut prev = 1.0 + 1e-12;
    for i in 0..=1000 {
        let r = rc * i as f64 / 1000.0;
        let d = prof.phi_prime(r);
        assert!(d <= 1.0 + 1e-12);
        if r < knee {
            assert!(d <= prev + 1e-12);
        } else {
            assert!(d >= prev - 1e-12);
        }
        prev = d;
    }
    assert!((prev - beta).abs() < 1e-12);
    // Gauss-Bonnet on the cap: ∫ K φ dr = φ'(0) - φ'(r_cap) = 1 - β
    let n = 20000;
    let hq = rc / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let r = (i as f64 + 0.5) * hq;
        total += prof.curvature(r) * prof.phi(r) * hq;
    }
    assert!((total - (1.0 - beta)).abs() < 1e-6, "{total}");
    assert!((prof.curvature(0.0) - 24.0 * (1.0 - beta) / (rc * rc)).abs() < 1e-6);
    assert!(build_cone_profile(1.2, 1e-3).is_err());
    assert!(build_cone_profile(0.05, 0.0).is_err());
}

#[test]
fn paraboloid_against_quadrature() {
    let prof = build_paraboloid_profile();
    // meridian arclength by composite Simpson in the horizontal radius
    let arclength = |rho: f64| {
        let n = 2000;
        let h = rho / n as f64;
        let f = |x: f64| (1.0 + x * x).sqrt();
        let mut s = f(0.0) + f(rho);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    };
    for rho in [0.05, 0.3, 1.0, 2.5, 5.0] {
        let r = arclength(rho);
        assert!((prof.phi(r) - rho).abs() < 1e-9, "rho = {rho}");
        let k = 1.0 / (1.0 + rho * rho).powi(2);
        let w = prof.warp(r);
        assert!((-w.ddphi / w.phi - k).abs() < 1e-9);
    }
    let mut prev = f64::INFINITY;
    for i in 0..200 {
        let k = prof.gauss_curvature(i as f64 * 0.1).unwrap();
        assert!(k > 0.0 && k < prev);
        prev = k;
    }
}

#[test]
fn f32_profiles() {
    let s: Profile<f32> = Profile::sphere();
    assert!((s.gauss_curvature(0.7f32).unwrap() - 1.0).abs() < 1e-5);
    let g64 = build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap();
    let g32: Profile<f32> = g64.cast();
    for r in [0.3f32, 0.8, 2.0] {
        let rel = (g32.phi(r) as f64 - g64.phi(r as f64)).abs() / g64.phi(r as f64);
        assert!(rel < 1e-5);
    }
}

#[test]
fn profile_configs_resolve_and_validate() {
    let c: ProfileConfig = serde_json::from_str(r#"{"kind": "cone", "params": {"delta": 0.3}}"#).unwrap();
    let r = c.resolved();
    assert_eq!(r.params.delta, Some(0.3));
    assert_eq!(r.params.r_cap, Some(1e-3));
    assert_eq!(c.build().unwrap().kind(), ProfileKind::Cone);
    let g = ProfileConfig::new(ProfileKind::Gulliver).resolved();
    assert_eq!((g.params.r1, g.params.epsilon), (Some(GULLIVER_R1), Some(GULLIVER_EPSILON)));
    let bad = [
        r#"{"kind": "sphere", "params": {"delta": 0.1}}"#,
        r#"{"kind": "sphere", "r_max": 2.0}"#,
        r#"{"kind": "plane", "r_max": -1.0}"#,
        r#"{"kind": "gulliver", "params": {"r1": 0.75, "epsilon": 0.05}}"#,
        r#"{"kind": "cone", "params": {"r1": 0.75}}"#,
    ];
    for text in bad {
        let c: ProfileConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(c.build(), Err(ProfileError::Precondition(_))), "{text}");
    }
    assert!(serde_json::from_str::<ProfileConfig>(r#"{"kind": "torus"}"#).is_err());
    assert!(serde_json::from_str::<ProfileConfig>(r#"{"kind": "plane", "extra": 1}"#).is_err());
    let plane: ProfileConfig = serde_json::from_str(r#"{"kind": "plane", "r_max": 7.5}"#).unwrap();
    assert_eq!(plane.build().unwrap().r_max(), 7.5);
}
