mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use convrad::profiles::*;
use convrad::radii::Radius;
use convrad::theorems::*;
use proptest::prelude::*;

fn sphere() -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_sphere_profile())
}

fn cone(delta: f64) -> SurfaceMetric<f64> {
    SurfaceMetric::new(build_cone_profile(delta, CONE_R_CAP).unwrap())
}

fn small(n: usize) -> SuiteOptions {
    SuiteOptions {
        n_points: n,
        ..SuiteOptions::default()
    }
}

fn assert_clean(recs: &[VerificationRecord]) {
    for r in recs {
        assert!(!r.is_failure(), "{r:#?}");
    }
}

#[test]
fn suite_ids_round_trip() {
    for c in Claim::ALL {
        assert_eq!(c.as_str().parse::<Claim>().unwrap(), c);
        assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
    }
    assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
    assert_eq!("half-conjugate".parse::<Suite>().unwrap(), Suite::One(Claim::HalfConjugate));
    assert!("convexity".parse::<Suite>().is_err());
}

#[test]
fn comparisons_with_the_horizon() {
    let m = sphere();
    let h = Radius::beyond(20.0);
    let rec = |a: Radius, rel, b: Radius| {
        VerificationRecord::compare(
            Claim::RadiusOrdering,
            "x",
            &m,
            vec![],
            Quantity::new("a", a, "t"),
            rel,
            Quantity::new("b", b, "t"),
            1e-3,
        )
    };
    let both = rec(h, Relation::AtLeast, h);
    assert!(both.passed() && both.flags.vacuous && both.slack.is_none());
    let upper = rec(h, Relation::AtLeast, Radius::Finite(3.0));
    assert!(upper.passed() && upper.flags.horizon_limited && !upper.flags.vacuous);
    assert_eq!(upper.slack, Some(17.0));
    let lower = rec(Radius::Finite(3.0), Relation::AtLeast, h);
    assert!(lower.is_failure());
    let eq = rec(Radius::Finite(1.0), Relation::Equal, Radius::Finite(1.002));
    assert!(eq.is_failure());
    assert!((eq.slack.unwrap() + 0.002).abs() < 1e-12);
}

#[test]
fn summaries_count_verdicts() {
    let m = sphere();
    let q = |v| Quantity::exact("v", v);
    let recs = vec![
        VerificationRecord::holds(Claim::LoopStructure, "a", &m, vec![], q(1.0), q(1.0), true),
        VerificationRecord::holds(Claim::LoopStructure, "b", &m, vec![], q(1.0), q(2.0), false),
        VerificationRecord::not_applicable(Claim::LoopStructure, "c", &m, vec![], q(1.0), q(2.0), "why"),
    ];
    let s = summarize(&recs);
    assert_eq!((s.total, s.passed, s.failed, s.not_applicable, s.non_vacuous_failures), (3, 1, 1, 1, 1));
    let csv = summary_csv(&recs);
    assert!(csv.starts_with("claim,check,profile,verdict,slack,tolerance,flags\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.contains(",n/a,"));
}

#[test]
fn sphere_convexity_bound_is_a_quarter_turn() {
    let m = sphere();
    let opts = small(2);
    let samples = sample_points(&m, &opts).unwrap();
    for d in &samples {
        let recs = convexity_bound(&m, d, &opts);
        assert_clean(&recs);
        let bound = recs[0].rhs.value.value().unwrap();
        assert!((bound - FRAC_PI_2).abs() < 1e-5, "{bound}");
        // K = 1 everywhere: the classical bound coincides
        let classical = recs[3].rhs.value.value().unwrap();
        assert!((classical - FRAC_PI_2).abs() < 1e-5);
    }
    let global = global_convexity(&m, &samples, &opts);
    assert_clean(&global);
    assert!(global.iter().any(|r| r.check.starts_with("homogeneous")));
    let cut = conjugate_cut_bound(&m, &samples[0], &opts).unwrap();
    assert!(cut.passed() && cut.flags.best_effort);
    assert!((cut.lhs.value.value().unwrap() - FRAC_PI_2).abs() < 1e-3);
}

#[test]
fn short_geodesics_stay_short() {
    let opts = small(1);
    for m in [sphere(), cone(0.05), SurfaceMetric::new(build_plane_profile())] {
        let d = &sample_points(&m, &opts).unwrap()[0];
        let rec = short_geodesics(&m, d, 24, 7, &opts).unwrap();
        assert!(rec.passed(), "{rec:#?}");
        let longest = rec.rhs.value.value().unwrap();
        assert!(longest > 0.0);
    }
}

#[test]
fn cone_pairs_have_nonnegative_decay_slack() {
    let m = cone(0.05);
    let opts = small(3);
    let samples = sample_points(&m, &opts).unwrap();
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let recs = injectivity_decay(&m, &samples[a], &samples[b], &opts).unwrap();
        assert!(recs[0].slack.unwrap() >= 0.0, "{:#?}", recs[0]);
        // no conjugate points on the cone: the Lipschitz form applies
        assert_eq!(recs[1].verdict, Verdict::Pass, "{:#?}", recs[1]);
    }
}

#[test]
fn cone_sharpness_matches_the_development() {
    let s = verify_cone_sharpness(0.05, 0.1, &SuiteOptions::default()).unwrap();
    let beta = common::cone_beta(0.05);
    let expected = (PI * beta).sin();
    assert!((s.ratio_expected - 0.996917).abs() < 1e-6);
    assert!((s.ratio_expected - expected).abs() < 1e-12);
    for &(r, v) in &s.inj {
        let v = v.value().unwrap();
        assert!((v - r * expected).abs() <= 1e-3 * r * expected, "r = {r}: {v}");
    }
    assert!(s.ratios.iter().all(|&x| (x - expected).abs() < 1e-3 && x > 0.9));
    assert_clean(&s.records);
    assert!(s.records.iter().any(|r| r.check == "inj(2) / inj(3) = 2/3"));
}

#[test]
fn wide_cones_miss_the_sharpness_precondition() {
    let s = verify_cone_sharpness(0.3, 0.1, &SuiteOptions::default()).unwrap();
    let pre: Vec<_> = s.records.iter().filter(|r| r.flags.precondition_violated).collect();
    assert_eq!(pre.len(), 1);
    assert_eq!(pre[0].verdict, Verdict::NotApplicable);
    assert!(!s.records.iter().any(|r| r.check.starts_with("Lipschitz ratio exceeds")));
    assert_clean(&s.records);
}

#[test]
fn glued_metric_reproduces_the_discontinuity() {
    let opts = DiscontinuityOptions {
        n_points_conj: 4,
        n_dirs_conj: 64,
        ..DiscontinuityOptions::default()
    };
    let rep = reproduce_gulliver_discontinuity(GULLIVER_R1, GULLIVER_EPSILON, &opts).unwrap();
    assert_clean(&rep.records);
    assert_eq!(rep.records.len(), 11);
    // the inward radial geodesic reaches J' = 0 at length π/2 inside the round cap
    let lo = FRAC_PI_2 - (GULLIVER_R1 + GULLIVER_EPSILON);
    let hi = FRAC_PI_2 - (GULLIVER_R1 - GULLIVER_EPSILON);
    assert!(rep.t0 > lo && rep.t0 <= hi + 1e-9, "{}", rep.t0);
    assert!(!rep.z.conv_ct.is_finite());
    assert!(rep.z_i.iter().all(|z| z.conv_ct.or_inf() < 2.0));
    let limit = rep.records.iter().find(|r| r.claim == Claim::FocalLimit).unwrap();
    assert!(limit.passed());
}

#[test]
fn glue_parameters_are_validated() {
    let err = reproduce_gulliver_discontinuity(0.75, 0.05, &DiscontinuityOptions::default()).unwrap_err();
    assert!(matches!(err, TheoremError::Profile(_)), "{err}");
    let err = focal_discontinuity(&sphere(), &DiscontinuityOptions::default()).unwrap_err();
    assert!(matches!(err, TheoremError::WrongProfile { .. }));
}

#[test]
fn profile_specific_suites_refuse_other_profiles() {
    let err = run_suite(&sphere(), Suite::One(Claim::ConeSharpness), &small(1)).unwrap_err();
    assert_eq!(err.to_string(), "suite cone-sharpness needs a cone profile, got sphere");
}

#[test]
fn suites_are_deterministic() {
    let m = SurfaceMetric::new(build_plane_profile());
    let opts = SuiteOptions {
        n_points: 3,
        seed: 11,
        ..SuiteOptions::default()
    };
    let a = run_suite(&m, Suite::All, &opts).unwrap();
    let b = run_suite(&m, Suite::All, &opts).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_clean(&a);
    // everything on the plane is beyond the horizon or a closed form
    assert!(a.iter().any(|r| r.flags.vacuous));
}

#[test]
fn sphere_structure_checks() {
    let m = sphere();
    let opts = small(2);
    let samples = sample_points(&m, &opts).unwrap();
    for d in &samples {
        assert_clean(&radius_ordering(&m, d, &opts));
        assert_clean(&concentric_radii(&m, d, &opts).unwrap());
        // the nearest cut point is the antipode, conjugate along every geodesic
        let rec = loop_structure(&m, d, &opts).unwrap();
        assert_eq!(rec.verdict, Verdict::NotApplicable);
    }
    // Cut(q) is the antipode, totally conjugate to q, so no structure is claimed
    let per = perimeter_structure(&m, samples[0].p, samples[1].p, &opts).unwrap();
    assert_eq!(per.verdict, Verdict::NotApplicable, "{per:#?}");
    let half = half_conjugate(&m, &samples, &opts);
    assert!(half.passed() && half.flags.sampled_infimum);
    assert!((half.lhs.value.value().unwrap() - FRAC_PI_2).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn verdict_follows_slack(a in 0.0..10.0f64, b in 0.0..10.0f64, tol in 0.0..1e-2f64, eq in any::<bool>()) {
        let m = sphere();
        let rel = if eq { Relation::Equal } else { Relation::AtLeast };
        let r = VerificationRecord::compare(
            Claim::ConvexityBound, "x", &m, vec![],
            Quantity::exact("a", a), rel, Quantity::exact("b", b), tol,
        );
        let slack = r.slack.unwrap();
        prop_assert_eq!(r.passed(), slack >= -tol);
        prop_assert!(!r.flags.vacuous && !r.flags.horizon_limited);
    }

    #[test]
    fn sample_radii_are_seeded_and_in_range(seed in any::<u64>(), n in 1usize..40) {
        for m in [sphere(), cone(0.05), SurfaceMetric::new(build_gulliver_profile(GULLIVER_R1, GULLIVER_EPSILON).unwrap())] {
            let a = sample_radii(&m, n, seed);
            prop_assert_eq!(&a, &sample_radii(&m, n, seed));
            prop_assert_eq!(a.len(), n);
            prop_assert!(a.iter().all(|&r| r >= 0.0 && r <= m.profile.r_max()));
        }
    }
}
