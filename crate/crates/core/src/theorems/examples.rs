use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::{Claim, Quantity, Relation, SuiteOptions, TheoremError, VerificationRecord};
use crate::cutlocus::{cut_decay_radius, injectivity_radius, DecayOptions};
use crate::odes::{comparison_solution, scan_events, TOUCH_TOL};
use crate::profiles::{build_cone_profile, build_gulliver_profile, Point, ProfileKind, SurfaceMetric, CONE_R_CAP};
use crate::radii::{conj_radius, jacobi_radii, radial_sweep, Radius, ScanOptions, SweepRow};

/// One row of the focal sweep along a meridian.
pub type SweepPoint = SweepRow;

#[derive(Debug, Clone, Serialize)]
pub struct DiscontinuityOptions {
    pub horizon: f64,
    /// Sweep radii on `[0, r1 + ε]`.
    pub n_sweep: usize,
    pub n_dirs: usize,
    /// Points and directions of the no-conjugate-points scan.
    pub n_points_conj: usize,
    pub n_dirs_conj: usize,
    /// Outer radius of the no-conjugate-points scan.
    pub conj_r_max: f64,
    /// Distances of the `z_i` from `z`, outward along the meridian.
    pub offsets: Vec<f64>,
    pub decay: DecayOptions,
    /// Switch time of the comparison solution.
    pub t1: f64,
}

impl Default for DiscontinuityOptions {
    fn default() -> Self {
        Self {
            horizon: 20.0,
            n_sweep: 41,
            n_dirs: 64,
            n_points_conj: 32,
            n_dirs_conj: 512,
            conj_r_max: 3.0,
            offsets: vec![4e-3, 2e-3, 1e-3],
            decay: DecayOptions::default(),
            t1: 1.7,
        }
    }
}

/// Radii at a point of the discontinuity picture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvCt {
    pub point: Point<f64>,
    pub foc: Radius,
    pub foc_e: Radius,
    pub r_c: Radius,
    pub conv_ct: Radius,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscontinuityReport {
    pub sweep: Vec<SweepPoint>,
    /// Radius where the inward radial Jacobi field first reaches `J' = 0`.
    pub t0: f64,
    pub z: ConvCt,
    pub z_i: Vec<ConvCt>,
    pub records: Vec<VerificationRecord>,
}

fn conv_ct_at(metric: &SurfaceMetric<f64>, p: Point<f64>, scan: &ScanOptions, decay: &DecayOptions) -> Result<ConvCt, TheoremError> {
    let jr = jacobi_radii(metric, p, scan)?;
    let r_c = cut_decay_radius(metric, p, decay)?.value;
    Ok(ConvCt {
        point: p,
        foc: jr.foc,
        foc_e: jr.foc_e,
        r_c,
        conv_ct: jr.foc_e.min(r_c),
    })
}

/// Bisect on the minimum of `J'` along the inward radial geodesic for the radius
/// where it touches zero. Returns the radius and the touch time.
fn locate_t0(metric: &SurfaceMetric<f64>, lo: f64, hi: f64, horizon: f64) -> Result<(f64, f64), TheoremError> {
    let min_jp = |r: f64| scan_events(metric, Point::new(r, 0.0), PI, horizon, TOUCH_TOL);
    let (mut lo, mut hi) = (lo, hi);
    let mut best = (hi, min_jp(hi)?.jp_min_t);
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        let ev = min_jp(m)?;
        if ev.jp_min > TOUCH_TOL {
            lo = m;
        } else {
            best = (m, ev.jp_min_t);
            if ev.jp_min < -TOUCH_TOL {
                hi = m;
            } else {
                break;
            }
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(best)
}

/// The glued-metric picture end to end: a focal sweep, the touch radius `t0`,
/// `conv_ct` at `z = (t0, 0)` and at points just outside, the limit of `foc_e`, the
/// absence of conjugate points and the comparison solution.
pub fn focal_discontinuity(
    metric: &SurfaceMetric<f64>,
    opts: &DiscontinuityOptions,
) -> Result<DiscontinuityReport, TheoremError> {
    let Some(g) = metric.profile.gulliver_params() else {
        return Err(TheoremError::WrongProfile {
            suite: Claim::FocalDiscontinuity,
            needs: ProfileKind::Gulliver,
            got: metric.profile.kind(),
        });
    };
    let h = opts.horizon;
    let scan = ScanOptions {
        n_dirs: opts.n_dirs,
        horizon: h,
        ..ScanOptions::default()
    };
    let decay = DecayOptions { horizon: h, ..opts.decay };
    let r_top = g.r1 + g.epsilon;
    let sweep = radial_sweep(metric, 0.0, r_top, opts.n_sweep, &scan)?;
    let Some(first) = sweep.iter().position(|s| s.foc.is_finite()) else {
        return Err(TheoremError::NoFiniteFocus { r_top, sweep });
    };
    let c = Claim::FocalDiscontinuity;
    let pts = |rs: &[f64]| rs.iter().map(|&r| Point::new(r, 0.0)).collect::<Vec<_>>();
    let sweep_pts = pts(&sweep.iter().map(|s| s.r).collect::<Vec<_>>());
    let min_foc = sweep.iter().map(|s| s.foc).fold(Radius::beyond(h), Radius::min);
    let mut records = vec![VerificationRecord::compare(
        c,
        "sweep minimum of foc is at most 2",
        metric,
        sweep_pts.clone(),
        Quantity::exact("2", 2.0),
        Relation::AtLeast,
        Quantity::new("min foc over the sweep", min_foc, "radial sweep"),
        0.0,
    )];
    let near = sweep
        .iter()
        .filter_map(|s| s.foc.value())
        .min_by(|a, b| (a - FRAC_PI_2).abs().partial_cmp(&(b - FRAC_PI_2).abs()).unwrap())
        .unwrap();
    records.push(VerificationRecord::compare(
        c,
        "some swept foc equals pi/2",
        metric,
        sweep_pts.clone(),
        Quantity::new("foc closest to pi/2", Radius::Finite(near), "radial sweep"),
        Relation::Equal,
        Quantity::exact("pi/2", FRAC_PI_2),
        1e-3,
    ));
    records.push(VerificationRecord::holds(
        c,
        "foc at the pole is beyond the horizon",
        metric,
        vec![Point::new(0.0, 0.0)],
        Quantity::new("foc(o)", sweep[0].foc, "radial sweep"),
        Quantity::new("expected", Radius::beyond(h), "construction"),
        !sweep[0].foc.is_finite(),
    ));

    let lo = if first == 0 { 0.0 } else { sweep[first - 1].r };
    let (t0, touch_t) = locate_t0(metric, lo, sweep[first].r, h)?;
    let z_pt = Point::new(t0, 0.0);
    let mut z = conv_ct_at(metric, z_pt, &scan, &decay)?;
    // the touch itself sits on the grid direction ψ = π
    z.foc = z.foc.min(Radius::Finite(touch_t));
    let z_i = opts
        .offsets
        .par_iter()
        .map(|&o| conv_ct_at(metric, Point::new(t0 + o, 0.0), &scan, &decay))
        .collect::<Result<Vec<_>, _>>()?;

    records.push(VerificationRecord::compare(
        c,
        "conv_ct(z) > 10",
        metric,
        vec![z_pt],
        Quantity::new("conv_ct(z)", z.conv_ct, "min(foc_e, R_c)"),
        Relation::AtLeast,
        Quantity::exact("10", 10.0),
        0.0,
    ));
    records.push(VerificationRecord::holds(
        c,
        "foc_e(z) is beyond the horizon",
        metric,
        vec![z_pt],
        Quantity::new("foc_e(z)", z.foc_e, "Jacobi scan"),
        Quantity::new("expected", Radius::beyond(h), "construction"),
        !z.foc_e.is_finite(),
    ));
    for zi in &z_i {
        records.push(VerificationRecord::compare(
            c,
            format!("conv_ct(z_i) < 2 at offset {:.0e}", zi.point.r - t0),
            metric,
            vec![zi.point],
            Quantity::exact("2", 2.0),
            Relation::AtLeast,
            Quantity::new("conv_ct(z_i)", zi.conv_ct, "min(foc_e, R_c)"),
            0.0,
        ));
    }
    let closest = z_i
        .iter()
        .min_by(|a, b| a.point.r.partial_cmp(&b.point.r).unwrap())
        .expect("at least one offset");
    records.push(
        VerificationRecord::compare(
            Claim::FocalLimit,
            format!("foc_e(z_i) -> foc(z) at offset {:.0e}", closest.point.r - t0),
            metric,
            vec![closest.point, z_pt],
            Quantity::new("foc_e(z_i)", closest.foc_e, "Jacobi scan"),
            Relation::Equal,
            Quantity::new("foc(z)", z.foc, "touch of J' on the inward radial"),
            5e-2,
        )
        .with_note(
            z_i.iter()
                .map(|zi| format!("offset {:.0e}: foc_e {:?}", zi.point.r - t0, zi.foc_e))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    );

    let n = opts.n_points_conj.max(1);
    let conj_pts: Vec<Point<f64>> = (0..n)
        .map(|k| Point::new(opts.conj_r_max * k as f64 / (n.max(2) - 1) as f64, 0.0))
        .collect();
    let conj_scan = ScanOptions {
        n_dirs: opts.n_dirs_conj,
        ..scan
    };
    let conj = conj_pts
        .iter()
        .map(|&p| conj_radius(metric, p, &conj_scan))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(Radius::beyond(h), Radius::min);
    records.push(
        VerificationRecord::holds(
            c,
            format!("no conjugate points along {} directions from {n} points", opts.n_dirs_conj),
            metric,
            conj_pts,
            Quantity::new("min conj", conj, "Jacobi scans"),
            Quantity::new("expected", Radius::beyond(h), "construction"),
            !conj.is_finite(),
        )
        .with_flags(|f| f.horizon_limited = true),
    );

    let cmp = comparison_solution(opts.t1, h, 1e-3)?;
    records.push(VerificationRecord::holds(
        c,
        format!("comparison solution with switch time {}: u > 0 and u' > 0 after 2", opts.t1),
        metric,
        Vec::new(),
        Quantity::exact("u > 0, u' > 0 after 2", if cmp.positive && cmp.increasing_after_two { 1.0 } else { 0.0 }),
        Quantity::exact("expected", 1.0),
        cmp.positive && cmp.increasing_after_two,
    ));

    Ok(DiscontinuityReport {
        sweep,
        t0,
        z,
        z_i,
        records,
    })
}

/// Build the glued metric from `(r1, ε)` and run [`focal_discontinuity`].
pub fn reproduce_gulliver_discontinuity(
    r1: f64,
    epsilon: f64,
    opts: &DiscontinuityOptions,
) -> Result<DiscontinuityReport, TheoremError> {
    let metric = SurfaceMetric::new(build_gulliver_profile(r1, epsilon)?);
    focal_discontinuity(&metric, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeSharpness {
    pub delta: f64,
    /// `cos(δπ/2)`.
    pub ratio_expected: f64,
    /// `(r, inj(r))` on one ray.
    pub inj: Vec<(f64, Radius)>,
    /// `|inj(p) - inj(q)| / d(p, q)` over consecutive radii.
    pub ratios: Vec<f64>,
    pub records: Vec<VerificationRecord>,
}

/// The flat cone: `inj(r) = r cos(δπ/2)` on one ray, the Lipschitz ratio of `inj`
/// against `1 - ε`, and the decay inequality nearly tight along the ray.
pub fn cone_sharpness(
    metric: &SurfaceMetric<f64>,
    radii: &[f64],
    eps_target: f64,
    opts: &SuiteOptions,
) -> Result<ConeSharpness, TheoremError> {
    let Some((beta, r_cap)) = metric.profile.cone_params() else {
        return Err(TheoremError::WrongProfile {
            suite: Claim::ConeSharpness,
            needs: ProfileKind::Cone,
            got: metric.profile.kind(),
        });
    };
    let delta = 1.0 - 2.0 * beta;
    let cos = (delta * FRAC_PI_2).cos();
    let c = Claim::ConeSharpness;
    let mut records = Vec::new();
    let precondition = cos > 1.0 - eps_target;
    if !precondition {
        records.push(
            VerificationRecord::not_applicable(
                c,
                "cos(delta pi/2) > 1 - epsilon",
                metric,
                Vec::new(),
                Quantity::exact("cos(delta pi/2)", cos),
                Quantity::exact("1 - epsilon", 1.0 - eps_target),
                "angle defect too large for the requested epsilon",
            )
            .with_flags(|f| f.precondition_violated = true),
        );
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scan = opts.report.scan;
    let inj = radii
        .par_iter()
        .map(|&r| Ok((r, injectivity_radius(metric, Point::new(r, 0.0), &scan, opts.report.n_loop_dirs)?.inj)))
        .collect::<Result<Vec<_>, TheoremError>>()?;
    for &(r, v) in &inj {
        let check = format!("inj(r) = r cos(delta pi/2) at r = {r}");
        let expected = Quantity::exact("r cos(delta pi/2)", r * cos);
        let got = Quantity::new("inj(r)", v, "min(l/2, conj)");
        if r < 10.0 * r_cap {
            records.push(VerificationRecord::not_applicable(
                c,
                check,
                metric,
                vec![Point::new(r, 0.0)],
                got,
                expected,
                "inside ten cap radii",
            ));
        } else {
            records.push(VerificationRecord::compare(
                c,
                check,
                metric,
                vec![Point::new(r, 0.0)],
                got,
                Relation::Equal,
                expected,
                1e-3 * r * cos,
            ));
        }
    }
    let mut ratios = Vec::new();
    for w in inj.windows(2) {
        let ((ra, a), (rb, b)) = (w[0], w[1]);
        let (Some(a), Some(b)) = (a.value(), b.value()) else { continue };
        let d = rb - ra;
        let ratio = (b - a).abs() / d;
        ratios.push(ratio);
        let pts = vec![Point::new(ra, 0.0), Point::new(rb, 0.0)];
        let got = || Quantity::new("|inj(p) - inj(q)| / d(p, q)", Radius::Finite(ratio), "same ray");
        if precondition {
            records.push(VerificationRecord::compare(
                c,
                format!("Lipschitz ratio exceeds 1 - epsilon on [{ra}, {rb}]"),
                metric,
                pts.clone(),
                got(),
                Relation::AtLeast,
                Quantity::exact("1 - epsilon", 1.0 - eps_target),
                0.0,
            ));
        }
        records.push(VerificationRecord::compare(
            c,
            format!("Lipschitz ratio equals cos(delta pi/2) on [{ra}, {rb}]"),
            metric,
            pts.clone(),
            got(),
            Relation::Equal,
            Quantity::exact("cos(delta pi/2)", cos),
            1e-3,
        ));
        records.push(VerificationRecord::compare(
            c,
            format!("decay slack inj(q) - (inj(p) - d) = 1 - cos(delta pi/2), p = {rb}, q = {ra}"),
            metric,
            pts,
            Quantity::new("slack", Radius::Finite(a - (b - d)), "same ray"),
            Relation::Equal,
            Quantity::exact("(1 - cos(delta pi/2)) d", (1.0 - cos) * d),
            1e-3,
        ));
    }
    if let [(r2, Some(a)), (r3, Some(b))] = inj
        .iter()
        .filter(|(r, _)| *r == 2.0 || *r == 3.0)
        .map(|&(r, v)| (r, v.value()))
        .collect::<Vec<_>>()[..]
    {
        records.push(VerificationRecord::compare(
            c,
            "inj(2) / inj(3) = 2/3",
            metric,
            vec![Point::new(r2, 0.0), Point::new(r3, 0.0)],
            Quantity::new("inj(2) / inj(3)", Radius::Finite(a / b), "same ray"),
            Relation::Equal,
            Quantity::exact("2/3", 2.0 / 3.0),
            1e-3,
        ));
    }
    Ok(ConeSharpness {
        delta,
        ratio_expected: cos,
        inj,
        ratios,
        records,
    })
}

/// Build the cone of angle defect `δ` and run [`cone_sharpness`] at `r ∈ {1, 2, 3, 5}`.
pub fn verify_cone_sharpness(delta: f64, eps_target: f64, opts: &SuiteOptions) -> Result<ConeSharpness, TheoremError> {
    let metric = SurfaceMetric::new(build_cone_profile(delta, CONE_R_CAP)?);
    cone_sharpness(&metric, &[1.0, 2.0, 3.0, 5.0], eps_target, opts)
}
