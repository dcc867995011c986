use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Claim, PointData, Quantity, Relation, SuiteOptions, TheoremError, VerificationRecord, Verdict};
use crate::cutlocus::{
    cut_locus, distance, minimize_perimeter, nearest_cut_point, CutOptions, DistanceOptions, PerimeterCase,
    PerimeterError, PerimeterOptions,
};
use crate::odes::shoot_geodesic;
use crate::profiles::{Point, ProfileKind, SurfaceMetric};
use crate::radii::{ball_conj_radius, ball_radii, extended_focal_radius, totally_conjugate_scan, Radius, ScanOptions};

fn q(label: &str, value: Radius, source: &str) -> Quantity {
    Quantity::new(label, value, source)
}

/// `r - d`, keeping "beyond the horizon" as "beyond `h - d`".
fn minus(r: Radius, d: f64) -> Radius {
    match r {
        Radius::Finite(v) => Radius::Finite(v - d),
        Radius::BeyondHorizon { beyond_horizon } => Radius::beyond(beyond_horizon - d),
    }
}

fn dist_opts(opts: &SuiteOptions) -> DistanceOptions {
    DistanceOptions {
        horizon: opts.horizon(),
        ..DistanceOptions::default()
    }
}

/// Largest curvature over the radii of `B_R(p)`.
fn max_curvature(metric: &SurfaceMetric<f64>, p: Point<f64>, big_r: f64) -> f64 {
    ball_radii(metric, p, big_r, 400)
        .into_iter()
        .filter_map(|r| metric.profile.gauss_curvature(r).ok())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Lower bound `min{foc(U), ½ inj(p)}` with `U = B_inj(p)(p)`, checked against the
/// cut-decay radius and `conv_lower`; the quarter-loop form; and the classical bound
/// `min{π/(2√K_max), ½ inj(p)}` not exceeding it.
pub fn convexity_bound(metric: &SurfaceMetric<f64>, d: &PointData, opts: &SuiteOptions) -> Vec<VerificationRecord> {
    let rep = &d.report;
    let pts = vec![d.p];
    let half_inj = rep.inj.scale(0.5);
    let bound = d.ball_foc.min(half_inj);
    let bound_q = || q("min(foc(U), inj(p)/2)", bound, "ball focal sweep; inj = min(l/2, conj)");
    let c = Claim::ConvexityBound;
    let mut out = vec![
        VerificationRecord::compare(
            c,
            "no cut points inside the bound: R_c(p) >= min(foc(U), inj(p)/2)",
            metric,
            pts.clone(),
            q("R_c(p)", rep.r_c, "cut-decay search"),
            Relation::AtLeast,
            bound_q(),
            opts.tol,
        ),
        VerificationRecord::compare(
            c,
            "conv_lower(p) >= min(foc(U), inj(p)/2)",
            metric,
            pts.clone(),
            q("conv_lower(p)", rep.conv_lower, "min(foc(B_Rc), R_c)"),
            Relation::AtLeast,
            bound_q(),
            opts.tol,
        ),
        VerificationRecord::compare(
            c,
            "min(foc(U), inj/2) = min(foc(U), l/4)",
            metric,
            pts.clone(),
            bound_q(),
            Relation::Equal,
            q("min(foc(U), l(p)/4)", d.ball_foc.min(rep.l_loop.scale(0.25)), "shortest loop"),
            opts.tol,
        ),
    ];
    let big_r = rep.inj.value().unwrap_or(opts.horizon());
    let k_max = max_curvature(metric, d.p, big_r);
    let classical_q = |v: Radius| q("min(pi/(2 sqrt(K_max)), inj(p)/2)", v, "curvature over the ball");
    if k_max > 0.0 {
        let classical = Radius::Finite(PI / (2.0 * k_max.sqrt())).min(half_inj);
        out.push(VerificationRecord::compare(
            c,
            "classical bound does not exceed the focal bound",
            metric,
            pts,
            bound_q(),
            Relation::AtLeast,
            classical_q(classical),
            opts.tol,
        ));
    } else {
        out.push(VerificationRecord::not_applicable(
            c,
            "classical bound does not exceed the focal bound",
            metric,
            pts,
            bound_q(),
            classical_q(Radius::beyond(opts.horizon())),
            format!("K_max = {k_max:.3e} <= 0 on the ball"),
        ));
    }
    out
}

/// Decay of the injectivity radius from `a` to `b`, and the Lipschitz bound when
/// neither point has conjugate points.
pub fn injectivity_decay(
    metric: &SurfaceMetric<f64>,
    a: &PointData,
    b: &PointData,
    opts: &SuiteOptions,
) -> Result<Vec<VerificationRecord>, TheoremError> {
    let d = distance(metric, a.p, b.p, &dist_opts(opts))?;
    let (ra, rb) = (&a.report, &b.report);
    let pts = vec![a.p, b.p];
    let c = Claim::InjectivityDecay;
    let mut out = vec![VerificationRecord::compare(
        c,
        "inj(q) >= min(inj(p), conj(q)) - d(p, q)",
        metric,
        pts.clone(),
        q("inj(q)", rb.inj, "min(l/2, conj)"),
        Relation::AtLeast,
        q("min(inj(p), conj(q)) - d(p, q)", minus(ra.inj.min(rb.conj), d), "shooting distance"),
        opts.tol,
    )];
    let lip = "|inj(p) - inj(q)| <= d(p, q)";
    let d_q = Quantity::new("d(p, q)", Radius::Finite(d), "shooting distance");
    if ra.conj.is_finite() || rb.conj.is_finite() {
        out.push(VerificationRecord::not_applicable(
            c,
            lip,
            metric,
            pts,
            d_q,
            q("|inj(p) - inj(q)|", Radius::beyond(opts.horizon()), "min(l/2, conj)"),
            "conjugate points present",
        ));
        return Ok(out);
    }
    let gap = match (ra.inj, rb.inj) {
        (Radius::Finite(x), Radius::Finite(y)) => Radius::Finite((x - y).abs()),
        (Radius::Finite(x), Radius::BeyondHorizon { beyond_horizon: h })
        | (Radius::BeyondHorizon { beyond_horizon: h }, Radius::Finite(x)) => Radius::Finite(h - x),
        _ => Radius::beyond(opts.horizon()),
    };
    let mut rec = VerificationRecord::compare(
        c,
        lip,
        metric,
        pts,
        d_q,
        Relation::AtLeast,
        q("|inj(p) - inj(q)|", gap, "min(l/2, conj)"),
        opts.tol,
    );
    if !ra.inj.is_finite() && !rb.inj.is_finite() {
        rec.flags.vacuous = true;
        rec.flags.horizon_limited = true;
        rec.slack = None;
        rec.verdict = Verdict::Pass;
    } else if !ra.inj.is_finite() || !rb.inj.is_finite() {
        // only a lower bound on the gap is known
        rec.flags.horizon_limited = true;
    }
    Ok(vec![out.remove(0), rec])
}

/// Endpoint of the geodesic from `p` with launch angle `psi` after length `t`.
fn exp_point(metric: &SurfaceMetric<f64>, p: Point<f64>, psi: f64, t: f64) -> Result<Point<f64>, TheoremError> {
    if t <= 0.0 {
        return Ok(p);
    }
    let path = shoot_geodesic(metric, p, psi, t)?;
    let s = path.state_at(path.length.min(t));
    Ok(Point::new(s.r, s.theta))
}

/// Length after which the geodesic from `x` at angle `psi` first leaves `B_r(p)`,
/// capped at `t_max`.
fn exit_time(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    r: f64,
    x: Point<f64>,
    psi: f64,
    t_max: f64,
    dopts: &DistanceOptions,
) -> Result<f64, TheoremError> {
    let path = shoot_geodesic(metric, x, psi, t_max)?;
    let inside = |t: f64| -> Result<bool, TheoremError> {
        let s = path.state_at(t);
        Ok(distance(metric, p, Point::new(s.r, s.theta), dopts)? < r)
    };
    let n = 8;
    let step = r / n as f64;
    let mut prev = 0.0;
    let mut t = step;
    while t <= path.length {
        if !inside(t)? {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..16 {
                let m = 0.5 * (lo + hi);
                if inside(m)? {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return Ok(hi);
        }
        prev = t;
        t += step;
    }
    Ok(path.length)
}

/// Monte Carlo over geodesic segments inside `B_r(p)`: none is longer than `2r`, for
/// `r` at 0.9 of `min{inj(p), ½ conj(B_inj(p)(p))}` (and at most 2).
pub fn short_geodesics(
    metric: &SurfaceMetric<f64>,
    d: &PointData,
    n_geodesics: usize,
    seed: u64,
    opts: &SuiteOptions,
) -> Result<VerificationRecord, TheoremError> {
    let prof = &metric.profile;
    let c = Claim::ShortGeodesics;
    let bound = d.report.inj.min(d.ball_conj.scale(0.5));
    let room = prof.far_pole().map_or(prof.r_max() - d.p.r, |_| f64::INFINITY);
    let r = (0.9 * bound.value().unwrap_or(opts.horizon())).min(2.0).min(0.9 * room);
    let check = format!("geodesics inside B_r(p), r = {r:.6}, have length <= 2r");
    if r < 1e-3 {
        return Ok(VerificationRecord::not_applicable(
            c,
            check,
            metric,
            vec![d.p],
            Quantity::exact("2r", 2.0 * r),
            q("longest confined geodesic", Radius::Finite(0.0), "Monte Carlo"),
            "ball too small to sample",
        ));
    }
    let dopts = dist_opts(opts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_max = 2.0 * r + 0.5;
    let mut longest: f64 = 0.0;
    for _ in 0..n_geodesics {
        let psi0 = rng.gen_range(0.0..2.0 * PI);
        let rho = 0.98 * r * rng.gen::<f64>().sqrt();
        let x = exp_point(metric, d.p, psi0, rho)?;
        let psi1 = rng.gen_range(0.0..2.0 * PI);
        let fwd = exit_time(metric, d.p, r, x, psi1, t_max, &dopts)?;
        let bwd = exit_time(metric, d.p, r, x, psi1 + PI, t_max, &dopts)?;
        longest = longest.max(fwd + bwd);
    }
    Ok(VerificationRecord::compare(
        c,
        check,
        metric,
        vec![d.p],
        Quantity::exact("2r", 2.0 * r),
        Relation::AtLeast,
        q("longest confined geodesic", Radius::Finite(longest), "Monte Carlo exit times"),
        opts.tol,
    )
    .with_note(format!(
        "{n_geodesics} random chords; r <= 0.9 min(inj(p), conj(B_inj(p))/2) = 0.9 x {}",
        bound.value().map_or("beyond horizon".to_string(), |v| format!("{v:.6}"))
    )))
}

/// `conv_ct(p) ≥ min{foc_e(p), ½ inj(p), ½ conj_t(U)}`, `U` the ball of the first two
/// terms. `conj_t ≥ conj`, so the scan is skipped when `½ conj(U)` already exceeds
/// the other terms.
pub fn conjugate_cut_bound(
    metric: &SurfaceMetric<f64>,
    d: &PointData,
    opts: &SuiteOptions,
) -> Result<VerificationRecord, TheoremError> {
    let rep = &d.report;
    let h = opts.horizon();
    let scan = &opts.report.scan;
    let m = rep.foc_e.min(rep.inj.scale(0.5));
    let m_val = m.value().unwrap_or(h);
    let conj_u = ball_conj_radius(metric, d.p, m_val, opts.report.n_ball, scan)?.value;
    let (ct, note) = if conj_u.scale(0.5).or_inf() > m.or_inf() + opts.tol || !conj_u.is_finite() {
        (Radius::beyond(h), "conj(U)/2 exceeds the other terms; conj_t not scanned".to_string())
    } else {
        let copts = CutOptions::default().with_horizon(h);
        let mut best = Radius::beyond(h);
        let radii = ball_radii(metric, d.p, m_val, opts.n_conj_t.max(1));
        for &r in &radii {
            let x = Point::new(r, 0.0);
            let cut = cut_locus(metric, x, opts.report.n_cut, &copts)?;
            best = best.min(totally_conjugate_scan(metric, x, &cut, h, opts.report.conj_tol)?.value);
        }
        (best, format!("conj_t sampled at {} radii of U", radii.len()))
    };
    let rhs = m.min(ct.scale(0.5));
    Ok(VerificationRecord::compare(
        Claim::ConjugateCutBound,
        "conv_ct(p) >= min(foc_e(p), inj(p)/2, conj_t(U)/2)",
        metric,
        vec![d.p],
        q("conv_ct(p)", rep.conv_ct, "min(foc_e, R_c)"),
        Relation::AtLeast,
        q("min(foc_e(p), inj(p)/2, conj_t(U)/2)", rhs, "Jacobi scan; totally conjugate scan"),
        opts.tol,
    )
    .with_flags(|f| f.best_effort = true)
    .with_note(note))
}

/// `conv_ct = min(foc_e, R_c)` against `foc_e` recomputed on a doubled direction grid,
/// and `conv_lower ≤ conv_upper` exactly.
pub fn concentric_radii(
    metric: &SurfaceMetric<f64>,
    d: &PointData,
    opts: &SuiteOptions,
) -> Result<Vec<VerificationRecord>, TheoremError> {
    let rep = &d.report;
    let fine = ScanOptions {
        n_dirs: 2 * opts.report.scan.n_dirs,
        ..opts.report.scan
    };
    let foc_e = extended_focal_radius(metric, d.p, &fine)?;
    let c = Claim::ConcentricRadii;
    Ok(vec![
        VerificationRecord::compare(
            c,
            "conv_ct(p) = min(foc_e(p), R_c(p))",
            metric,
            vec![d.p],
            q("conv_ct(p)", rep.conv_ct, "report"),
            Relation::Equal,
            q("min(foc_e(p), R_c(p))", foc_e.min(rep.r_c), "foc_e on a doubled grid"),
            opts.tol,
        ),
        VerificationRecord::compare(
            c,
            "conv_lower(p) <= conv_upper(p)",
            metric,
            vec![d.p],
            q("conv_upper(p)", rep.conv_upper, "min(foc, R_c)"),
            Relation::AtLeast,
            q("conv_lower(p)", rep.conv_lower, "min(foc(B_Rc), R_c)"),
            0.0,
        ),
    ])
}

/// `foc ≤ foc_e ≤ conj`, strict on the right when `conj` is finite.
pub fn radius_ordering(metric: &SurfaceMetric<f64>, d: &PointData, opts: &SuiteOptions) -> Vec<VerificationRecord> {
    let rep = &d.report;
    let c = Claim::RadiusOrdering;
    let tol = 1e-9;
    let mut out = vec![
        VerificationRecord::compare(
            c,
            "foc_e(p) >= foc(p)",
            metric,
            vec![d.p],
            q("foc_e(p)", rep.foc_e, "Jacobi scan"),
            Relation::AtLeast,
            q("foc(p)", rep.foc, "Jacobi scan"),
            tol,
        ),
        VerificationRecord::compare(
            c,
            "conj(p) >= foc_e(p)",
            metric,
            vec![d.p],
            q("conj(p)", rep.conj, "Jacobi scan"),
            Relation::AtLeast,
            q("foc_e(p)", rep.foc_e, "Jacobi scan"),
            tol,
        ),
    ];
    if let (Some(cj), Some(fe)) = (rep.conj.value(), rep.foc_e.value()) {
        out.push(
            VerificationRecord::holds(
                c,
                "foc_e(p) < conj(p) when conj(p) is finite",
                metric,
                vec![d.p],
                q("foc_e(p)", rep.foc_e, "Jacobi scan"),
                q("conj(p)", rep.conj, "Jacobi scan"),
                fe < cj - opts.tol.min(1e-6),
            )
            .with_note(format!("gap {:.3e}", cj - fe)),
        );
    }
    out
}

fn sampled_min(samples: &[PointData], h: f64, f: impl Fn(&PointData) -> Radius) -> Radius {
    samples.iter().map(f).fold(Radius::beyond(h), Radius::min)
}

/// `foc(M) ≤ ½ conj(M)` with infima replaced by minima over the samples.
pub fn half_conjugate(metric: &SurfaceMetric<f64>, samples: &[PointData], opts: &SuiteOptions) -> VerificationRecord {
    let h = opts.horizon();
    let foc = sampled_min(samples, h, |d| d.report.foc);
    let conj = sampled_min(samples, h, |d| d.report.conj);
    VerificationRecord::compare(
        Claim::HalfConjugate,
        "min foc <= min conj / 2 over the samples",
        metric,
        samples.iter().map(|d| d.p).collect(),
        q("min conj / 2", conj.scale(0.5), "Jacobi scans"),
        Relation::AtLeast,
        q("min foc", foc, "Jacobi scans"),
        opts.tol,
    )
    .with_flags(|f| f.sampled_infimum = true)
}

/// `conv(M) = min{foc(M), ½ inj(M)}` on sampled minima (`conv_ct` standing for `conv`).
/// The lower bound direction is checked on every profile; on a cone, where both
/// infima are approached at the vertex, the identity is checked through dilation
/// invariance of both sides.
pub fn global_convexity(
    metric: &SurfaceMetric<f64>,
    samples: &[PointData],
    opts: &SuiteOptions,
) -> Vec<VerificationRecord> {
    let h = opts.horizon();
    let pts: Vec<Point<f64>> = samples.iter().map(|d| d.p).collect();
    let conv = sampled_min(samples, h, |d| d.report.conv_ct);
    let bound = sampled_min(samples, h, |d| d.report.foc).min(sampled_min(samples, h, |d| d.report.inj).scale(0.5));
    let c = Claim::GlobalConvexity;
    let conv_q = || q("min conv_ct", conv, "min(foc_e, R_c) at the samples");
    let bound_q = || q("min(min foc, min inj / 2)", bound, "Jacobi scans; loops");
    let mut out = vec![VerificationRecord::compare(
        c,
        "min conv_ct >= min(min foc, min inj / 2)",
        metric,
        pts.clone(),
        conv_q(),
        Relation::AtLeast,
        bound_q(),
        opts.tol,
    )
    .with_flags(|f| f.sampled_infimum = true)];
    if metric.profile.kind() == ProfileKind::Cone {
        for (label, get) in [
            ("conv_ct(x) / r(x)", (|d: &PointData| d.report.conv_ct) as fn(&PointData) -> Radius),
            ("min(foc(x), inj(x)/2) / r(x)", |d: &PointData| d.report.foc.min(d.report.inj.scale(0.5))),
        ] {
            let ratios: Vec<f64> = samples.iter().filter_map(|d| get(d).value().map(|v| v / d.p.r)).collect();
            let check = format!("{label} is dilation invariant, so its infimum is 0 at the vertex");
            if ratios.len() < 2 {
                out.push(VerificationRecord::not_applicable(
                    c,
                    check,
                    metric,
                    pts.clone(),
                    q(label, Radius::beyond(h), "samples"),
                    Quantity::exact("constant", 0.0),
                    "fewer than two finite samples",
                ));
                continue;
            }
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            out.push(
                VerificationRecord::compare(
                    c,
                    check,
                    metric,
                    pts.clone(),
                    Quantity::exact("1e-2", 1e-2),
                    Relation::AtLeast,
                    q("relative spread of the ratio", Radius::Finite((hi - lo) / mean), "samples"),
                    0.0,
                )
                .with_flags(|f| f.sampled_infimum = true)
                .with_note(format!("ratio in [{lo:.6}, {hi:.6}]")),
            );
        }
    } else {
        out.push(
            VerificationRecord::compare(
                c,
                "min conv_ct = min(min foc, min inj / 2)",
                metric,
                pts.clone(),
                conv_q(),
                Relation::Equal,
                bound_q(),
                opts.tol,
            )
            .with_flags(|f| f.sampled_infimum = true),
        );
    }
    if metric.profile.kind().is_homogeneous() {
        // every point realizes the infimum
        for d in samples {
            let rep = &d.report;
            out.push(VerificationRecord::compare(
                c,
                "homogeneous: conv_ct(p) = min(foc(U), inj(p)/2)",
                metric,
                vec![d.p],
                q("conv_ct(p)", rep.conv_ct, "min(foc_e, R_c)"),
                Relation::Equal,
                q("min(foc(U), inj(p)/2)", d.ball_foc.min(rep.inj.scale(0.5)), "ball focal sweep"),
                opts.tol,
            ));
        }
    }
    out
}

fn perimeter_opts(opts: &SuiteOptions) -> PerimeterOptions {
    PerimeterOptions {
        n_psi: opts.n_cut_psi,
        horizon: opts.horizon(),
        conj_tol: opts.report.conj_tol,
        ..PerimeterOptions::default()
    }
}

fn count(label: &str, n: usize) -> Quantity {
    Quantity::new(label, Radius::Finite(n as f64), "clustered shooting")
}

/// A non-conjugate nearest cut point is joined to `p` by exactly two minimal geodesics
/// that close into a loop, at distance `inj(p)`.
pub fn loop_structure(
    metric: &SurfaceMetric<f64>,
    d: &PointData,
    opts: &SuiteOptions,
) -> Result<VerificationRecord, TheoremError> {
    let c = Claim::LoopStructure;
    let check = "nearest cut point: two minimal geodesics forming a loop";
    let popts = perimeter_opts(opts);
    let nc = match nearest_cut_point(metric, d.p, opts.n_cut_psi, &popts) {
        Err(PerimeterError::EmptyCutLocus { horizon }) => {
            return Ok(VerificationRecord::compare(
                c,
                check,
                metric,
                vec![d.p],
                q("d(p, z)", Radius::beyond(horizon), "cut locus"),
                Relation::AtLeast,
                q("inj(p)", d.report.inj, "min(l/2, conj)"),
                opts.tol,
            )
            .with_note("no cut point within the horizon"))
        }
        r => r?,
    };
    let n = nc.geodesics.minimal.len();
    if nc.conjugate {
        return Ok(VerificationRecord::not_applicable(
            c,
            check,
            metric,
            vec![d.p, nc.z],
            count("minimal geodesics", n),
            count("expected", 2),
            "nearest cut point is conjugate",
        ));
    }
    let at_inj = d.report.inj.value().is_some_and(|v| (nc.distance - v).abs() <= opts.tol);
    Ok(VerificationRecord::holds(
        c,
        check,
        metric,
        vec![d.p, nc.z],
        count("minimal geodesics", n),
        count("expected", 2),
        n == 2 && nc.loop_closes && at_inj,
    )
    .with_note(format!(
        "d(p, z) = {:.9}, loop closes: {}, inj(p) = {:?}",
        nc.distance, nc.loop_closes, d.report.inj
    )))
}

/// The perimeter minimizer `x0` on `Cut(q)` falls into one of the admissible cases and
/// some minimal geodesic from `p` extends one from `q`.
pub fn perimeter_structure(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    qq: Point<f64>,
    opts: &SuiteOptions,
) -> Result<VerificationRecord, TheoremError> {
    let c = Claim::LoopStructure;
    let check = "perimeter minimizer on Cut(q): admissible case with aligned geodesics";
    let res = match minimize_perimeter(metric, p, qq, &perimeter_opts(opts)) {
        Err(PerimeterError::EmptyCutLocus { horizon }) => {
            let mut rec = VerificationRecord::compare(
                c,
                check,
                metric,
                vec![p, qq],
                q("P(x0)", Radius::beyond(horizon), "cut locus"),
                Relation::AtLeast,
                q("P(x0)", Radius::beyond(horizon), "cut locus"),
                opts.tol,
            );
            rec.note = Some("Cut(q) empty within the horizon".into());
            return Ok(rec);
        }
        r => r?,
    };
    let (nb, na) = (res.from_p.minimal.len(), res.from_q.minimal.len());
    if res.case == PerimeterCase::TotallyConjugate && !res.p_is_x0 {
        return Ok(VerificationRecord::not_applicable(
            c,
            check,
            metric,
            vec![p, qq, res.x0],
            count("geodesics p->x0", nb),
            count("geodesics q->x0", na),
            format!("x0 is totally conjugate to q; no structure claim (P(x0) = {:.9})", res.value),
        ));
    }
    let shape_ok = match res.case {
        PerimeterCase::OneToOne | PerimeterCase::OneToTwo | PerimeterCase::TotallyConjugate => true,
        PerimeterCase::TwoToTwo => nb == 2 && na == 2,
        PerimeterCase::Unclassified => false,
    };
    let ok = res.p_is_x0 || (shape_ok && res.alignment_holds);
    Ok(VerificationRecord::holds(
        c,
        check,
        metric,
        vec![p, qq, res.x0],
        count("geodesics p->x0", nb),
        count("geodesics q->x0", na),
        ok,
    )
    .with_note(format!(
        "case {:?}, aligned {}, p = x0: {}, P(x0) = {:.9}",
        res.case, res.alignment_holds, res.p_is_x0, res.value
    )))
}
