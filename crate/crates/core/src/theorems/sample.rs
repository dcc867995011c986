use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{SuiteOptions, TheoremError};
use crate::profiles::{Point, ProfileKind, SurfaceMetric};
use crate::radii::{ball_conj_radius, ball_focal_radius, radius_report, Radius, RadiusReport};

/// A sampled point with its radius report and the ball infima over `B_inj(p)(p)`.
#[derive(Debug, Clone, Serialize)]
pub struct PointData {
    pub p: Point<f64>,
    pub report: RadiusReport,
    /// `foc(B_inj(p)(p))`.
    pub ball_foc: Radius,
    /// `conj(B_inj(p)(p))`.
    pub ball_conj: Radius,
}

/// Radial range the suites sample on each profile kind. The cone range keeps clear of
/// the smoothed vertex.
fn sample_range(metric: &SurfaceMetric<f64>) -> (f64, f64) {
    let prof = &metric.profile;
    let (lo, hi) = match prof.kind() {
        ProfileKind::Sphere => (0.05, PI - 0.05),
        ProfileKind::Cone => (0.5, 5.0),
        ProfileKind::Gulliver => (0.0, 1.6),
        ProfileKind::Plane => (0.0, 5.0),
        ProfileKind::Hyperbolic | ProfileKind::Paraboloid => (0.0, 3.0),
    };
    (lo, hi.min(prof.r_max()))
}

/// `n` radii: the profile joints inside the sampling range, then one jittered sample
/// per stratum for the rest.
pub fn sample_radii(metric: &SurfaceMetric<f64>, n: usize, seed: u64) -> Vec<f64> {
    let (lo, hi) = sample_range(metric);
    let mut rs: Vec<f64> = metric
        .profile
        .joints()
        .into_iter()
        .filter(|r| (lo..=hi).contains(r))
        .take(n)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n - rs.len();
    for k in 0..m {
        let u: f64 = rng.gen();
        rs.push(lo + (hi - lo) * (k as f64 + u) / m as f64);
    }
    rs
}

pub fn sample_points(metric: &SurfaceMetric<f64>, opts: &SuiteOptions) -> Result<Vec<PointData>, TheoremError> {
    let rs = sample_radii(metric, opts.n_points, opts.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let pts: Vec<Point<f64>> = rs.iter().map(|&r| Point::new(r, rng.gen_range(0.0..2.0 * PI))).collect();
    pts.par_iter().map(|&p| point_data(metric, p, opts)).collect()
}

fn point_data(metric: &SurfaceMetric<f64>, p: Point<f64>, opts: &SuiteOptions) -> Result<PointData, TheoremError> {
    let report = radius_report(metric, p, &opts.report)?;
    let scan = &opts.report.scan;
    let big_r = report.inj.value().unwrap_or(scan.horizon);
    let ball_foc = ball_focal_radius(metric, p, big_r, opts.report.n_ball, scan)?.value;
    let ball_conj = ball_conj_radius(metric, p, big_r, opts.report.n_ball, scan)?.value;
    Ok(PointData {
        p,
        report,
        ball_foc,
        ball_conj,
    })
}
