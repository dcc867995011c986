use serde::Serialize;

use super::{ball_focal_radius, jacobi_radii, Radius, ScanOptions};
use crate::cutlocus::{
    cut_decay_radius, cut_locus, injectivity_radius, minimal_geodesics, CutLocusSample, CutOptions,
    DecayOptions, DistanceError, DistanceOptions,
};
use crate::profiles::{Point, SurfaceMetric};

/// Totally conjugate cut radius; best effort, since the enumeration of minimal
/// geodesics is numerical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjT {
    pub value: Radius,
    /// Cut samples flagged as totally conjugate.
    pub flagged: usize,
    pub examined: usize,
    pub best_effort: bool,
}

/// Flag cut points all of whose minimal geodesics from `q` end with `|J| < conj_tol`
/// and return the distance to the nearest one.
pub fn totally_conjugate_scan(
    metric: &SurfaceMetric<f64>,
    q: Point<f64>,
    cut: &[CutLocusSample],
    horizon: f64,
    conj_tol: f64,
) -> Result<ConjT, DistanceError> {
    let dopts = DistanceOptions {
        horizon: horizon.max(super::DEFAULT_HORIZON),
        ..DistanceOptions::default()
    };
    let mut best = f64::INFINITY;
    let mut flagged = 0;
    let mut examined = 0;
    for c in cut {
        if !c.t_cut.is_finite() {
            continue;
        }
        examined += 1;
        let g = minimal_geodesics(metric, q, c.endpoint, &dopts)?;
        let total = g.continuum || g.minimal.iter().all(|a| a.j_end.abs() < conj_tol);
        if total {
            flagged += 1;
            best = best.min(g.distance);
        }
    }
    Ok(ConjT {
        value: Radius::from_option(best.is_finite().then_some(best), horizon),
        flagged,
        examined,
        best_effort: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportOptions {
    pub scan: ScanOptions,
    pub n_loop_dirs: usize,
    /// Radii sampled for the ball infimum of `foc`.
    pub n_ball: usize,
    /// Launch angles for the cut locus behind `conj_t`.
    pub n_cut: usize,
    pub conj_tol: f64,
    pub decay: DecayOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        let scan = ScanOptions::default();
        Self {
            scan,
            n_loop_dirs: 256,
            n_ball: 64,
            n_cut: 64,
            conj_tol: 1e-5,
            decay: DecayOptions {
                horizon: scan.horizon,
                ..DecayOptions::default()
            },
        }
    }
}

impl ReportOptions {
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.scan.horizon = horizon;
        self.decay.horizon = horizon;
        self
    }

    pub fn with_dirs(mut self, n_dirs: usize) -> Self {
        self.scan.n_dirs = n_dirs;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusReport {
    pub point: Point<f64>,
    pub conj: Radius,
    pub foc: Radius,
    pub foc_e: Radius,
    pub inj: Radius,
    /// `min_ψ t_cut(ψ)`, the injectivity radius from its definition.
    pub inj_direct: Radius,
    pub l_loop: Radius,
    pub r_c: Radius,
    pub conv_ct: Radius,
    pub conv_lower: Radius,
    pub conv_upper: Radius,
    pub conj_t: ConjT,
    pub options: ReportOptions,
}

pub fn radius_report(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    opts: &ReportOptions,
) -> Result<RadiusReport, DistanceError> {
    let h = opts.scan.horizon;
    let jr = jacobi_radii(metric, p, &opts.scan)?;
    let inj = injectivity_radius(metric, p, &opts.scan, opts.n_loop_dirs)?;
    let r_c = cut_decay_radius(metric, p, &opts.decay)?.value;
    let conv_ct = jr.foc_e.min(r_c);
    let ball = r_c.value().unwrap_or(h).min((metric.profile.r_max() - p.r).max(0.0));
    let foc_ball = ball_focal_radius(metric, p, ball, opts.n_ball, &opts.scan)?.value;
    // p lies in the ball; folding foc(p) in keeps the sandwich exact under refinement noise
    let conv_lower = foc_ball.min(jr.foc).min(r_c);
    let conv_upper = jr.foc.min(r_c);
    let cut = cut_locus(metric, p, opts.n_cut, &CutOptions::default().with_horizon(h))?;
    let conj_t = totally_conjugate_scan(metric, p, &cut, h, opts.conj_tol)?;
    Ok(RadiusReport {
        point: p,
        conj: jr.conj,
        foc: jr.foc,
        foc_e: jr.foc_e,
        inj: inj.inj,
        inj_direct: inj.direct,
        l_loop: inj.half_loop.scale(2.0),
        r_c,
        conv_ct,
        conv_lower,
        conv_upper,
        conj_t,
        options: *opts,
    })
}
