//! Cut times along geodesics from a source.
//!
//! A minimal geodesic with nonzero Clairaut constant stops being minimal no later than
//! its first conjugate point and no later than it reaches the meridian opposite the
//! source, where it meets its mirror image. The smaller of the two is the cut-time
//! candidate; with `verify` set it is checked against the shooting distance and, if
//! the check fails, replaced by a bisection on `d(q, γ(t)) ≥ t`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::distance::{distance, DistanceError, DistanceOptions};
use crate::odes::{shoot_with, OdeError, ShootOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::radii::Radius;
use crate::scalar::wrap_two_pi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    Conjugate,
    Crossing,
    BeyondHorizon,
}

impl CutKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CutKind::Conjugate => "conjugate",
            CutKind::Crossing => "crossing",
            CutKind::BeyondHorizon => "beyond-horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutLocusSample {
    pub psi: f64,
    pub t_cut: Radius,
    pub kind: CutKind,
    /// Cut point; for a beyond-horizon sample, the point reached at the horizon.
    pub endpoint: Point<f64>,
    /// First conjugate time along the same geodesic.
    pub t_conj: Radius,
    /// The candidate passed the distance check (or was replaced by bisection).
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutOptions {
    pub horizon: f64,
    pub verify: bool,
    pub distance: DistanceOptions,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            horizon: crate::radii::DEFAULT_HORIZON,
            verify: false,
            distance: DistanceOptions::default(),
        }
    }
}

impl CutOptions {
    pub fn verified(mut self) -> Self {
        self.verify = true;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self.distance.horizon = horizon.max(self.distance.horizon);
        self
    }
}

/// First conjugate time, and the first time the geodesic reaches the opposite meridian
/// together with `θ'` there.
fn conj_and_mirror(
    metric: &SurfaceMetric<f64>,
    q: Point<f64>,
    psi: f64,
    horizon: f64,
) -> Result<(Option<f64>, Option<(f64, f64)>), OdeError> {
    let target = q.theta + PI;
    // keep going a little past the mirror time so a nearby conjugate point is seen
    let mut reached: Option<f64> = None;
    let path = shoot_with(metric, q, psi, ShootOptions::new(horizon), |_, s| {
        if reached.is_none() && s.geo.theta >= target {
            reached = Some(s.geo.t);
        }
        (s.j < 0.0 && s.geo.t > 1e-9) || reached.is_some_and(|t| s.geo.t > t + 0.5)
    })?;
    let conj = path.first_crossing(|s| s.j, 0.0);
    let mirror = path
        .first_crossing(|s| s.geo.theta - target, 0.0)
        .map(|t| (t, path.state_at(t).dtheta));
    Ok((conj, mirror))
}

/// Mirror time for launch angle `u ∈ [0, π]`. Near a radial direction the crossing
/// of the opposite meridian can be nearly tangential and its time ill-conditioned;
/// there the time is extrapolated from two transversal neighbours, using that it is
/// even in the offset from the radial direction.
fn mirror_time(
    metric: &SurfaceMetric<f64>,
    q: Point<f64>,
    u: f64,
    own: Option<(f64, f64)>,
    horizon: f64,
) -> Result<Option<f64>, OdeError> {
    const NEAR_RADIAL: f64 = 1e-3;
    const TRANSVERSAL: f64 = 1e-2;
    let radial = u < 1e-12 || PI - u < 1e-12;
    let (base, sign) = if u < 0.5 * PI { (0.0, 1.0) } else { (PI, -1.0) };
    let e = (u - base).abs();
    if e >= NEAR_RADIAL {
        return Ok(own.map(|m| m.0));
    }
    if let Some((t, dth)) = own {
        if !radial && dth.abs() > TRANSVERSAL {
            return Ok(Some(t));
        }
    }
    let (e1, e2) = (NEAR_RADIAL, 2.0 * NEAR_RADIAL);
    let m1 = conj_and_mirror(metric, q, base + sign * e1, horizon)?.1;
    let m2 = conj_and_mirror(metric, q, base + sign * e2, horizon)?.1;
    Ok(match (m1, m2) {
        (Some((t1, _)), Some((t2, _))) => Some(t1 - (t2 - t1) * (e1 * e1 - e * e) / (e2 * e2 - e1 * e1)),
        (Some((t1, _)), None) => Some(t1),
        _ => None,
    })
}

/// Cut time along the geodesic from `q` with launch angle `psi ∈ [0, 2π)`.
pub fn cut_time(
    metric: &SurfaceMetric<f64>,
    q: Point<f64>,
    psi: f64,
    opts: &CutOptions,
) -> Result<CutLocusSample, DistanceError> {
    let psi = wrap_two_pi(psi);
    // mirror into the upper half of the directions
    let flip = psi > PI;
    let u = if flip { 2.0 * PI - psi } else { psi };
    let (conj, own) = conj_and_mirror(metric, q, u, opts.horizon)?;
    // focusing by a smoothed vertex is not a conjugate point of the idealized surface
    let conj = conj.filter(|_| !metric.enters_core(q, u));
    let mirror = mirror_time(metric, q, u, own, opts.horizon)?;
    let t_conj = Radius::from_option(conj, opts.horizon);
    let cand = match (conj, mirror) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
    .filter(|&t| t <= opts.horizon);

    let endpoint_at = |t: f64| -> Result<Point<f64>, OdeError> {
        let path = shoot_with(metric, q, u, ShootOptions::new(t), |_, _| false)?;
        let s = path.end().geo;
        let th = if flip { 2.0 * q.theta - s.theta } else { s.theta };
        Ok(Point::new(s.r, wrap_two_pi(th)))
    };

    let Some(mut t_cut) = cand else {
        return Ok(CutLocusSample {
            psi,
            t_cut: Radius::beyond(opts.horizon),
            kind: CutKind::BeyondHorizon,
            endpoint: endpoint_at(opts.horizon)?,
            t_conj,
            verified: false,
        });
    };
    let mut verified = false;
    if opts.verify {
        let minimal_at = |t: f64| -> Result<bool, DistanceError> {
            if t <= 0.0 {
                return Ok(true);
            }
            let y = endpoint_at(t)?;
            Ok(distance(metric, q, y, &opts.distance)? >= t - 1e-7)
        };
        let probe = (t_cut - 1e-3).max(0.5 * t_cut);
        if minimal_at(probe)? {
            verified = true;
        } else {
            let (mut lo, mut hi) = (0.0, probe);
            while hi - lo > 1e-6 {
                let m = 0.5 * (lo + hi);
                if minimal_at(m)? {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            t_cut = 0.5 * (lo + hi);
            verified = true;
        }
    }
    let kind = match conj {
        Some(c) if c <= t_cut + 1e-4 => CutKind::Conjugate,
        _ => CutKind::Crossing,
    };
    Ok(CutLocusSample {
        psi,
        t_cut: Radius::Finite(t_cut),
        kind,
        endpoint: endpoint_at(t_cut)?,
        t_conj,
        verified,
    })
}

/// `Cut(q)` sampled at `n` launch angles `2πk/n`; the lower half is computed and the
/// upper half mirrored.
pub fn cut_locus(
    metric: &SurfaceMetric<f64>,
    q: Point<f64>,
    n: usize,
    opts: &CutOptions,
) -> Result<Vec<CutLocusSample>, DistanceError> {
    let n = n.max(2);
    let half: Vec<usize> = (0..=n / 2).collect();
    let lower = half
        .par_iter()
        .map(|&k| cut_time(metric, q, 2.0 * PI * k as f64 / n as f64, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s = if k <= n / 2 {
            lower[k]
        } else {
            let mut s = lower[n - k];
            s.psi = 2.0 * PI * k as f64 / n as f64;
            s.endpoint.theta = wrap_two_pi(2.0 * q.theta - s.endpoint.theta);
            s
        };
        out.push(s);
    }
    Ok(out)
}

/// CSV rows `psi,t_cut,kind,r,theta`.
pub fn cut_locus_csv(samples: &[CutLocusSample]) -> String {
    let mut s = String::from("psi,t_cut,kind,r,theta\n");
    for c in samples {
        let t = c.t_cut.value().map_or_else(|| "inf".to_string(), |v| format!("{v:.12}"));
        s.push_str(&format!(
            "{:.12},{},{},{:.12},{:.12}\n",
            c.psi,
            t,
            c.kind.as_str(),
            c.endpoint.r,
            c.endpoint.theta
        ));
    }
    s
}
