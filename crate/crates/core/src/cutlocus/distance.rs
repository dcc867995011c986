//! Riemannian distance by shooting.
//!
//! For a target on the meridian at angle `Δ ∈ (0, π)` from the source, every minimal
//! geodesic has Clairaut constant of the sign of `Δ`, and reaches the target meridian
//! before its first conjugate point and before it crosses the opposite meridian. Along
//! the target meridian the hit radius `r(ψ)` has derivative `-J φ / c < 0`, so the
//! boundary value problem is a safeguarded 1-D Newton iteration in `ψ`.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::odes::{shoot_with, OdeError, ShootOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::radii::DEFAULT_HORIZON;
use crate::scalar::{wrap_pi, wrap_two_pi};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistanceError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("no geodesic reaches the target within the horizon {horizon}")]
    Unreachable { horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions {
    pub horizon: f64,
    /// Coarse fan used to bracket the launch angle.
    pub n_fan: usize,
    /// Residual `|r(ψ) - r_q|` accepted by the Newton iteration.
    pub residual: f64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            n_fan: 16,
            residual: 1e-11,
        }
    }
}

/// Where a geodesic launched into `ψ ∈ (0, π)` meets the meridian `θ_p + Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianHit {
    pub psi: f64,
    pub t: f64,
    pub r: f64,
    pub dr: f64,
    pub dtheta: f64,
    pub j: f64,
    pub clairaut: f64,
}

/// Round-off allowance on `J` when a hit lands on a conjugate point.
const CONJ_SLACK: f64 = 1e-7;

/// First hit of the meridian at offset `delta` (in `(0, π]`), if it happens before the
/// first conjugate point and within `horizon`.
pub fn meridian_hit(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    psi: f64,
    delta: f64,
    horizon: f64,
) -> Result<Option<MeridianHit>, OdeError> {
    let target = p.theta + delta;
    let path = shoot_with(metric, p, psi, ShootOptions::new(horizon), |_, s| {
        s.geo.theta >= target || (s.j < -CONJ_SLACK && s.geo.t > 1e-9)
    })?;
    let Some(te) = path.first_crossing(|s| s.geo.theta - target, 0.0) else {
        return Ok(None);
    };
    if let Some(tc) = path.first_crossing(|s| s.j + CONJ_SLACK, 0.0) {
        if tc < te {
            return Ok(None);
        }
    }
    let s = path.full_at(te);
    Ok(Some(MeridianHit {
        psi,
        t: te,
        r: s.geo.r,
        dr: s.geo.dr,
        dtheta: s.geo.dtheta,
        j: s.j,
        clairaut: path.clairaut,
    }))
}

/// A geodesic from the source to the target, with its data at the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Connection {
    /// Launch angle from the outward radial, in `[0, 2π)`.
    pub psi: f64,
    pub length: f64,
    /// Jacobi field `J` at the target.
    pub j_end: f64,
    /// Unit tangent at the target in the orthonormal frame `(∂r, φ⁻¹∂θ)`.
    pub tangent: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Connections {
    pub distance: f64,
    /// Distinct connections within `1e-5` of the minimum length.
    pub minimal: Vec<Connection>,
    /// Every sampled direction of a fan reaches the target at the same length
    /// (e.g. antipodes on the round sphere).
    pub continuum: bool,
    pub residual: f64,
}

fn at_pole(metric: &SurfaceMetric<f64>, p: &Point<f64>) -> Option<bool> {
    if p.r < 1e-12 {
        return Some(false);
    }
    match metric.profile.far_pole() {
        Some(rf) if rf - p.r < 1e-8 => Some(true),
        _ => None,
    }
}

/// Shooting distance `d(p, q)`.
pub fn distance(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    q: Point<f64>,
    opts: &DistanceOptions,
) -> Result<f64, DistanceError> {
    Ok(connections(metric, p, q, opts, false)?.distance)
}

/// Minimal geodesics from `p` to `q`, clustered by launch angle.
pub fn minimal_geodesics(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    q: Point<f64>,
    opts: &DistanceOptions,
) -> Result<Connections, DistanceError> {
    connections(metric, p, q, opts, true)
}

struct Root {
    psi: f64,
    hit: MeridianHit,
    residual: f64,
}

/// Largest residual accepted from a bracket shrunk to machine width.
const COLLAPSED_RESIDUAL: f64 = 1e-6;

fn solve_bracket(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    rq: f64,
    delta: f64,
    mut lo: f64,
    mut hi: f64,
    seed: Option<MeridianHit>,
    opts: &DistanceOptions,
) -> Result<Option<Root>, OdeError> {
    let phi = |r: f64| metric.profile.phi(r);
    let mut best: Option<Root> = None;
    let mut x = 0.5 * (lo + hi);
    let mut cur = seed;
    if let Some(h) = cur {
        x = h.psi;
    }
    for _ in 0..200 {
        let hit = match cur.take() {
            Some(h) => Some(h),
            None => meridian_hit(metric, p, x, delta, opts.horizon)?,
        };
        let Some(h) = hit else {
            lo = x;
            x = 0.5 * (lo + hi);
            if hi - lo < 1e-15 {
                break;
            }
            continue;
        };
        let f = h.r - rq;
        if best.as_ref().is_none_or(|b| f.abs() < b.residual) {
            best = Some(Root {
                psi: x,
                hit: h,
                residual: f.abs(),
            });
        }
        if f.abs() <= opts.residual {
            break;
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < 1e-15 {
            break;
        }
        let slope = -h.j * phi(h.r) / h.clairaut;
        let newton = if h.j.abs() > 1e-10 && slope.is_finite() {
            x - f / slope
        } else {
            f64::NAN
        };
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    // a bracket that collapses onto a small jump is a root whose hit radius is
    // ill-conditioned (near-radial arrival close to a conjugate point)
    let collapsed = hi - lo < 1e-12;
    Ok(best.filter(|b| b.residual <= 1e-8_f64.max(opts.residual) || (collapsed && b.residual <= COLLAPSED_RESIDUAL)))
}

fn tangent_of(metric: &SurfaceMetric<f64>, r: f64, dr: f64, dtheta: f64) -> [f64; 2] {
    let v = [dr, metric.profile.phi(r) * dtheta];
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn connections(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    q: Point<f64>,
    opts: &DistanceOptions,
    enumerate: bool,
) -> Result<Connections, DistanceError> {
    let prof = &metric.profile;
    // a pole is a centre of the metric: distances from it are radii; tangents at a
    // pole are given in the Cartesian pole chart
    let inward = |th: f64| [-th.cos(), -th.sin()];
    match (at_pole(metric, &p), at_pole(metric, &q)) {
        (Some(a), Some(b)) if a != b => {
            let rf = prof.far_pole().unwrap();
            return Ok(Connections {
                distance: rf,
                minimal: vec![Connection {
                    psi: 0.0,
                    length: rf,
                    j_end: 0.0,
                    tangent: inward(p.theta),
                }],
                continuum: true,
                residual: 0.0,
            });
        }
        (Some(_), Some(_)) => {
            return Ok(single(Connection {
                psi: 0.0,
                length: 0.0,
                j_end: 0.0,
                tangent: [1.0, 0.0],
            }))
        }
        (Some(false), None) => {
            return Ok(single(Connection {
                psi: wrap_two_pi(q.theta - p.theta),
                length: q.r,
                j_end: prof.phi(q.r),
                tangent: [1.0, 0.0],
            }))
        }
        (Some(true), None) => {
            let rf = prof.far_pole().unwrap();
            return Ok(single(Connection {
                psi: wrap_two_pi(q.theta - p.theta),
                length: rf - q.r,
                j_end: prof.phi(q.r),
                tangent: [-1.0, 0.0],
            }));
        }
        (None, Some(false)) => {
            return Ok(single(Connection {
                psi: PI,
                length: p.r,
                j_end: radial_j(metric, p, PI, p.r)?,
                tangent: inward(p.theta),
            }))
        }
        (None, Some(true)) => {
            let d = prof.far_pole().unwrap() - p.r;
            return Ok(single(Connection {
                psi: 0.0,
                length: d,
                j_end: radial_j(metric, p, 0.0, d)?,
                tangent: inward(p.theta),
            }));
        }
        (None, None) => {}
    }
    let signed = wrap_pi(q.theta - p.theta);
    let delta = signed.abs();
    let flip = signed < 0.0;
    if delta < 1e-9 {
        let d = (q.r - p.r).abs();
        let (psi, tan) = if q.r >= p.r { (0.0, [1.0, 0.0]) } else { (PI, [-1.0, 0.0]) };
        let j = radial_j(metric, p, psi, d)?;
        return Ok(single(Connection {
            psi,
            length: d,
            j_end: j,
            tangent: tan,
        }));
    }
    let antipodal = PI - delta < 1e-9;
    let delta = if antipodal { PI } else { delta };

    let mut found: Vec<Connection> = Vec::new();
    let mut residual: f64 = 0.0;
    if antipodal {
        // radial geodesics through either pole
        let d = p.r + q.r;
        if d <= opts.horizon {
            found.push(Connection {
                psi: PI,
                length: d,
                j_end: radial_j(metric, p, PI, d)?,
                tangent: [1.0, 0.0],
            });
        }
        if let Some(rf) = prof.far_pole() {
            let d = 2.0 * rf - p.r - q.r;
            found.push(Connection {
                psi: 0.0,
                length: d,
                j_end: radial_j(metric, p, 0.0, d)?,
                tangent: [-1.0, 0.0],
            });
        }
    }

    // coarse fan; undefined hits sit on the small-ψ side of the root
    let n = opts.n_fan.max(4);
    let psis: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
    let mut fan = Vec::with_capacity(n);
    for &psi in &psis {
        fan.push(meridian_hit(metric, p, psi, delta, opts.horizon)?);
    }
    let f_of = |h: &Option<MeridianHit>| h.map(|h| h.r - q.r);
    let near = |f: Option<f64>| f.is_some_and(|f| f.abs() < 1e-6);
    let continuum = fan.iter().all(|h| near(f_of(h)));
    let mut roots: Vec<Root> = Vec::new();
    if continuum {
        for h in fan.iter().flatten() {
            roots.push(Root {
                psi: h.psi,
                hit: *h,
                residual: (h.r - q.r).abs(),
            });
        }
    } else {
        // brackets: (undefined or F > 0) followed by F < 0; ψ = 0 acts as undefined,
        // ψ = π as F = -r_q < 0
        let mut prev_psi = 0.0;
        let mut prev_pos = true;
        for (k, h) in fan.iter().enumerate() {
            let f = f_of(h);
            let neg = matches!(f, Some(v) if v < 0.0);
            if prev_pos && neg {
                if let Some(r) = solve_bracket(metric, p, q.r, delta, prev_psi, psis[k], None, opts)? {
                    roots.push(r);
                }
            }
            prev_psi = psis[k];
            prev_pos = !neg;
        }
        if prev_pos {
            if let Some(r) = solve_bracket(metric, p, q.r, delta, prev_psi, PI, None, opts)? {
                roots.push(r);
            }
        }
    }
    for r in &roots {
        residual = residual.max(r.residual);
        let h = r.hit;
        let tan = tangent_of(metric, h.r, h.dr, h.dtheta);
        let (psi, tan) = if flip {
            (2.0 * PI - r.psi, [tan[0], -tan[1]])
        } else {
            (r.psi, tan)
        };
        found.push(Connection {
            psi,
            length: h.t,
            j_end: h.j,
            tangent: tan,
        });
        if antipodal && enumerate {
            // mirror image reaches the same point
            found.push(Connection {
                psi: 2.0 * PI - psi,
                length: h.t,
                j_end: h.j,
                tangent: [tan[0], -tan[1]],
            });
        }
    }
    let Some(d) = found.iter().map(|c| c.length).reduce(f64::min) else {
        return Err(DistanceError::Unreachable {
            horizon: opts.horizon,
        });
    };
    let mut minimal: Vec<Connection> = found.into_iter().filter(|c| c.length <= d + 1e-5).collect();
    minimal.sort_by(|a, b| a.psi.partial_cmp(&b.psi).unwrap());
    let mut clustered: Vec<Connection> = Vec::new();
    for c in minimal {
        let dup = clustered.iter().any(|o| {
            let dpsi = wrap_pi(c.psi - o.psi).abs();
            dpsi <= 1e-3
        });
        if !dup {
            clustered.push(c);
        }
    }
    Ok(Connections {
        distance: d,
        minimal: clustered,
        continuum,
        residual,
    })
}

fn single(c: Connection) -> Connections {
    Connections {
        distance: c.length,
        minimal: vec![c],
        continuum: false,
        residual: 0.0,
    }
}

fn radial_j(metric: &SurfaceMetric<f64>, p: Point<f64>, psi: f64, len: f64) -> Result<f64, OdeError> {
    if len <= 0.0 {
        return Ok(0.0);
    }
    let path = shoot_with(metric, p, psi, ShootOptions::new(len), |_, _| false)?;
    Ok(path.end().j)
}
