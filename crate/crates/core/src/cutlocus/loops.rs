//! Shortest geodesic loops and the injectivity radius.
//!
//! A loop at `p` with Clairaut constant `c > 0` returns after `θ` has advanced by a
//! multiple of `2π`; only the first winding is searched. The return radius
//! `G(ψ) = r(T_2π(ψ)) - r_p` is sampled on a ψ grid and its sign changes refined.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::cut::{cut_time, CutOptions};
use super::distance::DistanceError;
use crate::odes::{shoot_with, OdeError, ShootOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::radii::{conj_radius, golden_min, Radius, ScanOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopResult {
    pub length: Radius,
    /// Launch angle of the shortest loop found.
    pub psi: Option<f64>,
    /// Loops detected on the grid (before refinement).
    pub detected: usize,
}

#[derive(Debug, Clone, Copy)]
struct Return {
    t: f64,
    g: f64,
    slope: f64,
}

fn first_return(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    psi: f64,
    horizon: f64,
) -> Result<Option<Return>, OdeError> {
    let target = p.theta + 2.0 * PI;
    let path = shoot_with(metric, p, psi, ShootOptions::new(horizon), |_, s| s.geo.theta >= target)?;
    let Some(t) = path.first_crossing(|s| s.geo.theta - target, 0.0) else {
        return Ok(None);
    };
    let s = path.full_at(t);
    let phi = metric.profile.phi(s.geo.r);
    Ok(Some(Return {
        t,
        g: s.geo.r - p.r,
        slope: -s.j * phi / path.clairaut,
    }))
}

/// `l(p)`: shortest geodesic loop at `p` within `horizon`, over `n_dirs` launch angles.
pub fn shortest_loop(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    n_dirs: usize,
    horizon: f64,
) -> Result<LoopResult, OdeError> {
    let n = n_dirs.max(16);
    let psis: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
    let rets = psis
        .par_iter()
        .map(|&psi| first_return(metric, p, psi, horizon))
        .collect::<Result<Vec<_>, _>>()?;
    let mut lengths: Vec<(f64, f64)> = Vec::new();
    let mut detected = 0;
    for k in 0..n {
        let Some(a) = rets[k] else { continue };
        if a.g.abs() < 1e-9 {
            detected += 1;
            lengths.push((psis[k], a.t));
            continue;
        }
        if k + 1 == n {
            continue;
        }
        let Some(b) = rets[k + 1] else { continue };
        if (a.g < 0.0) == (b.g < 0.0) {
            continue;
        }
        detected += 1;
        if let Some(root) = refine(metric, p, horizon, (psis[k], a), (psis[k + 1], b))? {
            lengths.push(root);
        }
    }
    let best = lengths
        .into_iter()
        .filter(|&(_, t)| t > 1e-6)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    Ok(LoopResult {
        length: Radius::from_option(best.map(|b| b.1), horizon),
        psi: best.map(|b| b.0),
        detected,
    })
}

fn refine(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    horizon: f64,
    lo: (f64, Return),
    hi: (f64, Return),
) -> Result<Option<(f64, f64)>, OdeError> {
    let (mut a, mut b) = (lo.0, hi.0);
    let neg_a = lo.1.g < 0.0;
    let mut cur = if lo.1.g.abs() < hi.1.g.abs() { lo } else { hi };
    for _ in 0..200 {
        if cur.1.g.abs() < 1e-11 || b - a < 1e-15 {
            break;
        }
        let newton = cur.0 - cur.1.g / cur.1.slope;
        let x = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let Some(r) = first_return(metric, p, x, horizon)? else {
            return Ok(None);
        };
        if (r.g < 0.0) == neg_a {
            a = x;
        } else {
            b = x;
        }
        if r.g.abs() < cur.1.g.abs() {
            cur = (x, r);
        }
    }
    Ok((cur.1.g.abs() < 1e-8).then_some((cur.0, cur.1.t)))
}

/// `inj(p)` from the loop/conjugate identity, with the direct cut-time minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Injectivity {
    pub inj: Radius,
    pub half_loop: Radius,
    pub conj: Radius,
    /// `min_ψ t_cut(ψ)`, computed independently.
    pub direct: Radius,
}

pub fn injectivity_radius(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    scan: &ScanOptions,
    n_loop_dirs: usize,
) -> Result<Injectivity, DistanceError> {
    let l = shortest_loop(metric, p, n_loop_dirs, scan.horizon)?;
    let conj = conj_radius(metric, p, scan)?;
    let half_loop = l.length.scale(0.5);
    let inj = half_loop.min(conj);
    let direct = direct_injectivity(metric, p, scan)?;
    Ok(Injectivity {
        inj,
        half_loop,
        conj,
        direct,
    })
}

/// `min_ψ t_cut(ψ)` over a grid on `[0, π]`, refined by golden section.
pub fn direct_injectivity(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    scan: &ScanOptions,
) -> Result<Radius, DistanceError> {
    let opts = CutOptions::default().with_horizon(scan.horizon);
    let n = scan.n_dirs.max(16);
    let psis: Vec<f64> = (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect();
    let vals = psis
        .par_iter()
        .map(|&psi| cut_time(metric, p, psi, &opts).map(|s| s.t_cut.or_inf()))
        .collect::<Result<Vec<_>, _>>()?;
    let (i, v) = vals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    if !v.is_finite() {
        return Ok(Radius::beyond(scan.horizon));
    }
    let lo = psis[i.saturating_sub(1)];
    let hi = psis[(i + 1).min(n - 1)];
    let (_, fv) = golden_min(
        |psi| cut_time(metric, p, psi, &opts).map(|s| s.t_cut.or_inf()),
        lo,
        hi,
        scan.psi_tol,
    )?;
    Ok(Radius::Finite(v.min(fv)))
}
