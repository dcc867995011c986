//! Cut-decay radius `R_c(p)`.
//!
//! A pair `x`, `y ∈ Cut(x)` rules out every ball `B_r(p)` with
//! `r > max(d(p, x), d(p, y))`, so `R_c(p)` is the infimum of that maximum over all
//! such pairs. By rotational symmetry `x = (s, α)` and `Cut(x)` is `Cut((s, 0))`
//! rotated by `α`. The search samples `s` over the ball, bounds the candidates with
//! the triangle inequality, minimizes over `α` on an interpolated distance field from
//! `p`, and evaluates the final pair with exact distances.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::cut::{cut_locus, cut_time, CutLocusSample, CutOptions};
use super::distance::{distance, DistanceError, DistanceOptions};
use super::field::shooting_field;
use crate::profiles::{Point, SurfaceMetric};
use crate::radii::{golden_min, Radius, DEFAULT_HORIZON};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayOptions {
    /// Radii `s` of the ball points `x`.
    pub n_ball: usize,
    /// Launch angles per cut locus.
    pub n_psi: usize,
    /// Grid over the rotation `α` before golden refinement.
    pub n_alpha: usize,
    pub horizon: f64,
    pub tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            n_ball: 64,
            n_psi: 64,
            n_alpha: 96,
            horizon: DEFAULT_HORIZON,
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayResult {
    pub value: Radius,
    /// Minimizing pair: `x` and the cut point `y ∈ Cut(x)`.
    pub x: Option<Point<f64>>,
    pub y: Option<Point<f64>>,
}

struct Candidate {
    s: f64,
    psi: f64,
    value: f64,
}

/// Point of `Cut((s, 0))` in direction `psi`, rotated by `alpha`.
fn rotated(c: &CutLocusSample, alpha: f64) -> Point<f64> {
    Point::new(c.endpoint.r, c.endpoint.theta + alpha)
}

pub fn cut_decay_radius(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    opts: &DecayOptions,
) -> Result<DecayResult, DistanceError> {
    let prof = &metric.profile;
    let top = prof.far_pole().unwrap_or(prof.r_max());
    let copts = CutOptions::default().with_horizon(opts.horizon);
    let dopts = DistanceOptions {
        horizon: opts.horizon.max(DEFAULT_HORIZON),
        ..DistanceOptions::default()
    };
    // work with p on the meridian θ = 0
    let p0 = Point::new(p.r, 0.0);

    let loci = |lo: f64, hi: f64, n: usize| -> Result<Vec<(f64, Vec<CutLocusSample>)>, DistanceError> {
        let ss: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).chain([p.r]).collect();
        ss.par_iter()
            .map(|&s| Ok((s, cut_locus(metric, Point::new(s, 0.0), opts.n_psi, &copts)?)))
            .collect()
    };

    // coarse pass for an upper bound, taking α = 0
    let coarse = loci(0.0, top.min(p.r + opts.horizon), opts.n_ball)?;
    let ub_of = |set: &[(f64, Vec<CutLocusSample>)]| {
        set.iter()
            .flat_map(|(s, cl)| cl.iter().filter_map(move |c| c.t_cut.value().map(|t| (s - p.r).abs() + t)))
            .fold(f64::INFINITY, f64::min)
    };
    let ub = ub_of(&coarse);
    if !ub.is_finite() || ub > opts.horizon {
        return Ok(DecayResult {
            value: Radius::beyond(opts.horizon),
            x: None,
            y: None,
        });
    }
    let lo = (p.r - ub).max(0.0);
    let hi = (p.r + ub).min(top);
    let fine = loci(lo, hi, opts.n_ball)?;
    let ub = ub.min(ub_of(&fine));

    let field = shooting_field(metric, p0, lo, hi, 33, 96, &dopts)?;
    let df = |q: Point<f64>| -> f64 {
        if q.r < lo - 1e-9 || q.r > hi + 1e-9 {
            f64::INFINITY
        } else {
            field.value_at(metric, q)
        }
    };
    let best_alpha = |s: f64, c: &CutLocusSample| -> (f64, f64) {
        let h = |a: f64| df(Point::new(s, a)).max(df(rotated(c, a)));
        let n = opts.n_alpha.max(8);
        let (mut ia, mut va) = (0usize, f64::INFINITY);
        for k in 0..n {
            let v = h(2.0 * PI * k as f64 / n as f64);
            if v < va {
                ia = k;
                va = v;
            }
        }
        let step = 2.0 * PI / n as f64;
        let a0 = step * ia as f64;
        golden_min::<_, ()>(|a| Ok(h(a)), a0 - step, a0 + step, 1e-7).unwrap()
    };

    let mut cands: Vec<Candidate> = Vec::new();
    for (s, cl) in &fine {
        for c in cl {
            let Some(t) = c.t_cut.value() else { continue };
            let lower = (s - p.r).abs().max((c.endpoint.r - p.r).abs()).max(0.5 * t);
            if lower > ub {
                continue;
            }
            let (_, value) = best_alpha(*s, c);
            cands.push(Candidate {
                s: *s,
                psi: c.psi,
                value,
            });
        }
    }
    cands.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    cands.truncate(4);

    let dpsi = 2.0 * PI / opts.n_psi as f64;
    let ds = (hi - lo) / opts.n_ball as f64;
    // (s, ψ) ↦ min_α of the interpolated objective
    let inner = |s: f64, psi: f64| -> Result<(f64, f64, CutLocusSample), DistanceError> {
        let c = cut_time(metric, Point::new(s.clamp(0.0, top), 0.0), psi, &copts)?;
        if !c.t_cut.is_finite() {
            return Ok((f64::INFINITY, 0.0, c));
        }
        let (a, v) = best_alpha(s, &c);
        Ok((v, a, c))
    };
    let refined = cands
        .par_iter()
        .map(|cand| -> Result<(f64, Point<f64>, Point<f64>), DistanceError> {
            let (mut s, mut psi) = (cand.s, cand.psi);
            for _ in 0..2 {
                let (x, _) = golden_min(|u| inner(s, u).map(|r| r.0), psi - dpsi, psi + dpsi, opts.tol)?;
                psi = x;
                let (x, _) = golden_min(
                    |u| inner(u, psi).map(|r| r.0),
                    (s - ds).max(0.0),
                    (s + ds).min(top),
                    opts.tol,
                )?;
                s = x;
            }
            let (_, a_guess, c) = inner(s, psi)?;
            // exact objective in α around the interpolated argmin
            let exact = |a: f64| -> Result<f64, DistanceError> {
                let dx = distance(metric, p0, Point::new(s, a), &dopts)?;
                let dy = distance(metric, p0, rotated(&c, a), &dopts)?;
                Ok(dx.max(dy))
            };
            let (a, v) = golden_min(exact, a_guess - 0.05, a_guess + 0.05, 1e-7)?;
            Ok((v, Point::new(s, a), rotated(&c, a)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let best = refined.into_iter().min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(match best {
        Some((v, x, y)) => {
            // back to the caller's frame
            let shift = |q: Point<f64>| Point::new(q.r, q.theta + p.theta);
            DecayResult {
                value: Radius::Finite(v),
                x: Some(shift(x)),
                y: Some(shift(y)),
            }
        }
        None => DecayResult {
            value: Radius::beyond(opts.horizon),
            x: None,
            y: None,
        },
    })
}
