//! Scalar Jacobi fields along geodesics and their event times.

use super::geodesic::{shoot_with, FullState, GeodesicPath, OdeError, ShootOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::scalar::Real;

/// Default band for classifying a minimum of `J'` as a touch rather than a crossing.
pub const TOUCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiSample<T> {
    pub t: T,
    pub j: T,
    pub jp: T,
    /// Second solution with `J₂(0) = 1`, `J₂'(0) = 0`.
    pub j2: T,
    pub j2p: T,
}

/// Jacobi solution sampled at the step ends of its host path.
#[derive(Debug, Clone)]
pub struct JacobiSolution<T> {
    pub samples: Vec<JacobiSample<T>>,
    pub t_max: T,
    pub first_j_zero: Option<T>,
    pub first_jp_zero: Option<T>,
    /// Sup of `|J'' + K J|` and `|J' - dJ/dt|` probed on the dense output at step
    /// midpoints away from profile joints, relative to `max(1, |J|, |J'|, |K J|)`.
    pub residual: T,
    /// `max |J' J₂ - J J₂' - 1|` over the samples.
    pub wronskian_defect: T,
}

impl<T: Real> JacobiSolution<T> {
    /// Linear interpolation of `(J, J')` at `t`; mostly for export.
    pub fn at(&self, t: T) -> (T, T) {
        let i = self.samples.partition_point(|s| s.t < t);
        if i == 0 {
            let s = self.samples[0];
            return (s.j, s.jp);
        }
        if i >= self.samples.len() {
            let s = self.samples[self.samples.len() - 1];
            return (s.j, s.jp);
        }
        let (a, b) = (self.samples[i - 1], self.samples[i]);
        let w = (t - a.t) / (b.t - a.t);
        (a.j + w * (b.j - a.j), a.jp + w * (b.jp - a.jp))
    }
}

fn sample<T: Real>(s: &FullState<T>) -> JacobiSample<T> {
    JacobiSample {
        t: s.geo.t,
        j: s.j,
        jp: s.jp,
        j2: s.j2,
        j2p: s.j2p,
    }
}

/// Jacobi solution with `J(0) = 0`, `J'(0) = 1` along `path` up to `t_max`.
pub fn jacobi_along<T: Real>(path: &GeodesicPath<'_, T>, t_max: T) -> Result<JacobiSolution<T>, OdeError> {
    if t_max > path.length * (T::one() + T::lit(1e-12)) {
        return Err(OdeError::BeyondPath {
            requested: t_max.to_f64_lossy(),
            length: path.length.to_f64_lossy(),
        });
    }
    let t_max = t_max.min(path.length);
    let prof = &path.metric.profile;
    let mut samples = vec![sample(&path.full_at(T::zero()))];
    let mut residual = T::zero();
    let fd = T::lit(1e-5);
    let joints = prof.joints();
    for seg in path.segments() {
        let (t0, t1) = (seg.dense.t0, seg.dense.t1().min(t_max));
        if t1 <= t0 {
            break;
        }
        // probe the residual at the segment midpoint with a central difference
        let tm = T::lit(0.5) * (t0 + t1);
        let h = fd.min(T::lit(0.25) * (t1 - t0));
        let m = path.eval_segment(seg, tm);
        // K is only finitely smooth at a joint; difference quotients there are meaningless
        let (ra, rb) = (path.eval_segment(seg, t0).geo.r, path.eval_segment(seg, t1).geo.r);
        let lo = ra.min(rb).min(m.geo.r);
        let hi = ra.max(rb).max(m.geo.r);
        let straddles = joints.iter().any(|&x| x >= lo && x <= hi);
        if h > T::zero() && !straddles {
            // Richardson-extrapolated central differences
            let central = |h: T| {
                let a = path.eval_segment(seg, tm - h);
                let b = path.eval_segment(seg, tm + h);
                ((b.j - a.j) / (h + h), (b.jp - a.jp) / (h + h))
            };
            let (d1, d1p) = central(h);
            let (d2, d2p) = central(T::lit(0.5) * h);
            let third = T::lit(1.0 / 3.0);
            let dj = d2 + (d2 - d1) * third;
            let djp = d2p + (d2p - d1p) * third;
            let k = prof.curvature(m.geo.r);
            let scale = T::one().max(m.j.abs()).max(m.jp.abs()).max((k * m.j).abs());
            residual = residual
                .max((dj - m.jp).abs() / scale)
                .max((djp + k * m.j).abs() / scale);
        }
        samples.push(sample(&path.eval_segment(seg, t1)));
        if t1 >= t_max {
            break;
        }
    }
    let wronskian_defect = samples
        .iter()
        .map(|s| (s.jp * s.j2 - s.j * s.j2p - T::one()).abs())
        .fold(T::zero(), T::max);
    let within = |t: Option<T>| t.filter(|&t| t <= t_max);
    Ok(JacobiSolution {
        first_j_zero: within(path.first_crossing(|s| s.j, T::zero())),
        first_jp_zero: within(path.first_crossing(|s| s.jp, T::zero())),
        samples,
        t_max,
        residual,
        wronskian_defect,
    })
}

/// Event times of the Jacobi field along one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiEvents<T> {
    /// First zero of `J` (conjugate time).
    pub conj: Option<T>,
    /// First time `J' = 0`, counting touches.
    pub foc: Option<T>,
    /// First time `J'` turns negative.
    pub foc_e: Option<T>,
    /// First touch of zero by `J'` without a sign change.
    pub touch: Option<T>,
    /// Smallest `J'` seen before `conj` (or the horizon) and where it occurs.
    pub jp_min: T,
    pub jp_min_t: T,
    /// Length actually integrated.
    pub reached: T,
}

/// Shoot from `start` at angle `psi` and locate the Jacobi events up to `horizon`.
///
/// Minima of `J'` are the points where `J'' = -K J` changes sign from negative to
/// positive. A minimum within `touch_tol` of zero is a touch; a minimum below that is
/// a crossing even when both step ends have `J' > 0`.
pub fn scan_events<T: Real>(
    metric: &SurfaceMetric<T>,
    start: Point<T>,
    psi: T,
    horizon: T,
    touch_tol: T,
) -> Result<JacobiEvents<T>, OdeError> {
    let small = T::lit(1e-9);
    let path = shoot_with(metric, start, psi, ShootOptions::new(horizon), |_, s| {
        s.j < T::zero() && s.geo.t > small
    })?;
    Ok(events_on(&path, touch_tol))
}

/// Jacobi events on an already shot path.
pub fn events_on<T: Real>(path: &GeodesicPath<'_, T>, touch_tol: T) -> JacobiEvents<T> {
    let prof = &path.metric.profile;
    let conj = path.first_crossing(|s| s.j, T::zero());
    let limit = conj.unwrap_or(path.length);
    let jdd = |s: &FullState<T>| -prof.curvature(s.geo.r) * s.j;

    let mut foc_e: Option<T> = None;
    let mut touch: Option<T> = None;
    let mut jp_min = T::infinity();
    let mut jp_min_t = T::zero();
    let mut note = |t: T, v: T| {
        if v < jp_min {
            jp_min = v;
            jp_min_t = t;
        }
    };
    for seg in path.segments() {
        let ta = seg.dense.t0;
        let tb = seg.dense.t1().min(limit);
        if tb <= ta {
            break;
        }
        let sa = path.eval_segment(seg, ta);
        let sb = path.eval_segment(seg, tb);
        note(ta, sa.jp);
        note(tb, sb.jp);
        if sb.jp < T::zero() {
            foc_e = Some(bisect_seg(path, seg, |s| s.jp, ta, tb));
            break;
        }
        let (da, db) = (jdd(&sa), jdd(&sb));
        if da < T::zero() && db >= T::zero() {
            let tm = bisect_seg(path, seg, jdd, ta, tb);
            let m = path.eval_segment(seg, tm);
            note(tm, m.jp);
            if m.jp < -touch_tol {
                foc_e = Some(bisect_seg(path, seg, |s| s.jp, ta, tm));
                break;
            }
            if m.jp <= touch_tol && touch.is_none() {
                touch = Some(tm);
            }
        }
        if tb >= limit {
            break;
        }
    }
    let foc = match (touch, foc_e) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    JacobiEvents {
        conj,
        foc,
        foc_e,
        touch,
        jp_min,
        jp_min_t,
        reached: path.length,
    }
}

/// Root of `f` on `[a, b]` inside one segment, assuming a sign change.
fn bisect_seg<T: Real, F>(path: &GeodesicPath<'_, T>, seg: &super::geodesic::Segment<T>, f: F, mut a: T, mut b: T) -> T
where
    F: Fn(&FullState<T>) -> T,
{
    let neg_a = f(&path.eval_segment(seg, a)) < T::zero();
    for _ in 0..200 {
        if b - a <= T::lit(1e-12) {
            break;
        }
        let m = T::lit(0.5) * (a + b);
        if (f(&path.eval_segment(seg, m)) < T::zero()) == neg_a {
            a = m;
        } else {
            b = m;
        }
    }
    T::lit(0.5) * (a + b)
}
