//! Pointwise radii from Jacobi fields: conjugate, focal and extended focal radius,
//! their infima over balls, and the radius report.

mod report;

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::odes::{scan_events, JacobiEvents, OdeError, TOUCH_TOL};
use crate::profiles::{Point, SurfaceMetric};

pub use report::{radius_report, totally_conjugate_scan, ConjT, ReportOptions, RadiusReport};

/// Default stand-in for an infinite radius.
pub const DEFAULT_HORIZON: f64 = 20.0;

/// A length, or the verdict that nothing happened before the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Radius {
    Finite(f64),
    BeyondHorizon { beyond_horizon: f64 },
}

impl Radius {
    pub fn beyond(horizon: f64) -> Self {
        Radius::BeyondHorizon {
            beyond_horizon: horizon,
        }
    }

    pub fn from_option(v: Option<f64>, horizon: f64) -> Self {
        match v {
            Some(x) if x <= horizon => Radius::Finite(x),
            _ => Radius::beyond(horizon),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Radius::Finite(x) => Some(x),
            Radius::BeyondHorizon { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Radius::Finite(_))
    }

    /// `+∞` for a beyond-horizon value.
    pub fn or_inf(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub fn horizon(&self) -> Option<f64> {
        match *self {
            Radius::BeyondHorizon { beyond_horizon } => Some(beyond_horizon),
            Radius::Finite(_) => None,
        }
    }

    pub fn min(self, other: Radius) -> Radius {
        if other.or_inf() < self.or_inf() {
            other
        } else {
            self
        }
    }

    /// Multiply a finite value; a beyond-horizon value keeps its horizon.
    pub fn scale(self, k: f64) -> Radius {
        match self {
            Radius::Finite(x) => Radius::Finite(k * x),
            b => b,
        }
    }
}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.or_inf().partial_cmp(&other.or_inf())
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(x) => write!(f, "{x:.9}"),
            Radius::BeyondHorizon { beyond_horizon } => write!(f, "beyond({beyond_horizon})"),
        }
    }
}

/// Direction grid, horizon and touch band shared by the radius computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub n_dirs: usize,
    pub horizon: f64,
    pub touch_tol: f64,
    /// Golden-section tolerance in ψ around the grid argmin.
    pub psi_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            n_dirs: 64,
            horizon: DEFAULT_HORIZON,
            touch_tol: TOUCH_TOL,
            psi_tol: 1e-6,
        }
    }
}

impl ScanOptions {
    pub fn with_dirs(n_dirs: usize) -> Self {
        Self {
            n_dirs,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionEvents {
    pub psi: f64,
    pub first_j_zero: Radius,
    pub first_jprime_zero: Radius,
    pub first_jprime_negative: Radius,
    pub jprime_min: f64,
}

/// Per-direction Jacobi event times from one source over ψ ∈ [0, π].
#[derive(Debug, Clone, Serialize)]
pub struct DirectionalScan {
    pub source: Point<f64>,
    pub horizon: f64,
    pub directions: Vec<DirectionEvents>,
}

fn to_events(psi: f64, ev: &JacobiEvents<f64>, horizon: f64) -> DirectionEvents {
    DirectionEvents {
        psi,
        first_j_zero: Radius::from_option(ev.conj, horizon),
        first_jprime_zero: Radius::from_option(ev.foc, horizon),
        first_jprime_negative: Radius::from_option(ev.foc_e, horizon),
        jprime_min: ev.jp_min,
    }
}

/// Jacobi events along one direction. Directions through a singular core report no
/// events.
pub fn direction_events(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    psi: f64,
    opts: &ScanOptions,
) -> Result<DirectionEvents, OdeError> {
    if metric.enters_core(p, psi) {
        return Ok(DirectionEvents {
            psi,
            first_j_zero: Radius::beyond(opts.horizon),
            first_jprime_zero: Radius::beyond(opts.horizon),
            first_jprime_negative: Radius::beyond(opts.horizon),
            jprime_min: f64::NAN,
        });
    }
    let ev = scan_events(metric, p, psi, opts.horizon, opts.touch_tol)?;
    Ok(to_events(psi, &ev, opts.horizon))
}

/// Uniform grid `ψ_k = kπ/(n-1)`, endpoints included.
pub fn psi_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|k| std::f64::consts::PI * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn directional_scan(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    opts: &ScanOptions,
) -> Result<DirectionalScan, OdeError> {
    let directions = psi_grid(opts.n_dirs)
        .into_par_iter()
        .map(|psi| direction_events(metric, p, psi, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DirectionalScan {
        source: p,
        horizon: opts.horizon,
        directions,
    })
}

/// Which event time a radius minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Conj,
    Foc,
    FocE,
}

impl EventKind {
    fn pick(self, e: &DirectionEvents) -> Radius {
        match self {
            EventKind::Conj => e.first_j_zero,
            EventKind::Foc => e.first_jprime_zero,
            EventKind::FocE => e.first_jprime_negative,
        }
    }
}

impl DirectionalScan {
    /// Grid minimum of one event kind and its index (smallest ψ on ties).
    pub fn grid_min(&self, kind: EventKind) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, e) in self.directions.iter().enumerate() {
            if let Some(v) = kind.pick(e).value() {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((i, v));
                }
            }
        }
        best
    }
}

/// Minimize the event time over ψ: grid argmin then golden section on the
/// neighbouring grid cells.
pub fn refine_radius(
    metric: &SurfaceMetric<f64>,
    scan: &DirectionalScan,
    kind: EventKind,
    opts: &ScanOptions,
) -> Result<Radius, OdeError> {
    let Some((i, v)) = scan.grid_min(kind) else {
        return Ok(Radius::beyond(scan.horizon));
    };
    let dirs = &scan.directions;
    let lo = dirs[i.saturating_sub(1)].psi;
    let hi = dirs[(i + 1).min(dirs.len() - 1)].psi;
    let f = |psi: f64| -> Result<f64, OdeError> {
        let e = direction_events(metric, scan.source, psi, opts)?;
        Ok(kind.pick(&e).or_inf())
    };
    let (_, fv) = golden_min(f, lo, hi, opts.psi_tol)?;
    Ok(Radius::Finite(v.min(fv)))
}

/// Golden-section search for a minimum on `[a, b]`; returns the best point seen.
pub fn golden_min<F, E>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// conj, foc and foc_e at one point from a single scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiRadii {
    pub conj: Radius,
    pub foc: Radius,
    pub foc_e: Radius,
}

pub fn jacobi_radii(metric: &SurfaceMetric<f64>, p: Point<f64>, opts: &ScanOptions) -> Result<JacobiRadii, OdeError> {
    let scan = directional_scan(metric, p, opts)?;
    Ok(JacobiRadii {
        conj: refine_radius(metric, &scan, EventKind::Conj, opts)?,
        foc: refine_radius(metric, &scan, EventKind::Foc, opts)?,
        foc_e: refine_radius(metric, &scan, EventKind::FocE, opts)?,
    })
}

pub fn conj_radius(metric: &SurfaceMetric<f64>, p: Point<f64>, opts: &ScanOptions) -> Result<Radius, OdeError> {
    let scan = directional_scan(metric, p, opts)?;
    refine_radius(metric, &scan, EventKind::Conj, opts)
}

pub fn focal_radius(metric: &SurfaceMetric<f64>, p: Point<f64>, opts: &ScanOptions) -> Result<Radius, OdeError> {
    let scan = directional_scan(metric, p, opts)?;
    refine_radius(metric, &scan, EventKind::Foc, opts)
}

pub fn extended_focal_radius(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    opts: &ScanOptions,
) -> Result<Radius, OdeError> {
    let scan = directional_scan(metric, p, opts)?;
    refine_radius(metric, &scan, EventKind::FocE, opts)
}

/// One row of a 1-D radius sweep along a meridian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub conj: Radius,
    pub foc: Radius,
    pub foc_e: Radius,
}

/// conj/foc/foc_e at `n` radii evenly spaced on `[r0, r1]`.
pub fn radial_sweep(
    metric: &SurfaceMetric<f64>,
    r0: f64,
    r1: f64,
    n: usize,
    opts: &ScanOptions,
) -> Result<Vec<SweepRow>, OdeError> {
    let rs: Vec<f64> = if n <= 1 {
        vec![r0]
    } else {
        (0..n).map(|i| r0 + (r1 - r0) * i as f64 / (n - 1) as f64).collect()
    };
    rs.into_iter()
        .map(|r| {
            let jr = jacobi_radii(metric, Point::new(r, 0.0), opts)?;
            Ok(SweepRow {
                r,
                conj: jr.conj,
                foc: jr.foc,
                foc_e: jr.foc_e,
            })
        })
        .collect()
}

/// Infimum of a radius over a ball, with the radius where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallRadius {
    pub value: Radius,
    pub argmin_r: Option<f64>,
}

/// Radii `s` of points of the open ball `B_R(p)`: midpoints of `n` cells of
/// `[p.r - R, p.r + R]` clipped to the domain, plus `p.r` and the pole if inside.
pub fn ball_radii(metric: &SurfaceMetric<f64>, p: Point<f64>, big_r: f64, n: usize) -> Vec<f64> {
    let lo = (p.r - big_r).max(0.0);
    let hi = (p.r + big_r).min(metric.profile.r_max());
    let n = n.max(1);
    let mut rs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
    rs.push(p.r);
    if p.r < big_r {
        rs.push(0.0);
    }
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    rs
}

fn ball_min(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    big_r: f64,
    n_samples: usize,
    opts: &ScanOptions,
    kind: EventKind,
) -> Result<BallRadius, OdeError> {
    let rs = ball_radii(metric, p, big_r, n_samples);
    let vals = rs
        .par_iter()
        .map(|&r| {
            let q = Point::new(r, 0.0);
            let scan = directional_scan(metric, q, opts)?;
            refine_radius(metric, &scan, kind, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = BallRadius {
        value: Radius::beyond(opts.horizon),
        argmin_r: None,
    };
    for (r, v) in rs.iter().zip(vals) {
        if v.or_inf() < best.value.or_inf() {
            best = BallRadius {
                value: v,
                argmin_r: Some(*r),
            };
        }
    }
    Ok(best)
}

/// `foc(B_R(p))`, by a 1-D sweep over the radii present in the ball.
pub fn ball_focal_radius(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    big_r: f64,
    n_samples: usize,
    opts: &ScanOptions,
) -> Result<BallRadius, OdeError> {
    ball_min(metric, p, big_r, n_samples, opts, EventKind::Foc)
}

/// `conj(B_R(p))`, same sweep as [`ball_focal_radius`].
pub fn ball_conj_radius(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    big_r: f64,
    n_samples: usize,
    opts: &ScanOptions,
) -> Result<BallRadius, OdeError> {
    ball_min(metric, p, big_r, n_samples, opts, EventKind::Conj)
}
