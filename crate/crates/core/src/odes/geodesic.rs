//! Unit-speed geodesics with co-integrated scalar Jacobi fields.
//!
//! Away from the poles the state is polar, `(r, θ, ṙ, c, J, J', J₂, J₂')` with the
//! Clairaut constant `c = φ² θ̇` carried as a frozen component. Within 0.05 of a smooth
//! pole the flow switches to Cartesian coordinates `x = r(cos θ, sin θ)` and
//! Hamiltonian form `(x, p, J, J', J₂, J₂')` for the metric `g = ρ I + σ x xᵀ`, and
//! switches back beyond 0.06.

use thiserror::Error;

use super::integrator::{Dense, State, Stepper, System, Tolerance};
use crate::profiles::{ChartCoefficients, Point, Profile, SurfaceMetric};
use crate::scalar::{wrap_two_pi, Real};

pub const CHART_ENTER: f64 = 0.05;
pub const CHART_LEAVE: f64 = 0.06;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (r = {r})")]
    StepUnderflow { t: f64, r: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("pole chart requested on a profile without a smooth pole")]
    NonSmoothPole,
    #[error("start point r = {r} outside the domain")]
    BadStart { r: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("requested length {requested} exceeds the path length {length}")]
    BeyondPath { requested: f64, length: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Polar,
    /// Cartesian chart about `r = 0`.
    North,
    /// Cartesian chart about the far pole of a closed surface.
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathExit {
    /// Reached the requested length.
    Completed,
    /// Left the profile domain (r > r_max); the path is truncated at the exit.
    Domain,
    /// Stopped early by the caller's predicate.
    Stopped,
}

/// Position and velocity in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState<T> {
    pub t: T,
    pub r: T,
    pub theta: T,
    pub dr: T,
    pub dtheta: T,
}

/// Geodesic state with both Jacobi solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState<T> {
    pub geo: GeodesicState<T>,
    pub j: T,
    pub jp: T,
    pub j2: T,
    pub j2p: T,
}

struct PolarSys<'a, T> {
    prof: &'a Profile<T>,
}

impl<T: Real> System<T> for PolarSys<'_, T> {
    fn rhs(&self, y: &State<T>) -> State<T> {
        let r = y[0];
        let w = self.prof.warp(r);
        let c = y[3];
        let phi2 = w.phi * w.phi;
        let k = self.prof.curvature(r);
        [
            y[2],
            c / phi2,
            c * c * w.dphi / (phi2 * w.phi),
            T::zero(),
            y[5],
            -k * y[4],
            y[7],
            -k * y[6],
        ]
    }

    fn max_step(&self, y: &State<T>) -> T {
        let r = y[0];
        let mut lim = (T::lit(0.5) * r).min(self.prof.step_hint(r));
        if let Some(rf) = self.prof.far_pole() {
            lim = lim.min(T::lit(0.5) * (rf - r));
        }
        lim
    }
}

struct CartSys<'a, T> {
    prof: &'a Profile<T>,
    far: bool,
}

impl<T: Real> CartSys<'_, T> {
    fn coeffs(&self, s: T) -> ChartCoefficients<T> {
        if self.far {
            self.prof.far_chart_coefficients(s)
        } else {
            self.prof.chart_coefficients(s)
        }
    }

    fn radius(&self, s: T) -> T {
        let rt = s.sqrt();
        match self.prof.far_pole() {
            Some(rf) if self.far => rf - rt,
            _ => rt,
        }
    }
}

impl<T: Real> System<T> for CartSys<'_, T> {
    fn rhs(&self, y: &State<T>) -> State<T> {
        let (u, v, pu, pv) = (y[0], y[1], y[2], y[3]);
        let s = u * u + v * v;
        let cc = self.coeffs(s);
        let xp = u * pu + v * pv;
        let ham = (pu * pu + pv * pv - cc.sigma * xp * xp) / (T::lit(2.0) * cc.rho);
        let du = (pu - cc.sigma * xp * u) / cc.rho;
        let dv = (pv - cc.sigma * xp * v) / cc.rho;
        let a = (cc.sigma_s * xp * xp + T::lit(2.0) * ham * cc.rho_s) / cc.rho;
        let b = cc.sigma * xp / cc.rho;
        let dpu = a * u + b * pu;
        let dpv = a * v + b * pv;
        let k = self.prof.curvature(self.radius(s));
        [du, dv, dpu, dpv, y[5], -k * y[4], y[7], -k * y[6]]
    }

    fn max_step(&self, y: &State<T>) -> T {
        self.prof.step_hint(self.radius(y[0] * y[0] + y[1] * y[1]))
    }
}

/// One accepted integration step with its chart and angle bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T> {
    pub chart: Chart,
    pub dense: Dense<T>,
    /// Unwrapped polar angle at the segment start.
    pub theta0: T,
    /// `atan2` of the Cartesian position at the segment start (Cartesian charts only).
    pub ang0: T,
}

/// A shot geodesic: dense-output segments plus metadata.
#[derive(Debug, Clone)]
pub struct GeodesicPath<'m, T> {
    pub metric: &'m SurfaceMetric<T>,
    pub start: Point<T>,
    pub initial_angle: T,
    pub clairaut: T,
    pub length: T,
    pub exit: PathExit,
    segments: Vec<Segment<T>>,
}

fn cartesian_velocity<T: Real>(cc: &ChartCoefficients<T>, y: &State<T>) -> (T, T) {
    let xp = y[0] * y[2] + y[1] * y[3];
    (
        (y[2] - cc.sigma * xp * y[0]) / cc.rho,
        (y[3] - cc.sigma * xp * y[1]) / cc.rho,
    )
}

/// Unwrap an angle increment inside one Cartesian segment using the Clairaut sign.
fn unwrap_increment<T: Real>(d: T, c_sign: T) -> T {
    let two_pi = T::PI() + T::PI();
    let noise = T::lit(1e-7);
    if c_sign >= T::zero() {
        let d = wrap_two_pi(d);
        if d > two_pi - noise {
            d - two_pi
        } else {
            d
        }
    } else {
        let d = -wrap_two_pi(-d);
        if d < noise - two_pi {
            d + two_pi
        } else {
            d
        }
    }
}

/// Convert a chart state into polar quantities. `theta0`/`ang0` unwrap Cartesian angles.
fn to_full<T: Real>(
    prof: &Profile<T>,
    chart: Chart,
    t: T,
    y: &State<T>,
    theta0: T,
    ang0: T,
    c_sign: T,
) -> FullState<T> {
    let geo = match chart {
        Chart::Polar => {
            let r = y[0];
            let phi = prof.phi(r);
            GeodesicState {
                t,
                r,
                theta: y[1],
                dr: y[2],
                dtheta: y[3] / (phi * phi),
            }
        }
        Chart::North | Chart::South => {
            let s = y[0] * y[0] + y[1] * y[1];
            let cc = if chart == Chart::North {
                prof.chart_coefficients(s)
            } else {
                prof.far_chart_coefficients(s)
            };
            let (du, dv) = cartesian_velocity(&cc, y);
            let rt = s.sqrt();
            let radial = if rt > T::zero() {
                (y[0] * du + y[1] * dv) / rt
            } else {
                T::one()
            };
            let dtheta = if s > T::zero() {
                (y[0] * dv - y[1] * du) / s
            } else {
                T::zero()
            };
            let ang = y[1].atan2(y[0]);
            let theta = theta0 + unwrap_increment(ang - ang0, c_sign);
            match chart {
                Chart::North => GeodesicState {
                    t,
                    r: rt,
                    theta,
                    dr: radial,
                    dtheta,
                },
                _ => GeodesicState {
                    t,
                    r: prof.far_pole().unwrap_or_else(T::zero) - rt,
                    theta,
                    dr: -radial,
                    dtheta,
                },
            }
        }
    };
    FullState {
        geo,
        j: y[4],
        jp: y[5],
        j2: y[6],
        j2p: y[7],
    }
}

/// Initial chart state for a launch from `start` at angle `psi` from the outward radial.
fn launch<T: Real>(prof: &Profile<T>, start: Point<T>, psi: T) -> (Chart, State<T>) {
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = start.theta.sin_cos();
    let enter = T::lit(CHART_ENTER);
    let jac = [T::zero(), T::one(), T::one(), T::zero()];
    let near_far = prof
        .far_pole()
        .map(|rf| rf - start.r < enter)
        .unwrap_or(false);
    if start.r < enter || near_far {
        let (chart, rt, sign) = if start.r < enter {
            (Chart::North, start.r, T::one())
        } else {
            (Chart::South, prof.far_pole().unwrap() - start.r, -T::one())
        };
        let s = rt * rt;
        let cc = if chart == Chart::North {
            prof.chart_coefficients(s)
        } else {
            prof.far_chart_coefficients(s)
        };
        // orthonormal frame: outward radial (in r) and unit angular direction
        let er = [sign * ct, sign * st];
        let w = cc.rho.sqrt();
        let eth = [-st / w, ct / w];
        let x = [rt * ct, rt * st];
        let vel = [cp * er[0] + sp * eth[0], cp * er[1] + sp * eth[1]];
        let xv = x[0] * vel[0] + x[1] * vel[1];
        let p = [
            cc.rho * vel[0] + cc.sigma * xv * x[0],
            cc.rho * vel[1] + cc.sigma * xv * x[1],
        ];
        (
            chart,
            [x[0], x[1], p[0], p[1], jac[0], jac[1], jac[2], jac[3]],
        )
    } else {
        let phi = prof.phi(start.r);
        (
            Chart::Polar,
            [
                start.r,
                start.theta,
                cp,
                phi * sp,
                jac[0],
                jac[1],
                jac[2],
                jac[3],
            ],
        )
    }
}

/// Re-express the end state of a segment in another chart.
fn switch_chart<T: Real>(prof: &Profile<T>, to: Chart, full: &FullState<T>, y: &State<T>) -> State<T> {
    let g = &full.geo;
    match to {
        Chart::Polar => {
            let c = y[0] * y[3] - y[1] * y[2];
            [g.r, g.theta, g.dr, c, y[4], y[5], y[6], y[7]]
        }
        Chart::North | Chart::South => {
            let (rt, sign) = if to == Chart::North {
                (g.r, T::one())
            } else {
                (prof.far_pole().unwrap() - g.r, -T::one())
            };
            let s = rt * rt;
            let cc = if to == Chart::North {
                prof.chart_coefficients(s)
            } else {
                prof.far_chart_coefficients(s)
            };
            let (st, ct) = g.theta.sin_cos();
            let x = [rt * ct, rt * st];
            let drt = sign * g.dr;
            let vel = [
                drt * ct - rt * g.dtheta * st,
                drt * st + rt * g.dtheta * ct,
            ];
            let xv = x[0] * vel[0] + x[1] * vel[1];
            let p = [
                cc.rho * vel[0] + cc.sigma * xv * x[0],
                cc.rho * vel[1] + cc.sigma * xv * x[1],
            ];
            [x[0], x[1], p[0], p[1], y[4], y[5], y[6], y[7]]
        }
    }
}

/// Options for [`shoot_with`].
#[derive(Debug, Clone, Copy)]
pub struct ShootOptions<T> {
    pub t_max: T,
    pub tol: Tolerance<T>,
}

impl<T: Real> ShootOptions<T> {
    pub fn new(t_max: T) -> Self {
        Self {
            t_max,
            tol: Tolerance::default(),
        }
    }
}

/// Shoot a geodesic to length `t_max`.
pub fn shoot_geodesic<T: Real>(
    metric: &SurfaceMetric<T>,
    start: Point<T>,
    psi: T,
    t_max: T,
) -> Result<GeodesicPath<'_, T>, OdeError> {
    shoot_with(metric, start, psi, ShootOptions::new(t_max), |_, _| false)
}

/// Shoot with a stop predicate evaluated on the end state of every accepted step.
pub fn shoot_with<'m, T: Real, F>(
    metric: &'m SurfaceMetric<T>,
    start: Point<T>,
    psi: T,
    opts: ShootOptions<T>,
    mut stop: F,
) -> Result<GeodesicPath<'m, T>, OdeError>
where
    F: FnMut(&Segment<T>, &FullState<T>) -> bool,
{
    let prof = &metric.profile;
    if !metric.contains(&start) {
        return Err(OdeError::BadStart {
            r: start.r.to_f64_lossy(),
        });
    }
    if !prof.smooth_pole() && start.r < T::lit(CHART_ENTER) {
        return Err(OdeError::NonSmoothPole);
    }
    let stepper = Stepper::new(opts.tol);
    let (mut chart, mut y) = launch(prof, start, psi);
    let clairaut = prof.phi(start.r) * psi.sin();
    let c_sign = if clairaut >= T::zero() { T::one() } else { -T::one() };
    let polar = PolarSys { prof };
    let north = CartSys { prof, far: false };
    let south = CartSys { prof, far: true };
    let rhs = |chart: Chart, y: &State<T>| match chart {
        Chart::Polar => polar.rhs(y),
        Chart::North => north.rhs(y),
        Chart::South => south.rhs(y),
    };

    let mut t = T::zero();
    let mut theta0 = start.theta;
    // from the pole itself the angle is carried by the launch direction
    let mut ang0 = if start.r > T::zero() {
        y[1].atan2(y[0])
    } else {
        start.theta
    };
    let mut k1 = rhs(chart, &y);
    let mut h = T::lit(1e-3) * prof.pole_scale().min(T::one());
    let mut segments: Vec<Segment<T>> = Vec::new();
    let mut exit = PathExit::Completed;
    let r_max = prof.r_max();
    let closed = prof.far_pole().is_some();
    let enter = T::lit(CHART_ENTER);
    let leave = T::lit(CHART_LEAVE);
    let mut steps = 0usize;

    while t < opts.t_max {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(OdeError::TooManySteps { t: t.to_f64_lossy() });
        }
        let mut hh = h.min(opts.t_max - t);
        hh = hh.min(match chart {
            Chart::Polar => polar.max_step(&y),
            Chart::North => north.max_step(&y),
            Chart::South => south.max_step(&y),
        });
        if hh < opts.tol.h_min {
            if opts.t_max - t < opts.tol.h_min {
                break;
            }
            return Err(OdeError::StepUnderflow {
                t: t.to_f64_lossy(),
                r: y[0].to_f64_lossy(),
            });
        }
        let att = match chart {
            Chart::Polar => stepper.attempt(&polar, t, &y, &k1, hh),
            Chart::North => stepper.attempt(&north, t, &y, &k1, hh),
            Chart::South => stepper.attempt(&south, t, &y, &k1, hh),
        };
        if !att.err.is_finite() || att.err > T::one() {
            h = stepper.next_h(hh, if att.err.is_finite() { att.err } else { T::lit(1e6) }, false);
            continue;
        }
        if att.y1.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t: t.to_f64_lossy() });
        }
        let seg = Segment {
            chart,
            dense: att.dense,
            theta0,
            ang0,
        };
        let t1 = t + hh;
        let full = to_full(prof, chart, t1, &att.y1, theta0, ang0, c_sign);
        segments.push(seg);
        t = t1;
        y = att.y1;
        k1 = att.k7;
        h = stepper.next_h(hh, att.err, true);

        if !closed && full.geo.r > r_max {
            exit = PathExit::Domain;
            break;
        }
        if stop(&seg, &full) {
            exit = PathExit::Stopped;
            break;
        }
        // chart bookkeeping
        let r = full.geo.r;
        let next = match chart {
            Chart::Polar if r < enter => Some(Chart::North),
            Chart::Polar if closed && prof.far_pole().unwrap() - r < enter => Some(Chart::South),
            Chart::North if r > leave => Some(Chart::Polar),
            Chart::South if prof.far_pole().unwrap() - r > leave => Some(Chart::Polar),
            _ => None,
        };
        theta0 = full.geo.theta;
        if let Some(to) = next {
            y = switch_chart(prof, to, &full, &y);
            chart = to;
            k1 = rhs(chart, &y);
        }
        if chart != Chart::Polar {
            ang0 = y[1].atan2(y[0]);
        }
    }

    let mut path = GeodesicPath {
        metric,
        start,
        initial_angle: psi,
        clairaut,
        length: t,
        exit,
        segments,
    };
    if exit == PathExit::Domain {
        // truncate at the exact exit radius
        let te = path.first_crossing(|s| s.geo.r - r_max, T::zero());
        if let Some(te) = te {
            path.length = te;
        }
    }
    Ok(path)
}

impl<'m, T: Real> GeodesicPath<'m, T> {
    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    fn c_sign(&self) -> T {
        if self.clairaut >= T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    fn segment_index(&self, t: T) -> usize {
        let n = self.segments.len();
        if n == 0 {
            return 0;
        }
        match self
            .segments
            .binary_search_by(|s| s.dense.t0.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 1),
        }
    }

    /// Full state on a given segment at time `t` (no clamping).
    pub fn eval_segment(&self, seg: &Segment<T>, t: T) -> FullState<T> {
        let y = seg.dense.eval(t);
        to_full(
            &self.metric.profile,
            seg.chart,
            t,
            &y,
            seg.theta0,
            seg.ang0,
            self.c_sign(),
        )
    }

    /// Full state at arclength `t`, clamped to `[0, length]`.
    pub fn full_at(&self, t: T) -> FullState<T> {
        let t = t.max(T::zero()).min(self.length);
        if self.segments.is_empty() {
            let (chart, y) = launch(&self.metric.profile, self.start, self.initial_angle);
            let ang0 = if self.start.r > T::zero() {
                y[1].atan2(y[0])
            } else {
                self.start.theta
            };
            return to_full(
                &self.metric.profile,
                chart,
                T::zero(),
                &y,
                self.start.theta,
                ang0,
                self.c_sign(),
            );
        }
        let seg = self.segments[self.segment_index(t)];
        self.eval_segment(&seg, t)
    }

    pub fn state_at(&self, t: T) -> GeodesicState<T> {
        self.full_at(t).geo
    }

    pub fn end(&self) -> FullState<T> {
        self.full_at(self.length)
    }

    /// Step-end samples of the trajectory (including `t = 0`).
    pub fn states(&self) -> Vec<GeodesicState<T>> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push(self.full_at(T::zero()).geo);
        for seg in &self.segments {
            let t1 = seg.dense.t1().min(self.length);
            out.push(self.eval_segment(seg, t1).geo);
            if t1 >= self.length {
                break;
            }
        }
        out
    }

    /// Samples refined by midpoint insertion until cubic Hermite interpolation of the
    /// position reproduces the dense output to within `tol` in the metric.
    pub fn hermite_samples(&self, tol: T) -> Vec<GeodesicState<T>> {
        let base = self.states();
        let mut out = Vec::with_capacity(base.len() * 2);
        out.push(base[0]);
        for w in base.windows(2) {
            self.refine_interval(w[0], w[1], tol, 0, &mut out);
        }
        out
    }

    fn refine_interval(
        &self,
        a: GeodesicState<T>,
        b: GeodesicState<T>,
        tol: T,
        depth: usize,
        out: &mut Vec<GeodesicState<T>>,
    ) {
        let tm = T::lit(0.5) * (a.t + b.t);
        let exact = self.state_at(tm);
        let (r, th) = hermite_midpoint(&a, &b);
        let phi = self.metric.profile.phi(exact.r);
        let err = (r - exact.r).hypot(phi * (th - exact.theta));
        if err > tol && depth < 20 {
            self.refine_interval(a, exact, tol, depth + 1, out);
            self.refine_interval(exact, b, tol, depth + 1, out);
        } else {
            out.push(b);
        }
    }

    /// First `t` in `(from, length]` where `f` changes sign, refined by bisection on
    /// the dense output to 1e-12 in `t`.
    pub fn first_crossing<F>(&self, f: F, from: T) -> Option<T>
    where
        F: Fn(&FullState<T>) -> T,
    {
        let start = self.segment_index(from);
        let mut prev: Option<(T, T)> = None;
        for seg in &self.segments[start.min(self.segments.len())..] {
            let ta = seg.dense.t0.max(from);
            let tb = seg.dense.t1().min(self.length);
            if tb <= ta {
                continue;
            }
            let fa = match prev {
                Some((t, v)) if t == ta => v,
                _ => f(&self.eval_segment(seg, ta)),
            };
            let fb = f(&self.eval_segment(seg, tb));
            prev = Some((tb, fb));
            if fa == T::zero() && ta > from {
                return Some(ta);
            }
            if (fa < T::zero()) != (fb < T::zero()) || fb == T::zero() {
                return Some(self.bisect(seg, &f, ta, tb, fa));
            }
        }
        None
    }

    fn bisect<F>(&self, seg: &Segment<T>, f: &F, mut a: T, mut b: T, fa: T) -> T
    where
        F: Fn(&FullState<T>) -> T,
    {
        let neg_a = fa < T::zero();
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0) * b.abs());
        for _ in 0..200 {
            if b - a <= tol {
                break;
            }
            let m = T::lit(0.5) * (a + b);
            let fm = f(&self.eval_segment(seg, m));
            if fm == T::zero() {
                return m;
            }
            if (fm < T::zero()) == neg_a {
                a = m;
            } else {
                b = m;
            }
        }
        T::lit(0.5) * (a + b)
    }
}

fn hermite_midpoint<T: Real>(a: &GeodesicState<T>, b: &GeodesicState<T>) -> (T, T) {
    let h = b.t - a.t;
    let q = T::lit(0.125);
    let half = T::lit(0.5);
    let r = half * (a.r + b.r) + q * h * (a.dr - b.dr);
    let th = half * (a.theta + b.theta) + q * h * (a.dtheta - b.dtheta);
    (r, th)
}
