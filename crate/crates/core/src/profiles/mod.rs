//! Warping profiles `φ(r)` of rotationally symmetric metrics `dr² + φ(r)² dθ²`.

mod config;
pub mod glue;

pub use config::{ProfileConfig, ProfileKind, ProfileParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("radius {r} outside the profile domain [0, {r_max}]")]
    Domain { r: f64, r_max: f64 },
    #[error("warping function not positive at r = {r} (phi = {phi})")]
    NonPositive { r: f64, phi: f64 },
    #[error("glue matching did not converge: residual {residual:?} at amplitudes {amplitudes:?}")]
    GlueNotConverged {
        residual: [f64; 2],
        amplitudes: [f64; 2],
    },
}

/// `φ` with its first two derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp<T> {
    pub phi: T,
    pub dphi: T,
    pub ddphi: T,
}

/// Odd Taylor series `φ(r) = r (1 + a3 r² + a5 r⁴ + a7 r⁶)` at a smooth pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSeries<T> {
    pub a3: T,
    pub a5: T,
    pub a7: T,
    /// Radius below which the series replaces the closed form in pole-chart quantities.
    pub radius: T,
}

impl<T: Real> PoleSeries<T> {
    fn new(a3: f64, a5: f64, a7: f64, radius: f64) -> Self {
        Self {
            a3: T::lit(a3),
            a5: T::lit(a5),
            a7: T::lit(a7),
            radius: T::lit(radius),
        }
    }

    /// Gauss curvature from the series at `s = r²`.
    pub fn curvature(&self, s: T) -> T {
        let six = T::lit(6.0);
        let num = six * self.a3 + T::lit(20.0) * self.a5 * s + T::lit(42.0) * self.a7 * s * s;
        let den = T::one() + s * (self.a3 + s * (self.a5 + s * self.a7));
        -num / den
    }

    /// `ρ = (φ/r)²`, `σ = (1 - ρ)/r²` and their `s`-derivatives, from the series.
    pub fn chart_coefficients(&self, s: T) -> ChartCoefficients<T> {
        let two = T::lit(2.0);
        let c1 = two * self.a3;
        let c2 = self.a3 * self.a3 + two * self.a5;
        let c3 = two * self.a7 + two * self.a3 * self.a5;
        let rho = T::one() + s * (c1 + s * (c2 + s * c3));
        let rho_s = c1 + s * (two * c2 + T::lit(3.0) * c3 * s);
        let sigma = -(c1 + s * (c2 + s * c3));
        let sigma_s = -(c2 + two * c3 * s);
        ChartCoefficients {
            rho,
            rho_s,
            sigma,
            sigma_s,
        }
    }
}

/// Coefficients of the Cartesian pole chart metric `g = ρ I + σ x xᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartCoefficients<T> {
    pub rho: T,
    pub rho_s: T,
    pub sigma: T,
    pub sigma_s: T,
}

/// Parameters and solved data of the sphere/hyperbolic glued profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GulliverParams {
    pub r1: f64,
    pub epsilon: f64,
    pub r2: f64,
    pub amplitudes: [f64; 2],
    pub residual: [f64; 2],
}

#[derive(Debug, Clone)]
enum Shape<T> {
    Sphere,
    Plane,
    Hyperbolic,
    Gulliver {
        a: T,
        b: T,
        r2: T,
        params: GulliverParams,
        nodes: Vec<[f64; 4]>,
    },
    Cone {
        beta: T,
        r_cap: T,
    },
    Paraboloid,
}

/// Warping profile of a rotationally symmetric surface metric.
#[derive(Debug, Clone)]
pub struct Profile<T> {
    name: String,
    shape: Shape<T>,
    r_max: T,
    smooth_pole: bool,
    pole: PoleSeries<T>,
    far_pole: Option<T>,
    pole_scale: T,
}

/// One row of an exported profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub phi: f64,
    pub phi_prime: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

const OPEN_R_MAX: f64 = 20.0;

impl<T: Real> Profile<T> {
    /// Unit round sphere, `φ = sin r`, with a second smooth pole at `r = π`.
    pub fn sphere() -> Self {
        Self {
            name: "sphere".into(),
            shape: Shape::Sphere,
            r_max: T::PI() - T::lit(1e-9),
            smooth_pole: true,
            pole: PoleSeries::new(-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0, 0.01),
            far_pole: Some(T::PI()),
            pole_scale: T::one(),
        }
    }

    pub fn plane() -> Self {
        Self {
            name: "plane".into(),
            shape: Shape::Plane,
            r_max: T::lit(OPEN_R_MAX),
            smooth_pole: true,
            pole: PoleSeries::new(0.0, 0.0, 0.0, 0.01),
            far_pole: None,
            pole_scale: T::one(),
        }
    }

    pub fn hyperbolic() -> Self {
        Self {
            name: "hyperbolic".into(),
            shape: Shape::Hyperbolic,
            r_max: T::lit(OPEN_R_MAX),
            smooth_pole: true,
            pole: PoleSeries::new(1.0 / 6.0, 1.0 / 120.0, 1.0 / 5040.0, 0.01),
            far_pole: None,
            pole_scale: T::one(),
        }
    }

    /// Spherical cap `φ = sin r` on `[0, r1 - ε]`, hyperbolic end `φ = sinh(r - r2)` on
    /// `[r1 + ε, ∞)`, and a curvature-prescribed glue in between.
    pub fn gulliver(r1: f64, epsilon: f64) -> Result<Self, ProfileError> {
        let quarter = std::f64::consts::FRAC_PI_4;
        if !(r1 > quarter && r1 < 0.8) {
            return Err(ProfileError::Precondition(format!(
                "r1 = {r1} must lie in (pi/4, 0.8)"
            )));
        }
        if !(epsilon > 0.0 && r1 - epsilon > quarter) {
            return Err(ProfileError::Precondition(format!(
                "r1 - epsilon = {} must exceed pi/4",
                r1 - epsilon
            )));
        }
        if r1 + epsilon > 0.85 {
            return Err(ProfileError::Precondition(format!(
                "r1 + epsilon = {} must not exceed 0.85",
                r1 + epsilon
            )));
        }
        let sol = glue::solve_glue(r1, epsilon)?;
        let params = GulliverParams {
            r1,
            epsilon,
            r2: sol.r2,
            amplitudes: sol.amplitudes,
            residual: sol.residual,
        };
        Ok(Self {
            name: "gulliver".into(),
            shape: Shape::Gulliver {
                a: T::lit(sol.a),
                b: T::lit(sol.b),
                r2: T::lit(sol.r2),
                params,
                nodes: sol.nodes,
            },
            r_max: T::lit(OPEN_R_MAX),
            smooth_pole: true,
            pole: PoleSeries::new(-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0, 0.01),
            far_pole: None,
            pole_scale: T::one(),
        })
    }

    /// Flat cone of total angle `(1 - δ)π` with a smooth polynomial cap of radius `r_cap`:
    /// `φ = r [β + (1 - β)(1 - r²/r_cap²)⁴]` inside the cap, `φ = β r` outside, `β = (1 - δ)/2`.
    pub fn cone(delta: f64, r_cap: f64) -> Result<Self, ProfileError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ProfileError::Precondition(format!(
                "delta = {delta} must lie in (0, 1)"
            )));
        }
        if !(r_cap > 0.0 && r_cap <= 0.1) {
            return Err(ProfileError::Precondition(format!(
                "r_cap = {r_cap} must lie in (0, 0.1]"
            )));
        }
        let beta = 0.5 * (1.0 - delta);
        let q = 1.0 - beta;
        let c2 = r_cap * r_cap;
        Ok(Self {
            name: "cone".into(),
            shape: Shape::Cone {
                beta: T::lit(beta),
                r_cap: T::lit(r_cap),
            },
            r_max: T::lit(OPEN_R_MAX),
            smooth_pole: true,
            pole: PoleSeries::new(
                -4.0 * q / c2,
                6.0 * q / (c2 * c2),
                -4.0 * q / (c2 * c2 * c2),
                0.01 * r_cap,
            ),
            far_pole: None,
            pole_scale: T::lit(r_cap),
        })
    }

    /// Paraboloid `z = (x² + y²)/2` parametrized by meridian arclength.
    pub fn paraboloid() -> Self {
        Self {
            name: "paraboloid".into(),
            shape: Shape::Paraboloid,
            r_max: T::lit(OPEN_R_MAX),
            smooth_pole: true,
            pole: PoleSeries::new(-1.0 / 6.0, 13.0 / 120.0, -493.0 / 5040.0, 0.002),
            far_pole: None,
            pole_scale: T::one(),
        }
    }

    /// Override the computational horizon radius. Ignored for closed surfaces.
    pub fn with_r_max(mut self, r_max: T) -> Self {
        if self.far_pole.is_none() {
            self.r_max = r_max;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProfileKind {
        match self.shape {
            Shape::Sphere => ProfileKind::Sphere,
            Shape::Plane => ProfileKind::Plane,
            Shape::Hyperbolic => ProfileKind::Hyperbolic,
            Shape::Gulliver { .. } => ProfileKind::Gulliver,
            Shape::Cone { .. } => ProfileKind::Cone,
            Shape::Paraboloid => ProfileKind::Paraboloid,
        }
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn smooth_pole(&self) -> bool {
        self.smooth_pole
    }

    pub fn pole_series(&self) -> &PoleSeries<T> {
        &self.pole
    }

    /// Radius of a second smooth pole (closed surfaces), if any.
    pub fn far_pole(&self) -> Option<T> {
        self.far_pole
    }

    /// Length scale of the pole neighbourhood (cap radius for the cone, 1 otherwise).
    pub fn pole_scale(&self) -> T {
        self.pole_scale
    }

    pub fn gulliver_params(&self) -> Option<&GulliverParams> {
        match &self.shape {
            Shape::Gulliver { params, .. } => Some(params),
            _ => None,
        }
    }

    /// Cone aperture factor `β = (1 - δ)/2` and cap radius.
    pub fn cone_params(&self) -> Option<(T, T)> {
        match self.shape {
            Shape::Cone { beta, r_cap } => Some((beta, r_cap)),
            _ => None,
        }
    }

    /// Smoothing core standing in for a singular vertex. Geodesics that dip into it
    /// have no counterpart on the idealized surface.
    pub fn singular_core(&self) -> Option<T> {
        match self.shape {
            Shape::Cone { r_cap, .. } => Some(r_cap),
            _ => None,
        }
    }

    /// Radii where the profile changes analytic branch.
    pub fn joints(&self) -> Vec<T> {
        match &self.shape {
            Shape::Gulliver { a, b, .. } => vec![*a, *b],
            Shape::Cone { r_cap, .. } => vec![*r_cap],
            _ => Vec::new(),
        }
    }

    /// Step cap for integrators at radius `r`: small inside bands where curvature varies
    /// fast, and outside them the radial distance to the band, which a unit-speed
    /// geodesic cannot cover in less time, so no step jumps over a band.
    pub fn step_hint(&self, r: T) -> T {
        let band = |lo: T, hi: T, h: T| {
            if r >= lo && r <= hi {
                h
            } else if r < lo {
                (lo - r).max(h)
            } else {
                (r - hi).max(h)
            }
        };
        match &self.shape {
            Shape::Gulliver { a, b, .. } => band(*a - T::lit(1e-3), *b + T::lit(1e-3), T::lit(5e-5)),
            Shape::Cone { r_cap, .. } => band(-T::one(), T::lit(1.5) * *r_cap, *r_cap / T::lit(400.0)),
            _ => T::infinity(),
        }
    }

    /// `φ`, `φ'`, `φ''` at `r` (no domain check).
    pub fn warp(&self, r: T) -> Warp<T> {
        match &self.shape {
            Shape::Sphere => {
                let (s, c) = r.sin_cos();
                Warp {
                    phi: s,
                    dphi: c,
                    ddphi: -s,
                }
            }
            Shape::Plane => Warp {
                phi: r,
                dphi: T::one(),
                ddphi: T::zero(),
            },
            Shape::Hyperbolic => Warp {
                phi: r.sinh(),
                dphi: r.cosh(),
                ddphi: r.sinh(),
            },
            Shape::Gulliver {
                a,
                b,
                r2,
                nodes,
                params,
            } => {
                if r <= *a {
                    let (s, c) = r.sin_cos();
                    Warp {
                        phi: s,
                        dphi: c,
                        ddphi: -s,
                    }
                } else if r >= *b {
                    let x = r - *r2;
                    Warp {
                        phi: x.sinh(),
                        dphi: x.cosh(),
                        ddphi: x.sinh(),
                    }
                } else {
                    // value and slope from the table; curvature is the prescribed one
                    let rf = r.to_f64_lossy();
                    let (f, df, _) = glue::hermite5(nodes, rf);
                    let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
                    let k = glue::glue_curvature((rf - a) / (b - a), params.amplitudes);
                    Warp {
                        phi: T::lit(f),
                        dphi: T::lit(df),
                        ddphi: T::lit(-k * f),
                    }
                }
            }
            Shape::Cone { beta, r_cap } => {
                if r >= *r_cap {
                    Warp {
                        phi: *beta * r,
                        dphi: *beta,
                        ddphi: T::zero(),
                    }
                } else {
                    let q = T::one() - *beta;
                    let c2 = *r_cap * *r_cap;
                    let y = r * r / c2;
                    let m = T::one() - y;
                    let m2 = m * m;
                    let m3 = m2 * m;
                    Warp {
                        phi: r * (*beta + q * m3 * m),
                        dphi: *beta + q * (m3 * m - T::lit(8.0) * y * m3),
                        ddphi: q * T::lit(24.0) * r / c2 * m2 * (T::lit(3.0) * y - T::one()),
                    }
                }
            }
            Shape::Paraboloid => {
                let rho = paraboloid_radius(r);
                let w = T::one() + rho * rho;
                Warp {
                    phi: rho,
                    dphi: T::one() / w.sqrt(),
                    ddphi: -rho / (w * w),
                }
            }
        }
    }

    pub fn phi(&self, r: T) -> T {
        self.warp(r).phi
    }

    pub fn phi_prime(&self, r: T) -> T {
        self.warp(r).dphi
    }

    pub fn phi_second(&self, r: T) -> T {
        self.warp(r).ddphi
    }

    /// Gauss curvature `-φ''/φ`, using the pole series where the quotient is 0/0.
    pub fn curvature(&self, r: T) -> T {
        let r = r.abs();
        if r < self.pole.radius {
            return self.pole.curvature(r * r);
        }
        if let Some(rf) = self.far_pole {
            let rt = (rf - r).abs();
            if rt < self.pole.radius {
                return self.pole.curvature(rt * rt);
            }
        }
        if let Shape::Paraboloid = self.shape {
            let rho = paraboloid_radius(r);
            let w = T::one() + rho * rho;
            return T::one() / (w * w);
        }
        let w = self.warp(r);
        -w.ddphi / w.phi
    }

    /// Checked Gauss curvature at a radius inside the domain.
    pub fn gauss_curvature(&self, r: T) -> Result<T, ProfileError> {
        if !(r >= T::zero() && r <= self.r_max) {
            return Err(ProfileError::Domain {
                r: r.to_f64_lossy(),
                r_max: self.r_max.to_f64_lossy(),
            });
        }
        if r == T::zero() {
            if self.smooth_pole {
                return Ok(self.pole.curvature(T::zero()));
            }
            return Err(ProfileError::NonPositive { r: 0.0, phi: 0.0 });
        }
        let phi = self.phi(r);
        if !(phi > T::zero()) {
            return Err(ProfileError::NonPositive {
                r: r.to_f64_lossy(),
                phi: phi.to_f64_lossy(),
            });
        }
        Ok(self.curvature(r))
    }

    /// Curvature of the tangential planes in the n ≥ 3 warped product, `(1 - φ'²)/φ²`.
    pub fn tangential_curvature(&self, r: T) -> T {
        let w = self.warp(r);
        (T::one() - w.dphi * w.dphi) / (w.phi * w.phi)
    }

    /// Pole chart coefficients at squared radius `s = r²` from the near pole.
    pub fn chart_coefficients(&self, s: T) -> ChartCoefficients<T> {
        let r = s.sqrt();
        if r < self.pole.radius {
            return self.pole.chart_coefficients(s);
        }
        let w = self.warp(r);
        let q = w.phi / r;
        let rho = q * q;
        let rho_s = w.phi * (r * w.dphi - w.phi) / (s * s);
        let sigma = (T::one() - rho) / s;
        let sigma_s = (-rho_s - sigma) / s;
        ChartCoefficients {
            rho,
            rho_s,
            sigma,
            sigma_s,
        }
    }

    /// Pole chart coefficients about the far pole, `s = (R - r)²`.
    pub fn far_chart_coefficients(&self, s: T) -> ChartCoefficients<T> {
        let rt = s.sqrt();
        let rf = self.far_pole.unwrap_or_else(T::zero);
        if rt < self.pole.radius {
            return self.pole.chart_coefficients(s);
        }
        let w = self.warp(rf - rt);
        let q = w.phi / rt;
        let rho = q * q;
        let rho_s = w.phi * (-rt * w.dphi - w.phi) / (s * s);
        let sigma = (T::one() - rho) / s;
        let sigma_s = (-rho_s - sigma) / s;
        ChartCoefficients {
            rho,
            rho_s,
            sigma,
            sigma_s,
        }
    }

    /// Tabulate `(r, φ, φ', K)` on `[r0, r1]` with the given step.
    pub fn table(&self, r0: T, r1: T, step: T) -> Vec<ProfileRow> {
        let n = ((r1 - r0) / step).round().to_usize().unwrap_or(0);
        (0..=n)
            .map(|i| {
                let r = if i == n {
                    r1
                } else {
                    r0 + step * T::from_usize(i).unwrap()
                };
                let w = self.warp(r);
                ProfileRow {
                    r: r.to_f64_lossy(),
                    phi: w.phi.to_f64_lossy(),
                    phi_prime: w.dphi.to_f64_lossy(),
                    k: self.curvature(r).to_f64_lossy(),
                }
            })
            .collect()
    }

    /// The Hermite glue table, for profiles that have one.
    pub fn glue_table(&self) -> Option<Vec<ProfileRow>> {
        match &self.shape {
            Shape::Gulliver { nodes, .. } => Some(
                nodes
                    .iter()
                    .map(|n| ProfileRow {
                        r: n[0],
                        phi: n[1],
                        phi_prime: n[2],
                        k: -n[3] / n[1],
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Convert the profile to another scalar type.
    pub fn cast<U: Real>(&self) -> Profile<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        let shape = match &self.shape {
            Shape::Sphere => Shape::Sphere,
            Shape::Plane => Shape::Plane,
            Shape::Hyperbolic => Shape::Hyperbolic,
            Shape::Paraboloid => Shape::Paraboloid,
            Shape::Cone { beta, r_cap } => Shape::Cone {
                beta: c(*beta),
                r_cap: c(*r_cap),
            },
            Shape::Gulliver {
                a,
                b,
                r2,
                params,
                nodes,
            } => Shape::Gulliver {
                a: c(*a),
                b: c(*b),
                r2: c(*r2),
                params: params.clone(),
                nodes: nodes.clone(),
            },
        };
        Profile {
            name: self.name.clone(),
            shape,
            r_max: c(self.r_max),
            smooth_pole: self.smooth_pole,
            pole: PoleSeries {
                a3: c(self.pole.a3),
                a5: c(self.pole.a5),
                a7: c(self.pole.a7),
                radius: c(self.pole.radius),
            },
            far_pole: self.far_pole.map(c),
            pole_scale: c(self.pole_scale),
        }
    }
}

/// Invert the paraboloid meridian arclength `r(ρ) = ½(ρ√(1+ρ²) + asinh ρ)` by Newton.
fn paraboloid_radius<T: Real>(r: T) -> T {
    if r <= T::zero() {
        return T::zero();
    }
    let half = T::lit(0.5);
    // r(ρ) is convex and r(ρ) ≥ ρ, so Newton started at ρ = r decreases monotonically.
    let mut rho = r.min((T::lit(2.0) * r).sqrt() + T::one());
    for _ in 0..100 {
        let w = (T::one() + rho * rho).sqrt();
        let f = half * (rho * w + rho.asinh()) - r;
        let step = f / w;
        rho = rho - step;
        if step.abs() <= T::epsilon() * T::lit(4.0) * rho.max(T::one()) {
            break;
        }
    }
    rho
}

pub fn build_sphere_profile() -> Profile<f64> {
    Profile::sphere()
}

pub fn build_plane_profile() -> Profile<f64> {
    Profile::plane()
}

pub fn build_hyperbolic_profile() -> Profile<f64> {
    Profile::hyperbolic()
}

pub fn build_gulliver_profile(r1: f64, epsilon: f64) -> Result<Profile<f64>, ProfileError> {
    Profile::gulliver(r1, epsilon)
}

pub fn build_cone_profile(delta: f64, r_cap: f64) -> Result<Profile<f64>, ProfileError> {
    Profile::cone(delta, r_cap)
}

pub fn build_paraboloid_profile() -> Profile<f64> {
    Profile::paraboloid()
}

/// Default Gulliver parameters. They satisfy every constraint of the construction,
/// including a spherical cap long enough to hold a focal arc of length π/2.
pub const GULLIVER_R1: f64 = 0.7975;
pub const GULLIVER_EPSILON: f64 = 0.0075;
/// Default cap radius of the smoothed cone.
pub const CONE_R_CAP: f64 = 1e-3;

/// Point in geodesic polar coordinates about the pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub r: T,
    pub theta: T,
}

impl<T: Real> Point<T> {
    pub fn new(r: T, theta: T) -> Self {
        Self { r, theta }
    }
}

/// Rotationally symmetric surface metric `dr² + φ(r)² dθ²`.
#[derive(Debug, Clone)]
pub struct SurfaceMetric<T> {
    pub profile: Profile<T>,
}

impl<T: Real> SurfaceMetric<T> {
    pub fn new(profile: Profile<T>) -> Self {
        Self { profile }
    }

    pub const fn dimension(&self) -> usize {
        2
    }

    /// Diagonal of the metric tensor in polar coordinates.
    pub fn metric_tensor(&self, r: T) -> [T; 2] {
        let phi = self.profile.phi(r);
        [T::one(), phi * phi]
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        p.r >= T::zero() && p.r <= self.profile.r_max() + T::lit(1e-9)
    }

    /// Whether the geodesic from `p` at launch angle `psi` enters the singular core.
    /// Off the core φ is increasing, so an inward geodesic with Clairaut constant `c`
    /// turns at `φ(r) = c`.
    pub fn enters_core(&self, p: Point<T>, psi: T) -> bool {
        let Some(core) = self.profile.singular_core() else {
            return false;
        };
        if p.r <= core {
            return false;
        }
        let two_pi = T::PI() + T::PI();
        let mut u = psi % two_pi;
        if u < T::zero() {
            u = u + two_pi;
        }
        if u > T::PI() {
            u = two_pi - u;
        }
        u > T::PI() / T::lit(2.0) && self.profile.phi(p.r) * u.sin() < self.profile.phi(core)
    }
}

pub fn gauss_curvature<T: Real>(metric: &SurfaceMetric<T>, r: T) -> Result<T, ProfileError> {
    metric.profile.gauss_curvature(r)
}
