//! Radius functions of rotationally symmetric surfaces `dr² + φ(r)² dθ²`: conjugate,
//! focal, injectivity and convexity radii, cut loci, and checks of the inequalities
//! relating them.
//!
//! The profile and ODE layers are generic over the scalar ([`scalar::Real`], `f32` or
//! `f64`); everything from [`radii`] up works in `f64`.

pub mod cutlocus;
pub mod odes;
pub mod profiles;
pub mod radii;
pub mod scalar;
pub mod theorems;

pub type Profile = profiles::Profile<f64>;
pub type Metric = profiles::SurfaceMetric<f64>;
pub type Point = profiles::Point<f64>;
pub type ProfileF32 = profiles::Profile<f32>;
pub type MetricF32 = profiles::SurfaceMetric<f32>;
pub type PointF32 = profiles::Point<f32>;

pub use profiles::{ProfileConfig, ProfileKind};
pub use radii::Radius;
