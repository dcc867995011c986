//! Geodesic and Jacobi integration.

pub mod comparison;
pub mod geodesic;
pub mod integrator;
pub mod jacobi;

pub use comparison::{comparison_solution, comparison_value, ComparisonSample, ComparisonSolution};
pub use geodesic::{
    shoot_geodesic, shoot_with, Chart, FullState, GeodesicPath, GeodesicState, OdeError, PathExit,
    Segment, ShootOptions,
};
pub use integrator::Tolerance;
pub use jacobi::{events_on, jacobi_along, scan_events, JacobiEvents, JacobiSample, JacobiSolution, TOUCH_TOL};
