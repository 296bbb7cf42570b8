//! Trajectory evaluation and maneuver optimization toolkit.
//!
//! Collision risk is quantified geometrically with adaptive elliptical safety
//! zones (minimum remaining gap when zones are separated, Shoelace overlap
//! area when they intersect), passenger comfort with finite-difference jerk
//! against fixed thresholds, and efficiency with total travel time. The three
//! criteria aggregate into a penalized scalar objective that a seedable
//! particle swarm optimizer minimizes over bounded longitudinal acceleration
//! profiles.
//!
//! All numeric code is generic over the [`Real`] scalar (`f32` or `f64`);
//! `f64` is the intended default and the concrete aliases below cover the
//! common geometric primitives.

pub mod geometry;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod scalar;

pub use scalar::Real;

/// Double-precision point, the default for all tooling.
pub type Point2d = geometry::Point2<f64>;
/// Single-precision point.
pub type Point2f = geometry::Point2<f32>;
/// Double-precision displacement vector.
pub type Vec2d = geometry::Vec2<f64>;
/// Single-precision displacement vector.
pub type Vec2f = geometry::Vec2<f32>;
