//! Adaptive elliptical safety zones and their spatial relations.
//!
//! A vehicle's safety zone is an oriented ellipse whose longitudinal semi-axis
//! grows linearly with speed through a time-to-collision threshold. Two zones
//! are either separated, in which case the minimum remaining gap between them
//! is the safety measure, or intersecting, in which case the overlap area
//! (computed with the Shoelace formula on sampled boundary points) quantifies
//! the severity of the violation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{wrap_angle, Real};

/// Boundary sample count used when a caller does not specify one.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 64;

/// Tolerance on the normalized-delta norm when testing containment of
/// boundary samples. A point produced by [`sample_boundary`] sits on the
/// boundary only up to floating-point rounding.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Distance below which two collected overlap vertices count as duplicates.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vehicle footprint requires length >= width > 0 (got length {length} m, width {width} m)")]
    InvalidFootprint { length: f64, width: f64 },
    #[error("ellipse semi-axes require major >= minor > 0 (got major {major} m, minor {minor} m)")]
    InvalidSemiAxes { major: f64, minor: f64 },
    #[error("invalid safety parameters: {reason}")]
    InvalidSafetyParams { reason: String },
    #[error("speed must be non-negative (got {speed} m/s)")]
    NegativeSpeed { speed: f64 },
    #[error("cannot radially project the ellipse center onto its own boundary")]
    DegenerateProjection,
    #[error("gap distance is defined only for separated ellipses")]
    NotSeparated,
    #[error("overlap area is defined only for intersecting ellipses")]
    NotIntersecting,
}

fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::cast(x).unwrap_or(f64::NAN)
}

/// Point in the global frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

/// Displacement between points, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self { x: T::zero(), y: T::zero() }
    }

    pub fn distance(&self, other: &Self) -> T {
        (*other - *self).norm()
    }
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }
}

impl<T: Real> std::ops::Sub for Point2<T> {
    type Output = Vec2<T>;
    fn sub(self, rhs: Self) -> Vec2<T> {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> std::ops::Add<Vec2<T>> for Point2<T> {
    type Output = Point2<T>;
    fn add(self, rhs: Vec2<T>) -> Point2<T> {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> std::ops::Mul<T> for Vec2<T> {
    type Output = Vec2<T>;
    fn mul(self, rhs: T) -> Vec2<T> {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Vehicle body dimensions.
///
/// Follows the passenger-vehicle convention `length >= width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleFootprint<T> {
    /// Vehicle length in meters.
    pub length_m: T,
    /// Vehicle width in meters.
    pub width_m: T,
}

impl<T: Real> VehicleFootprint<T> {
    pub fn new(length_m: T, width_m: T) -> Result<Self, GeometryError> {
        let fp = Self { length_m, width_m };
        fp.validate()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.width_m > T::zero() && self.length_m >= self.width_m) {
            return Err(GeometryError::InvalidFootprint {
                length: to_f64(self.length_m),
                width: to_f64(self.width_m),
            });
        }
        Ok(())
    }
}

/// Parameters governing how safety zones react to vehicle state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyParams<T> {
    /// Time-to-collision threshold in seconds; scales the longitudinal margin
    /// with speed.
    pub ttc_threshold_s: T,
    /// Lateral clearance added to the half-width, in meters.
    pub lateral_margin_m: T,
    /// Angular boundary sample count; must be even and at least 8 so that
    /// antipodal sample pairs exist.
    pub boundary_samples: usize,
}

impl<T: Real> SafetyParams<T> {
    pub fn new(
        ttc_threshold_s: T,
        lateral_margin_m: T,
        boundary_samples: usize,
    ) -> Result<Self, GeometryError> {
        let params = Self { ttc_threshold_s, lateral_margin_m, boundary_samples };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.ttc_threshold_s > T::zero()) {
            return Err(GeometryError::InvalidSafetyParams {
                reason: format!("ttc_threshold_s must be > 0 (got {})", self.ttc_threshold_s),
            });
        }
        if !(self.lateral_margin_m >= T::zero()) {
            return Err(GeometryError::InvalidSafetyParams {
                reason: format!("lateral_margin_m must be >= 0 (got {})", self.lateral_margin_m),
            });
        }
        if self.boundary_samples < 8 || self.boundary_samples % 2 != 0 {
            return Err(GeometryError::InvalidSafetyParams {
                reason: format!(
                    "boundary_samples must be even and >= 8 (got {})",
                    self.boundary_samples
                ),
            });
        }
        Ok(())
    }
}

/// Oriented ellipse representing a vehicle's safety zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyEllipse<T> {
    center: Point2<T>,
    semi_major_m: T,
    semi_minor_m: T,
    rotation_rad: T,
}

impl<T: Real> SafetyEllipse<T> {
    /// Creates an ellipse; the rotation is normalized into `(-pi, pi]`.
    pub fn new(
        center: Point2<T>,
        semi_major_m: T,
        semi_minor_m: T,
        rotation_rad: T,
    ) -> Result<Self, GeometryError> {
        if !(semi_minor_m > T::zero() && semi_major_m >= semi_minor_m) {
            return Err(GeometryError::InvalidSemiAxes {
                major: to_f64(semi_major_m),
                minor: to_f64(semi_minor_m),
            });
        }
        Ok(Self {
            center,
            semi_major_m,
            semi_minor_m,
            rotation_rad: wrap_angle(rotation_rad),
        })
    }

    pub fn center(&self) -> Point2<T> {
        self.center
    }

    pub fn semi_major_m(&self) -> T {
        self.semi_major_m
    }

    pub fn semi_minor_m(&self) -> T {
        self.semi_minor_m
    }

    pub fn rotation_rad(&self) -> T {
        self.rotation_rad
    }

    /// Exact ellipse area, `pi * r_x * r_y`.
    pub fn area(&self) -> T {
        T::PI() * self.semi_major_m * self.semi_minor_m
    }

    /// True when the point lies inside or on the ellipse.
    pub fn contains(&self, p: Point2<T>) -> bool {
        normalized_delta(self, p).norm() <= T::one()
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Point2<T>, Point2<T>) {
        let (sin, cos) = self.rotation_rad.sin_cos();
        let half_w = ((self.semi_major_m * cos).powi(2) + (self.semi_minor_m * sin).powi(2)).sqrt();
        let half_h = ((self.semi_major_m * sin).powi(2) + (self.semi_minor_m * cos).powi(2)).sqrt();
        (
            Point2::new(self.center.x - half_w, self.center.y - half_h),
            Point2::new(self.center.x + half_w, self.center.y + half_h),
        )
    }
}

/// Relation between two safety zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipseRelation {
    Separated,
    Intersecting,
}

/// Convex polygon approximating the overlap region of two ellipses.
///
/// Vertices are ordered counter-clockwise around the centroid. Fewer than
/// three vertices mark a degenerate overlap (grazing tangency at coarse
/// sampling) whose area is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapPolygon<T> {
    vertices: Vec<Point2<T>>,
    centroid: Point2<T>,
}

impl<T: Real> OverlapPolygon<T> {
    /// Builds a polygon from vertices already ordered counter-clockwise.
    /// The centroid is the arithmetic mean of the vertices.
    pub fn new(vertices: Vec<Point2<T>>) -> Self {
        let centroid = vertex_mean(&vertices);
        Self { vertices, centroid }
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn centroid(&self) -> Point2<T> {
        self.centroid
    }

    /// A polygon with fewer than three vertices has zero area.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }
}

fn vertex_mean<T: Real>(vertices: &[Point2<T>]) -> Point2<T> {
    if vertices.is_empty() {
        return Point2::origin();
    }
    let n = T::from_usize(vertices.len()).expect("vertex count fits scalar");
    let mut sx = T::zero();
    let mut sy = T::zero();
    for v in vertices {
        sx += v.x;
        sy += v.y;
    }
    Point2::new(sx / n, sy / n)
}

/// Builds the adaptive safety zone for a vehicle state.
///
/// The longitudinal semi-axis is `length/2 + ttc_threshold * speed`, the
/// lateral one `width/2 + lateral_margin`; the ellipse is centered on the
/// vehicle and aligned with its heading.
pub fn adaptive_ellipse<T: Real>(
    footprint: &VehicleFootprint<T>,
    position: Point2<T>,
    heading_rad: T,
    speed: T,
    params: &SafetyParams<T>,
) -> Result<SafetyEllipse<T>, GeometryError> {
    if speed < T::zero() {
        return Err(GeometryError::NegativeSpeed { speed: to_f64(speed) });
    }
    let half = T::lit(0.5);
    let r_x = half * footprint.length_m + params.ttc_threshold_s * speed;
    let r_y = half * footprint.width_m + params.lateral_margin_m;
    SafetyEllipse::new(position, r_x, r_y, heading_rad)
}

/// Samples the ellipse boundary at `n` uniformly spaced parameter angles
/// `2*pi*k/n`, starting on the major axis.
///
/// The interaction pipeline always passes the validated sample count from
/// [`SafetyParams`] (even, at least 8); the sampler itself accepts any `n`.
pub fn sample_boundary<T: Real>(e: &SafetyEllipse<T>, n: usize) -> Vec<Point2<T>> {
    let (sin_t, cos_t) = e.rotation_rad.sin_cos();
    let n_scalar = T::from_usize(n).expect("sample count fits scalar");
    (0..n)
        .map(|k| {
            let phi = T::TAU() * T::from_usize(k).expect("index fits scalar") / n_scalar;
            let (sin_p, cos_p) = phi.sin_cos();
            let local_x = e.semi_major_m * cos_p;
            let local_y = e.semi_minor_m * sin_p;
            Point2::new(
                e.center.x + cos_t * local_x - sin_t * local_y,
                e.center.y + sin_t * local_x + cos_t * local_y,
            )
        })
        .collect()
}

/// Displacement from the ellipse center to `p`, rotated into the ellipse
/// frame and scaled by the semi-axes. Its norm is below one exactly for
/// interior points and one on the boundary.
pub fn normalized_delta<T: Real>(e: &SafetyEllipse<T>, p: Point2<T>) -> Vec2<T> {
    let dx = p.x - e.center.x;
    let dy = p.y - e.center.y;
    let (sin_t, cos_t) = e.rotation_rad.sin_cos();
    Vec2::new(
        (cos_t * dx + sin_t * dy) / e.semi_major_m,
        (-sin_t * dx + cos_t * dy) / e.semi_minor_m,
    )
}

/// Classifies the pair as separated or intersecting from `n` boundary
/// samples per ellipse.
///
/// A pair intersects when any sampled boundary point of one ellipse lies
/// inside or on the other, or when either center is contained in the other
/// (full containment leaves no boundary sample inside the smaller zone).
pub fn classify<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> EllipseRelation {
    if ego.contains(opp.center) || opp.contains(ego.center) {
        return EllipseRelation::Intersecting;
    }
    let boundary_hit = sample_boundary(opp, n).into_iter().any(|p| ego.contains(p))
        || sample_boundary(ego, n).into_iter().any(|p| opp.contains(p));
    if boundary_hit {
        EllipseRelation::Intersecting
    } else {
        EllipseRelation::Separated
    }
}

/// Radial projection of `p` onto the boundary of `e`, along the ray from the
/// ellipse center through `p`. Idempotent for points already on the boundary.
pub fn radial_projection<T: Real>(
    e: &SafetyEllipse<T>,
    p: Point2<T>,
) -> Result<Point2<T>, GeometryError> {
    let delta = normalized_delta(e, p);
    let norm = delta.norm();
    if !(norm > T::zero()) {
        return Err(GeometryError::DegenerateProjection);
    }
    let unit_x = delta.x / norm;
    let unit_y = delta.y / norm;
    let local_x = e.semi_major_m * unit_x;
    let local_y = e.semi_minor_m * unit_y;
    let (sin_t, cos_t) = e.rotation_rad.sin_cos();
    Ok(Point2::new(
        e.center.x + cos_t * local_x - sin_t * local_y,
        e.center.y + sin_t * local_x + cos_t * local_y,
    ))
}

/// Exhaustive gap estimate: minimum distance over all `n x n` pairs of
/// (opponent sample projected onto `ego`, ego sample projected onto `opp`).
///
/// Quadratic in `n`; serves as the reference for [`min_gap`].
pub fn brute_force_distance<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> Result<T, GeometryError> {
    if classify(ego, opp, n) != EllipseRelation::Separated {
        return Err(GeometryError::NotSeparated);
    }
    let on_ego = project_all(ego, &sample_boundary(opp, n))?;
    let on_opp = project_all(opp, &sample_boundary(ego, n))?;
    let mut best = T::infinity();
    for a in &on_ego {
        for b in &on_opp {
            let d = a.distance(b);
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Minimum remaining gap between two separated zones, linear in `n`.
///
/// Works on the same projection sets as [`brute_force_distance`]: opponent
/// samples projected onto `ego` give candidates for the associated point on
/// `ego`, ego samples projected onto `opp` give candidates on `opp`. Instead
/// of scanning all pairs, the two associated points are selected jointly by
/// alternating nearest-candidate refinement, seeded on each side from the
/// boundary sample with the smallest projection residual. The gap is the
/// distance between the selected points.
pub fn min_gap<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> Result<T, GeometryError> {
    if classify(ego, opp, n) != EllipseRelation::Separated {
        return Err(GeometryError::NotSeparated);
    }
    let opp_samples = sample_boundary(opp, n);
    let ego_samples = sample_boundary(ego, n);
    let on_ego = project_all(ego, &opp_samples)?;
    let on_opp = project_all(opp, &ego_samples)?;

    let seed_on_ego = residual_argmin(&on_ego, &opp_samples);
    let seed_on_opp = residual_argmin(&on_opp, &ego_samples);

    let from_ego = refine_pair(&on_ego, &on_opp, seed_on_ego, Side::Ego);
    let from_opp = refine_pair(&on_ego, &on_opp, seed_on_opp, Side::Opp);
    Ok(from_ego.min(from_opp))
}

enum Side {
    Ego,
    Opp,
}

/// Alternating nearest-candidate refinement on the projection sets; each
/// half-step fixes one point and picks the closest candidate on the other
/// boundary, so the pair distance never increases.
fn refine_pair<T: Real>(on_ego: &[Point2<T>], on_opp: &[Point2<T>], seed: usize, side: Side) -> T {
    const MAX_ROUNDS: usize = 8;
    let (mut i, mut j) = match side {
        Side::Ego => (seed, nearest_index(on_opp, &on_ego[seed])),
        Side::Opp => (nearest_index(on_ego, &on_opp[seed]), seed),
    };
    for _ in 0..MAX_ROUNDS {
        let next_i = nearest_index(on_ego, &on_opp[j]);
        let next_j = nearest_index(on_opp, &on_ego[next_i]);
        if next_i == i && next_j == j {
            break;
        }
        i = next_i;
        j = next_j;
    }
    on_ego[i].distance(&on_opp[j])
}

/// Index of the sample whose radial projection moved it the least.
fn residual_argmin<T: Real>(projected: &[Point2<T>], samples: &[Point2<T>]) -> usize {
    let mut best = 0;
    let mut best_residual = T::infinity();
    for (k, (p, s)) in projected.iter().zip(samples).enumerate() {
        let residual = p.distance(s);
        if residual < best_residual {
            best_residual = residual;
            best = k;
        }
    }
    best
}

/// Index of the candidate closest to `target`.
fn nearest_index<T: Real>(candidates: &[Point2<T>], target: &Point2<T>) -> usize {
    let mut best = 0;
    let mut best_distance = T::infinity();
    for (k, c) in candidates.iter().enumerate() {
        let d = c.distance(target);
        if d < best_distance {
            best_distance = d;
            best = k;
        }
    }
    best
}

fn project_all<T: Real>(
    target: &SafetyEllipse<T>,
    samples: &[Point2<T>],
) -> Result<Vec<Point2<T>>, GeometryError> {
    samples.iter().map(|&p| radial_projection(target, p)).collect()
}

/// Collects the overlap polygon of two intersecting zones.
///
/// Boundary samples of each ellipse contained in the other (normalized-delta
/// norm within [`CONTAINMENT_TOL`] of one) become vertices; duplicates within
/// [`DEDUP_TOL`] collapse, and the survivors are sorted counter-clockwise by
/// angle around their centroid, ties broken by distance from the centroid.
pub fn overlap_polygon<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> Result<OverlapPolygon<T>, GeometryError> {
    if classify(ego, opp, n) != EllipseRelation::Intersecting {
        return Err(GeometryError::NotIntersecting);
    }
    let limit = T::one() + T::lit(CONTAINMENT_TOL);
    let mut collected: Vec<Point2<T>> = Vec::with_capacity(2 * n);
    collected.extend(
        sample_boundary(opp, n)
            .into_iter()
            .filter(|p| normalized_delta(ego, *p).norm() <= limit),
    );
    collected.extend(
        sample_boundary(ego, n)
            .into_iter()
            .filter(|p| normalized_delta(opp, *p).norm() <= limit),
    );

    let mut vertices: Vec<Point2<T>> = Vec::with_capacity(collected.len());
    let dedup_tol = T::lit(DEDUP_TOL);
    for p in collected {
        if !vertices.iter().any(|q| q.distance(&p) <= dedup_tol) {
            vertices.push(p);
        }
    }

    let centroid = vertex_mean(&vertices);
    vertices.sort_by(|a, b| {
        let va = *a - centroid;
        let vb = *b - centroid;
        let angle_a = va.y.atan2(va.x);
        let angle_b = vb.y.atan2(vb.x);
        angle_a
            .partial_cmp(&angle_b)
            .expect("finite angles")
            .then_with(|| va.norm().partial_cmp(&vb.norm()).expect("finite radii"))
    });
    Ok(OverlapPolygon { vertices, centroid })
}

/// Shoelace (Gauss) area of a counter-clockwise polygon, treating the vertex
/// list as cyclically closed. Fewer than three vertices yield zero.
pub fn shoelace_area<T: Real>(poly: &OverlapPolygon<T>) -> T {
    let vs = poly.vertices();
    if vs.len() < 3 {
        return T::zero();
    }
    let mut twice_area = T::zero();
    for (i, v) in vs.iter().enumerate() {
        let w = vs[(i + 1) % vs.len()];
        twice_area += v.x * w.y - v.y * w.x;
    }
    (twice_area / T::lit(2.0)).abs()
}

/// Overlap area of two intersecting zones: the Shoelace area of their
/// sampled overlap polygon. Approaches the exact intersection area from
/// below as `n` grows.
pub fn overlap_area<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> Result<T, GeometryError> {
    Ok(shoelace_area(&overlap_polygon(ego, opp, n)?))
}
