//! Trajectory-level evaluation metrics.
//!
//! The signed interaction metric couples the geometry module to time: at each
//! timestep it is the overlap area of the two safety zones when they
//! intersect and the negated minimum gap when they are separated. Its
//! worst-case value over a trajectory pair feeds the shaping function to form
//! the safety criterion. Comfort is the margin of finite-difference jerk
//! against fixed thresholds, and efficiency is the time to reach the goal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    adaptive_ellipse, classify, min_gap, overlap_polygon, shoelace_area, EllipseRelation,
    GeometryError, Point2, SafetyEllipse, SafetyParams, VehicleFootprint,
};
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("trajectory needs at least 3 samples (got {len})")]
    TooShort { len: usize },
    #[error("trajectory timestep must be positive")]
    NonPositiveTimestep,
    #[error("trajectory timestep is not uniform at sample {index}")]
    NonUniformTimestep { index: usize },
    #[error("negative speed at sample {index}")]
    NegativeSpeed { index: usize },
    #[error("jerk index {index} is not interior to a trajectory of {len} samples")]
    JerkIndexOutOfRange { index: usize, len: usize },
    #[error("trajectories have mismatched timesteps ({ego} s vs {opp} s)")]
    MismatchedTimestep { ego: f64, opp: f64 },
    #[error("trajectories share no common time range")]
    EmptyTimeOverlap,
    #[error("trajectory sample times are offset by a fraction of the timestep")]
    MisalignedSamples,
    #[error("interaction series is empty")]
    EmptyInteractionSeries,
    #[error("invalid shaping parameters: {reason}")]
    InvalidShapingParams { reason: String },
    #[error("invalid comfort thresholds: {reason}")]
    InvalidComfortThresholds { reason: String },
    #[error("goal radius must be positive")]
    InvalidGoalRadius,
    #[error("trajectory never enters the goal radius")]
    GoalNotReached,
    #[error("trajectory starts inside the goal radius; travel time must be positive")]
    GoalAtStart,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One kinematic sample of a vehicle trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample<T> {
    /// Sample time in seconds.
    pub t: T,
    /// Position in the global frame, meters.
    pub position: Point2<T>,
    /// Scalar speed, m/s.
    pub speed: T,
    /// Orientation of the velocity vector, radians.
    pub heading: T,
}

/// Uniformly sampled trajectory of one vehicle.
///
/// Construction validates the invariants the metric operators rely on: at
/// least three samples (central differences need both neighbors), strictly
/// increasing times with a uniform timestep, and non-negative speeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    samples: Vec<TrajectorySample<T>>,
    dt: T,
}

impl<T: Real> Trajectory<T> {
    pub fn new(samples: Vec<TrajectorySample<T>>) -> Result<Self, MetricsError> {
        if samples.len() < 3 {
            return Err(MetricsError::TooShort { len: samples.len() });
        }
        let dt = samples[1].t - samples[0].t;
        if !(dt > T::zero()) {
            return Err(MetricsError::NonPositiveTimestep);
        }
        let tol = time_tolerance(samples[samples.len() - 1].t);
        for (index, pair) in samples.windows(2).enumerate() {
            if ((pair[1].t - pair[0].t) - dt).abs() > tol {
                return Err(MetricsError::NonUniformTimestep { index: index + 1 });
            }
        }
        if let Some(index) = samples.iter().position(|s| s.speed < T::zero()) {
            return Err(MetricsError::NegativeSpeed { index });
        }
        Ok(Self { samples, dt })
    }

    pub fn samples(&self) -> &[TrajectorySample<T>] {
        &self.samples
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// A valid trajectory always holds at least three samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start_time(&self) -> T {
        self.samples[0].t
    }

    pub fn end_time(&self) -> T {
        self.samples[self.samples.len() - 1].t
    }

    pub fn duration(&self) -> T {
        self.end_time() - self.start_time()
    }
}

/// Comparison tolerance for sample times; absolute at small magnitudes,
/// relative once rounding of large times dominates.
fn time_tolerance<T: Real>(scale: T) -> T {
    let floor = T::lit(1e-9);
    let relative = T::epsilon() * T::lit(8.0) * scale.abs().max(T::one());
    floor.max(relative)
}

/// Parameters of the safety shaping function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapingParams<T> {
    /// Value at zero, `M > 0`.
    pub m_cap: T,
    /// Derivative at zero, `p > 1`.
    pub slope: T,
    /// Decay-rate exponent for negative arguments, `alpha > 0`.
    pub alpha: T,
}

impl<T: Real> ShapingParams<T> {
    pub fn new(m_cap: T, slope: T, alpha: T) -> Result<Self, MetricsError> {
        let params = Self { m_cap, slope, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if !(self.m_cap > T::zero() && self.slope > T::one() && self.alpha > T::zero()) {
            return Err(MetricsError::InvalidShapingParams {
                reason: format!(
                    "require m_cap > 0, slope > 1, alpha > 0 (got {}, {}, {})",
                    self.m_cap, self.slope, self.alpha
                ),
            });
        }
        Ok(())
    }
}

impl<T: Real> Default for ShapingParams<T> {
    fn default() -> Self {
        Self { m_cap: T::one(), slope: T::lit(5.0), alpha: T::lit(0.5) }
    }
}

/// Jerk magnitudes above which a ride stops being comfortable, m/s^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortThresholds<T> {
    pub tau_longi: T,
    pub tau_lat: T,
}

impl<T: Real> ComfortThresholds<T> {
    pub fn new(tau_longi: T, tau_lat: T) -> Result<Self, MetricsError> {
        let thresholds = Self { tau_longi, tau_lat };
        thresholds.validate()?;
        Ok(thresholds)
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if !(self.tau_longi > T::zero() && self.tau_lat > T::zero()) {
            return Err(MetricsError::InvalidComfortThresholds {
                reason: format!(
                    "require positive thresholds (got {}, {})",
                    self.tau_longi, self.tau_lat
                ),
            });
        }
        Ok(())
    }
}

impl<T: Real> Default for ComfortThresholds<T> {
    fn default() -> Self {
        Self { tau_longi: T::lit(0.9), tau_lat: T::lit(0.9) }
    }
}

/// Signed interaction value at one timestep: overlap area (m^2) when the
/// zones intersect, negated gap (m) when they are separated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSample<T> {
    pub t: T,
    pub value: T,
}

/// Per-timestep interaction values for an ego/opponent pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSeries<T> {
    points: Vec<InteractionSample<T>>,
    worst_index: Option<usize>,
    degenerate_overlaps: usize,
}

impl<T: Real> InteractionSeries<T> {
    pub fn new(points: Vec<InteractionSample<T>>) -> Self {
        Self::with_degenerate_count(points, 0)
    }

    fn with_degenerate_count(points: Vec<InteractionSample<T>>, degenerate_overlaps: usize) -> Self {
        let worst_index = argmax(points.iter().map(|p| p.value));
        Self { points, worst_index, degenerate_overlaps }
    }

    pub fn points(&self) -> &[InteractionSample<T>] {
        &self.points
    }

    /// Index of the worst-case (maximum) interaction, `None` when empty.
    pub fn worst_index(&self) -> Option<usize> {
        self.worst_index
    }

    pub fn worst(&self) -> Option<InteractionSample<T>> {
        self.worst_index.map(|i| self.points[i])
    }

    /// Timesteps whose overlap polygon degenerated to fewer than three
    /// vertices (grazing tangency at the configured sampling).
    pub fn degenerate_overlaps(&self) -> usize {
        self.degenerate_overlaps
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn argmax<T: Real>(values: impl Iterator<Item = T>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Signed interaction metric between two safety zones. The sign alone
/// classifies the configuration: positive values are overlap areas, strictly
/// negative values are separation gaps.
pub fn intersection_metric<T: Real>(ego: &SafetyEllipse<T>, opp: &SafetyEllipse<T>, n: usize) -> T {
    intersection_metric_flagged(ego, opp, n).0
}

/// As [`intersection_metric`], also reporting whether an intersecting pair
/// produced a degenerate (area-zero) overlap polygon.
pub(crate) fn intersection_metric_flagged<T: Real>(
    ego: &SafetyEllipse<T>,
    opp: &SafetyEllipse<T>,
    n: usize,
) -> (T, bool) {
    match classify(ego, opp, n) {
        EllipseRelation::Intersecting => {
            let poly = overlap_polygon(ego, opp, n).expect("classification already checked");
            (shoelace_area(&poly), poly.is_degenerate())
        }
        EllipseRelation::Separated => {
            let gap = min_gap(ego, opp, n).expect("classification already checked");
            (-gap, false)
        }
    }
}

/// Evaluates the interaction metric at every timestep the two trajectories
/// share, building the safety zones from each vehicle's own samples.
pub fn interaction_series<T: Real>(
    ego_traj: &Trajectory<T>,
    opp_traj: &Trajectory<T>,
    ego_footprint: &VehicleFootprint<T>,
    opp_footprint: &VehicleFootprint<T>,
    params: &SafetyParams<T>,
) -> Result<InteractionSeries<T>, MetricsError> {
    params.validate()?;
    let dt = ego_traj.dt();
    let tol = time_tolerance(ego_traj.end_time().abs().max(opp_traj.end_time().abs()));
    if (dt - opp_traj.dt()).abs() > tol {
        return Err(MetricsError::MismatchedTimestep {
            ego: num_traits::cast(dt).unwrap_or(f64::NAN),
            opp: num_traits::cast(opp_traj.dt()).unwrap_or(f64::NAN),
        });
    }
    let start = ego_traj.start_time().max(opp_traj.start_time());
    let end = ego_traj.end_time().min(opp_traj.end_time());
    if start > end + tol {
        return Err(MetricsError::EmptyTimeOverlap);
    }
    let ego_offset = index_at(ego_traj, start);
    let opp_offset = index_at(opp_traj, start);
    if (ego_traj.samples()[ego_offset].t - opp_traj.samples()[opp_offset].t).abs() > tol {
        return Err(MetricsError::MisalignedSamples);
    }
    let count = (ego_traj.len() - ego_offset).min(opp_traj.len() - opp_offset);

    let n = params.boundary_samples;
    let mut points = Vec::with_capacity(count);
    let mut degenerate = 0usize;
    for k in 0..count {
        let ego_sample = &ego_traj.samples()[ego_offset + k];
        let opp_sample = &opp_traj.samples()[opp_offset + k];
        let ego_zone = adaptive_ellipse(
            ego_footprint,
            ego_sample.position,
            ego_sample.heading,
            ego_sample.speed,
            params,
        )?;
        let opp_zone = adaptive_ellipse(
            opp_footprint,
            opp_sample.position,
            opp_sample.heading,
            opp_sample.speed,
            params,
        )?;
        let (value, was_degenerate) = intersection_metric_flagged(&ego_zone, &opp_zone, n);
        if was_degenerate {
            degenerate += 1;
        }
        points.push(InteractionSample { t: ego_sample.t, value });
    }
    Ok(InteractionSeries::with_degenerate_count(points, degenerate))
}

fn index_at<T: Real>(traj: &Trajectory<T>, time: T) -> usize {
    let raw = ((time - traj.start_time()) / traj.dt()).round();
    let idx = num_traits::cast::<T, i64>(raw).unwrap_or(0).max(0) as usize;
    idx.min(traj.len() - 1)
}

/// Shaping function mapping the worst-case interaction value to a positive
/// safety cost: exponential growth for overlap, `alpha`-controlled algebraic
/// decay for separation. Continuous and once-differentiable at zero with
/// value `m_cap` and slope `slope`.
pub fn shaping_beta<T: Real>(x: T, sp: &ShapingParams<T>) -> T {
    let m = sp.m_cap;
    let p = sp.slope;
    if x <= T::zero() {
        m * (T::one() - p * x / (m * sp.alpha)).powf(-sp.alpha)
    } else {
        m * ((p / m) * x).exp()
    }
}

/// Safety criterion: the shaping function applied to the worst-case
/// interaction over the series.
pub fn safety_criterion<T: Real>(
    series: &InteractionSeries<T>,
    sp: &ShapingParams<T>,
) -> Result<T, MetricsError> {
    let worst = series.worst().ok_or(MetricsError::EmptyInteractionSeries)?;
    Ok(shaping_beta(worst.value, sp))
}

/// Wrapped heading differences around an interior sample: forward and
/// backward steps folded into `(-pi, pi]` so the +-pi seam cannot inject
/// spurious jerk. Assumes the per-step heading change stays below a half
/// turn.
fn heading_steps<T: Real>(traj: &Trajectory<T>, i: usize) -> (T, T) {
    let s = traj.samples();
    let forward = wrap_angle(s[i + 1].heading - s[i].heading);
    let backward = wrap_angle(s[i - 1].heading - s[i].heading);
    (forward, backward)
}

fn check_interior<T: Real>(traj: &Trajectory<T>, i: usize) -> Result<(), MetricsError> {
    if i == 0 || i + 1 >= traj.len() {
        return Err(MetricsError::JerkIndexOutOfRange { index: i, len: traj.len() });
    }
    Ok(())
}

/// Longitudinal jerk at interior sample `i` by second-order central
/// differences: the second difference of speed minus the centripetal term
/// `v * heading_rate^2`.
pub fn longitudinal_jerk<T: Real>(traj: &Trajectory<T>, i: usize) -> Result<T, MetricsError> {
    check_interior(traj, i)?;
    let s = traj.samples();
    let dt = traj.dt();
    let (forward, backward) = heading_steps(traj, i);
    let speed_accel = (s[i + 1].speed - T::lit(2.0) * s[i].speed + s[i - 1].speed) / (dt * dt);
    let heading_rate = (forward - backward) / (T::lit(2.0) * dt);
    Ok(speed_accel - s[i].speed * heading_rate * heading_rate)
}

/// Lateral jerk at interior sample `i`: `2 * dv/dt * heading_rate +
/// v * heading_accel`, by the same central scheme.
pub fn lateral_jerk<T: Real>(traj: &Trajectory<T>, i: usize) -> Result<T, MetricsError> {
    check_interior(traj, i)?;
    let s = traj.samples();
    let dt = traj.dt();
    let (forward, backward) = heading_steps(traj, i);
    let two_speed_rate = (s[i + 1].speed - s[i - 1].speed) / dt;
    let heading_rate = (forward - backward) / (T::lit(2.0) * dt);
    let heading_accel = (forward + backward) / (dt * dt);
    Ok(two_speed_rate * heading_rate + s[i].speed * heading_accel)
}

/// Comfort constraint values: the worst interior jerk magnitude minus the
/// threshold, per axis. Negative values mean the constraint holds with
/// margin. Endpoint samples have no central difference and are excluded.
pub fn comfort_constraints<T: Real>(traj: &Trajectory<T>, th: &ComfortThresholds<T>) -> (T, T) {
    let mut max_longi = T::zero();
    let mut max_lat = T::zero();
    for i in 1..traj.len() - 1 {
        let longi = longitudinal_jerk(traj, i).expect("interior index").abs();
        let lat = lateral_jerk(traj, i).expect("interior index").abs();
        max_longi = max_longi.max(longi);
        max_lat = max_lat.max(lat);
    }
    (max_longi - th.tau_longi, max_lat - th.tau_lat)
}

/// Travel time from the first sample to the first entry into the goal
/// radius. Entering at the very first sample is rejected because a maneuver
/// must have positive duration.
pub fn travel_time<T: Real>(
    traj: &Trajectory<T>,
    goal: Point2<T>,
    goal_radius_m: T,
) -> Result<T, MetricsError> {
    if !(goal_radius_m > T::zero()) {
        return Err(MetricsError::InvalidGoalRadius);
    }
    for (i, sample) in traj.samples().iter().enumerate() {
        if sample.position.distance(&goal) <= goal_radius_m {
            if i == 0 {
                return Err(MetricsError::GoalAtStart);
            }
            return Ok(sample.t - traj.start_time());
        }
    }
    Err(MetricsError::GoalNotReached)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(
        dt: f64,
        len: usize,
        speed: impl Fn(f64) -> f64,
        heading: impl Fn(f64) -> f64,
    ) -> Trajectory<f64> {
        let samples = (0..len)
            .map(|i| {
                let t = i as f64 * dt;
                TrajectorySample {
                    t,
                    position: Point2::new(0.0, 0.0),
                    speed: speed(t),
                    heading: heading(t),
                }
            })
            .collect();
        Trajectory::new(samples).unwrap()
    }

    fn unit_circle(cx: f64, cy: f64) -> SafetyEllipse<f64> {
        SafetyEllipse::new(Point2::new(cx, cy), 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn trajectory_rejects_short_and_nonuniform_input() {
        let short = vec![
            TrajectorySample { t: 0.0, position: Point2::new(0.0, 0.0), speed: 1.0, heading: 0.0 },
            TrajectorySample { t: 1.0, position: Point2::new(1.0, 0.0), speed: 1.0, heading: 0.0 },
        ];
        assert!(matches!(Trajectory::new(short), Err(MetricsError::TooShort { len: 2 })));

        let jagged = vec![
            TrajectorySample { t: 0.0, position: Point2::new(0.0, 0.0), speed: 1.0, heading: 0.0 },
            TrajectorySample { t: 1.0, position: Point2::new(1.0, 0.0), speed: 1.0, heading: 0.0 },
            TrajectorySample { t: 2.5, position: Point2::new(2.0, 0.0), speed: 1.0, heading: 0.0 },
        ];
        assert!(matches!(
            Trajectory::new(jagged),
            Err(MetricsError::NonUniformTimestep { index: 2 })
        ));
    }

    #[test]
    fn intersection_metric_sign_structure() {
        let a = unit_circle(0.0, 0.0);
        let far = unit_circle(4.0, 0.0);
        let gap = intersection_metric(&a, &far, 64);
        assert!((gap + 2.0).abs() < 0.04, "gap {gap}");

        let overlap = intersection_metric(&a, &a, 64);
        let inscribed = 32.0 * (std::f64::consts::PI / 32.0).sin();
        assert!((overlap - inscribed).abs() < 1e-4, "overlap {overlap}");

        let tangent = intersection_metric(&a, &unit_circle(2.0, 0.0), 64);
        assert!(tangent.abs() <= 0.05, "tangent {tangent}");
    }

    #[test]
    fn intersection_metric_is_nearly_symmetric() {
        let a: SafetyEllipse<f64> =
            SafetyEllipse::new(Point2::new(0.0, 0.0), 4.0, 1.5, 0.5).unwrap();
        let b = SafetyEllipse::new(Point2::new(9.0, 2.0), 3.0, 1.0, -0.4).unwrap();
        let ab = intersection_metric(&a, &b, 64);
        let ba = intersection_metric(&b, &a, 64);
        assert!((ab - ba).abs() <= 0.02 * ab.abs(), "ab {ab} ba {ba}");
    }

    #[test]
    fn interaction_series_static_vehicles_constant_gap() {
        let make = |x: f64| {
            let samples = (0..10)
                .map(|i| TrajectorySample {
                    t: i as f64,
                    position: Point2::new(x, 0.0),
                    speed: 0.0,
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let ego = make(0.0);
        let opp = make(100.0);
        let fp = VehicleFootprint::new(4.0, 2.0).unwrap();
        let params = SafetyParams::new(2.0, 0.5, 64).unwrap();
        let series = interaction_series(&ego, &opp, &fp, &fp, &params).unwrap();
        assert_eq!(series.len(), 10);
        // Stationary zones shrink to 2 m half-length, facing along x.
        for p in series.points() {
            assert!((p.value + 96.0).abs() < 1e-6, "value {}", p.value);
        }
        let first = series.points()[0].value;
        assert!(series.points().iter().all(|p| p.value == first));
    }

    #[test]
    fn interaction_series_crossing_has_positive_peak() {
        let ego = {
            let samples = (0..61)
                .map(|i| {
                    let t = i as f64 * 0.5;
                    TrajectorySample {
                        t,
                        position: Point2::new(-30.0 + 10.0 * t, 0.0),
                        speed: 10.0,
                        heading: 0.0,
                    }
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let opp = {
            let samples = (0..61)
                .map(|i| {
                    let t = i as f64 * 0.5;
                    TrajectorySample {
                        t,
                        position: Point2::new(0.0, -30.0 + 10.0 * t),
                        speed: 10.0,
                        heading: std::f64::consts::FRAC_PI_2,
                    }
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let fp = VehicleFootprint::new(4.0, 2.0).unwrap();
        let params = SafetyParams::new(1.0, 0.5, 64).unwrap();
        let series = interaction_series(&ego, &opp, &fp, &fp, &params).unwrap();
        let worst = series.worst().unwrap();
        assert!(worst.value > 0.0, "worst {}", worst.value);

        // Ego parked far short of the conflict zone: strictly negative.
        let parked = {
            let samples = (0..61)
                .map(|i| TrajectorySample {
                    t: i as f64 * 0.5,
                    position: Point2::new(-25.0, 0.0),
                    speed: 0.0,
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let series = interaction_series(&parked, &opp, &fp, &fp, &params).unwrap();
        assert!(series.points().iter().all(|p| p.value < 0.0));
    }

    #[test]
    fn interaction_series_rejects_mismatched_grids() {
        let a = traj(0.5, 10, |_| 1.0, |_| 0.0);
        let b = traj(0.25, 10, |_| 1.0, |_| 0.0);
        let fp = VehicleFootprint::new(4.0, 2.0).unwrap();
        let params = SafetyParams::new(1.0, 0.5, 64).unwrap();
        assert!(matches!(
            interaction_series(&a, &b, &fp, &fp, &params),
            Err(MetricsError::MismatchedTimestep { .. })
        ));

        let late = {
            let samples = (0..5)
                .map(|i| TrajectorySample {
                    t: 100.0 + i as f64 * 0.5,
                    position: Point2::new(0.0, 0.0),
                    speed: 1.0,
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        assert!(matches!(
            interaction_series(&a, &late, &fp, &fp, &params),
            Err(MetricsError::EmptyTimeOverlap)
        ));
    }

    #[test]
    fn shaping_beta_value_and_slope_at_zero() {
        for alpha in [0.2f64, 0.3, 0.5, 0.9, 8.0] {
            let sp = ShapingParams::new(1.0, 5.0, alpha).unwrap();
            assert_eq!(shaping_beta(0.0, &sp), 1.0);
            let h = 1e-6;
            let slope = (shaping_beta(h, &sp) - shaping_beta(-h, &sp)) / (2.0 * h);
            assert!((slope - 5.0).abs() < 1e-4, "alpha {alpha} slope {slope}");
        }
    }

    #[test]
    fn shaping_beta_decays_for_negative_arguments() {
        let sp = ShapingParams::new(1.0, 5.0, 8.0).unwrap();
        assert!(shaping_beta(-10.0, &sp) < shaping_beta(-1.0, &sp));
        assert!(shaping_beta(-1.0, &sp) < shaping_beta(0.0, &sp));
        assert!(shaping_beta(-100.0, &sp) < 1e-3);
    }

    #[test]
    fn shaping_beta_positive_everywhere_and_monotone() {
        let sp = ShapingParams::<f64>::default();
        let mut previous = 0.0;
        for k in -400..=100 {
            let x = k as f64 * 0.1;
            let value = shaping_beta(x, &sp);
            assert!(value > 0.0);
            assert!(value > previous, "x {x}");
            previous = value;
        }
    }

    #[test]
    fn safety_criterion_follows_worst_case() {
        let sp = ShapingParams::new(1.0, 5.0, 0.5).unwrap();
        let deep = InteractionSeries::new(vec![
            InteractionSample { t: 0.0, value: -50.0 },
            InteractionSample { t: 1.0, value: -80.0 },
        ]);
        let c = safety_criterion(&deep, &sp).unwrap();
        // Direct evaluation of the decay branch at the worst value -50.
        let expected = (1.0 + 5.0 * 50.0 / 0.5f64).powf(-0.5);
        assert!((c - expected).abs() < 1e-12, "c {c}");
        assert!(c < 0.05);

        let zero = InteractionSeries::new(vec![InteractionSample { t: 0.0, value: 0.0 }]);
        assert_eq!(safety_criterion(&zero, &sp).unwrap(), 1.0);

        let worse = InteractionSeries::new(vec![InteractionSample { t: 0.0, value: 1.0 }]);
        let better = InteractionSeries::new(vec![InteractionSample { t: 0.0, value: -1.0 }]);
        assert!(safety_criterion(&worse, &sp).unwrap() > safety_criterion(&better, &sp).unwrap());

        let empty = InteractionSeries::new(vec![]);
        assert!(matches!(safety_criterion(&empty, &sp), Err(MetricsError::EmptyInteractionSeries)));
    }

    #[test]
    fn jerk_vanishes_on_steady_profiles() {
        let steady = traj(0.1, 50, |_| 7.0, |_| 0.3);
        for i in 1..steady.len() - 1 {
            assert!(longitudinal_jerk(&steady, i).unwrap().abs() <= 1e-12);
            assert!(lateral_jerk(&steady, i).unwrap().abs() <= 1e-12);
        }

        // Linear speed ramp on a straight line: second difference is exactly zero.
        let ramp = traj(0.1, 50, |t| 2.0 * t, |_| 0.0);
        for i in 1..ramp.len() - 1 {
            assert!(longitudinal_jerk(&ramp, i).unwrap().abs() <= 1e-12);
        }

        // Steady circular motion: constant speed, linear heading.
        let circular = traj(0.05, 60, |_| 4.0, |t| 0.8 * t);
        for i in 1..circular.len() - 1 {
            assert!(lateral_jerk(&circular, i).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn longitudinal_jerk_matches_cubic_speed_profile() {
        let dt = 0.01;
        let cubic = traj(dt, 201, |t| t * t * t, |_| 0.0);
        let i = 100; // t = 1.0
        let j = longitudinal_jerk(&cubic, i).unwrap();
        assert!((j - 6.0).abs() < 1e-3, "jerk {j}");
    }

    #[test]
    fn lateral_jerk_matches_quadratic_heading_profile() {
        let dt = 0.01;
        let quad = traj(dt, 201, |_| 1.0, |t| t * t);
        let i = 100; // t = 1.0
        let j = lateral_jerk(&quad, i).unwrap();
        assert!((j - 2.0).abs() < 1e-3, "jerk {j}");
    }

    #[test]
    fn jerk_converges_at_second_order_on_smooth_profiles() {
        let speed = |t: f64| 3.0 + (1.3 * t).sin();
        let heading = |t: f64| 0.5 * (0.9 * t).cos();
        let exact_longi = |t: f64| {
            let v = 3.0 + (1.3 * t).sin();
            let vdd = -(1.3f64).powi(2) * (1.3 * t).sin();
            let hr = -0.5 * 0.9 * (0.9 * t).sin();
            vdd - v * hr * hr
        };
        let errors: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| {
                let len = (2.0 / dt) as usize + 1;
                let tr = traj(dt, len, speed, heading);
                let i = (1.0 / dt).round() as usize;
                (longitudinal_jerk(&tr, i).unwrap() - exact_longi(i as f64 * dt)).abs()
            })
            .collect();
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} errors {errors:?}");
        }
    }

    #[test]
    fn jerk_boundary_index_is_rejected() {
        let tr = traj(0.1, 10, |_| 1.0, |_| 0.0);
        assert!(matches!(
            longitudinal_jerk(&tr, 0),
            Err(MetricsError::JerkIndexOutOfRange { .. })
        ));
        assert!(matches!(lateral_jerk(&tr, 9), Err(MetricsError::JerkIndexOutOfRange { .. })));
    }

    #[test]
    fn heading_wrap_does_not_inject_jerk() {
        // Heading ramp passing through the +-pi seam.
        let base = traj(0.1, 80, |_| 5.0, |t| -3.0 + 0.9 * t);
        let wrapped = {
            let samples = base
                .samples()
                .iter()
                .map(|s| TrajectorySample { heading: wrap_angle(s.heading), ..*s })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        for i in 1..base.len() - 1 {
            let a = lateral_jerk(&base, i).unwrap();
            let b = lateral_jerk(&wrapped, i).unwrap();
            assert!((a - b).abs() < 1e-9, "i {i}: {a} vs {b}");
            let a = longitudinal_jerk(&base, i).unwrap();
            let b = longitudinal_jerk(&wrapped, i).unwrap();
            assert!((a - b).abs() < 1e-9, "i {i}: {a} vs {b}");
        }
    }

    #[test]
    fn comfort_constraints_on_steady_and_spiky_profiles() {
        let steady = traj(0.1, 30, |_| 8.0, |_| 0.0);
        let th = ComfortThresholds::default();
        let (longi, lat) = comfort_constraints(&steady, &th);
        assert_eq!((longi, lat), (-0.9, -0.9));

        // One-sample speed bump of 0.75 m/s at dt = 1 s peaks |j_long| at 1.5.
        let spiky = {
            let samples = (0..7)
                .map(|i| TrajectorySample {
                    t: i as f64,
                    position: Point2::new(i as f64, 0.0),
                    speed: if i == 3 { 0.75 } else { 0.0 },
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let (longi, _) = comfort_constraints(&spiky, &th);
        assert!((longi - 0.6).abs() < 1e-12, "c_longi {longi}");
    }

    #[test]
    fn comfort_constraints_ignore_time_translation() {
        let th = ComfortThresholds::default();
        let build = |t0: f64| {
            let samples = (0..40)
                .map(|i| {
                    let t = t0 + i as f64 * 0.1;
                    TrajectorySample {
                        t,
                        position: Point2::new(0.0, 0.0),
                        speed: 3.0 + ((t - t0) * 1.1).sin(),
                        heading: 0.2 * ((t - t0) * 0.7).cos(),
                    }
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let a = comfort_constraints(&build(0.0), &th);
        let b = comfort_constraints(&build(250.0), &th);
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    }

    #[test]
    fn travel_time_first_entry_and_errors() {
        let moving = {
            let samples = (0..21)
                .map(|i| TrajectorySample {
                    t: i as f64,
                    position: Point2::new(i as f64, 0.0),
                    speed: 1.0,
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let goal = Point2::new(10.0, 0.0);
        assert_eq!(travel_time(&moving, goal, 0.5).unwrap(), 10.0);

        assert!(matches!(
            travel_time(&moving, Point2::new(0.0, 0.0), 0.5),
            Err(MetricsError::GoalAtStart)
        ));
        assert!(matches!(
            travel_time(&moving, Point2::new(100.0, 0.0), 0.5),
            Err(MetricsError::GoalNotReached)
        ));
        assert!(matches!(travel_time(&moving, goal, 0.0), Err(MetricsError::InvalidGoalRadius)));
    }

    #[test]
    fn travel_time_monotone_in_lingering() {
        let direct = {
            let samples = (0..11)
                .map(|i| TrajectorySample {
                    t: i as f64,
                    position: Point2::new(i as f64, 0.0),
                    speed: 1.0,
                    heading: 0.0,
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let lingering = {
            let samples = (0..16)
                .map(|i| {
                    let x = if i < 5 { 0.0 } else { (i - 5) as f64 };
                    TrajectorySample {
                        t: i as f64,
                        position: Point2::new(x, 0.0),
                        speed: 1.0,
                        heading: 0.0,
                    }
                })
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let goal = Point2::new(10.0, 0.0);
        let fast = travel_time(&direct, goal, 0.5).unwrap();
        let slow = travel_time(&lingering, goal, 0.5).unwrap();
        assert!(slow > fast);
    }
}
