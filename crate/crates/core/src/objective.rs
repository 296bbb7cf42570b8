//! Penalized scalar objective over candidate acceleration profiles.
//!
//! A candidate is a bounded piecewise-constant longitudinal acceleration
//! profile. It is integrated into a trajectory along a fixed reference path,
//! evaluated for travel time, worst-case safety interaction, and jerk
//! comfort, and the pieces are assembled into one scalar: weighted travel
//! time plus the shaped safety criterion plus exponential penalties on the
//! comfort constraint violations. Infeasible candidates (goal not reached
//! within the horizon) receive finite surrogate costs so population-based
//! search keeps pressure toward feasibility.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point2, SafetyParams, VehicleFootprint};
use crate::metrics::{
    comfort_constraints, interaction_series, shaping_beta, travel_time, ComfortThresholds,
    InteractionSample, InteractionSeries, MetricsError, ShapingParams, Trajectory,
    TrajectorySample,
};
use crate::scalar::Real;

/// Interaction value substituted when the scenario has no opponent: deep in
/// the decay tail of every reasonable shaping configuration, so the safety
/// term effectively vanishes.
pub const OPPONENT_FREE_INT: f64 = -1.0e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("vehicle state requires v >= 0 (got {v})")]
    InvalidState { v: f64 },
    #[error("reference path needs at least 2 waypoints (got {count})")]
    PathTooShort { count: usize },
    #[error("reference path has a zero-length segment at waypoint {index}")]
    DuplicateWaypoint { index: usize },
    #[error("maneuver candidate is invalid: {reason}")]
    InvalidCandidate { reason: String },
    #[error("limits require a_min < 0 < a_max and v_max > 0")]
    InvalidLimits,
    #[error("objective parameters are invalid: {reason}")]
    InvalidObjectiveParams { reason: String },
    #[error("simulation timestep must be positive and no larger than the control interval")]
    InvalidTimestep,
    #[error("start abscissa lies outside the reference path")]
    StartOutsidePath,
    #[error("start position is already inside the goal radius")]
    StartInsideGoal,
    #[error("opponent trajectory is not on the simulation grid: {reason}")]
    OpponentGridMismatch { reason: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Reduced longitudinal vehicle state: curvilinear abscissa and speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState<T> {
    /// Arc-length position along the reference path, meters.
    pub s: T,
    /// Scalar speed, m/s.
    pub v: T,
}

impl<T: Real> VehicleState<T> {
    pub fn new(s: T, v: T) -> Result<Self, ObjectiveError> {
        if v < T::zero() {
            return Err(ObjectiveError::InvalidState { v: num_traits::cast(v).unwrap_or(f64::NAN) });
        }
        Ok(Self { s, v })
    }
}

/// Polyline reference path with precomputed arc lengths and segment headings.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath<T> {
    waypoints: Vec<Point2<T>>,
    cumulative_arc: Vec<T>,
    /// Unit direction of the segment starting at each waypoint (the last
    /// entry repeats the final segment direction).
    directions: Vec<(T, T)>,
    headings: Vec<T>,
}

impl<T: Real> ReferencePath<T> {
    pub fn from_waypoints(waypoints: Vec<Point2<T>>) -> Result<Self, ObjectiveError> {
        if waypoints.len() < 2 {
            return Err(ObjectiveError::PathTooShort { count: waypoints.len() });
        }
        let mut cumulative_arc = Vec::with_capacity(waypoints.len());
        let mut directions = Vec::with_capacity(waypoints.len());
        let mut headings = Vec::with_capacity(waypoints.len());
        let mut arc = T::zero();
        cumulative_arc.push(arc);
        for (index, pair) in waypoints.windows(2).enumerate() {
            let delta = pair[1] - pair[0];
            let length = delta.norm();
            if !(length > T::zero()) {
                return Err(ObjectiveError::DuplicateWaypoint { index: index + 1 });
            }
            arc += length;
            cumulative_arc.push(arc);
            directions.push((delta.x / length, delta.y / length));
            headings.push(delta.y.atan2(delta.x));
        }
        // Repeat the last segment attitude for the final waypoint.
        directions.push(*directions.last().expect("at least one segment"));
        headings.push(*headings.last().expect("at least one segment"));
        Ok(Self { waypoints, cumulative_arc, directions, headings })
    }

    pub fn waypoints(&self) -> &[Point2<T>] {
        &self.waypoints
    }

    pub fn total_length(&self) -> T {
        self.cumulative_arc[self.cumulative_arc.len() - 1]
    }

    /// Position and heading at arc length `s`, clamped to the path range.
    /// The heading is the containing segment's direction.
    pub fn sample_at(&self, s: T) -> (Point2<T>, T) {
        let s = s.max(T::zero()).min(self.total_length());
        // Last segment wins when s sits exactly on a joint.
        let mut segment = self.cumulative_arc.len() - 2;
        for i in 0..self.cumulative_arc.len() - 1 {
            if s < self.cumulative_arc[i + 1] {
                segment = i;
                break;
            }
        }
        let along = s - self.cumulative_arc[segment];
        let (dir_x, dir_y) = self.directions[segment];
        let base = self.waypoints[segment];
        let position = Point2::new(base.x + dir_x * along, base.y + dir_y * along);
        (position, self.headings[segment])
    }
}

/// Decision variables of one maneuver: piecewise-constant longitudinal
/// acceleration over uniform control intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverCandidate<T> {
    accel_knots: Vec<T>,
    knot_dt: T,
    horizon_s: T,
}

impl<T: Real> ManeuverCandidate<T> {
    pub fn new(accel_knots: Vec<T>, knot_dt: T) -> Result<Self, ObjectiveError> {
        if accel_knots.is_empty() {
            return Err(ObjectiveError::InvalidCandidate { reason: "no acceleration knots".into() });
        }
        if !(knot_dt > T::zero()) {
            return Err(ObjectiveError::InvalidCandidate {
                reason: "control interval must be positive".into(),
            });
        }
        let horizon_s = knot_dt * T::from_usize(accel_knots.len()).expect("knot count fits scalar");
        Ok(Self { accel_knots, knot_dt, horizon_s })
    }

    pub fn accel_knots(&self) -> &[T] {
        &self.accel_knots
    }

    pub fn knot_dt(&self) -> T {
        self.knot_dt
    }

    pub fn horizon_s(&self) -> T {
        self.horizon_s
    }

    /// Acceleration applied at time `t`; the final knot extends to the end
    /// of the horizon.
    pub fn accel_at(&self, t: T) -> T {
        let idx = num_traits::cast::<T, i64>((t / self.knot_dt).floor()).unwrap_or(0).max(0) as usize;
        self.accel_knots[idx.min(self.accel_knots.len() - 1)]
    }
}

/// Physical actuation limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits<T> {
    pub a_min: T,
    pub a_max: T,
    pub v_max: T,
}

impl<T: Real> Limits<T> {
    pub fn new(a_min: T, a_max: T, v_max: T) -> Result<Self, ObjectiveError> {
        let limits = Self { a_min, a_max, v_max };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !(self.a_min < T::zero() && self.a_max > T::zero() && self.v_max > T::zero()) {
            return Err(ObjectiveError::InvalidLimits);
        }
        Ok(())
    }
}

/// Parameters of one soft-constraint penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams<T> {
    /// Divergence rate, `M > 0`.
    pub m: T,
    /// Right-hand derivative at the origin, `p > 1`.
    pub p: T,
}

impl<T: Real> PenaltyParams<T> {
    pub fn new(m: T, p: T) -> Result<Self, ObjectiveError> {
        let params = Self { m, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !(self.m > T::zero() && self.p > T::one()) {
            return Err(ObjectiveError::InvalidObjectiveParams {
                reason: format!("penalty requires M > 0 and p > 1 (got {}, {})", self.m, self.p),
            });
        }
        Ok(())
    }
}

/// Everything that weights and shapes the scalar objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams<T> {
    /// Weight on travel time.
    pub w_time: T,
    /// Weight on the shaped safety criterion.
    pub w_safe: T,
    pub shaping: ShapingParams<T>,
    pub penalty_longi: PenaltyParams<T>,
    pub penalty_lat: PenaltyParams<T>,
    pub thresholds: ComfortThresholds<T>,
    pub safety: SafetyParams<T>,
    pub goal: Point2<T>,
    pub goal_radius_m: T,
    /// Optional pre-shaping scaling of the interaction value (unit
    /// normalization hook); 1 leaves the metric as defined.
    pub int_scale: T,
}

impl<T: Real> ObjectiveParams<T> {
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !(self.w_time > T::zero() && self.w_safe > T::zero()) {
            return Err(ObjectiveError::InvalidObjectiveParams {
                reason: format!("weights must be positive (got {}, {})", self.w_time, self.w_safe),
            });
        }
        if !(self.goal_radius_m > T::zero()) {
            return Err(ObjectiveError::InvalidObjectiveParams {
                reason: "goal radius must be positive".into(),
            });
        }
        if !(self.int_scale > T::zero()) {
            return Err(ObjectiveError::InvalidObjectiveParams {
                reason: "interaction scale must be positive".into(),
            });
        }
        self.shaping.validate()?;
        self.penalty_longi.validate()?;
        self.penalty_lat.validate()?;
        self.thresholds.validate()?;
        self.safety.validate()?;
        Ok(())
    }
}

/// Opponent side of a scenario: a fixed trajectory and its footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct OpponentContext<T> {
    pub trajectory: Trajectory<T>,
    pub footprint: VehicleFootprint<T>,
}

/// Immutable scenario context shared by every candidate evaluation in one
/// optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationContext<T> {
    ego_footprint: VehicleFootprint<T>,
    opponent: Option<OpponentContext<T>>,
    params: ObjectiveParams<T>,
    start: VehicleState<T>,
    path: ReferencePath<T>,
    limits: Limits<T>,
    sim_dt: T,
}

impl<T: Real> EvaluationContext<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ego_footprint: VehicleFootprint<T>,
        opponent: Option<OpponentContext<T>>,
        params: ObjectiveParams<T>,
        start: VehicleState<T>,
        path: ReferencePath<T>,
        limits: Limits<T>,
        sim_dt: T,
    ) -> Result<Self, ObjectiveError> {
        ego_footprint.validate()?;
        params.validate()?;
        limits.validate()?;
        if !(sim_dt > T::zero()) {
            return Err(ObjectiveError::InvalidTimestep);
        }
        if start.v < T::zero() {
            return Err(ObjectiveError::InvalidState {
                v: num_traits::cast(start.v).unwrap_or(f64::NAN),
            });
        }
        if start.s < T::zero() || start.s >= path.total_length() {
            return Err(ObjectiveError::StartOutsidePath);
        }
        let (start_position, _) = path.sample_at(start.s);
        if start_position.distance(&params.goal) <= params.goal_radius_m {
            return Err(ObjectiveError::StartInsideGoal);
        }
        if let Some(opp) = &opponent {
            opp.footprint.validate()?;
            if (opp.trajectory.dt() - sim_dt).abs() > T::lit(1e-9) {
                return Err(ObjectiveError::OpponentGridMismatch {
                    reason: format!(
                        "opponent dt {} differs from simulation dt {}",
                        opp.trajectory.dt(),
                        sim_dt
                    ),
                });
            }
        }
        Ok(Self { ego_footprint, opponent, params, start, path, limits, sim_dt })
    }

    pub fn ego_footprint(&self) -> &VehicleFootprint<T> {
        &self.ego_footprint
    }

    pub fn opponent(&self) -> Option<&OpponentContext<T>> {
        self.opponent.as_ref()
    }

    pub fn params(&self) -> &ObjectiveParams<T> {
        &self.params
    }

    pub fn start(&self) -> VehicleState<T> {
        self.start
    }

    pub fn path(&self) -> &ReferencePath<T> {
        &self.path
    }

    pub fn limits(&self) -> &Limits<T> {
        &self.limits
    }

    pub fn sim_dt(&self) -> T {
        self.sim_dt
    }
}

/// Saturation and truncation events observed while integrating a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DynamicsFlags {
    /// Speed clamped at zero (full stop, no reverse).
    pub saturated_at_rest: bool,
    /// Speed clamped at the legal maximum.
    pub saturated_at_vmax: bool,
    /// Arc length reached the end of the reference path; the trajectory is
    /// truncated there.
    pub reached_path_end: bool,
}

/// Result of integrating a candidate acceleration profile.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedTrajectory<T> {
    pub trajectory: Trajectory<T>,
    pub flags: DynamicsFlags,
}

/// Integrates the longitudinal dynamics `ds = v dt`, `dv = a dt` with
/// semi-implicit stepping: speed updates first (clamped to `[0, v_max]`),
/// then advances the abscissa with the updated speed, which keeps full stops
/// clean. Positions and headings come from the reference path.
pub fn integrate_dynamics<T: Real>(
    start: VehicleState<T>,
    cand: &ManeuverCandidate<T>,
    path: &ReferencePath<T>,
    limits: &Limits<T>,
    dt: T,
) -> Result<IntegratedTrajectory<T>, ObjectiveError> {
    if !(dt > T::zero()) || dt > cand.knot_dt() * (T::one() + T::lit(1e-9)) {
        return Err(ObjectiveError::InvalidTimestep);
    }
    if start.s < T::zero() || start.s > path.total_length() {
        return Err(ObjectiveError::StartOutsidePath);
    }
    let total = path.total_length();
    let steps = num_traits::cast::<T, i64>((cand.horizon_s() / dt).round()).unwrap_or(0).max(1) as usize;

    let mut samples = Vec::with_capacity(steps + 1);
    let mut s = start.s;
    let mut v = start.v.min(limits.v_max);
    let mut flags = DynamicsFlags::default();
    for i in 0..=steps {
        let t = dt * T::from_usize(i).expect("step fits scalar");
        let (position, heading) = path.sample_at(s);
        samples.push(TrajectorySample { t, position, speed: v, heading });
        if i == steps || flags.reached_path_end {
            break;
        }
        let accel = cand.accel_at(t);
        let mut next_v = v + accel * dt;
        if next_v < T::zero() {
            next_v = T::zero();
            flags.saturated_at_rest = true;
        }
        if next_v > limits.v_max {
            next_v = limits.v_max;
            flags.saturated_at_vmax = true;
        }
        let mut next_s = s + next_v * dt;
        if next_s >= total {
            next_s = total;
            flags.reached_path_end = true;
        }
        s = next_s;
        v = next_v;
    }
    Ok(IntegratedTrajectory { trajectory: Trajectory::new(samples)?, flags })
}

/// Exponent above which the penalty saturates instead of overflowing.
fn psi_exponent_cap<T: Real>() -> T {
    (T::max_value() / T::lit(4.0)).ln()
}

/// Soft-constraint penalty: zero for satisfied constraints, exponential in
/// the violation. Continuous at zero, convex, right-derivative `p`.
pub fn penalty_psi<T: Real>(x: T, m: T, p: T) -> T {
    penalty_psi_checked(x, m, p).0
}

/// As [`penalty_psi`], reporting saturation: violations whose exponent would
/// overflow return a large finite cap instead, flagged true.
pub fn penalty_psi_checked<T: Real>(x: T, m: T, p: T) -> (T, bool) {
    if x < T::zero() {
        return (T::zero(), false);
    }
    let exponent = m * p * x;
    let cap = psi_exponent_cap::<T>();
    if exponent > cap {
        ((cap.exp() - T::one()) / m, true)
    } else {
        ((exponent.exp() - T::one()) / m, false)
    }
}

/// Events observed while evaluating one candidate or trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvaluationFlags {
    /// Goal never entered within the horizon; travel time is a surrogate.
    pub unreached_goal: bool,
    pub saturated_at_rest: bool,
    pub saturated_at_vmax: bool,
    pub reached_path_end: bool,
    /// At least one intersecting timestep produced a degenerate (area-zero)
    /// overlap polygon.
    pub degenerate_overlap: bool,
    /// A comfort penalty hit its overflow cap.
    pub penalty_saturated: bool,
}

/// Per-criterion breakdown of one evaluation. `q` is exactly the sum of the
/// four term fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport<T> {
    /// Travel time, seconds; surrogate (horizon plus remaining distance)
    /// when the goal was not reached.
    pub t_global: T,
    /// Shaped safety criterion, unweighted.
    pub c_safe: T,
    /// Longitudinal comfort constraint value (negative = satisfied).
    pub c_longi: T,
    /// Lateral comfort constraint value.
    pub c_lat: T,
    /// Worst-case interaction value over the horizon.
    pub max_int: T,
    pub time_term: T,
    pub safety_term: T,
    pub penalty_longi_term: T,
    pub penalty_lat_term: T,
    pub q: T,
    pub flags: EvaluationFlags,
}

/// Full detail of one evaluation: the scalar, its breakdown, and the series
/// behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEvaluation<T> {
    pub q: T,
    pub report: CriteriaReport<T>,
    pub trajectory: Trajectory<T>,
    pub interaction: InteractionSeries<T>,
}

/// Evaluates an existing trajectory against the scenario context. Used both
/// by the optimizer (after integrating a candidate) and by the harness to
/// score externally supplied trajectories; the two paths therefore agree
/// bit-for-bit on identical input.
pub fn evaluate_trajectory<T: Real>(
    traj: &Trajectory<T>,
    dynamics: DynamicsFlags,
    ctx: &EvaluationContext<T>,
) -> Result<CandidateEvaluation<T>, ObjectiveError> {
    let params = &ctx.params;
    let interaction = match &ctx.opponent {
        Some(opp) => interaction_series(
            traj,
            &opp.trajectory,
            &ctx.ego_footprint,
            &opp.footprint,
            &params.safety,
        )?,
        None => InteractionSeries::new(
            traj.samples()
                .iter()
                .map(|s| InteractionSample { t: s.t, value: T::lit(OPPONENT_FREE_INT) })
                .collect(),
        ),
    };
    let max_int = interaction.worst().expect("series covers the trajectory").value;
    let c_safe = shaping_beta(params.int_scale * max_int, &params.shaping);
    let (c_longi, c_lat) = comfort_constraints(traj, &params.thresholds);

    let (t_global, unreached_goal) = match travel_time(traj, params.goal, params.goal_radius_m) {
        Ok(t) => (t, false),
        Err(MetricsError::GoalNotReached) => {
            let last = traj.samples()[traj.len() - 1];
            let remaining = last.position.distance(&params.goal);
            (traj.duration() + remaining, true)
        }
        Err(other) => return Err(other.into()),
    };

    let (penalty_longi_term, sat_longi) =
        penalty_psi_checked(c_longi, params.penalty_longi.m, params.penalty_longi.p);
    let (penalty_lat_term, sat_lat) =
        penalty_psi_checked(c_lat, params.penalty_lat.m, params.penalty_lat.p);

    let time_term = params.w_time * t_global;
    let safety_term = params.w_safe * c_safe;
    let q = time_term + safety_term + penalty_longi_term + penalty_lat_term;

    let report = CriteriaReport {
        t_global,
        c_safe,
        c_longi,
        c_lat,
        max_int,
        time_term,
        safety_term,
        penalty_longi_term,
        penalty_lat_term,
        q,
        flags: EvaluationFlags {
            unreached_goal,
            saturated_at_rest: dynamics.saturated_at_rest,
            saturated_at_vmax: dynamics.saturated_at_vmax,
            reached_path_end: dynamics.reached_path_end,
            degenerate_overlap: interaction.degenerate_overlaps() > 0,
            penalty_saturated: sat_longi || sat_lat,
        },
    };
    Ok(CandidateEvaluation { q, report, trajectory: traj.clone(), interaction })
}

/// Integrates and evaluates one candidate. All infeasibilities map to finite
/// costs; with a validated [`EvaluationContext`] this never fails, which is
/// what population-based search requires.
pub fn evaluate_candidate<T: Real>(
    cand: &ManeuverCandidate<T>,
    ctx: &EvaluationContext<T>,
) -> CandidateEvaluation<T> {
    match integrate_dynamics(ctx.start, cand, &ctx.path, &ctx.limits, ctx.sim_dt)
        .and_then(|integrated| evaluate_trajectory(&integrated.trajectory, integrated.flags, ctx))
    {
        Ok(evaluation) => evaluation,
        Err(_) => fallback_evaluation(cand, ctx),
    }
}

/// Scalar objective and criteria report for one candidate.
pub fn objective_q<T: Real>(
    cand: &ManeuverCandidate<T>,
    ctx: &EvaluationContext<T>,
) -> (T, CriteriaReport<T>) {
    let evaluation = evaluate_candidate(cand, ctx);
    (evaluation.q, evaluation.report)
}

/// Finite worst-case cost for degenerate evaluations that slip past context
/// validation (for example a truncation so early the trajectory cannot hold
/// three samples). Keeps the search total instead of panicking.
fn fallback_evaluation<T: Real>(
    cand: &ManeuverCandidate<T>,
    ctx: &EvaluationContext<T>,
) -> CandidateEvaluation<T> {
    let params = &ctx.params;
    let t_global = cand.horizon_s() + T::lit(1e3);
    let time_term = params.w_time * t_global;
    let c_safe = shaping_beta(T::zero(), &params.shaping);
    let safety_term = params.w_safe * c_safe;
    let q = time_term + safety_term;
    let flags = EvaluationFlags {
        unreached_goal: true,
        reached_path_end: true,
        ..EvaluationFlags::default()
    };
    let (start_position, heading) = ctx.path.sample_at(ctx.start.s);
    let dt = ctx.sim_dt;
    let samples: Vec<TrajectorySample<T>> = (0..3)
        .map(|i| TrajectorySample {
            t: dt * T::from_usize(i).expect("index fits scalar"),
            position: start_position,
            speed: T::zero(),
            heading,
        })
        .collect();
    let trajectory = Trajectory::new(samples).expect("three uniform samples");
    let interaction = InteractionSeries::new(vec![InteractionSample {
        t: T::zero(),
        value: T::lit(OPPONENT_FREE_INT),
    }]);
    CandidateEvaluation {
        q,
        report: CriteriaReport {
            t_global,
            c_safe,
            c_longi: T::zero(),
            c_lat: T::zero(),
            max_int: T::lit(OPPONENT_FREE_INT),
            time_term,
            safety_term,
            penalty_longi_term: T::zero(),
            penalty_lat_term: T::zero(),
            q,
            flags,
        },
        trajectory,
        interaction,
    }
}
