//! Scenario files: a single TOML document describing both vehicles, the
//! safety/objective/optimizer parameters, and the simulation grid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use trajeval_core::geometry::{Point2, SafetyParams, VehicleFootprint};
use trajeval_core::metrics::{
    ComfortThresholds, ShapingParams, Trajectory, TrajectorySample,
};
use trajeval_core::objective::{
    EvaluationContext, Limits, ObjectiveParams, OpponentContext, PenaltyParams, ReferencePath,
    VehicleState,
};
use trajeval_core::optimizer::PsoConfig;

use crate::trajio::{load_trajectory, TrajectoryFormat};
use crate::HarnessError;

/// Environment variable overriding the default boundary sample count used
/// when a scenario omits `safety.boundary_samples`.
pub const BOUNDARY_SAMPLES_ENV: &str = "TRAJEVAL_BOUNDARY_SAMPLES";

/// Fallback boundary sample count.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub sim: SimConfig,
    pub ego: EgoConfig,
    #[serde(default)]
    pub opponent: Option<OpponentConfig>,
    pub safety: SafetyConfig,
    pub objective: ObjectiveConfig,
    pub pso: PsoConfig<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Simulation timestep, seconds.
    pub dt: f64,
    /// Planning horizon, seconds.
    pub horizon_s: f64,
    /// Number of piecewise-constant acceleration knots over the horizon.
    pub accel_knots: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoConfig {
    /// Reference path waypoints, `[x, y]` pairs in meters.
    pub waypoints: Vec<[f64; 2]>,
    /// Start abscissa along the path, meters.
    #[serde(default)]
    pub start_s: f64,
    /// Start speed, m/s.
    pub start_speed: f64,
    pub footprint: VehicleFootprint<f64>,
    pub limits: Limits<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpponentConfig {
    pub source: OpponentSource,
    pub footprint: VehicleFootprint<f64>,
    /// Path for the constant-speed source.
    #[serde(default)]
    pub waypoints: Option<Vec<[f64; 2]>>,
    /// Speed for the constant-speed source, m/s.
    #[serde(default)]
    pub speed: Option<f64>,
    /// Start abscissa for the constant-speed source, meters.
    #[serde(default)]
    pub start_s: f64,
    /// Recorded trajectory for the file source, relative to the scenario
    /// file.
    #[serde(default)]
    pub trajectory_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpponentSource {
    #[serde(rename = "constant-speed")]
    ConstantSpeed,
    #[serde(rename = "file")]
    File,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyConfig {
    pub ttc_threshold_s: f64,
    pub lateral_margin_m: f64,
    /// Boundary sample count; when omitted, the `TRAJEVAL_BOUNDARY_SAMPLES`
    /// environment variable applies, then the built-in default of 64.
    #[serde(default)]
    pub boundary_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveConfig {
    #[serde(default = "one")]
    pub w_time: f64,
    #[serde(default = "one")]
    pub w_safe: f64,
    /// Goal position, `[x, y]` meters.
    pub goal: [f64; 2],
    pub goal_radius_m: f64,
    #[serde(default = "one")]
    pub int_scale: f64,
    pub shaping: ShapingParams<f64>,
    pub thresholds: ComfortThresholds<f64>,
    pub penalty_longi: PenaltyParams<f64>,
    pub penalty_lat: PenaltyParams<f64>,
}

fn one() -> f64 {
    1.0
}

/// Scenario plus everything derived from it for one run.
pub struct BuiltScenario {
    pub context: EvaluationContext<f64>,
    pub knot_count: usize,
    pub knot_dt: f64,
    pub pso: PsoConfig<f64>,
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    let scenario: ScenarioConfig = toml::from_str(&text)
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
    if scenario.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::Validation(format!(
            "{}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            scenario.schema_version
        )));
    }
    Ok(scenario)
}

impl ScenarioConfig {
    /// Boundary sample count after applying the environment override for
    /// scenarios that leave it unset.
    pub fn boundary_samples(&self) -> Result<usize, HarnessError> {
        if let Some(n) = self.safety.boundary_samples {
            return Ok(n);
        }
        match std::env::var(BOUNDARY_SAMPLES_ENV) {
            Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
                HarnessError::Validation(format!(
                    "{BOUNDARY_SAMPLES_ENV} must be a positive integer (got {raw:?})"
                ))
            }),
            Err(_) => Ok(DEFAULT_BOUNDARY_SAMPLES),
        }
    }

    pub fn safety_params(&self) -> Result<SafetyParams<f64>, HarnessError> {
        let params = SafetyParams::new(
            self.safety.ttc_threshold_s,
            self.safety.lateral_margin_m,
            self.boundary_samples()?,
        )?;
        Ok(params)
    }

    pub fn objective_params(&self) -> Result<ObjectiveParams<f64>, HarnessError> {
        let o = &self.objective;
        let params = ObjectiveParams {
            w_time: o.w_time,
            w_safe: o.w_safe,
            shaping: o.shaping,
            penalty_longi: o.penalty_longi,
            penalty_lat: o.penalty_lat,
            thresholds: o.thresholds,
            safety: self.safety_params()?,
            goal: Point2::new(o.goal[0], o.goal[1]),
            goal_radius_m: o.goal_radius_m,
            int_scale: o.int_scale,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn ego_path(&self) -> Result<ReferencePath<f64>, HarnessError> {
        let waypoints = self.ego.waypoints.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        Ok(ReferencePath::from_waypoints(waypoints)?)
    }

    /// Builds the opponent trajectory on a given time grid. Constant-speed
    /// opponents advance along their own path from `start_s`, truncated when
    /// they leave it; file opponents are loaded as recorded.
    pub fn opponent_context(
        &self,
        base_dir: &Path,
        t0: f64,
        dt: f64,
        t_end: f64,
    ) -> Result<Option<OpponentContext<f64>>, HarnessError> {
        let Some(opponent) = &self.opponent else {
            return Ok(None);
        };
        let trajectory = match opponent.source {
            OpponentSource::File => {
                let file = opponent.trajectory_file.as_ref().ok_or_else(|| {
                    HarnessError::Validation(
                        "opponent.source = \"file\" requires opponent.trajectory_file".into(),
                    )
                })?;
                let path = if file.is_absolute() { file.clone() } else { base_dir.join(file) };
                load_trajectory(&path, TrajectoryFormat::from_path(&path))?
            }
            OpponentSource::ConstantSpeed => {
                let waypoints = opponent.waypoints.as_ref().ok_or_else(|| {
                    HarnessError::Validation(
                        "opponent.source = \"constant-speed\" requires opponent.waypoints".into(),
                    )
                })?;
                let speed = opponent.speed.ok_or_else(|| {
                    HarnessError::Validation(
                        "opponent.source = \"constant-speed\" requires opponent.speed".into(),
                    )
                })?;
                if speed < 0.0 {
                    return Err(HarnessError::Validation("opponent.speed must be >= 0".into()));
                }
                let path = ReferencePath::from_waypoints(
                    waypoints.iter().map(|&[x, y]| Point2::new(x, y)).collect(),
                )?;
                constant_speed_trajectory(&path, opponent.start_s, speed, t0, dt, t_end)?
            }
        };
        Ok(Some(OpponentContext { trajectory, footprint: opponent.footprint }))
    }

    /// Assembles the evaluation context on the simulation grid `dt` over
    /// `[t0, t_end]` (the opponent is built to cover that window).
    pub fn build_context(
        &self,
        base_dir: &Path,
        t0: f64,
        dt: f64,
        t_end: f64,
    ) -> Result<EvaluationContext<f64>, HarnessError> {
        let opponent = self.opponent_context(base_dir, t0, dt, t_end)?;
        let context = EvaluationContext::new(
            self.ego.footprint,
            opponent,
            self.objective_params()?,
            VehicleState::new(self.ego.start_s, self.ego.start_speed)?,
            self.ego_path()?,
            self.ego.limits,
            dt,
        )?;
        Ok(context)
    }

    /// Full optimization setup on the scenario's own simulation grid.
    pub fn build(&self, base_dir: &Path) -> Result<BuiltScenario, HarnessError> {
        let sim = &self.sim;
        if !(sim.dt > 0.0) || !(sim.horizon_s > 0.0) || sim.accel_knots == 0 {
            return Err(HarnessError::Validation(
                "sim requires dt > 0, horizon_s > 0 and accel_knots >= 1".into(),
            ));
        }
        let knot_dt = sim.horizon_s / sim.accel_knots as f64;
        if sim.dt > knot_dt + 1e-9 {
            return Err(HarnessError::Validation(format!(
                "sim.dt ({}) must not exceed the control interval ({knot_dt})",
                sim.dt
            )));
        }
        let context = self.build_context(base_dir, 0.0, sim.dt, sim.horizon_s)?;
        if let Some(opp) = context.opponent() {
            if opp.trajectory.start_time() > 1e-9 {
                return Err(HarnessError::Validation(
                    "opponent trajectory must cover the horizon start (t = 0)".into(),
                ));
            }
        }
        Ok(BuiltScenario { context, knot_count: sim.accel_knots, knot_dt, pso: self.pso })
    }
}

/// Samples a constant-speed ride along a path onto the `[t0, t_end]` grid.
/// Stops early if the path ends. The vehicle is anchored so that it sits at
/// `start_s` at scenario time zero.
fn constant_speed_trajectory(
    path: &ReferencePath<f64>,
    start_s: f64,
    speed: f64,
    t0: f64,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory<f64>, HarnessError> {
    if !(dt > 0.0) {
        return Err(HarnessError::Validation("timestep must be positive".into()));
    }
    let steps = ((t_end - t0) / dt).round().max(2.0) as usize;
    let total = path.total_length();
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = t0 + dt * i as f64;
        let s = start_s + speed * t;
        let ended = s >= total;
        let (position, heading) = path.sample_at(s);
        samples.push(TrajectorySample {
            t,
            position,
            speed: if ended { 0.0 } else { speed },
            heading,
        });
        if ended {
            break;
        }
    }
    if samples.len() < 3 {
        return Err(HarnessError::Validation(
            "opponent leaves its path too quickly to form a trajectory; extend the path".into(),
        ));
    }
    Ok(Trajectory::new(samples)?)
}
