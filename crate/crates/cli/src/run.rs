//! Pipeline operations behind the CLI subcommands.

use std::path::{Path, PathBuf};

use serde::Serialize;

use trajeval_core::metrics::{shaping_beta, ShapingParams, Trajectory};
use trajeval_core::objective::{
    evaluate_candidate, evaluate_trajectory, penalty_psi, DynamicsFlags, ManeuverCandidate,
};
use trajeval_core::optimizer::{optimize_maneuver, OptimizationResult};

use crate::report::{build_report, write_json, EvaluationReport};
use crate::scenario::ScenarioConfig;
use crate::trajio::{fmt, round_sig12};
use crate::HarnessError;

/// Scores a given ego trajectory against the scenario opponent. The
/// evaluation runs on the trajectory's own time grid; the opponent is built
/// to cover the same window, so recorded drives evaluate on the clock they
/// were recorded on (scenario time zero is the opponent's departure).
pub fn evaluate_scenario(
    scenario: &ScenarioConfig,
    base_dir: &Path,
    ego: &Trajectory<f64>,
) -> Result<EvaluationReport, HarnessError> {
    let context =
        scenario.build_context(base_dir, ego.start_time(), ego.dt(), ego.end_time())?;
    let evaluation = evaluate_trajectory(ego, DynamicsFlags::default(), &context)?;
    Ok(build_report(&evaluation))
}

/// Optimization outcome bundle: the optimizer result, the report of the best
/// maneuver, and the no-decision baseline report (constant-speed ego).
pub struct OptimizeOutcome {
    pub result: OptimizationResult<f64>,
    pub best_report: EvaluationReport,
    pub baseline_report: EvaluationReport,
}

/// Runs the maneuver search on the scenario's simulation grid and also
/// evaluates the constant-speed baseline so the before/after interaction
/// contrast is always available.
pub fn run_optimize(
    scenario: &ScenarioConfig,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> Result<OptimizeOutcome, HarnessError> {
    let mut built = scenario.build(base_dir)?;
    if let Some(seed) = seed_override {
        built.pso.seed = seed;
    }
    let result = optimize_maneuver(&built.context, built.knot_count, built.knot_dt, &built.pso)?;

    let best_evaluation = evaluate_candidate(&result.best_candidate, &built.context);
    let best_report = build_report(&best_evaluation);

    let baseline_candidate =
        ManeuverCandidate::new(vec![0.0; built.knot_count], built.knot_dt)?;
    let baseline_evaluation = evaluate_candidate(&baseline_candidate, &built.context);
    let baseline_report = build_report(&baseline_evaluation);

    Ok(OptimizeOutcome { result, best_report, baseline_report })
}

/// Optimizer trace serialized next to the reports.
#[derive(Debug, Serialize)]
pub struct OptimizationSummary {
    pub schema_version: u32,
    pub best_q: f64,
    pub evaluations: usize,
    pub stopped_early: bool,
    pub seed: u64,
    pub knot_dt: f64,
    pub best_accel_knots: Vec<f64>,
    pub history: Vec<f64>,
}

impl OptimizationSummary {
    pub fn new(result: &OptimizationResult<f64>, seed: u64) -> Self {
        Self {
            schema_version: 1,
            best_q: round_sig12(result.best_q),
            evaluations: result.evaluations,
            stopped_early: result.stopped_early,
            seed,
            knot_dt: round_sig12(result.best_candidate.knot_dt()),
            best_accel_knots: result
                .best_candidate
                .accel_knots()
                .iter()
                .map(|&a| round_sig12(a))
                .collect(),
            history: result.history.iter().map(|&q| round_sig12(q)).collect(),
        }
    }
}

/// One row of a trajectory comparison, ranked by ascending objective.
#[derive(Debug, Serialize)]
pub struct ComparisonEntry {
    pub rank: usize,
    pub trajectory: PathBuf,
    pub q: f64,
    pub t_global: f64,
    pub c_safe: f64,
    pub c_longi: f64,
    pub c_lat: f64,
    pub max_int: f64,
    pub unreached_goal: bool,
}

/// Evaluates each trajectory against the scenario and ranks them by Q.
pub fn compare_trajectories(
    scenario: &ScenarioConfig,
    base_dir: &Path,
    trajectories: &[(PathBuf, Trajectory<f64>)],
) -> Result<Vec<ComparisonEntry>, HarnessError> {
    let mut entries = Vec::with_capacity(trajectories.len());
    for (path, trajectory) in trajectories {
        let report = evaluate_scenario(scenario, base_dir, trajectory)?;
        entries.push(ComparisonEntry {
            rank: 0,
            trajectory: path.clone(),
            q: report.criteria.q,
            t_global: report.criteria.t_global,
            c_safe: report.criteria.c_safe,
            c_longi: report.criteria.c_longi,
            c_lat: report.criteria.c_lat,
            max_int: report.criteria.max_int,
            unreached_goal: report.flags.unreached_goal,
        });
    }
    entries.sort_by(|a, b| a.q.partial_cmp(&b.q).expect("finite objectives"));
    for (i, entry) in entries.iter_mut().enumerate() {
        entry.rank = i + 1;
    }
    Ok(entries)
}

pub fn write_comparison(entries: &[ComparisonEntry], out_dir: &Path) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let path = out_dir.join("comparison.json");
    write_json(&entries, &path)?;
    Ok(path)
}

/// Evaluates the shaping function over a grid for each decay exponent and
/// writes `beta_sweep.csv` (`alpha,x,beta`).
pub fn sweep_beta(
    m_cap: f64,
    slope: f64,
    alphas: &[f64],
    x_min: f64,
    x_max: f64,
    steps: usize,
    out_dir: &Path,
) -> Result<PathBuf, HarnessError> {
    if alphas.is_empty() {
        return Err(HarnessError::Validation("at least one alpha is required".into()));
    }
    if !(x_max > x_min) || steps < 2 {
        return Err(HarnessError::Validation("need x_max > x_min and steps >= 2".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let mut csv = String::from("alpha,x,beta\n");
    for &alpha in alphas {
        let params = ShapingParams::new(m_cap, slope, alpha)?;
        for k in 0..steps {
            let x = x_min + (x_max - x_min) * k as f64 / (steps - 1) as f64;
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt(alpha),
                fmt(x),
                fmt(shaping_beta(x, &params))
            ));
        }
    }
    let path = out_dir.join("beta_sweep.csv");
    std::fs::write(&path, csv).map_err(HarnessError::io(&path))?;
    Ok(path)
}

/// Evaluates the penalty function over a grid for every `(m, p)` pair and
/// writes `psi_sweep.csv` (`m,p,x,psi`).
pub fn sweep_psi(
    ms: &[f64],
    ps: &[f64],
    x_min: f64,
    x_max: f64,
    steps: usize,
    out_dir: &Path,
) -> Result<PathBuf, HarnessError> {
    if ms.is_empty() || ps.is_empty() {
        return Err(HarnessError::Validation("need at least one m and one p".into()));
    }
    if !(x_max > x_min) || steps < 2 {
        return Err(HarnessError::Validation("need x_max > x_min and steps >= 2".into()));
    }
    for &m in ms {
        if !(m > 0.0) {
            return Err(HarnessError::Validation(format!("penalty m must be > 0 (got {m})")));
        }
    }
    for &p in ps {
        if !(p > 1.0) {
            return Err(HarnessError::Validation(format!("penalty p must be > 1 (got {p})")));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let mut csv = String::from("m,p,x,psi\n");
    for &m in ms {
        for &p in ps {
            for k in 0..steps {
                let x = x_min + (x_max - x_min) * k as f64 / (steps - 1) as f64;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt(m),
                    fmt(p),
                    fmt(x),
                    fmt(penalty_psi(x, m, p))
                ));
            }
        }
    }
    let path = out_dir.join("psi_sweep.csv");
    std::fs::write(&path, csv).map_err(HarnessError::io(&path))?;
    Ok(path)
}
