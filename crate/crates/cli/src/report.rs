//! Machine-readable evaluation reports and their emission.
//!
//! The JSON document carries the full nested report; the CSV bundle emits
//! `int_series.csv` (`t,int_value`), `jerk.csv` (`t,j_long,j_lat`) and
//! `speed.csv` (`t,v`) with exactly those headers, plus `trajectory.csv`
//! (`t,x,y,v,heading`) so a report can be fed back through evaluation. Every
//! float is rounded to 12 significant digits before serialization, so
//! identical runs emit byte-identical files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use trajeval_core::metrics::{lateral_jerk, longitudinal_jerk};
use trajeval_core::objective::{CandidateEvaluation, EvaluationFlags};

use crate::trajio::{fmt, round_sig12, write_trajectory_csv};
use crate::HarnessError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvBundle,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub criteria: CriteriaSummary,
    pub worst_case: Option<WorstCase>,
    pub flags: EvaluationFlags,
    pub int_series: Vec<IntPoint>,
    pub jerk: Vec<JerkPoint>,
    pub speed: Vec<SpeedPoint>,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CriteriaSummary {
    pub t_global: f64,
    pub c_safe: f64,
    pub c_longi: f64,
    pub c_lat: f64,
    pub max_int: f64,
    pub time_term: f64,
    pub safety_term: f64,
    pub penalty_longi_term: f64,
    pub penalty_lat_term: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct WorstCase {
    pub index: usize,
    pub t: f64,
    pub int_value: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct IntPoint {
    pub t: f64,
    pub int_value: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct JerkPoint {
    pub t: f64,
    pub j_long: f64,
    pub j_lat: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SpeedPoint {
    pub t: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub heading: f64,
}

/// Builds the full report from one evaluation.
pub fn build_report(evaluation: &CandidateEvaluation<f64>) -> EvaluationReport {
    let r = &evaluation.report;
    let traj = &evaluation.trajectory;

    let int_series = evaluation
        .interaction
        .points()
        .iter()
        .map(|p| IntPoint { t: round_sig12(p.t), int_value: round_sig12(p.value) })
        .collect();
    let worst_case = evaluation.interaction.worst_index().map(|index| {
        let point = evaluation.interaction.points()[index];
        WorstCase { index, t: round_sig12(point.t), int_value: round_sig12(point.value) }
    });
    let jerk = (1..traj.len() - 1)
        .map(|i| JerkPoint {
            t: round_sig12(traj.samples()[i].t),
            j_long: round_sig12(longitudinal_jerk(traj, i).expect("interior index")),
            j_lat: round_sig12(lateral_jerk(traj, i).expect("interior index")),
        })
        .collect();
    let speed = traj
        .samples()
        .iter()
        .map(|s| SpeedPoint { t: round_sig12(s.t), v: round_sig12(s.speed) })
        .collect();
    let trajectory = traj
        .samples()
        .iter()
        .map(|s| TrajectoryPoint {
            t: round_sig12(s.t),
            x: round_sig12(s.position.x),
            y: round_sig12(s.position.y),
            v: round_sig12(s.speed),
            heading: round_sig12(s.heading),
        })
        .collect();

    EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        criteria: CriteriaSummary {
            t_global: round_sig12(r.t_global),
            c_safe: round_sig12(r.c_safe),
            c_longi: round_sig12(r.c_longi),
            c_lat: round_sig12(r.c_lat),
            max_int: round_sig12(r.max_int),
            time_term: round_sig12(r.time_term),
            safety_term: round_sig12(r.safety_term),
            penalty_longi_term: round_sig12(r.penalty_longi_term),
            penalty_lat_term: round_sig12(r.penalty_lat_term),
            q: round_sig12(r.q),
        },
        worst_case,
        flags: r.flags,
        int_series,
        jerk,
        speed,
        trajectory,
    }
}

/// Writes the report in the requested format into `out_dir` (created if
/// missing) and returns the emitted paths. JSON goes to `report.json`; the
/// CSV bundle to its fixed file names.
pub fn emit_report(
    report: &EvaluationReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            write_json(report, &path)?;
            Ok(vec![path])
        }
        ReportFormat::CsvBundle => emit_csv_bundle(report, out_dir),
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(HarnessError::io(path))
}

fn emit_csv_bundle(report: &EvaluationReport, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();

    let int_path = out_dir.join("int_series.csv");
    let mut int_csv = String::from("t,int_value\n");
    for p in &report.int_series {
        int_csv.push_str(&format!("{},{}\n", fmt(p.t), fmt(p.int_value)));
    }
    std::fs::write(&int_path, int_csv).map_err(HarnessError::io(&int_path))?;
    written.push(int_path);

    let jerk_path = out_dir.join("jerk.csv");
    let mut jerk_csv = String::from("t,j_long,j_lat\n");
    for p in &report.jerk {
        jerk_csv.push_str(&format!("{},{},{}\n", fmt(p.t), fmt(p.j_long), fmt(p.j_lat)));
    }
    std::fs::write(&jerk_path, jerk_csv).map_err(HarnessError::io(&jerk_path))?;
    written.push(jerk_path);

    let speed_path = out_dir.join("speed.csv");
    let mut speed_csv = String::from("t,v\n");
    for p in &report.speed {
        speed_csv.push_str(&format!("{},{}\n", fmt(p.t), fmt(p.v)));
    }
    std::fs::write(&speed_path, speed_csv).map_err(HarnessError::io(&speed_path))?;
    written.push(speed_path);

    let traj_path = out_dir.join("trajectory.csv");
    let mut traj_csv = String::from("t,x,y,v,heading\n");
    for p in &report.trajectory {
        traj_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(p.t),
            fmt(p.x),
            fmt(p.y),
            fmt(p.v),
            fmt(p.heading)
        ));
    }
    std::fs::write(&traj_path, traj_csv).map_err(HarnessError::io(&traj_path))?;
    written.push(traj_path);

    Ok(written)
}

/// Convenience used by the optimizer path: emit the trajectory alone so it
/// can be re-ingested by `evaluate`.
pub fn emit_trajectory(
    traj: &trajeval_core::metrics::Trajectory<f64>,
    path: &Path,
) -> Result<(), HarnessError> {
    write_trajectory_csv(traj, path)
}
