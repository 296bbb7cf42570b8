//! Trajectory file ingestion and emission.
//!
//! CSV files carry a header row with columns `t,x,y` (required) and `v`,
//! `heading` (optional, any column order, unknown columns ignored). JSON
//! files carry `{"samples": [{"t": ..., "x": ..., "y": ..., "v": ...,
//! "heading": ...}]}` with the same optional fields. Missing speeds are
//! derived from position differences, missing headings from the direction of
//! travel; non-uniform time grids are resampled by linear interpolation.

use std::path::Path;

use serde::Deserialize;

use trajeval_core::geometry::Point2;
use trajeval_core::metrics::{Trajectory, TrajectorySample};
use trajeval_core::scalar::wrap_angle;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    Json,
}

impl TrajectoryFormat {
    /// Chooses by file extension; anything but `.json` reads as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TrajectoryFormat::Json,
            _ => TrajectoryFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RawSample {
    t: f64,
    x: f64,
    y: f64,
    v: Option<f64>,
    heading: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct JsonTrajectory {
    samples: Vec<JsonSample>,
}

#[derive(Debug, Deserialize)]
struct JsonSample {
    t: f64,
    x: f64,
    y: f64,
    #[serde(default)]
    v: Option<f64>,
    #[serde(default)]
    heading: Option<f64>,
}

/// Relative spread of the raw timesteps above which the input is resampled
/// onto a uniform grid.
const UNIFORM_DT_TOL: f64 = 1e-6;

pub fn load_trajectory(
    path: &Path,
    format: TrajectoryFormat,
) -> Result<Trajectory<f64>, HarnessError> {
    let raws = match format {
        TrajectoryFormat::Csv => read_csv(path)?,
        TrajectoryFormat::Json => read_json(path)?,
    };
    build_trajectory(raws, path)
}

fn read_csv(path: &Path) -> Result<Vec<RawSample>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (t_col, x_col, y_col) = match (column("t"), column("x"), column("y")) {
        (Some(t), Some(x), Some(y)) => (t, x, y),
        _ => {
            return Err(HarnessError::Validation(format!(
                "{}: header must contain columns t, x, y (got {:?})",
                path.display(),
                headers.iter().collect::<Vec<_>>()
            )))
        }
    };
    let v_col = column("v");
    let heading_col = column("heading");

    let mut raws = Vec::new();
    for (row_index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = row_index + 2; // one-based, after the header line
        let cell = |col: usize, name: &str| -> Result<f64, HarnessError> {
            let raw = record.get(col).ok_or_else(|| {
                HarnessError::Validation(format!(
                    "{}: row {row} is missing column {name}",
                    path.display()
                ))
            })?;
            let value: f64 = raw.parse().map_err(|_| {
                HarnessError::Validation(format!(
                    "{}: row {row} column {name} is not a number (got {raw:?})",
                    path.display()
                ))
            })?;
            if !value.is_finite() {
                return Err(HarnessError::Validation(format!(
                    "{}: row {row} column {name} is not finite",
                    path.display()
                )));
            }
            Ok(value)
        };
        raws.push(RawSample {
            t: cell(t_col, "t")?,
            x: cell(x_col, "x")?,
            y: cell(y_col, "y")?,
            v: v_col.map(|c| cell(c, "v")).transpose()?,
            heading: heading_col.map(|c| cell(c, "heading")).transpose()?,
        });
    }
    Ok(raws)
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => HarnessError::Io { path: path.to_path_buf(), source },
            _ => unreachable!("is_io_error guarantees an Io kind"),
        }
    } else {
        HarnessError::Validation(format!("{}: {e}", path.display()))
    }
}

fn read_json(path: &Path) -> Result<Vec<RawSample>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    let parsed: JsonTrajectory = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
    parsed
        .samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            for (name, value) in [
                ("t", Some(s.t)),
                ("x", Some(s.x)),
                ("y", Some(s.y)),
                ("v", s.v),
                ("heading", s.heading),
            ] {
                if let Some(v) = value {
                    if !v.is_finite() {
                        return Err(HarnessError::Validation(format!(
                            "{}: sample {i} field {name} is not finite",
                            path.display()
                        )));
                    }
                }
            }
            Ok(RawSample { t: s.t, x: s.x, y: s.y, v: s.v, heading: s.heading })
        })
        .collect()
}

fn build_trajectory(mut raws: Vec<RawSample>, path: &Path) -> Result<Trajectory<f64>, HarnessError> {
    if raws.len() < 3 {
        return Err(HarnessError::Validation(format!(
            "{}: trajectory needs at least 3 rows (got {})",
            path.display(),
            raws.len()
        )));
    }
    for (i, pair) in raws.windows(2).enumerate() {
        if pair[1].t <= pair[0].t {
            return Err(HarnessError::Validation(format!(
                "{}: t must be strictly increasing (violated between rows {} and {})",
                path.display(),
                i + 2,
                i + 3
            )));
        }
    }

    // Resample onto a uniform grid when the recorded timesteps wander.
    let n = raws.len();
    let mean_dt = (raws[n - 1].t - raws[0].t) / (n - 1) as f64;
    let wanders = raws
        .windows(2)
        .any(|pair| ((pair[1].t - pair[0].t) - mean_dt).abs() > UNIFORM_DT_TOL * mean_dt.max(1.0));
    if wanders {
        raws = resample_uniform(&raws, mean_dt);
    }

    let dt = mean_dt;
    let speeds: Vec<f64> = match raws.iter().map(|r| r.v).collect::<Option<Vec<_>>>() {
        Some(explicit) => {
            if let Some(i) = explicit.iter().position(|&v| v < 0.0) {
                return Err(HarnessError::Validation(format!(
                    "{}: negative speed at row {}",
                    path.display(),
                    i + 2
                )));
            }
            explicit
        }
        None => derived_speeds(&raws, dt),
    };
    let headings: Vec<f64> = match raws.iter().map(|r| r.heading).collect::<Option<Vec<_>>>() {
        Some(explicit) => explicit,
        None => derived_headings(&raws),
    };

    let samples = raws
        .iter()
        .zip(speeds)
        .zip(headings)
        .map(|((r, speed), heading)| TrajectorySample {
            t: r.t,
            position: Point2::new(r.x, r.y),
            speed,
            heading,
        })
        .collect();
    Trajectory::new(samples)
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))
}

fn resample_uniform(raws: &[RawSample], dt: f64) -> Vec<RawSample> {
    let t0 = raws[0].t;
    let n = raws.len();
    let value_at = |select: &dyn Fn(&RawSample) -> f64, t: f64| -> f64 {
        // Locate the bracketing recorded samples.
        let mut hi = raws.len() - 1;
        for (i, r) in raws.iter().enumerate().skip(1) {
            if r.t >= t {
                hi = i;
                break;
            }
        }
        let lo = hi - 1;
        let span = raws[hi].t - raws[lo].t;
        let u = ((t - raws[lo].t) / span).clamp(0.0, 1.0);
        select(&raws[lo]) * (1.0 - u) + select(&raws[hi]) * u
    };
    let has_v = raws.iter().all(|r| r.v.is_some());
    let has_heading = raws.iter().all(|r| r.heading.is_some());
    // Interpolating wrapped angles across the seam corrupts them; unwrap
    // first when headings are present.
    let unwrapped: Vec<f64> = if has_heading {
        unwrap_sequence(raws.iter().map(|r| r.heading.unwrap_or(0.0)).collect())
    } else {
        Vec::new()
    };
    (0..n)
        .map(|k| {
            let t = if k == n - 1 { raws[n - 1].t } else { t0 + dt * k as f64 };
            RawSample {
                t,
                x: value_at(&|r: &RawSample| r.x, t),
                y: value_at(&|r: &RawSample| r.y, t),
                v: has_v.then(|| value_at(&|r: &RawSample| r.v.unwrap_or(0.0), t).max(0.0)),
                heading: has_heading.then(|| {
                    // Reuse the bracketing interpolation on the unwrapped copy.
                    let mut hi = raws.len() - 1;
                    for (i, r) in raws.iter().enumerate().skip(1) {
                        if r.t >= t {
                            hi = i;
                            break;
                        }
                    }
                    let lo = hi - 1;
                    let span = raws[hi].t - raws[lo].t;
                    let u = ((t - raws[lo].t) / span).clamp(0.0, 1.0);
                    unwrapped[lo] * (1.0 - u) + unwrapped[hi] * u
                }),
            }
        })
        .collect()
}

/// Central-difference speed of the positions; one-sided at the endpoints.
fn derived_speeds(raws: &[RawSample], dt: f64) -> Vec<f64> {
    let n = raws.len();
    (0..n)
        .map(|i| {
            let (a, b, span) = if i == 0 {
                (0, 1, dt)
            } else if i == n - 1 {
                (n - 2, n - 1, dt)
            } else {
                (i - 1, i + 1, 2.0 * dt)
            };
            let dx = raws[b].x - raws[a].x;
            let dy = raws[b].y - raws[a].y;
            dx.hypot(dy) / span
        })
        .collect()
}

/// Direction of travel from central position differences, carried through
/// stationary stretches, then unwrapped along the trajectory.
fn derived_headings(raws: &[RawSample]) -> Vec<f64> {
    let n = raws.len();
    let mut headings: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            let dx = raws[b].x - raws[a].x;
            let dy = raws[b].y - raws[a].y;
            (dx.hypot(dy) > 1e-12).then(|| dy.atan2(dx))
        })
        .collect();
    // Stationary samples inherit the previous direction (or the next one at
    // the start); an entirely stationary file reads as heading zero.
    let mut last = headings.iter().flatten().next().copied().unwrap_or(0.0);
    for h in headings.iter_mut() {
        match h {
            Some(value) => last = *value,
            None => *h = Some(last),
        }
    }
    unwrap_sequence(headings.into_iter().map(|h| h.unwrap_or(0.0)).collect())
}

/// Removes +-2 pi jumps so consecutive headings differ by at most half a
/// turn.
fn unwrap_sequence(mut headings: Vec<f64>) -> Vec<f64> {
    for i in 1..headings.len() {
        let step = wrap_angle(headings[i] - headings[i - 1]);
        headings[i] = headings[i - 1] + step;
    }
    headings
}

/// Writes a trajectory as `t,x,y,v,heading` CSV.
pub fn write_trajectory_csv(traj: &Trajectory<f64>, path: &Path) -> Result<(), HarnessError> {
    let mut out = String::from("t,x,y,v,heading\n");
    for s in traj.samples() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(s.t),
            fmt(s.position.x),
            fmt(s.position.y),
            fmt(s.speed),
            fmt(s.heading)
        ));
    }
    std::fs::write(path, out).map_err(HarnessError::io(path))
}

/// Fixed float formatting shared by every emitted file: round to 12
/// significant digits, then print the shortest representation that
/// round-trips to the rounded value.
pub fn fmt(value: f64) -> String {
    format!("{}", round_sig12(value))
}

/// Rounds to 12 significant digits. Emitted reports pass every float through
/// this so repeated runs produce byte-identical files.
pub fn round_sig12(value: f64) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{value:.11e}").parse().expect("scientific notation round-trip")
}
