//! `trajeval`: evaluate and optimize vehicle maneuvers against a scenario.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trajeval_cli::report::{emit_report, ReportFormat};
use trajeval_cli::run::{
    compare_trajectories, evaluate_scenario, run_optimize, sweep_beta, sweep_psi,
    OptimizationSummary,
};
use trajeval_cli::scenario::load_scenario;
use trajeval_cli::trajio::{load_trajectory, TrajectoryFormat};
use trajeval_cli::HarnessError;

#[derive(Parser)]
#[command(
    name = "trajeval",
    version,
    about = "Trajectory evaluation and maneuver optimization with elliptical safety zones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Score a recorded ego trajectory against the scenario opponent.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Report format: json (default) or the csv bundle.
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Search for the best maneuver with the particle swarm optimizer.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's optimizer seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the constant-speed baseline report under baseline/.
        #[arg(long)]
        baseline: bool,
    },
    /// Evaluate several trajectories and rank them by objective.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, num_args = 1..)]
        trajectory: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit shaping-function curves over a grid of decay exponents.
    SweepBeta {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 5.0)]
        p: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = -10.0)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0)]
        x_max: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
    },
    /// Emit penalty-function curves over grids of M and p.
    SweepPsi {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = -1.0)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0)]
        x_max: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

fn scenario_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Evaluate { scenario, trajectory, out, format } => {
            let config = load_scenario(&scenario)?;
            let ego = load_trajectory(&trajectory, TrajectoryFormat::from_path(&trajectory))?;
            let report = evaluate_scenario(&config, &scenario_dir(&scenario), &ego)?;
            let format = match format {
                OutputFormat::Json => ReportFormat::Json,
                OutputFormat::Csv => ReportFormat::CsvBundle,
            };
            let paths = emit_report(&report, format, &out)?;
            for path in &paths {
                println!("wrote {}", path.display());
            }
            if report.flags.unreached_goal {
                eprintln!("goal not reached within the trajectory; travel time is a surrogate");
                return Ok(ExitCode::from(4));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize { scenario, out, seed, baseline } => {
            let config = load_scenario(&scenario)?;
            let outcome = run_optimize(&config, &scenario_dir(&scenario), seed)?;
            std::fs::create_dir_all(&out).map_err(HarnessError::io(&out))?;

            let mut paths = emit_report(&outcome.best_report, ReportFormat::Json, &out)?;
            paths.extend(emit_report(&outcome.best_report, ReportFormat::CsvBundle, &out)?);

            let summary_path = out.join("optimization.json");
            let effective_seed = seed.unwrap_or(config.pso.seed);
            trajeval_cli::report::write_json(
                &OptimizationSummary::new(&outcome.result, effective_seed),
                &summary_path,
            )?;
            paths.push(summary_path);

            if baseline {
                let baseline_dir = out.join("baseline");
                paths.extend(emit_report(&outcome.baseline_report, ReportFormat::Json, &baseline_dir)?);
                paths.extend(emit_report(
                    &outcome.baseline_report,
                    ReportFormat::CsvBundle,
                    &baseline_dir,
                )?);
            }
            for path in &paths {
                println!("wrote {}", path.display());
            }
            println!(
                "best q = {} (evaluations: {})",
                outcome.best_report.criteria.q, outcome.result.evaluations
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { scenario, trajectory, out } => {
            let config = load_scenario(&scenario)?;
            let mut loaded = Vec::with_capacity(trajectory.len());
            for path in trajectory {
                let traj = load_trajectory(&path, TrajectoryFormat::from_path(&path))?;
                loaded.push((path, traj));
            }
            let entries = compare_trajectories(&config, &scenario_dir(&scenario), &loaded)?;
            let path = trajeval_cli::run::write_comparison(&entries, &out)?;
            println!("wrote {}", path.display());
            for entry in &entries {
                println!(
                    "#{} q={:<12} t_global={:<8} max_int={:<10} {}",
                    entry.rank,
                    entry.q,
                    entry.t_global,
                    entry.max_int,
                    entry.trajectory.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepBeta { m, p, alpha, out, x_min, x_max, steps } => {
            let path = sweep_beta(m, p, &alpha, x_min, x_max, steps, &out)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepPsi { m, p, out, x_min, x_max, steps } => {
            let path = sweep_psi(&m, &p, x_min, x_max, steps, &out)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
