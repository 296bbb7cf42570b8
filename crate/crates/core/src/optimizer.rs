//! Seedable global-best particle swarm optimization over box constraints.
//!
//! Determinism is part of the contract: every random draw comes from a
//! ChaCha8 generator seeded with the configured seed, one independent stream
//! per particle (stream id = particle index + 1), so a result reproduces
//! bit-for-bit across runs and platforms, and the first `k` iterations of a
//! longer run match a shorter run exactly.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{InteractionSeries, Trajectory};
use crate::objective::{
    evaluate_candidate, objective_q, CriteriaReport, EvaluationContext, ManeuverCandidate,
    ObjectiveError,
};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("bounds must be finite with lo < hi (dimension {dim})")]
    InvalidBounds { dim: usize },
    #[error("invalid search space: {reason}")]
    InvalidSearchSpace { reason: String },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Swarm hyperparameters. The defaults are constriction-equivalent
/// constants; early stopping is disabled (`stall_iterations = 0`) so history
/// lengths stay reproducible unless a caller opts in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig<T> {
    pub swarm_size: usize,
    pub iterations: usize,
    /// Inertia weight on the previous velocity.
    pub inertia: T,
    /// Attraction toward the particle's own best.
    pub cognitive: T,
    /// Attraction toward the global best.
    pub social: T,
    /// Velocity limit as a fraction of each dimension's box width.
    pub velocity_clamp: T,
    pub seed: u64,
    /// Early-stop patience in iterations; 0 disables early stopping.
    pub stall_iterations: usize,
    /// Relative improvement below which an iteration counts as stalled.
    pub stall_tolerance: T,
}

impl<T: Real> Default for PsoConfig<T> {
    fn default() -> Self {
        Self {
            swarm_size: 40,
            iterations: 150,
            inertia: T::lit(0.729),
            cognitive: T::lit(1.49445),
            social: T::lit(1.49445),
            velocity_clamp: T::lit(0.5),
            seed: 42,
            stall_iterations: 0,
            stall_tolerance: T::lit(1e-6),
        }
    }
}

impl<T: Real> PsoConfig<T> {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        let mut problems = Vec::new();
        if self.swarm_size < 4 {
            problems.push(format!("swarm_size must be >= 4 (got {})", self.swarm_size));
        }
        if self.iterations < 1 {
            problems.push("iterations must be >= 1".to_string());
        }
        if !(self.inertia >= T::zero() && self.inertia <= T::lit(1.2)) {
            problems.push(format!("inertia must lie in [0, 1.2] (got {})", self.inertia));
        }
        if !(self.cognitive >= T::zero() && self.social >= T::zero()) {
            problems.push("cognitive and social factors must be non-negative".to_string());
        }
        if !(self.velocity_clamp > T::zero() && self.velocity_clamp <= T::one()) {
            problems.push(format!("velocity_clamp must lie in (0, 1] (got {})", self.velocity_clamp));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(OptimizerError::InvalidConfig { reason: problems.join("; ") })
        }
    }
}

/// Outcome of a raw swarm run over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult<T> {
    pub best_position: Vec<T>,
    pub best_value: T,
    /// Global-best objective after initialization and after each iteration;
    /// non-increasing by construction.
    pub history: Vec<T>,
    /// Total objective evaluations.
    pub evaluations: usize,
    pub stopped_early: bool,
}

/// Uniform draw in `[0, 1)` built from the top 53 bits of the stream, so the
/// sequence is identical for every platform and scalar type.
fn unit_uniform<T: Real>(rng: &mut ChaCha8Rng) -> T {
    let mantissa = rng.next_u64() >> 11;
    T::lit(mantissa as f64 * (1.0 / (1u64 << 53) as f64))
}

/// Non-finite objective values never become a best.
fn sanitize<T: Real>(value: T) -> T {
    if value.is_finite() {
        value
    } else {
        T::infinity()
    }
}

/// Minimizes `evaluate` over the box `bounds` with a global-best particle
/// swarm: velocities blend inertia, a cognitive pull toward each particle's
/// best, and a social pull toward the swarm best (updated synchronously
/// after each full sweep, in particle-index order); positions are clipped to
/// the box and velocities clamped to a fraction of its width.
pub fn pso_minimize<T: Real>(
    mut evaluate: impl FnMut(&[T]) -> T,
    bounds: &[(T, T)],
    cfg: &PsoConfig<T>,
) -> Result<PsoResult<T>, OptimizerError> {
    cfg.validate()?;
    if bounds.is_empty() {
        return Err(OptimizerError::InvalidSearchSpace { reason: "no dimensions".into() });
    }
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(OptimizerError::InvalidBounds { dim });
        }
    }
    let dims = bounds.len();
    let swarm = cfg.swarm_size;

    let mut rngs: Vec<ChaCha8Rng> = (0..swarm)
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(p as u64 + 1);
            rng
        })
        .collect();

    let mut positions: Vec<Vec<T>> = Vec::with_capacity(swarm);
    let mut velocities: Vec<Vec<T>> = vec![vec![T::zero(); dims]; swarm];
    for rng in rngs.iter_mut() {
        let position = bounds
            .iter()
            .map(|&(lo, hi)| lo + unit_uniform::<T>(rng) * (hi - lo))
            .collect();
        positions.push(position);
    }

    let mut evaluations = 0usize;
    let mut personal_best = positions.clone();
    let mut personal_best_value: Vec<T> = positions
        .iter()
        .map(|x| {
            evaluations += 1;
            sanitize(evaluate(x))
        })
        .collect();

    let (mut global_index, mut global_value) = lowest(&personal_best_value);
    let mut global_best = personal_best[global_index].clone();
    let mut history = Vec::with_capacity(cfg.iterations + 1);
    history.push(global_value);

    let clamp: Vec<T> = bounds.iter().map(|&(lo, hi)| cfg.velocity_clamp * (hi - lo)).collect();
    let mut stalled = 0usize;
    let mut stopped_early = false;

    for _ in 0..cfg.iterations {
        let previous_value = global_value;
        for p in 0..swarm {
            let rng = &mut rngs[p];
            for d in 0..dims {
                let r_cognitive = unit_uniform::<T>(rng);
                let r_social = unit_uniform::<T>(rng);
                let x = positions[p][d];
                let mut v = cfg.inertia * velocities[p][d]
                    + cfg.cognitive * r_cognitive * (personal_best[p][d] - x)
                    + cfg.social * r_social * (global_best[d] - x);
                v = v.max(-clamp[d]).min(clamp[d]);
                velocities[p][d] = v;
                positions[p][d] = (x + v).max(bounds[d].0).min(bounds[d].1);
            }
        }
        for p in 0..swarm {
            evaluations += 1;
            let value = sanitize(evaluate(&positions[p]));
            if value < personal_best_value[p] {
                personal_best_value[p] = value;
                personal_best[p].clone_from(&positions[p]);
            }
        }
        let (index, value) = lowest(&personal_best_value);
        if value < global_value {
            global_index = index;
            global_value = value;
            global_best.clone_from(&personal_best[global_index]);
        }
        history.push(global_value);

        if cfg.stall_iterations > 0 {
            let scale = previous_value.abs().max(T::one());
            let improved = (previous_value - global_value) > cfg.stall_tolerance * scale;
            stalled = if improved { 0 } else { stalled + 1 };
            if stalled >= cfg.stall_iterations {
                stopped_early = true;
                break;
            }
        }
    }

    Ok(PsoResult {
        best_position: global_best,
        best_value: global_value,
        history,
        evaluations,
        stopped_early,
    })
}

/// First index holding the smallest value.
fn lowest<T: Real>(values: &[T]) -> (usize, T) {
    let mut index = 0;
    let mut best = values[0];
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best {
            index = i;
            best = v;
        }
    }
    (index, best)
}

/// Result of a maneuver search: the best acceleration profile with its full
/// evaluation detail and the optimizer trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best_candidate: ManeuverCandidate<T>,
    pub best_q: T,
    pub best_report: CriteriaReport<T>,
    pub best_trajectory: Trajectory<T>,
    pub best_interaction: InteractionSeries<T>,
    pub history: Vec<T>,
    pub evaluations: usize,
    pub stopped_early: bool,
}

/// Searches the box `[a_min, a_max]^knot_count` of acceleration profiles for
/// the candidate minimizing the penalized objective in `ctx`.
pub fn optimize_maneuver<T: Real>(
    ctx: &EvaluationContext<T>,
    knot_count: usize,
    knot_dt: T,
    cfg: &PsoConfig<T>,
) -> Result<OptimizationResult<T>, OptimizerError> {
    if knot_count == 0 {
        return Err(OptimizerError::InvalidSearchSpace { reason: "no control intervals".into() });
    }
    if !(knot_dt > T::zero()) {
        return Err(OptimizerError::InvalidSearchSpace {
            reason: "control interval must be positive".into(),
        });
    }
    if ctx.sim_dt() > knot_dt * (T::one() + T::lit(1e-9)) {
        return Err(OptimizerError::InvalidSearchSpace {
            reason: "simulation timestep exceeds the control interval".into(),
        });
    }
    let limits = ctx.limits();
    let bounds = vec![(limits.a_min, limits.a_max); knot_count];
    let result = pso_minimize(
        |knots: &[T]| {
            let cand = ManeuverCandidate::new(knots.to_vec(), knot_dt)
                .expect("bounded knots form a valid candidate");
            objective_q(&cand, ctx).0
        },
        &bounds,
        cfg,
    )?;

    let best_candidate = ManeuverCandidate::new(result.best_position.clone(), knot_dt)?;
    let evaluation = evaluate_candidate(&best_candidate, ctx);
    debug_assert!(
        evaluation.q == result.best_value,
        "re-evaluation of the best candidate must reproduce its objective"
    );
    Ok(OptimizationResult {
        best_candidate,
        best_q: result.best_value,
        best_report: evaluation.report,
        best_trajectory: evaluation.trajectory,
        best_interaction: evaluation.interaction,
        history: result.history,
        evaluations: result.evaluations,
        stopped_early: result.stopped_early,
    })
}
