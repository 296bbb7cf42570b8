//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured figures (visible with `cargo test -- --nocapture`).

mod common;

use std::time::Instant;

use common::{intersecting_pair, mc_overlap_area, separated_pair, SplitMix64};
use trajeval_core::geometry::{overlap_area, min_gap, Point2, SafetyEllipse};
use trajeval_core::metrics::{
    lateral_jerk, longitudinal_jerk, shaping_beta, ShapingParams, Trajectory, TrajectorySample,
};
use trajeval_core::objective::penalty_psi;
use trajeval_core::optimizer::{pso_minimize, PsoConfig};

/// Criterion 1: over 1000 seeded random separated pairs, the linear-cost gap
/// matches the exhaustive pairwise oracle within 2% at N = 64, in under 10 s.
#[test]
fn criterion_1_gap_matches_brute_force_oracle() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(42);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for index in 0..1000 {
        let (e1, e2, brute) = separated_pair(&mut rng);
        let fast = min_gap(&e1, &e2, 64).unwrap();
        let relative = (fast - brute).abs() / brute;
        worst = worst.max(relative);
        if relative > 0.02 {
            failures.push((index, e1, e2, fast, brute, relative));
        }
    }
    let elapsed = started.elapsed();
    for (index, e1, e2, fast, brute, relative) in &failures {
        eprintln!(
            "criterion 1 failing pair {index}: {e1:?} vs {e2:?} -> min_gap {fast}, brute {brute}, relative {relative}"
        );
    }
    assert!(failures.is_empty(), "{} of 1000 pairs exceeded 2%", failures.len());
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "acceptance criterion 1 (gap oracle suite): PASS - worst relative error {worst:.5}, {elapsed:?}"
    );
}

/// Criterion 2: over 500 seeded random intersecting pairs, the Shoelace
/// overlap area at N = 128 agrees with a one-million-sample Monte Carlo
/// oracle within 2% relative (0.01 m^2 absolute for slivers); the
/// concentric-identical case reproduces the inscribed-polygon closed form.
/// Runtime under 60 s.
#[test]
fn criterion_2_area_matches_monte_carlo_oracle() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(42);
    let mut worst: f64 = 0.0;
    for index in 0..500 {
        let (e1, e2) = intersecting_pair(&mut rng);
        let polygon = overlap_area(&e1, &e2, 128).unwrap();
        let oracle = mc_overlap_area(&e1, &e2, 1_000_000, &mut rng);
        let error = (polygon - oracle).abs();
        let tolerance = (0.02 * oracle).max(0.01);
        assert!(
            error <= tolerance,
            "pair {index}: polygon {polygon} vs oracle {oracle} (error {error}, tol {tolerance})\n{e1:?}\n{e2:?}"
        );
        if oracle > 0.0 {
            worst = worst.max(error / oracle);
        }
    }

    // Concentric identical ellipses: the collected polygon is the inscribed
    // n-gon, whose area has a closed form.
    for (rx, ry) in [(1.0, 1.0), (7.5, 2.25), (15.0, 0.5)] {
        let e: SafetyEllipse<f64> =
            SafetyEllipse::new(Point2::new(3.0, -4.0), rx, ry, 0.6).unwrap();
        let n = 128usize;
        let area = overlap_area(&e, &e, n).unwrap();
        let closed_form = (n as f64 / 2.0) * (2.0 * std::f64::consts::PI / n as f64).sin() * rx * ry;
        assert!(
            (area - closed_form).abs() < 1e-9,
            "rx {rx} ry {ry}: area {area} vs closed form {closed_form}"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "acceptance criterion 2 (area oracle suite): PASS - worst relative error {worst:.5}, {elapsed:?}"
    );
}

/// Criterion 3: unit circles one radius apart give the analytic lens area
/// within 2% at N = 128.
#[test]
fn criterion_3_circle_circle_lens() {
    let a: SafetyEllipse<f64> = SafetyEllipse::new(Point2::new(0.0, 0.0), 1.0, 1.0, 0.0).unwrap();
    let b = SafetyEllipse::new(Point2::new(1.0, 0.0), 1.0, 1.0, 0.0).unwrap();
    let area = overlap_area(&a, &b, 128).unwrap();
    let lens = 2.0 * (0.5f64).acos() - (3.0f64).sqrt() / 2.0;
    let relative = (area - lens).abs() / lens;
    assert!(relative < 0.02, "area {area} vs lens {lens} ({relative:.4} relative)");
    println!(
        "acceptance criterion 3 (circle-circle lens): PASS - area {area:.6} vs {lens:.6} ({relative:.4} relative)"
    );
}

fn cubic_speed_quadratic_heading(dt: f64) -> Trajectory<f64> {
    let len = (2.0 / dt) as usize + 1;
    let samples = (0..len)
        .map(|i| {
            let t = i as f64 * dt;
            TrajectorySample {
                t,
                position: Point2::new(0.0, 0.0),
                speed: t * t * t,
                heading: t * t,
            }
        })
        .collect();
    Trajectory::new(samples).unwrap()
}

/// Criterion 4: second-order convergence of the jerk operators on the cubic
/// speed / quadratic heading profile, and exact reproduction of polynomials
/// of degree at most two.
#[test]
fn criterion_4_jerk_convergence() {
    // Analytic values at t = 1: v = t^3, heading = t^2.
    // j_long = v'' - v * (heading')^2 = 6t - t^3 * (2t)^2
    // j_lat  = 2 v' heading' + v heading'' = 12 t^3 + 2 t^3
    let exact_long = |t: f64| 6.0 * t - t.powi(3) * (2.0 * t).powi(2);
    let exact_lat = |t: f64| 14.0 * t.powi(3);

    let mut lat_errors = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let traj = cubic_speed_quadratic_heading(dt);
        let i = (1.0 / dt).round() as usize;
        let lat = lateral_jerk(&traj, i).unwrap();
        lat_errors.push((lat - exact_lat(1.0)).abs());
        // The central differences are exact on cubic speed and quadratic
        // heading, so the longitudinal error sits at rounding level at
        // every step size.
        let long = longitudinal_jerk(&traj, i).unwrap();
        assert!((long - exact_long(1.0)).abs() < 1e-9, "dt {dt}: long {long}");
    }
    let mut ratios = Vec::new();
    for pair in lat_errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}, errors {lat_errors:?}");
        ratios.push(ratio);
    }

    // Polynomials of degree <= 2 in speed and heading reproduce exactly
    // (binary-exact step size so division by dt^2 does not amplify rounding).
    let dt = 0.25;
    let quadratic = {
        let samples = (0..81)
            .map(|i| {
                let t = i as f64 * dt;
                TrajectorySample {
                    t,
                    position: Point2::new(0.0, 0.0),
                    speed: 2.0 + 0.5 * t + 0.25 * t * t,
                    heading: 0.1 + 0.2 * t,
                }
            })
            .collect();
        Trajectory::new(samples).unwrap()
    };
    let exact_j = |t: f64| {
        let v = 2.0 + 0.5 * t + 0.25 * t * t;
        0.5 - v * 0.2 * 0.2
    };
    for i in 1..quadratic.len() - 1 {
        let t = i as f64 * dt;
        let long = longitudinal_jerk(&quadratic, i).unwrap();
        assert!((long - exact_j(t)).abs() <= 1e-12, "i {i}: {long} vs {}", exact_j(t));
        // Lateral: 2 v' heading' + v * 0 with both factors exactly
        // represented by the central differences.
        let lat = lateral_jerk(&quadratic, i).unwrap();
        let exact_lat_q = 2.0 * (0.5 + 0.5 * t) * 0.2;
        assert!((lat - exact_lat_q).abs() <= 1e-12, "i {i}: {lat} vs {exact_lat_q}");
    }
    println!("acceptance criterion 4 (jerk convergence): PASS - lateral error ratios {ratios:?}");
}

/// Criterion 5: shaping and penalty function properties over the reference
/// parameter grid.
#[test]
fn criterion_5_shaping_and_penalty_properties() {
    for alpha in [0.2f64, 0.3, 0.5, 0.9, 8.0] {
        let sp = ShapingParams::new(1.0, 5.0, alpha).unwrap();
        assert_eq!(shaping_beta(0.0, &sp), 1.0, "beta(0) = M at alpha {alpha}");
        let h = 1e-6;
        let slope = (shaping_beta(h, &sp) - shaping_beta(-h, &sp)) / (2.0 * h);
        assert!((slope - 5.0).abs() < 1e-4, "alpha {alpha}: slope {slope}");
    }
    let heavy_decay = ShapingParams::new(1.0, 5.0, 8.0).unwrap();
    let tail = shaping_beta(-100.0, &heavy_decay);
    assert!(tail < 1e-3, "beta(-100) = {tail}");

    // Penalty: zero on the feasible side, slope p at the origin, midpoint
    // convexity on a sampled grid.
    for x in [-10.0f64, -1.0, -1e-9, 0.0] {
        assert_eq!(penalty_psi(x, 1.0, 5.0), 0.0);
    }
    let h = 1e-7f64;
    let right_slope = penalty_psi(h, 1.0, 5.0) / h;
    assert!((right_slope - 5.0).abs() < 1e-4, "psi'(0+) = {right_slope}");
    let grid: Vec<f64> = (-50..=150).map(|i| i as f64 * 0.02).collect();
    for pair in grid.windows(2) {
        let mid = penalty_psi((pair[0] + pair[1]) / 2.0, 1.0, 5.0);
        let chord = (penalty_psi(pair[0], 1.0, 5.0) + penalty_psi(pair[1], 1.0, 5.0)) / 2.0;
        assert!(mid <= chord + 1e-12);
    }
    println!("acceptance criterion 5 (shaping/penalty properties): PASS");
}

/// Criterion 7: optimizer sanity on the 10-D sphere plus the determinism and
/// monotonicity contracts.
#[test]
fn criterion_7_optimizer_sanity() {
    let sphere = |x: &[f64]| -> f64 { x.iter().map(|v| v * v).sum() };
    let bounds = vec![(-5.0, 5.0); 10];
    let cfg = PsoConfig { swarm_size: 30, iterations: 200, ..PsoConfig::default() };
    let first = pso_minimize(sphere, &bounds, &cfg).unwrap();
    assert!(first.best_value < 1e-3, "sphere best {}", first.best_value);

    let second = pso_minimize(sphere, &bounds, &cfg).unwrap();
    assert_eq!(first.history.len(), second.history.len());
    for (a, b) in first.history.iter().zip(&second.history) {
        assert_eq!(a.to_bits(), b.to_bits(), "histories diverge");
    }

    for seed in [42, 7, 2024] {
        let run = pso_minimize(sphere, &bounds, &PsoConfig { seed, ..cfg }).unwrap();
        for pair in run.history.windows(2) {
            assert!(pair[1] <= pair[0], "history increased (seed {seed})");
        }
    }
    println!(
        "acceptance criterion 7 (optimizer sanity): PASS - sphere best {:.2e}",
        first.best_value
    );
}
