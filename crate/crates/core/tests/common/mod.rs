//! Shared helpers for the integration suites: a tiny deterministic RNG,
//! seeded ellipse-pair generators, and the Monte Carlo area oracle.

#![allow(dead_code)]

use trajeval_core::geometry::{
    brute_force_distance, classify, normalized_delta, overlap_area, EllipseRelation, Point2,
    SafetyEllipse,
};

/// SplitMix64: portable, allocation-free, and more than random enough for
/// test-suite sampling. Integer arithmetic only, so every platform draws the
/// same sequence.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.unit() * (hi - lo)
    }
}

/// Random ellipse with axes in `[axis_lo, axis_hi]` (ordered so the major
/// axis comes first) and rotation in `(-pi, pi]`.
pub fn random_ellipse(
    rng: &mut SplitMix64,
    center: Point2<f64>,
    axis_lo: f64,
    axis_hi: f64,
) -> SafetyEllipse<f64> {
    let a = rng.range(axis_lo, axis_hi);
    let b = rng.range(axis_lo, axis_hi);
    let (major, minor) = if a >= b { (a, b) } else { (b, a) };
    let rotation = rng.range(-std::f64::consts::PI, std::f64::consts::PI);
    SafetyEllipse::new(center, major, minor, rotation).unwrap()
}

/// Separated pair drawn from the acceptance distribution: axes in
/// `[0.5, 15]` m, any rotation, verified separated with a gap of at least
/// ten percent of the larger semi-major axis.
pub fn separated_pair(rng: &mut SplitMix64) -> (SafetyEllipse<f64>, SafetyEllipse<f64>, f64) {
    loop {
        let e1 = random_ellipse(rng, Point2::new(0.0, 0.0), 0.5, 15.0);
        let direction = rng.range(-std::f64::consts::PI, std::f64::consts::PI);
        let spread = e1.semi_major_m();
        let e2_major = rng.range(0.5, 15.0);
        let distance = spread + e2_major + rng.range(0.0, 1.5) * spread.max(e2_major);
        let center = Point2::new(distance * direction.cos(), distance * direction.sin());
        let b = rng.range(0.5, e2_major);
        let e2 = SafetyEllipse::new(
            center,
            e2_major,
            b,
            rng.range(-std::f64::consts::PI, std::f64::consts::PI),
        )
        .unwrap();
        if classify(&e1, &e2, 64) != EllipseRelation::Separated {
            continue;
        }
        let gap = brute_force_distance(&e1, &e2, 64).unwrap();
        if gap >= 0.1 * e1.semi_major_m().max(e2.semi_major_m()) {
            return (e1, e2, gap);
        }
    }
}

/// Intersecting pair for the area oracle: comparable scales and substantial
/// overlap, so a 10^6-sample Monte Carlo estimate resolves the area within
/// the acceptance tolerance (its noise floor scales with the sampling box).
pub fn intersecting_pair(rng: &mut SplitMix64) -> (SafetyEllipse<f64>, SafetyEllipse<f64>) {
    loop {
        let e1 = random_ellipse(rng, Point2::new(0.0, 0.0), 0.5, 15.0);
        let scale = e1.semi_major_m();
        let direction = rng.range(-std::f64::consts::PI, std::f64::consts::PI);
        let distance = rng.range(0.0, 0.8) * scale;
        let center = Point2::new(distance * direction.cos(), distance * direction.sin());
        let lo = (scale * 0.3).max(0.5);
        let hi = (scale * 1.5).min(15.0);
        if lo >= hi {
            continue;
        }
        let e2 = random_ellipse(rng, center, lo, hi);
        if classify(&e1, &e2, 128) != EllipseRelation::Intersecting {
            continue;
        }
        let area = overlap_area(&e1, &e2, 128).unwrap();
        let (box_lo, box_hi) = sampling_box(&e1, &e2);
        let box_area = (box_hi.x - box_lo.x) * (box_hi.y - box_lo.y);
        if area >= 0.03 * box_area {
            return (e1, e2);
        }
    }
}

/// Axis-aligned sampling box covering the intersection region: the overlap
/// of the two ellipse bounding boxes.
pub fn sampling_box(
    e1: &SafetyEllipse<f64>,
    e2: &SafetyEllipse<f64>,
) -> (Point2<f64>, Point2<f64>) {
    let (lo1, hi1) = e1.bounding_box();
    let (lo2, hi2) = e2.bounding_box();
    (
        Point2::new(lo1.x.max(lo2.x), lo1.y.max(lo2.y)),
        Point2::new(hi1.x.min(hi2.x), hi1.y.min(hi2.y)),
    )
}

/// Monte Carlo overlap area: uniform samples over the sampling box, scaled
/// by the fraction landing inside both ellipses.
pub fn mc_overlap_area(
    e1: &SafetyEllipse<f64>,
    e2: &SafetyEllipse<f64>,
    samples: usize,
    rng: &mut SplitMix64,
) -> f64 {
    let (lo, hi) = sampling_box(e1, e2);
    let width = hi.x - lo.x;
    let height = hi.y - lo.y;
    if width <= 0.0 || height <= 0.0 {
        return 0.0;
    }
    let mut hits = 0usize;
    for _ in 0..samples {
        let p = Point2::new(lo.x + rng.unit() * width, lo.y + rng.unit() * height);
        if normalized_delta(e1, p).norm() <= 1.0 && normalized_delta(e2, p).norm() <= 1.0 {
            hits += 1;
        }
    }
    width * height * hits as f64 / samples as f64
}
