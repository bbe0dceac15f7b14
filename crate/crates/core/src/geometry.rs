//! Euclidean balls: unit-ball constants, radius-`ε` volumes and the squared
//! distance predicate every pair counter shares.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Volume of a closed Euclidean ball of radius `epsilon` in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallVolume {
    pub d: usize,
    pub epsilon: f64,
    pub volume: f64,
}

/// Volume `π^{d/2} / Γ(d/2 + 1)` of the unit ball in `R^d`.
///
/// Uses the two-step recurrence `V_d = V_{d-2} · 2π / d` from `V_0 = 1`,
/// `V_1 = 2`, which is exact for the small dimensions this crate targets and
/// avoids a gamma function.
pub fn unit_ball_volume(d: usize) -> f64 {
    let (mut v, start) = if d.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

pub fn ball_volume(d: usize, epsilon: f64) -> Result<BallVolume> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("radius must be positive and finite, got {epsilon}")));
    }
    Ok(BallVolume {
        d,
        epsilon,
        volume: unit_ball_volume(d) * epsilon.powi(d as i32),
    })
}

/// Squared Euclidean distance, accumulated in coordinate order.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        acc += t * t;
    }
    acc
}

/// Closed-ball membership `|a - b| ≤ ε`, evaluated as `|a - b|² ≤ ε²`.
#[inline]
pub(crate) fn is_close(a: &[f64], b: &[f64], epsilon_sq: f64) -> bool {
    squared_distance(a, b) <= epsilon_sq
}
