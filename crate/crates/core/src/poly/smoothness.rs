use serde::{Deserialize, Serialize};

use super::Interval;
use crate::numeric::log_space;

/// Step weight for the weighted modulus of smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Unit,
    /// `√(1 − x²)`, the Ditzian–Totik weight on `[-1, 1]`.
    SqrtSemicircle,
}

impl Weight {
    fn at(self, x: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::SqrtSemicircle => (1.0 - x * x).max(0.0).sqrt(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Centred `L`-th difference `Σ_m (−1)^m C(L,m) f(x + (L/2 − m)h)`, or 0
/// when the stencil `[x − Lh/2, x + Lh/2]` leaves `interval`.
///
/// The orientation is the usual one, `Δ¹_h f(x) = f(x + h/2) − f(x − h/2)`;
/// writing the sign as `(−1)^{L−m}` instead only flips the result by `(−1)^L`
/// and leaves every modulus of smoothness unchanged.
pub fn finite_difference<F: Fn(f64) -> f64>(
    f: F,
    order: usize,
    h: f64,
    x: f64,
    interval: Interval,
) -> f64 {
    let half = order as f64 * h / 2.0;
    if !interval.contains(x - half) || !interval.contains(x + half) {
        return 0.0;
    }
    (0..=order)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(order, m) * f(x + (order as f64 / 2.0 - m as f64) * h)
        })
        .sum()
}

const MODULUS_STEPS: usize = 64;
const MODULUS_POINTS: usize = 4096;

/// Grid estimate of `ω^L_φ(f, t; I) = sup_{h ≤ t} sup_x |Δ^L_{h·φ(x)} f(x)|`.
///
/// The supremum is taken over 64 log-spaced steps in `(0, t]` and 4096
/// uniform points of `I`, so the value is a lower estimate of the true
/// modulus. Used for diagnostics only.
pub fn modulus_of_smoothness<F: Fn(f64) -> f64>(
    f: F,
    order: usize,
    t: f64,
    interval: Interval,
    weight: Weight,
) -> f64 {
    let steps = log_space(t * 1e-4, t, MODULUS_STEPS);
    let mut best: f64 = 0.0;
    for i in 0..MODULUS_POINTS {
        let x = interval.lo() + interval.width() * i as f64 / (MODULUS_POINTS - 1) as f64;
        let w = weight.at(x);
        for &h in &steps {
            let d = finite_difference(&f, order, h * w, x, interval).abs();
            best = best.max(d);
        }
    }
    best
}
