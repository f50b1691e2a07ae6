//! Maximizing separable sums `Σ f(p_i)` over the probability simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_max;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexMax {
    pub value: f64,
    /// The maximizing probability vector, sorted in decreasing order.
    pub point: Vec<f64>,
}

const SCAN: usize = 96;

/// Maximize `Σ_{i ≤ k} f(p_i)` over the simplex, with `f(0) = 0`.
///
/// At a maximizer every positive coordinate satisfies `f'(p_i) = μ`. When
/// `f'` takes each value at most twice (true for `p^α` and `p ln² p`) the
/// positive coordinates take at most two distinct values, so the search runs
/// over `m` positive entries, `j` of them equal to `a ≤ 1/m` and the rest to
/// `(1 − ja)/(m − j)`, maximizing over `a` by a scan plus golden section.
pub fn maximize_on_simplex<F: Fn(f64) -> f64>(f: F, k: usize) -> Result<SimplexMax> {
    if k == 0 {
        return Err(Error::InvalidInput("simplex dimension must be positive".into()));
    }
    let mut best = SimplexMax { value: f(1.0), point: point(1, 1.0, 0, 0.0, k) };
    for m in 1..=k {
        let u = 1.0 / m as f64;
        let uniform = m as f64 * f(u);
        if uniform > best.value {
            best = SimplexMax { value: uniform, point: point(m, u, 0, 0.0, k) };
        }
        for j in 1..m {
            let g = |a: f64| j as f64 * f(a) + (m - j) as f64 * f((1.0 - j as f64 * a) / (m - j) as f64);
            let (mut arg, mut val) = (u, uniform);
            for s in 1..SCAN {
                let a = u * s as f64 / SCAN as f64;
                let v = g(a);
                if v > val {
                    arg = a;
                    val = v;
                }
            }
            let step = u / SCAN as f64;
            let (a, v) = golden_max(g, (arg - step).max(0.0), (arg + step).min(u), 1e-15);
            if v > best.value {
                let b = (1.0 - j as f64 * a) / (m - j) as f64;
                best = SimplexMax { value: v, point: point(m - j, b, j, a, k) };
            }
        }
    }
    Ok(best)
}

fn point(count_b: usize, b: f64, count_a: usize, a: f64, k: usize) -> Vec<f64> {
    let mut v = vec![b; count_b];
    v.extend(std::iter::repeat_n(a, count_a));
    v.resize(k, 0.0);
    v.sort_by(|x, y| y.total_cmp(x));
    v
}
