use serde::{Deserialize, Serialize};

use super::simplex::solve_lp;
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::poly::{cheb_basis, remez_best_approx, Interval};

/// Two discrete probability measures on a shared support whose first
/// `matched_orders` moments agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePair {
    pub support: Vec<f64>,
    pub w0: Vec<f64>,
    pub w1: Vec<f64>,
    pub matched_orders: usize,
    /// `E_{ν0}[φ] − E_{ν1}[φ]`.
    pub gap: f64,
    /// The value the gap is compared with: `2E_L` from the Remez solver,
    /// scaled like `gap`.
    pub reference_gap: Option<f64>,
    /// Largest `|Σ (w0 − w1) x^m|` over `m = 1..=matched_orders`.
    pub max_moment_residual: f64,
    pub warnings: Vec<String>,
}

impl MeasurePair {
    pub fn moment_difference(&self, m: i32) -> f64 {
        self.support
            .iter()
            .zip(self.w0.iter().zip(&self.w1))
            .map(|(&x, (&a, &b))| (a - b) * x.powi(m))
            .sum()
    }

    /// `|gap / reference_gap − 1|`, when a reference is available.
    pub fn gap_rel_error(&self) -> Option<f64> {
        self.reference_gap.filter(|&r| r > 1e-10).map(|r| (self.gap / r - 1.0).abs())
    }

    fn max_residual(&self) -> f64 {
        (1..=self.matched_orders as i32)
            .map(|m| self.moment_difference(m).abs())
            .fold(0.0, f64::max)
    }
}

/// Relative gap deviation above which a warning is attached.
pub const GAP_WARN_THRESHOLD: f64 = 0.05;

/// Chebyshev-spaced grid on `interval` with `size` points (made odd), both
/// endpoints and the exact midpoint.
pub fn chebyshev_grid(interval: Interval, size: usize) -> Vec<f64> {
    let size = size | 1;
    let half = (size - 1) / 2;
    (0..size)
        .map(|i| {
            if i == 0 {
                interval.lo()
            } else if i == size - 1 {
                interval.hi()
            } else if i == half {
                0.5 * (interval.lo() + interval.hi())
            } else {
                let t = -(std::f64::consts::PI * i as f64 / (size - 1) as f64).cos();
                interval.from_unit(t)
            }
        })
        .collect()
}

/// LP core shared by [`moment_matched_pair`] and [`tilted_pair`]: maximize
/// `Σ (w0 − w1) f(x)` over weights on `grid` with equal Chebyshev moments of
/// orders `1..=degree`.
fn solve_moment_lp<F: Fn(f64) -> f64>(
    f: F,
    degree: usize,
    interval: Interval,
    grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let g = grid.len();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i, p: grid[i] });
    }
    let mut c = values.clone();
    c.extend(values.iter().map(|v| -v));
    let mut a = Vec::with_capacity(degree + 2);
    let mut row0 = vec![1.0; g];
    row0.extend(std::iter::repeat_n(0.0, g));
    let mut row1 = vec![0.0; g];
    row1.extend(std::iter::repeat_n(1.0, g));
    a.push(row0);
    a.push(row1);
    let basis: Vec<Vec<f64>> = grid.iter().map(|&x| cheb_basis(interval.to_unit(x), degree + 1)).collect();
    for m in 1..=degree {
        let mut row: Vec<f64> = basis.iter().map(|b| b[m]).collect();
        row.extend(basis.iter().map(|b| -b[m]));
        a.push(row);
    }
    let mut b = vec![1.0, 1.0];
    b.extend(std::iter::repeat_n(0.0, degree));
    let sol = solve_lp(&c, &a, &b).map_err(|e| match e {
        Error::Infeasible => Error::Numerical("moment-matching LP reported infeasible".into()),
        other => other,
    })?;
    let w0 = sol.x[..g].to_vec();
    let w1 = sol.x[g..].to_vec();
    let gap = w0.iter().zip(&w1).zip(&values).map(|((a, b), v)| (a - b) * v).sum();
    Ok((w0, w1, gap))
}

fn check_grid(degree: usize, grid_size: usize) -> Result<()> {
    if degree == 0 {
        return Err(Error::InvalidInput("moment matching needs L ≥ 1".into()));
    }
    if grid_size < 50 * (degree + 2) {
        return Err(Error::InvalidInput(format!(
            "grid size {grid_size} is below 50·(L + 2) = {}",
            50 * (degree + 2)
        )));
    }
    Ok(())
}

/// Pair of measures on `interval` with matching moments of orders `1..=L`
/// and the largest achievable gap in `E[φ]` on a Chebyshev grid.
///
/// By duality the gap can never exceed `2E_L(φ, interval)`; the grid gets
/// within a fraction of a percent of it. The Remez value is stored as
/// `reference_gap` and a warning is attached when the two differ by more
/// than 5%.
pub fn moment_matched_pair(
    phi: &Functional,
    degree: usize,
    interval: Interval,
    grid_size: usize,
) -> Result<MeasurePair> {
    check_grid(degree, grid_size)?;
    let f = |x: f64| phi.eval(x);
    let grid = chebyshev_grid(interval, grid_size);
    let (w0, w1, gap) = solve_moment_lp(f, degree, interval, &grid)?;
    let mut warnings = Vec::new();
    let reference_gap = match remez_best_approx(f, degree, interval) {
        Ok(r) => Some(2.0 * r.sup_error),
        Err(e) => {
            warnings.push(format!("no Remez reference for the gap: {e}"));
            None
        }
    };
    let mut pair = MeasurePair {
        support: grid,
        w0,
        w1,
        matched_orders: degree,
        gap: gap.max(0.0),
        reference_gap,
        max_moment_residual: 0.0,
        warnings,
    };
    finish(&mut pair);
    Ok(pair)
}

/// Measures with mean `γ` built from a moment-matched pair for
/// `φ*(x) = φ(x)/x` on `[γ, γ/η]`.
///
/// The pair `ρ0, ρ1` is reweighted by `γ/u` and the remaining mass is put at
/// 0, so both measures have first moment `γ`, moments `2..=L+1` agree and
/// the gap is `γ` times the gap of `ρ` (about `2γE_L(φ*, [γ, γ/η])`).
/// Requires `0 < γ ≤ η < 1` and `φ(0) = 0`.
pub fn tilted_pair(
    phi: &Functional,
    degree: usize,
    gamma: f64,
    eta: f64,
    grid_size: usize,
) -> Result<MeasurePair> {
    if !(gamma > 0.0 && gamma <= eta && eta < 1.0) {
        return Err(Error::InvalidInput(format!("need 0 < γ ≤ η < 1 (γ = {gamma}, η = {eta})")));
    }
    if phi.eval(0.0).abs() > 1e-14 {
        return Err(Error::InvalidInput(format!("tilting needs φ(0) = 0, got {}", phi.eval(0.0))));
    }
    check_grid(degree, grid_size)?;
    let interval = Interval::new(gamma, gamma / eta)?;
    let star = |x: f64| phi.eval(x) / x;
    let grid = chebyshev_grid(interval, grid_size);
    let (r0, r1, rho_gap) = solve_moment_lp(star, degree, interval, &grid)?;
    let mut warnings = Vec::new();
    let reference_gap = match remez_best_approx(star, degree, interval) {
        Ok(r) => Some(2.0 * gamma * r.sup_error),
        Err(e) => {
            warnings.push(format!("no Remez reference for the gap: {e}"));
            None
        }
    };
    let tilt = |r: &[f64]| {
        let mut w: Vec<f64> = r.iter().zip(&grid).map(|(&ri, &u)| ri * gamma / u).collect();
        let rest = (1.0 - w.iter().sum::<f64>()).max(0.0);
        w.insert(0, rest);
        w
    };
    let mut support = grid.clone();
    support.insert(0, 0.0);
    let mut pair = MeasurePair {
        support,
        w0: tilt(&r0),
        w1: tilt(&r1),
        matched_orders: degree + 1,
        gap: (gamma * rho_gap).max(0.0),
        reference_gap,
        max_moment_residual: 0.0,
        warnings,
    };
    finish(&mut pair);
    Ok(pair)
}

fn finish(pair: &mut MeasurePair) {
    pair.max_moment_residual = pair.max_residual();
    if pair.max_moment_residual > 1e-8 {
        pair.warnings.push(format!("moment residual {:.3e} exceeds 1e-8", pair.max_moment_residual));
    }
    if let Some(rel) = pair.gap_rel_error() {
        if rel > GAP_WARN_THRESHOLD {
            pair.warnings.push(format!(
                "LP gap {:.6e} differs from 2E_L = {:.6e} by {:.1}%",
                pair.gap,
                pair.reference_gap.unwrap_or(f64::NAN),
                100.0 * rel
            ));
        }
    }
}
