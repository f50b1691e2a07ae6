use serde::{Deserialize, Serialize};

use super::priors::MeasurePair;
use crate::error::{Error, Result};
use crate::numeric::{ksum, ln_factorials};

/// Total variation between the Poisson mixtures `E[Poi(nU/k)]`, `U ~ ν0`
/// and `U ~ ν1`, and the analytic bound for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonTv {
    pub numeric_tv: f64,
    /// `(2eM/L)^L`, or `+∞` when `L ≤ 2eM`.
    pub bound: f64,
    pub max_rate: f64,
    pub trunc: usize,
    /// Poisson mass above `trunc` at the largest rate.
    pub tail_mass: f64,
}

/// Largest tolerated Poisson tail mass beyond the truncation point.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// `max rate + 12·√(max rate) + 50`.
pub fn default_truncation(max_rate: f64) -> usize {
    (max_rate + 12.0 * max_rate.sqrt() + 50.0).ceil() as usize
}

/// `(2eM/L)^L` when `L > 2eM`, else `+∞`.
pub fn mixture_tv_bound(max_rate: f64, orders: usize) -> f64 {
    let l = orders as f64;
    let ratio = 2.0 * std::f64::consts::E * max_rate / l;
    if ratio < 1.0 {
        ratio.powf(l)
    } else {
        f64::INFINITY
    }
}

fn ln_pmf(j: usize, rate: f64, lnf: &[f64]) -> f64 {
    if rate == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -rate + j as f64 * rate.ln() - lnf[j]
}

/// `P(Poi(rate) > trunc)`, summed directly over the upper tail.
fn upper_tail(rate: f64, trunc: usize) -> f64 {
    if rate == 0.0 {
        return 0.0;
    }
    let mut j = trunc + 1;
    let mut ln_term = -rate + j as f64 * rate.ln() - ln_factorials(j)[j];
    let mut total = 0.0;
    loop {
        let term = ln_term.exp();
        total += term;
        if (j as f64) > rate && term <= total * 1e-17 {
            return total;
        }
        j += 1;
        ln_term += rate.ln() - (j as f64).ln();
    }
}

/// TV between the Poisson mixtures of `pair` at rates `n·x/k`, computed on
/// `0..=trunc` (default [`default_truncation`]). Fails when the tail beyond
/// the truncation point exceeds [`TAIL_TOLERANCE`].
pub fn poisson_mixture_tv(pair: &MeasurePair, n: f64, k: f64, trunc: Option<usize>) -> Result<PoissonTv> {
    if !(n > 0.0 && k > 0.0) {
        return Err(Error::InvalidInput(format!("n = {n} and k = {k} must be positive")));
    }
    let rates: Vec<f64> = pair.support.iter().map(|&x| n * x / k).collect();
    let max_rate = rates.iter().copied().fold(0.0, f64::max);
    let trunc = trunc.unwrap_or_else(|| default_truncation(max_rate));
    let tail_mass = upper_tail(max_rate, trunc);
    if tail_mass >= TAIL_TOLERANCE {
        return Err(Error::Truncation { trunc, tail: tail_mass, rate: max_rate });
    }
    let diff: Vec<f64> = pair.w0.iter().zip(&pair.w1).map(|(a, b)| a - b).collect();
    let lnf = ln_factorials(trunc);
    let numeric_tv = if diff.iter().all(|&d| d == 0.0) {
        0.0
    } else {
        let per_count = (0..=trunc).map(|j| {
            ksum(
                diff.iter()
                    .zip(&rates)
                    .filter(|(d, _)| **d != 0.0)
                    .map(|(&d, &r)| d * ln_pmf(j, r, &lnf).exp()),
            )
            .abs()
        });
        (0.5 * ksum(per_count)).clamp(0.0, 1.0)
    };
    Ok(PoissonTv {
        numeric_tv,
        bound: mixture_tv_bound(max_rate, pair.matched_orders),
        max_rate,
        trunc,
        tail_mass,
    })
}
