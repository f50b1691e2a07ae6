use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seed::rep_rng;
use crate::error::{Error, Result};
use crate::estimators::{sample_histogram, Estimator, SamplingModel};
use crate::functional::{additive_functional, Functional, ProbabilityVector};
use crate::numeric::ksum;

/// Smallest number of repetitions [`monte_carlo_risk`] accepts.
pub const MIN_REPS: usize = 100;

/// Where the random streams of a Monte Carlo run come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStream {
    pub master_seed: u64,
    /// Mixed into every repetition seed, normally the estimator id.
    pub stream: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub estimator: String,
    pub n: u64,
    pub k: usize,
    pub reps: usize,
    pub theta_true: f64,
    pub estimates: Vec<f64>,
    pub bias: f64,
    /// Population variance `(1/R) Σ (θ̂ − mean)²`.
    pub variance: f64,
    pub mse: f64,
    /// Jackknife standard errors.
    pub bias_se: f64,
    pub variance_se: f64,
    pub mse_se: f64,
    /// Distinct warnings raised by the estimator across repetitions.
    pub warnings: Vec<String>,
}

fn mean(v: &[f64]) -> f64 {
    ksum(v.iter().copied()) / v.len() as f64
}

/// Jackknife standard error of the mean: `sd/√R` with the `R − 1` divisor.
pub fn jackknife_se_mean(v: &[f64]) -> f64 {
    let r = v.len() as f64;
    let m = mean(v);
    let ss = ksum(v.iter().map(|x| (x - m).powi(2)));
    (ss / (r - 1.0) / r).sqrt()
}

/// Jackknife standard error of the population variance, using closed-form
/// leave-one-out values on centred data.
pub fn jackknife_se_variance(v: &[f64]) -> f64 {
    let r = v.len() as f64;
    let m = mean(v);
    let c: Vec<f64> = v.iter().map(|x| x - m).collect();
    let s1 = ksum(c.iter().copied());
    let s2 = ksum(c.iter().map(|x| x * x));
    let loo: Vec<f64> = c
        .iter()
        .map(|x| {
            let mi = (s1 - x) / (r - 1.0);
            (s2 - x * x) / (r - 1.0) - mi * mi
        })
        .collect();
    let lm = mean(&loo);
    ((r - 1.0) / r * ksum(loo.iter().map(|x| (x - lm).powi(2)))).sqrt()
}

impl RiskReport {
    /// Summaries of `estimates` around `theta_true`.
    pub fn from_estimates(
        estimator: String,
        n: u64,
        k: usize,
        theta_true: f64,
        estimates: Vec<f64>,
        warnings: Vec<String>,
    ) -> Self {
        let m = mean(&estimates);
        let bias = m - theta_true;
        let variance = ksum(estimates.iter().map(|x| (x - m).powi(2))) / estimates.len() as f64;
        let sq: Vec<f64> = estimates.iter().map(|x| (x - theta_true).powi(2)).collect();
        Self {
            estimator,
            n,
            k,
            reps: estimates.len(),
            theta_true,
            bias,
            variance,
            mse: mean(&sq),
            bias_se: jackknife_se_mean(&estimates),
            variance_se: jackknife_se_variance(&estimates),
            mse_se: jackknife_se_mean(&sq),
            estimates,
            warnings,
        }
    }
}

/// Monte Carlo risk of `estimator` at the distribution `p`.
///
/// Every repetition draws a histogram of size `n` under `model` and
/// estimates `θ`; its RNG is seeded from `(master_seed, n, k, stream, rep)`,
/// so the report is the same for any number of worker threads. Repetitions
/// run on the current rayon pool.
pub fn monte_carlo_risk(
    p: &ProbabilityVector,
    phi: &Functional,
    estimator: &Estimator,
    n: u64,
    model: SamplingModel,
    reps: usize,
    seeds: &SeedStream,
) -> Result<RiskReport> {
    if reps < MIN_REPS {
        return Err(Error::InvalidInput(format!("need at least {MIN_REPS} repetitions, got {reps}")));
    }
    let theta = additive_functional(p, phi)?;
    let k = p.len();
    let outcomes: Vec<Result<(f64, Vec<String>)>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rep_rng(seeds.master_seed, n, k as u64, &seeds.stream, rep as u64);
            let h = sample_histogram(p, n, model, &mut rng);
            estimator
                .estimate(phi, &h, &mut rng)
                .map(|e| (e.value, e.warnings))
                .map_err(|e| Error::Rep { rep, source: Box::new(e) })
        })
        .collect();
    let mut estimates = Vec::with_capacity(reps);
    let mut warnings: Vec<String> = Vec::new();
    for o in outcomes {
        let (v, w) = o?;
        estimates.push(v);
        for msg in w {
            if !warnings.contains(&msg) {
                warnings.push(msg);
            }
        }
    }
    Ok(RiskReport::from_estimates(estimator.id(), n, k, theta, estimates, warnings))
}
