//! Monte Carlo risk lab: distribution families, reproducible per-repetition
//! seeding, risk reports with jackknife errors, rate formulas and sweeps.

mod distributions;
mod monte_carlo;
mod rates;
mod seed;
mod sweep;

pub use distributions::{DistributionSpec, Family};
pub use monte_carlo::{
    jackknife_se_mean, jackknife_se_variance, monte_carlo_risk, RiskReport, SeedStream, MIN_REPS,
};
pub use rates::theoretical_rate;
pub use seed::{derive_seed, fnv1a, rep_rng};
pub use sweep::{
    rate_sweep, EstimatorChoice, KRule, SlopeFit, SweepConfig, SweepResult, SweepRow, CORRECTED_PLUGIN_C2,
};
