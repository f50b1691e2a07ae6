//! Sampling models, sample splitting and the estimators of `θ(P; φ)`.

mod composite;
mod config;
mod plugin;
mod poly_estimator;
mod sampling;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{CorrectionOrder, Functional};

pub use composite::CompositeEstimator;
pub use config::{
    default_config, default_order, practical_config, validate_config, Derived, EstimatorConfig,
    Violation,
};
pub use plugin::{corrected_plugin_estimate, plain_plugin_estimate, plugin_symbol_estimate};
pub use poly_estimator::{best_poly_symbol_estimate, factorial_moment, phi_range, PolyBranch};
pub use sampling::{sample_histogram, split_samples};

/// How the counts were generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingModel {
    /// `N ~ Mul(n, P)`: counts sum to `n`.
    Multinomial,
    /// `N_i ~ Poi(n p_i)` independently.
    Poissonized,
}

impl std::str::FromStr for SamplingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial" => Ok(SamplingModel::Multinomial),
            "poissonized" => Ok(SamplingModel::Poissonized),
            other => Err(Error::InvalidInput(format!("unknown sampling model {other:?}"))),
        }
    }
}

/// Symbol counts with the nominal sample size they were drawn at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: Vec<u64>,
    n_nominal: u64,
    model: SamplingModel,
}

impl Histogram {
    pub fn new(counts: Vec<u64>, n_nominal: u64, model: SamplingModel) -> Result<Self> {
        if model == SamplingModel::Multinomial {
            let total: u64 = counts.iter().sum();
            if total != n_nominal {
                return Err(Error::InvalidInput(format!(
                    "multinomial counts sum to {total}, expected n = {n_nominal}"
                )));
            }
        }
        Ok(Self { counts, n_nominal, model })
    }

    /// Multinomial histogram whose `n` is the sum of the counts.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n = counts.iter().sum();
        Self { counts, n_nominal: n, model: SamplingModel::Multinomial }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_nominal(&self) -> u64 {
        self.n_nominal
    }

    pub fn model(&self) -> SamplingModel {
        self.model
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }
}

/// The two halves of a Bernoulli(1/2) split: `est` feeds the per-symbol
/// estimators and `sel` picks the branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitHistograms {
    pub est: Histogram,
    pub sel: Histogram,
}

impl SplitHistograms {
    pub fn new(est: Histogram, sel: Histogram) -> Result<Self> {
        if est.k() != sel.k() {
            return Err(Error::InvalidInput(format!(
                "split halves have different alphabet sizes {} and {}",
                est.k(),
                sel.k()
            )));
        }
        Ok(Self { est, sel })
    }
}

/// How many symbols took each branch of the composite estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub plugin: usize,
    pub poly: usize,
}

/// An estimate of `θ` together with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub branch_counts: BranchCounts,
    pub warnings: Vec<String>,
}

impl Estimate {
    fn plain(value: f64) -> Self {
        Self { value, branch_counts: BranchCounts::default(), warnings: Vec::new() }
    }
}

/// The estimators available to the risk lab and the CLI.
#[derive(Debug, Clone)]
pub enum Estimator {
    /// `Σ φ(N_i/n)`.
    Plugin,
    /// `Σ φ̄_{order,Δ}(N_i/n)` with `Δ = c2·ln n / n`, on every symbol.
    CorrectedPlugin { order: CorrectionOrder, c2: f64 },
    Composite(std::sync::Arc<CompositeEstimator>),
}

impl Estimator {
    pub fn id(&self) -> String {
        match self {
            Estimator::Plugin => "plugin".into(),
            Estimator::CorrectedPlugin { order, .. } => {
                format!("plugin{}", u8::from(*order))
            }
            Estimator::Composite(_) => "composite".into(),
        }
    }

    pub fn estimate<R: Rng + ?Sized>(
        &self,
        phi: &Functional,
        h: &Histogram,
        rng: &mut R,
    ) -> Result<Estimate> {
        match self {
            Estimator::Plugin => Ok(Estimate::plain(plain_plugin_estimate(h, phi)?)),
            Estimator::CorrectedPlugin { order, c2 } => {
                corrected_plugin_estimate(h, phi, *order, *c2).map(Estimate::plain)
            }
            Estimator::Composite(c) => c.estimate(h, rng),
        }
    }
}
