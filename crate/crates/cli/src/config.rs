use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use minifunc::estimators::SamplingModel;
use minifunc::poly::Interval;
use minifunc::risk::{EstimatorChoice, Family, KRule};
use minifunc::FunctionalSpec;
use serde::{Deserialize, Serialize};

fn parse_phi(s: &str) -> Result<FunctionalSpec, String> {
    FunctionalSpec::parse(s).map_err(|e| e.to_string())
}

/// A fully resolved invocation. Every JSON output embeds it, and
/// `minifunc run --config FILE` replays it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub master_seed: u64,
    #[serde(default)]
    pub allow_unvalidated: bool,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Estimate θ from a histogram CSV (`symbol,count`).
    Estimate(EstimateArgs),
    /// Best uniform polynomial approximation of φ on an interval.
    Approx(ApproxArgs),
    /// Monte Carlo risk over a grid of sample sizes, written as CSV.
    RiskSweep(SweepArgs),
    /// Evaluate a lower-bound construction.
    LowerBound(LowerBoundArgs),
    /// Check the divergence-speed sandwich of a derivative of φ.
    CheckSpeed(CheckSpeedArgs),
    /// Build a moment-matched prior pair and dump it as CSV (`x,w0,w1`).
    Priors(PriorsArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Histogram CSV with header `symbol,count`; symbols are 1-based.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_phi)]
    pub phi: FunctionalSpec,
    /// Alphabet size; defaults to the largest symbol.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "plugin")]
    pub estimator: EstimatorChoice,
    #[arg(long, default_value = "multinomial")]
    pub model: SamplingModel,
    /// Nominal sample size; defaults to the sum of the counts.
    #[arg(long)]
    pub n: Option<u64>,
    /// Override the composite constant C1 (validated unless
    /// `--allow-unvalidated`).
    #[arg(long, requires = "c2")]
    pub c1: Option<f64>,
    #[arg(long, requires = "c1")]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ApproxArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: FunctionalSpec,
    /// Polynomial degree.
    #[arg(long = "L", alias = "degree")]
    pub degree: usize,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// `uniform`, `zipf[:s]`, `two_spike:p` or `dirichlet:conc`.
    #[arg(long, default_value = "uniform")]
    pub family: Family,
    #[arg(long, value_parser = parse_phi, conflicts_with = "alpha", required_unless_present = "alpha")]
    pub phi: Option<FunctionalSpec>,
    /// Shorthand for `--phi power:ALPHA`; `1` selects `shannon`.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_grid: Vec<u64>,
    /// `fixed:K`, `prop:C` or `n_over_log_n:C`.
    #[arg(long, default_value = "prop:1")]
    pub k_rule: KRule,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "plugin,plugin2")]
    pub estimators: Vec<EstimatorChoice>,
    #[arg(long, default_value = "multinomial")]
    pub model: SamplingModel,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

impl SweepArgs {
    pub fn functional(&self) -> FunctionalSpec {
        match (self.phi, self.alpha) {
            (Some(phi), _) => phi,
            (None, Some(1.0)) => FunctionalSpec::Shannon,
            (None, Some(alpha)) => FunctionalSpec::Power { alpha },
            (None, None) => FunctionalSpec::Shannon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LowerBoundArgs {
    #[command(subcommand)]
    pub construction: Construction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionArg {
    Plain,
    Tilted,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum Construction {
    /// KL two-point bound for `P = (1−p, p/(k−1), …)` against the same shape with q.
    LeCam {
        #[arg(long, value_parser = parse_phi)]
        phi: FunctionalSpec,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
    },
    /// Hellinger two-point bound for `P = (β/(k−1), …, 1−β)` against a shift by δ.
    Hellinger {
        #[arg(long, value_parser = parse_phi)]
        phi: FunctionalSpec,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
    },
    /// Best-approximation bound with caller-supplied constants W and W′.
    Composite {
        #[arg(long, value_parser = parse_phi)]
        phi: FunctionalSpec,
        #[arg(long)]
        n: f64,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "L", alias = "degree")]
        degree: usize,
        /// Separation; defaults to the largest value the side condition allows.
        #[arg(long)]
        d: Option<f64>,
        /// Divergence-speed exponent; defaults to that of φ.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        w: f64,
        #[arg(long)]
        w_prime: f64,
        #[arg(long, value_enum, default_value = "auto")]
        condition: ConditionArg,
        #[arg(long)]
        gamma: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CheckSpeedArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: FunctionalSpec,
    #[arg(long)]
    pub ell: usize,
    /// Exponent to test; defaults to that of φ.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PriorsArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: FunctionalSpec,
    /// Number of matched moments.
    #[arg(long = "L", alias = "degree")]
    pub degree: usize,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub interval: Interval,
    /// LP grid size; defaults to 50·(L + 2).
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Build the tilted pair on `[γ, γ/η]` instead (needs `--eta`).
    #[arg(long, requires = "eta")]
    pub gamma: Option<f64>,
    #[arg(long, requires = "gamma")]
    pub eta: Option<f64>,
    /// Also report the Poisson-mixture TV at rates `n·x/k`.
    #[arg(long, requires = "tv_k")]
    pub tv_n: Option<f64>,
    #[arg(long, requires = "tv_n")]
    pub tv_k: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}
