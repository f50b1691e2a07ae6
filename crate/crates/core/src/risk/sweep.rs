use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::distributions::{DistributionSpec, Family};
use super::monte_carlo::{monte_carlo_risk, RiskReport, SeedStream};
use super::rates::theoretical_rate;
use super::seed::rep_rng;
use crate::error::{Error, Result};
use crate::estimators::{default_config, practical_config, CompositeEstimator, Estimator, SamplingModel};
use crate::functional::{CorrectionOrder, Functional, FunctionalSpec};
use crate::numeric::log_log_slope;

/// Named estimator recipes usable from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    /// `Σ φ(N_i/n)`.
    Plugin,
    /// Order-2 corrected plugin.
    Plugin2,
    /// Order-4 corrected plugin.
    Plugin4,
    /// Composite estimator with validated constants.
    Composite,
    /// Composite estimator with [`practical_config`] constants, which do not
    /// pass validation.
    CompositePractical,
}

/// `c2` of the corrected plugins built by [`EstimatorChoice::build`].
pub const CORRECTED_PLUGIN_C2: f64 = 1.0;

impl EstimatorChoice {
    pub fn id(&self) -> &'static str {
        match self {
            EstimatorChoice::Plugin => "plugin",
            EstimatorChoice::Plugin2 => "plugin2",
            EstimatorChoice::Plugin4 => "plugin4",
            EstimatorChoice::Composite => "composite",
            EstimatorChoice::CompositePractical => "composite-practical",
        }
    }

    pub fn is_validated(&self) -> bool {
        !matches!(self, EstimatorChoice::CompositePractical)
    }

    pub fn build(&self, phi: &Functional, seed: u64) -> Result<Estimator> {
        let corrected = |order| Estimator::CorrectedPlugin { order, c2: CORRECTED_PLUGIN_C2 };
        Ok(match self {
            EstimatorChoice::Plugin => Estimator::Plugin,
            EstimatorChoice::Plugin2 => corrected(CorrectionOrder::Second),
            EstimatorChoice::Plugin4 => corrected(CorrectionOrder::Fourth),
            EstimatorChoice::Composite => {
                let cfg = default_config(phi.alpha(), seed)?;
                Estimator::Composite(Arc::new(CompositeEstimator::new(phi.clone(), cfg)?))
            }
            EstimatorChoice::CompositePractical => {
                let cfg = practical_config(phi.alpha(), seed);
                Estimator::Composite(Arc::new(CompositeEstimator::new_unchecked(phi.clone(), cfg)?))
            }
        })
    }
}

impl fmt::Display for EstimatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EstimatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "plugin" => EstimatorChoice::Plugin,
            "plugin2" => EstimatorChoice::Plugin2,
            "plugin4" => EstimatorChoice::Plugin4,
            "composite" => EstimatorChoice::Composite,
            "composite-practical" => EstimatorChoice::CompositePractical,
            other => return Err(Error::InvalidInput(format!("unknown estimator `{other}`"))),
        })
    }
}

/// How the alphabet size follows the sample size in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum KRule {
    Fixed(usize),
    /// `k = ⌈c·n⌉`.
    Proportional(f64),
    /// `k = ⌈c·n/ln n⌉`.
    NOverLogN(f64),
}

impl KRule {
    pub fn k_for(&self, n: u64) -> usize {
        let n = n as f64;
        let k = match *self {
            KRule::Fixed(k) => return k.max(1),
            KRule::Proportional(c) => (c * n).ceil(),
            KRule::NOverLogN(c) => (c * n / n.ln()).ceil(),
        };
        (k as usize).max(1)
    }
}

impl fmt::Display for KRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KRule::Fixed(k) => write!(f, "fixed:{k}"),
            KRule::Proportional(c) => write!(f, "prop:{c}"),
            KRule::NOverLogN(c) => write!(f, "n_over_log_n:{c}"),
        }
    }
}

impl FromStr for KRule {
    type Err = Error;

    /// `fixed:K`, `prop:C` or `n_over_log_n:C`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad k rule `{s}` (use fixed:K, prop:C or n_over_log_n:C)"));
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let rule = match name.trim() {
            "fixed" => KRule::Fixed(arg.trim().parse().map_err(|_| bad())?),
            "prop" => KRule::Proportional(arg.trim().parse().map_err(|_| bad())?),
            "n_over_log_n" => KRule::NOverLogN(arg.trim().parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        match rule {
            KRule::Fixed(0) => Err(bad()),
            KRule::Proportional(c) | KRule::NOverLogN(c) if !(c > 0.0 && c.is_finite()) => Err(bad()),
            r => Ok(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: Family,
    pub phi: FunctionalSpec,
    pub estimators: Vec<EstimatorChoice>,
    pub n_grid: Vec<u64>,
    pub k_rule: KRule,
    pub reps: usize,
    pub master_seed: u64,
    pub model: SamplingModel,
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub k: usize,
    pub n: u64,
    pub estimator: String,
    pub bias: f64,
    pub var: f64,
    pub mse: f64,
    /// Jackknife standard error of `mse`.
    pub se: f64,
    /// Empty when the rate is undefined for the functional.
    pub theory_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub estimator: String,
    /// Least-squares slope of `ln mse` against `ln n`.
    pub empirical: f64,
    /// The same slope for the theoretical rate, when defined.
    pub theoretical: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SlopeFit>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// Rows as CSV with header `family,k,n,estimator,bias,var,mse,se,theory_rate`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Risk of each estimator over a grid of sample sizes, with fitted log-log
/// slopes. The grid needs at least 4 points spanning a decade.
pub fn rate_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let (lo, hi) = cfg.n_grid.iter().fold((u64::MAX, 0), |(a, b), &n| (a.min(n), b.max(n)));
    if cfg.n_grid.len() < 4 || (hi as f64) < 10.0 * lo as f64 {
        return Err(Error::InvalidInput("the n grid needs at least 4 points spanning one decade".into()));
    }
    if cfg.estimators.is_empty() {
        return Err(Error::InvalidInput("no estimators selected".into()));
    }
    let phi = cfg.phi.build();
    let family = cfg.family.to_string();
    let mut rows = Vec::new();
    let mut reports: Vec<Vec<RiskReport>> = vec![Vec::new(); cfg.estimators.len()];
    let mut warnings = Vec::new();
    let built: Vec<Estimator> =
        cfg.estimators.iter().map(|e| e.build(&phi, cfg.master_seed)).collect::<Result<_>>()?;
    for &n in &cfg.n_grid {
        let k = cfg.k_rule.k_for(n);
        let spec = DistributionSpec::new(cfg.family, k)?;
        let mut rng = rep_rng(cfg.master_seed, n, k as u64, "distribution", 0);
        let p = spec.generate(&mut rng)?;
        let rate = theoretical_rate(phi.alpha(), n as f64, k as f64).ok();
        for (i, (choice, est)) in cfg.estimators.iter().zip(&built).enumerate() {
            let seeds = SeedStream { master_seed: cfg.master_seed, stream: choice.id().into() };
            let mut report = monte_carlo_risk(&p, &phi, est, n, cfg.model, cfg.reps, &seeds)?;
            report.estimator = choice.id().into();
            for w in &report.warnings {
                let msg = format!("{} at n = {n}: {w}", choice.id());
                if !warnings.contains(&msg) {
                    warnings.push(msg);
                }
            }
            rows.push(SweepRow {
                family: family.clone(),
                k,
                n,
                estimator: choice.id().into(),
                bias: report.bias,
                var: report.variance,
                mse: report.mse,
                se: report.mse_se,
                theory_rate: rate,
            });
            reports[i].push(report);
        }
    }
    let ns: Vec<f64> = cfg.n_grid.iter().map(|&n| n as f64).collect();
    let slopes = cfg
        .estimators
        .iter()
        .zip(&reports)
        .map(|(choice, reps)| {
            let mses: Vec<f64> = reps.iter().map(|r| r.mse).collect();
            let theory: Option<Vec<f64>> = cfg
                .n_grid
                .iter()
                .map(|&n| theoretical_rate(phi.alpha(), n as f64, cfg.k_rule.k_for(n) as f64).ok())
                .collect();
            SlopeFit {
                estimator: choice.id().into(),
                empirical: log_log_slope(&ns, &mses),
                theoretical: theory.map(|t| log_log_slope(&ns, &t)),
            }
        })
        .collect();
    Ok(SweepResult { rows, slopes, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SweepConfig {
        SweepConfig {
            family: Family::Uniform,
            phi: FunctionalSpec::Shannon,
            estimators: vec![EstimatorChoice::Plugin, EstimatorChoice::Plugin2],
            n_grid: vec![20, 50, 100, 200],
            k_rule: KRule::Fixed(10),
            reps: 100,
            master_seed: 5,
            model: SamplingModel::Multinomial,
        }
    }

    #[test]
    fn parsing() {
        for s in ["plugin", "plugin2", "plugin4", "composite", "composite-practical"] {
            assert_eq!(s.parse::<EstimatorChoice>().unwrap().id(), s);
        }
        for s in ["fixed:10", "prop:0.5", "n_over_log_n:2"] {
            assert_eq!(s.parse::<KRule>().unwrap().to_string(), s);
        }
        assert!("fixed:0".parse::<KRule>().is_err());
        assert!("prop:-1".parse::<KRule>().is_err());
    }

    #[test]
    fn k_rules() {
        assert_eq!(KRule::Fixed(7).k_for(1000), 7);
        assert_eq!(KRule::Proportional(0.5).k_for(101), 51);
        assert_eq!(KRule::NOverLogN(1.0).k_for(100), (100.0 / 100f64.ln()).ceil() as usize);
    }

    #[test]
    fn sweep_shape_and_csv() {
        let r = rate_sweep(&config()).unwrap();
        assert_eq!(r.rows.len(), 8);
        assert_eq!(r.slopes.len(), 2);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,k,n,estimator,bias,var,mse,se,theory_rate\n"));
        assert_eq!(text.lines().count(), 9);
        // plugin MSE falls with n at fixed k
        assert!(r.slopes[0].empirical < 0.0);
    }

    #[test]
    fn grid_must_span_a_decade() {
        let mut c = config();
        c.n_grid = vec![20, 50, 100, 150];
        assert!(rate_sweep(&c).is_err());
        c.n_grid = vec![20, 200, 2000];
        assert!(rate_sweep(&c).is_err());
    }
}
