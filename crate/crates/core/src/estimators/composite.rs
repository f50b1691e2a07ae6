use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;

use super::{
    phi_range, split_samples, validate_config, BranchCounts, Estimate, EstimatorConfig, Histogram,
    PolyBranch, SplitHistograms, Violation,
};
use crate::error::{Error, Result};
use crate::functional::{bias_corrected_fn, CorrectionOrder, Functional};
use crate::numeric::KahanSum;
use crate::poly::{remez_best_approx, ApproxResult, Interval};

/// Best approximation of `φ` at one sample size, with its prepared branch.
#[derive(Debug)]
pub struct PolyCacheEntry {
    pub approx: ApproxResult,
    pub branch: PolyBranch,
}

/// The composite estimator: per symbol, the selector half decides between
/// the bias-corrected plugin (`Ñ′_i ≥ 2Δ_{n,k}`) and the best-polynomial
/// estimator, both evaluated on the estimation half.
#[derive(Debug)]
pub struct CompositeEstimator {
    phi: Functional,
    cfg: EstimatorConfig,
    violations: Vec<Violation>,
    cache: Mutex<HashMap<u64, Arc<PolyCacheEntry>>>,
}

impl CompositeEstimator {
    /// Builds the estimator after checking `cfg` against `φ`'s divergence
    /// speed; any violated constraint is an error.
    pub fn new(phi: Functional, cfg: EstimatorConfig) -> Result<Self> {
        let violations = validate_config(&cfg, phi.alpha());
        if !violations.is_empty() {
            return Err(Error::Violations(violations));
        }
        Self::new_unchecked(phi, cfg)
    }

    /// Like [`CompositeEstimator::new`] but accepts constants that violate the
    /// constraints; the violations are attached to every estimate as warnings.
    pub fn new_unchecked(phi: Functional, cfg: EstimatorConfig) -> Result<Self> {
        let needed = match cfg.correction_order {
            CorrectionOrder::Second => 2,
            CorrectionOrder::Fourth => 4,
        };
        if phi.max_deriv_order() < needed {
            return Err(Error::DerivativeOrder { order: needed, max: phi.max_deriv_order() });
        }
        if !(cfg.c1 > 0.0 && cfg.c2 > 0.0) {
            return Err(Error::Config(format!("C1 = {} and C2 = {} must be positive", cfg.c1, cfg.c2)));
        }
        let violations = validate_config(&cfg, phi.alpha());
        Ok(Self { phi, cfg, violations, cache: Mutex::new(HashMap::new()) })
    }

    pub fn phi(&self) -> &Functional {
        &self.phi
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// The cached approximation used at effective sample size `n`.
    pub fn approximation(&self, n: f64) -> Result<Arc<PolyCacheEntry>> {
        let key = n.to_bits();
        let mut cache = self.cache.lock().expect("cache lock poisoned");
        if let Some(e) = cache.get(&key) {
            return Ok(Arc::clone(e));
        }
        let d = self.cfg.derive(n);
        let interval = Interval::new(0.0, d.poly_hi)?;
        let approx = remez_best_approx(|x| self.phi.eval(x), d.degree, interval)?;
        let branch = PolyBranch::new(&approx, phi_range(&self.phi, interval));
        let entry = Arc::new(PolyCacheEntry { approx, branch });
        cache.insert(key, Arc::clone(&entry));
        Ok(entry)
    }

    fn base_warnings(&self) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| format!("unvalidated constants: {v}"))
            .collect()
    }

    fn degenerate(&self, n: f64) -> bool {
        n < 3.0 || self.cfg.derive(n).delta_nk >= n
    }

    /// Split `h` by fair coins and estimate from the halves.
    ///
    /// Each half carries about half of the samples, so the construction runs
    /// at effective size `n/2`.
    pub fn estimate<R: Rng + ?Sized>(&self, h: &Histogram, rng: &mut R) -> Result<Estimate> {
        let n_eff = h.n_nominal() as f64 / 2.0;
        if self.degenerate(n_eff) {
            let mut warnings = self.base_warnings();
            warnings.push(format!(
                "sample size {} too small for the composite construction; using the plain plugin",
                h.n_nominal()
            ));
            let value = plain_sum(h.counts(), h.n_nominal() as f64, &self.phi)?;
            return Ok(Estimate { value, branch_counts: BranchCounts::default(), warnings });
        }
        let split = split_samples(h, rng);
        self.estimate_split(&split, n_eff)
    }

    /// Estimate from an already split pair at effective sample size `n`.
    pub fn estimate_split(&self, split: &SplitHistograms, n: f64) -> Result<Estimate> {
        if split.est.k() != split.sel.k() {
            return Err(Error::InvalidInput("split halves differ in alphabet size".into()));
        }
        let mut warnings = self.base_warnings();
        if self.degenerate(n) {
            warnings.push(format!(
                "sample size {n} too small for the composite construction; using the plain plugin"
            ));
            let value = plain_sum(split.est.counts(), n, &self.phi)?;
            return Ok(Estimate { value, branch_counts: BranchCounts::default(), warnings });
        }
        let d = self.cfg.derive(n);
        let entry = self.approximation(n)?;
        if !entry.approx.converged {
            warnings.push(format!(
                "Remez did not converge at degree {} (sup error {:e})",
                d.degree, entry.approx.sup_error
            ));
        }
        let threshold = 2.0 * d.delta_nk;
        let mut acc = KahanSum::new();
        let mut counts = BranchCounts::default();
        for (&est, &sel) in split.est.counts().iter().zip(split.sel.counts()) {
            if sel as f64 >= threshold {
                counts.plugin += 1;
                acc.add(bias_corrected_fn(
                    &self.phi,
                    self.cfg.correction_order,
                    d.delta,
                    n,
                    est as f64 / n,
                )?);
            } else {
                counts.poly += 1;
                acc.add(entry.branch.estimate(est, n));
            }
        }
        Ok(Estimate { value: acc.value(), branch_counts: counts, warnings })
    }
}

fn plain_sum(counts: &[u64], n: f64, phi: &Functional) -> Result<f64> {
    if n <= 0.0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    let mut acc = KahanSum::new();
    for (index, &c) in counts.iter().enumerate() {
        let p = c as f64 / n;
        let v = phi.eval(p);
        if !v.is_finite() {
            return Err(Error::NonFinite { index, p });
        }
        acc.add(v);
    }
    Ok(acc.value())
}
