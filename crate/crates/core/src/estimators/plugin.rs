use super::{EstimatorConfig, Histogram};
use crate::error::{Error, Result};
use crate::functional::{bias_corrected_fn, CorrectionOrder, Functional};
use crate::numeric::KahanSum;

/// `φ̄_{order,Δ}(N/n)` with `Δ = Δ_{n,k}/n` taken from `cfg`.
pub fn plugin_symbol_estimate(
    count: u64,
    n: f64,
    phi: &Functional,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let delta = cfg.derive(n).delta;
    bias_corrected_fn(phi, cfg.correction_order, delta, n, count as f64 / n)
}

fn sample_size(h: &Histogram) -> Result<f64> {
    if h.n_nominal() == 0 {
        return Err(Error::InvalidInput("histogram has sample size 0".into()));
    }
    Ok(h.n_nominal() as f64)
}

/// `Σ φ(N_i/n)` with `n` the nominal sample size.
pub fn plain_plugin_estimate(h: &Histogram, phi: &Functional) -> Result<f64> {
    let n = sample_size(h)?;
    let mut acc = KahanSum::new();
    for (index, &c) in h.counts().iter().enumerate() {
        let p = c as f64 / n;
        let v = phi.eval(p);
        if !v.is_finite() {
            return Err(Error::NonFinite { index, p });
        }
        acc.add(v);
    }
    Ok(acc.value())
}

/// `Σ φ̄_{order,Δ}(N_i/n)` applied to every symbol, with `Δ = c2·ln n / n`.
pub fn corrected_plugin_estimate(
    h: &Histogram,
    phi: &Functional,
    order: CorrectionOrder,
    c2: f64,
) -> Result<f64> {
    let n = sample_size(h)?;
    let delta = c2 * n.ln() / n;
    let mut acc = KahanSum::new();
    for &c in h.counts() {
        acc.add(bias_corrected_fn(phi, order, delta, n, c as f64 / n)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::SamplingModel;

    fn cfg_with_delta(delta: f64, n: f64) -> EstimatorConfig {
        // choose C2 so that C2·ln n / n = delta
        EstimatorConfig {
            c1: 0.1,
            c2: delta * n / n.ln(),
            correction_order: CorrectionOrder::Second,
            rng_seed: 0,
        }
    }

    #[test]
    fn symbol_examples() {
        let cfg = cfg_with_delta(0.05, 100.0);
        let v = plugin_symbol_estimate(100, 100.0, &Functional::power(2.0), &cfg).unwrap();
        assert!((v - 0.99).abs() < 1e-12);
        let v = plugin_symbol_estimate(0, 100.0, &Functional::Shannon, &cfg).unwrap();
        assert!((v - (-0.05 * 0.05f64.ln())).abs() < 1e-12);
        assert!((v - 0.149_787).abs() < 1e-6);
        let v = plugin_symbol_estimate(50, 100.0, &Functional::Shannon, &cfg).unwrap();
        assert!((v - (0.5 * 2f64.ln() + 0.005)).abs() < 1e-12);
    }

    #[test]
    fn plain_examples() {
        let h = Histogram::from_counts(vec![40, 0, 0, 0]);
        let v = plain_plugin_estimate(&h, &Functional::Shannon).unwrap();
        assert_eq!(v, 0.0);
        let v = plain_plugin_estimate(&h, &Functional::power(0.5)).unwrap();
        assert_eq!(v, 1.0);
        let h = Histogram::from_counts(vec![25; 8]);
        let v = plain_plugin_estimate(&h, &Functional::Shannon).unwrap();
        assert!((v - 8f64.ln()).abs() < 1e-14);
        let empty = Histogram::new(vec![0, 0], 0, SamplingModel::Poissonized).unwrap();
        assert!(plain_plugin_estimate(&empty, &Functional::Shannon).is_err());
    }

    #[test]
    fn negative_powers_fail_on_empty_symbols() {
        let h = Histogram::from_counts(vec![3, 0]);
        assert!(matches!(
            plain_plugin_estimate(&h, &Functional::power(-0.5)),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }
}
