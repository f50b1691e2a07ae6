use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::CorrectionOrder;

/// Constants of the composite estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub c1: f64,
    pub c2: f64,
    pub correction_order: CorrectionOrder,
    pub rng_seed: u64,
}

/// Quantities derived from an [`EstimatorConfig`] at sample size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    /// Polynomial degree `L = ⌊C1 ln n⌋`.
    pub degree: usize,
    /// Threshold `Δ_{n,k} = C2 ln n` in expected-count units.
    pub delta_nk: f64,
    /// Truncation level `Δ = Δ_{n,k}/n`.
    pub delta: f64,
    /// Right end of the approximation interval `[0, min(4Δ_{n,k}/n, 1)]`.
    pub poly_hi: f64,
}

impl EstimatorConfig {
    pub fn derive(&self, n: f64) -> Derived {
        let ln_n = n.ln();
        let degree = (self.c1 * ln_n).floor().max(0.0) as usize;
        let delta_nk = self.c2 * ln_n;
        Derived {
            degree,
            delta_nk,
            delta: delta_nk / n,
            poly_hi: (4.0 * delta_nk / n).min(1.0),
        }
    }
}

/// A violated parameter inequality, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails (lhs = {}, rhs = {})", self.condition, self.lhs, self.rhs)
    }
}

const NON_STRICT_SLACK: f64 = 1e-12;

fn third_lhs(c1: f64, c2: f64) -> f64 {
    let ln2e = 1.0 + std::f64::consts::LN_2;
    2.0 - 3.0 * c1 * std::f64::consts::LN_2 - 2.0 * (c1 * c2).sqrt() * ln2e
}

/// Check the three constraints on `(C1, C2)` under which the composite
/// estimator attains its rate for divergence speed `α`:
///
/// * `C2 > 8α`
/// * `C2³·C1 ≤ 1/2`
/// * `2 − 3·C1·ln 2 − 2·√(C1·C2)·ln(2e) > α`
pub fn validate_config(cfg: &EstimatorConfig, alpha: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(cfg.c1 > 0.0 && cfg.c2 > 0.0) {
        out.push(Violation { condition: "C1 > 0 and C2 > 0".into(), lhs: cfg.c1.min(cfg.c2), rhs: 0.0 });
        return out;
    }
    let rhs = 8.0 * alpha;
    if cfg.c2 <= rhs {
        out.push(Violation { condition: "C2 > 8α".into(), lhs: cfg.c2, rhs });
    }
    let lhs = cfg.c2.powi(3) * cfg.c1;
    if lhs > 0.5 * (1.0 + NON_STRICT_SLACK) {
        out.push(Violation { condition: "C2³·C1 ≤ 1/2".into(), lhs, rhs: 0.5 });
    }
    let lhs = third_lhs(cfg.c1, cfg.c2);
    if lhs <= alpha {
        out.push(Violation {
            condition: "2 − 3·C1·ln2 − 2·√(C1·C2)·ln(2e) > α".into(),
            lhs,
            rhs: alpha,
        });
    }
    out
}

/// Default correction order for divergence speed `α`: 2 up to `α = 1`,
/// 4 above.
pub fn default_order(alpha: f64) -> CorrectionOrder {
    if alpha <= 1.0 {
        CorrectionOrder::Second
    } else {
        CorrectionOrder::Fourth
    }
}

/// Margin kept on the third constraint by [`default_config`].
const THIRD_MARGIN: f64 = 0.05;

/// Constants that satisfy [`validate_config`] for `α`.
///
/// `C2 = 8α + 1`; `C1` is the smaller of `1/(2·C2³)` and the largest value
/// keeping the third constraint with a margin of 0.05, found by bisection
/// (its left side is decreasing in `C1`).
pub fn default_config(alpha: f64, rng_seed: u64) -> Result<EstimatorConfig> {
    if !(alpha > 0.0) || third_lhs(0.0, 1.0) <= alpha + THIRD_MARGIN {
        return Err(Error::Config(format!(
            "no default constants for α = {alpha}; the composite estimator needs 0 < α < {}",
            2.0 - THIRD_MARGIN
        )));
    }
    let c2 = 8.0 * alpha + 1.0;
    let target = alpha + THIRD_MARGIN;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while third_lhs(hi, c2) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if third_lhs(mid, c2) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c1 = (0.5 / c2.powi(3)).min(lo);
    Ok(EstimatorConfig { c1, c2, correction_order: default_order(alpha), rng_seed })
}

/// Constants tuned for moderate sample sizes rather than the asymptotic
/// guarantees: `C1 = 1.2`, `C2 = 1.0`.
///
/// With the validated defaults `L = ⌊C1 ln n⌋` is zero for every practical
/// `n` (C1 is below 10⁻³), so the polynomial branch degenerates to a
/// constant. These values give `L ≈ 10` at `n = 5000` and do not pass
/// [`validate_config`].
pub fn practical_config(alpha: f64, rng_seed: u64) -> EstimatorConfig {
    EstimatorConfig { c1: 1.2, c2: 1.0, correction_order: default_order(alpha), rng_seed }
}
