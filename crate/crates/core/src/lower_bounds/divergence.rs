use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::ProbabilityVector;
use crate::numeric::ksum;

/// Which discrepancy [`divergence`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    /// `KL(P‖Q) = Σ p ln(p/q)`.
    Kl,
    /// `χ²(P‖Q) = Σ (p − q)²/q`.
    Chi2,
    /// Squared Hellinger distance `H² = Σ (√p − √q)²`, in `[0, 2]`.
    Hellinger,
    /// `TV = ½ Σ |p − q|`.
    Tv,
}

pub fn divergence(p: &ProbabilityVector, q: &ProbabilityVector, kind: DivergenceKind) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidInput(format!(
            "distributions have different sizes {} and {}",
            p.len(),
            q.len()
        )));
    }
    let pairs = p.probs().iter().zip(q.probs()).enumerate();
    let support = |i: usize| {
        Error::InvalidInput(format!("P puts mass on symbol {i} where Q has none"))
    };
    let value = match kind {
        DivergenceKind::Kl => {
            let mut terms = Vec::with_capacity(p.len());
            for (i, (&a, &b)) in pairs {
                if a == 0.0 {
                    continue;
                }
                if b == 0.0 {
                    return Err(support(i));
                }
                terms.push(a * (a / b).ln());
            }
            ksum(terms)
        }
        DivergenceKind::Chi2 => {
            let mut terms = Vec::with_capacity(p.len());
            for (i, (&a, &b)) in pairs {
                if b == 0.0 {
                    if a == 0.0 {
                        continue;
                    }
                    return Err(support(i));
                }
                terms.push((a - b) * (a - b) / b);
            }
            ksum(terms)
        }
        DivergenceKind::Hellinger => ksum(p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a.sqrt() - b.sqrt()).powi(2))),
        DivergenceKind::Tv => 0.5 * ksum(p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a - b).abs())),
    };
    Ok(value.max(0.0))
}
