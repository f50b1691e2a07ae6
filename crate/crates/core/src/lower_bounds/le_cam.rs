use serde::{Deserialize, Serialize};

use super::divergence::{divergence, DivergenceKind};
use crate::error::{Error, Result};
use crate::functional::{additive_functional, Functional, ProbabilityVector};

/// The pair `P = (1−p, p/(k−1), …)`, `Q = (1−q, q/(k−1), …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointPair {
    pub p_vec: ProbabilityVector,
    pub q_vec: ProbabilityVector,
    pub p: f64,
    pub q: f64,
    /// `(p − q)² / (2p(1 − p))`, the local quadratic approximation of
    /// `KL(P‖Q)`.
    pub kl_bound: f64,
    /// `θ(P) − θ(Q)`.
    pub theta_gap: f64,
}

fn spread(head: f64, mass: f64, k: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(k);
    v.push(head);
    v.extend(std::iter::repeat_n(mass / (k - 1) as f64, k - 1));
    v
}

impl TwoPointPair {
    pub fn new(p: f64, q: f64, k: usize, phi: &Functional) -> Result<Self> {
        if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
            return Err(Error::InvalidInput(format!("p = {p} and q = {q} must lie in (0, 1)")));
        }
        if k < 2 {
            return Err(Error::InvalidInput("two-point pairs need k ≥ 2".into()));
        }
        let p_vec = ProbabilityVector::new(spread(1.0 - p, p, k))?;
        let q_vec = ProbabilityVector::new(spread(1.0 - q, q, k))?;
        let theta_gap = additive_functional(&p_vec, phi)? - additive_functional(&q_vec, phi)?;
        Ok(Self {
            p_vec,
            q_vec,
            p,
            q,
            kl_bound: (p - q).powi(2) / (2.0 * p * (1.0 - p)),
            theta_gap,
        })
    }
}

/// `P = (β/(k−1), …, 1−β)` and `Q = ((β+δ)/(k−1), …, 1−β−δ)`, whose total
/// variation distance is exactly `δ`.
pub fn shifted_pair(beta: f64, delta: f64, k: usize) -> Result<(ProbabilityVector, ProbabilityVector)> {
    if !(beta > 0.0 && delta > 0.0 && beta + delta < 1.0 && k >= 2) {
        return Err(Error::InvalidInput(format!(
            "need β, δ > 0, β + δ < 1 and k ≥ 2 (β = {beta}, δ = {delta}, k = {k})"
        )));
    }
    let build = |mass: f64| {
        let mut v = vec![mass / (k - 1) as f64; k - 1];
        v.push(1.0 - mass);
        ProbabilityVector::new(v)
    };
    Ok((build(beta)?, build(beta + delta)?))
}

/// `¼(θ(P) − θ(Q))² e^{−n·KL(P‖Q)}`.
pub fn le_cam_bound(p: &ProbabilityVector, q: &ProbabilityVector, phi: &Functional, n: u64) -> Result<f64> {
    let gap = additive_functional(p, phi)? - additive_functional(q, phi)?;
    let kl = divergence(p, q, DivergenceKind::Kl)?;
    Ok(0.25 * gap * gap * (-(n as f64) * kl).exp())
}

/// `½ gap² (1 − √(1 − (1 − H²/4)^{2n}))`.
pub fn hellinger_formula(gap: f64, h2: f64, n: u64) -> f64 {
    let inner = (1.0 - h2 / 4.0).max(0.0).powf(2.0 * n as f64);
    0.5 * gap * gap * (1.0 - (1.0 - inner).max(0.0).sqrt())
}

/// Hellinger version of the two-point bound, with `H²` the squared
/// Hellinger distance of [`DivergenceKind::Hellinger`].
pub fn hellinger_le_cam_bound(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    phi: &Functional,
    n: u64,
) -> Result<f64> {
    let gap = additive_functional(p, phi)? - additive_functional(q, phi)?;
    let h2 = divergence(p, q, DivergenceKind::Hellinger)?;
    Ok(hellinger_formula(gap, h2, n))
}
