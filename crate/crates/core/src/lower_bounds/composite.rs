use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::poly::{remez_best_approx, Interval};

/// Which side condition certifies the separation `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SideCondition {
    /// `λ ≤ 1/12` and `2k·E_L(φ, [0, λ/k]) ≥ d`.
    Plain,
    /// `λ ≤ √k/12` and `2kγ·E_L(φ*, [γ, 2L²γ]) ≥ d` with `φ*(x) = φ(x)/x`.
    /// `γ` defaults to `λ/(2L²k)`, which puts the right end at `λ/k`.
    Tilted { gamma: Option<f64> },
    /// Try [`SideCondition::Plain`], then the tilted condition with the
    /// default `γ`.
    Auto,
}

/// Inputs of [`composite_lower_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeLowerBoundInput {
    pub n: f64,
    pub k: f64,
    pub lambda: f64,
    pub degree: usize,
    pub d: f64,
    pub alpha: f64,
    /// Caller-fitted constants `W` and `W′` of the correction terms.
    pub w: f64,
    pub w_prime: f64,
    pub condition: SideCondition,
}

/// A verified side condition: `lhs ≥ d` was checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub lhs: f64,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeLowerBound {
    pub value: f64,
    /// `d²/32 · (7/8 − tv_term)`.
    pub main: f64,
    /// `k(2enλ/(Lk))^L`.
    pub tv_term: f64,
    pub corrections: Vec<(String, f64)>,
    pub condition: ConditionCheck,
}

fn plain_check(phi: &Functional, inp: &CompositeLowerBoundInput) -> Result<ConditionCheck> {
    if inp.lambda > 1.0 / 12.0 {
        return Err(Error::Config(format!("λ = {} exceeds 1/12", inp.lambda)));
    }
    let interval = Interval::new(0.0, inp.lambda / inp.k)?;
    let e = remez_best_approx(|x| phi.eval(x), inp.degree, interval)?.sup_error;
    let lhs = 2.0 * inp.k * e;
    if lhs < inp.d {
        return Err(Error::Config(format!("2k·E_L(φ, [0, λ/k]) = {lhs:.6e} is below d = {}", inp.d)));
    }
    Ok(ConditionCheck { name: "plain".into(), lhs, interval })
}

fn tilted_check(phi: &Functional, inp: &CompositeLowerBoundInput, gamma: Option<f64>) -> Result<ConditionCheck> {
    if inp.lambda > inp.k.sqrt() / 12.0 {
        return Err(Error::Config(format!("λ = {} exceeds √k/12", inp.lambda)));
    }
    let l2 = 2.0 * (inp.degree as f64).powi(2).max(1.0);
    let gamma = gamma.unwrap_or(inp.lambda / (l2 * inp.k));
    if !(gamma > 0.0 && gamma < 1.0 && l2 * gamma <= 1.0) {
        return Err(Error::Config(format!("γ = {gamma} must satisfy 0 < γ and 2L²γ ≤ 1")));
    }
    let interval = Interval::new(gamma, l2 * gamma)?;
    let e = remez_best_approx(|x| phi.eval(x) / x, inp.degree, interval)?.sup_error;
    let lhs = 2.0 * inp.k * gamma * e;
    if lhs < inp.d {
        return Err(Error::Config(format!(
            "2kγ·E_L(φ*, [γ, 2L²γ]) = {lhs:.6e} is below d = {}",
            inp.d
        )));
    }
    Ok(ConditionCheck { name: "tilted".into(), lhs, interval })
}

/// `k(2enλ/(Lk))^L`.
pub fn tv_term(n: f64, k: f64, lambda: f64, degree: usize) -> f64 {
    let l = degree as f64;
    k * (2.0 * std::f64::consts::E * n * lambda / (l * k)).powf(l)
}

/// Numeric value of the best-approximation lower bound on the minimax risk.
///
/// One side condition must be verified first (via Remez); if none holds the
/// call fails. The correction terms depend on the branch of `α`:
/// `α ∈ (0, 1)`, `α = 1` or `α ∈ (1, 2)`.
pub fn composite_lower_bound(phi: &Functional, inp: &CompositeLowerBoundInput) -> Result<CompositeLowerBound> {
    if !(inp.n > 0.0 && inp.k >= 1.0 && inp.lambda > 0.0 && inp.degree >= 1 && inp.d >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need n > 0, k ≥ 1, λ > 0, L ≥ 1 and d ≥ 0 (got n = {}, k = {}, λ = {}, L = {}, d = {})",
            inp.n, inp.k, inp.lambda, inp.degree, inp.d
        )));
    }
    let condition = match inp.condition {
        SideCondition::Plain => plain_check(phi, inp)?,
        SideCondition::Tilted { gamma } => tilted_check(phi, inp, gamma)?,
        SideCondition::Auto => match plain_check(phi, inp) {
            Ok(c) => c,
            Err(first) => tilted_check(phi, inp, None).map_err(|second| {
                Error::Config(format!("neither side condition holds: {first}; {second}"))
            })?,
        },
    };
    let (n, k, lambda, a, w, wp) = (inp.n, inp.k, inp.lambda, inp.alpha, inp.w, inp.w_prime);
    let tv = tv_term(n, k, lambda, inp.degree);
    let main = inp.d * inp.d / 32.0 * (7.0 / 8.0 - tv);
    let decay = (-n / 32.0).exp();
    let corrections: Vec<(String, f64)> = if a > 0.0 && a < 1.0 {
        vec![
            ("W·k^(1−2α)·λ^(2α)".into(), w * k.powf(1.0 - 2.0 * a) * lambda.powf(2.0 * a)),
            ("W′·k^(2−2α)·e^(−n/32)".into(), wp * k.powf(2.0 - 2.0 * a) * decay),
            (
                "4^(2α)·W′·k^(2−2α)·k^(−α)·λ^(2α)".into(),
                4f64.powf(2.0 * a) * wp * k.powf(2.0 - 3.0 * a) * lambda.powf(2.0 * a),
            ),
        ]
    } else if (a - 1.0).abs() < 1e-12 {
        let lnek = (std::f64::consts::E * k).ln();
        let s = 4.0 * lambda / k.sqrt();
        vec![
            (
                "W·λ²·ln²(λ/(ek))/k".into(),
                w * lambda * lambda * (lambda / (std::f64::consts::E * k)).ln().powi(2) / k,
            ),
            ("W′·ln²(ek)·e^(−n/32)".into(), wp * lnek * lnek * decay),
            ("16·W′·λ²·ln²(ek)/k".into(), 16.0 * wp * lambda * lambda / k * lnek * lnek),
            ("W′·(1+4λ/√k)²·ln²(1+4λ/√k)".into(), wp * (1.0 + s).powi(2) * (1.0 + s).ln().powi(2)),
        ]
    } else if a > 1.0 && a < 2.0 {
        vec![
            ("W·k^(1−2α)·λ^(2α)".into(), w * k.powf(1.0 - 2.0 * a) * lambda.powf(2.0 * a)),
            ("W′·e^(−n/32)".into(), wp * decay),
            ("16·W′·λ²/k²".into(), 16.0 * wp * lambda * lambda / (k * k)),
        ]
    } else {
        return Err(Error::InvalidInput(format!("α = {a} is outside (0, 2)")));
    };
    let value = main - corrections.iter().map(|(_, v)| v).sum::<f64>();
    Ok(CompositeLowerBound { value, main, tv_term: tv, corrections, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(d: f64, alpha: f64) -> CompositeLowerBoundInput {
        CompositeLowerBoundInput {
            n: 1e4,
            k: 1e4,
            lambda: 0.05,
            degree: 4,
            d,
            alpha,
            w: 1.0,
            w_prime: 1.0,
            condition: SideCondition::Plain,
        }
    }

    #[test]
    fn zero_separation_is_non_positive() {
        for (phi, a) in [(Functional::power(0.5), 0.5), (Functional::Shannon, 1.0), (Functional::power(1.5), 1.5)] {
            let b = composite_lower_bound(&phi, &input(0.0, a)).unwrap();
            assert_eq!(b.main, 0.0);
            assert!(b.value <= 0.0);
        }
    }

    #[test]
    fn tv_term_arithmetic() {
        // λ = C₁k ln n/n and L = ⌈C₂ ln n⌉ give k(2eC₁ ln n/L)^L
        let (n, k, c1, c2) = (1e4f64, 1e4f64, 0.01, 1.0);
        let lambda = c1 * k * n.ln() / n;
        let l = (c2 * n.ln()).ceil() as usize;
        let direct = k * (2.0 * std::f64::consts::E * c1 * n.ln() / l as f64).powi(l as i32);
        assert!((tv_term(n, k, lambda, l) - direct).abs() < 1e-12 * direct);
        assert!(direct < 1e-3);
    }

    #[test]
    fn large_n_leaves_the_lambda_terms() {
        // with λ small the TV term is negligible and e^{−n/32} underflows
        let phi = Functional::power(0.5);
        let (k, lambda, l) = (10.0, 1e-9, 4);
        let e = remez_best_approx(|x| phi.eval(x), l, Interval::new(0.0, lambda / k).unwrap())
            .unwrap()
            .sup_error;
        let inp = CompositeLowerBoundInput {
            n: 1e5,
            k,
            lambda,
            degree: l,
            d: 2.0 * k * e,
            alpha: 0.5,
            w: 2.0,
            w_prime: 3.0,
            condition: SideCondition::Plain,
        };
        let b = composite_lower_bound(&phi, &inp).unwrap();
        assert!(b.tv_term < 1e-15);
        let lambda_terms = 2.0 * lambda + 4.0 * 3.0 * k.powf(0.5) * lambda;
        let want = inp.d * inp.d / 32.0 * 7.0 / 8.0 - lambda_terms;
        assert!((b.value - want).abs() < 1e-12 * want.abs().max(lambda_terms));
        assert_eq!(b.corrections[1].1, 0.0);
    }

    #[test]
    fn plain_condition_is_enforced() {
        let phi = Functional::Shannon;
        let mut inp = input(1.0, 1.0);
        assert!(matches!(composite_lower_bound(&phi, &inp), Err(Error::Config(_))));
        inp.condition = SideCondition::Auto;
        assert!(matches!(composite_lower_bound(&phi, &inp), Err(Error::Config(_))));
        inp.lambda = 0.5;
        inp.condition = SideCondition::Plain;
        assert!(composite_lower_bound(&phi, &inp).is_err());
    }

    #[test]
    fn tilted_condition_for_entropy() {
        // for φ = −x ln x, φ* = −ln x and E_L(φ*, [γ, 2L²γ]) does not depend on γ
        let phi = Functional::Shannon;
        let mut inp = input(0.0, 1.0);
        inp.condition = SideCondition::Tilted { gamma: None };
        let a = composite_lower_bound(&phi, &inp).unwrap();
        inp.condition = SideCondition::Tilted { gamma: Some(1e-3) };
        let b = composite_lower_bound(&phi, &inp).unwrap();
        let ea = a.condition.lhs / (2.0 * inp.k * a.condition.interval.lo());
        let eb = b.condition.lhs / (2.0 * inp.k * 1e-3);
        assert!((ea - eb).abs() < 1e-8 * ea);
    }
}
