//! The functional `φ`, its analytic derivatives, the truncation operator
//! `T_Δ` and the bias-corrected surrogates `φ̄_{2,Δ}` and `φ̄_{4,Δ}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ksum, log_space};

/// Highest derivative order available analytically for the built-in functionals.
pub const BUILTIN_MAX_ORDER: usize = 6;

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;
type DerivFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// A user supplied functional with analytic derivatives.
///
/// `eval` is only called for `p > 0`; the value at zero is `at_zero`, which
/// must be the limit `lim_{p↓0} φ(p)`.
pub struct CustomFunctional {
    name: String,
    alpha: f64,
    at_zero: f64,
    max_deriv_order: usize,
    eval: Box<EvalFn>,
    deriv: Box<DerivFn>,
}

impl CustomFunctional {
    pub fn new(
        name: impl Into<String>,
        alpha: f64,
        at_zero: f64,
        max_deriv_order: usize,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            alpha,
            at_zero,
            max_deriv_order,
            eval: Box::new(eval),
            deriv: Box::new(deriv),
        }
    }
}

/// The function `φ : [0, 1] → ℝ` defining `θ(P; φ) = Σ φ(p_i)`.
#[derive(Clone)]
pub enum Functional {
    /// `φ(p) = p^α`.
    Power { alpha: f64 },
    /// `φ(p) = −p ln p`.
    Shannon,
    Custom(Arc<CustomFunctional>),
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Power { alpha } => write!(f, "Power({alpha})"),
            Functional::Shannon => write!(f, "Shannon"),
            Functional::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl Functional {
    pub fn power(alpha: f64) -> Self {
        Functional::Power { alpha }
    }

    pub fn custom(c: CustomFunctional) -> Self {
        Functional::Custom(Arc::new(c))
    }

    /// Short identifier used in reports and seeds.
    pub fn id(&self) -> String {
        match self {
            Functional::Power { alpha } => format!("power:{alpha}"),
            Functional::Shannon => "shannon".to_string(),
            Functional::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// Declared divergence-speed exponent `α`.
    pub fn alpha(&self) -> f64 {
        match self {
            Functional::Power { alpha } => *alpha,
            Functional::Shannon => 1.0,
            Functional::Custom(c) => c.alpha,
        }
    }

    pub fn max_deriv_order(&self) -> usize {
        match self {
            Functional::Power { .. } | Functional::Shannon => BUILTIN_MAX_ORDER,
            Functional::Custom(c) => c.max_deriv_order,
        }
    }

    /// `φ(p)`, with `φ(0)` defined as the right limit at zero.
    pub fn eval(&self, p: f64) -> f64 {
        match self {
            Functional::Power { alpha } => {
                if p == 0.0 {
                    if *alpha > 0.0 {
                        0.0
                    } else if *alpha == 0.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p.powf(*alpha)
                }
            }
            Functional::Shannon => {
                if p == 0.0 {
                    0.0
                } else {
                    -p * p.ln()
                }
            }
            Functional::Custom(c) => {
                if p == 0.0 {
                    c.at_zero
                } else {
                    (c.eval)(p)
                }
            }
        }
    }

    /// `φ^{(order)}(p)` for `p > 0`.
    pub fn deriv(&self, order: usize, p: f64) -> Result<f64> {
        let max = self.max_deriv_order();
        if order == 0 || order > max {
            return Err(Error::DerivativeOrder { order, max });
        }
        Ok(self.deriv_unchecked(order, p))
    }

    fn deriv_unchecked(&self, order: usize, p: f64) -> f64 {
        match self {
            Functional::Power { alpha } => {
                let coeff: f64 = (0..order).map(|j| alpha - j as f64).product();
                if coeff == 0.0 {
                    0.0
                } else {
                    coeff * p.powf(alpha - order as f64)
                }
            }
            Functional::Shannon => {
                if order == 1 {
                    -p.ln() - 1.0
                } else {
                    let fact: f64 = (1..=order - 2).map(|j| j as f64).product();
                    let sign = if order.is_multiple_of(2) { -1.0 } else { 1.0 };
                    sign * fact * p.powi(1 - order as i32)
                }
            }
            Functional::Custom(c) => (c.deriv)(order, p),
        }
    }

    /// `φ(p) + c + c'·(p − 1/k)` as a custom functional.
    ///
    /// For probability vectors on the simplex this changes `θ` by exactly
    /// `k·c`; with `c = 0` the additive functional is unchanged.
    pub fn affine_shift(&self, c: f64, c_prime: f64, k: usize) -> Functional {
        let base = self.clone();
        let base_d = self.clone();
        let shift = move |p: f64| c + c_prime * (p - 1.0 / k as f64);
        Functional::custom(CustomFunctional::new(
            format!("{}+affine", self.id()),
            self.alpha(),
            self.eval(0.0) + shift(0.0),
            self.max_deriv_order(),
            move |p| base.eval(p) + shift(p),
            move |order, p| {
                let d = base_d.deriv_unchecked(order, p);
                if order == 1 {
                    d + c_prime
                } else {
                    d
                }
            },
        ))
    }
}

/// JSON-serialisable selection of a built-in functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionalSpec {
    Power { alpha: f64 },
    Shannon,
}

impl FunctionalSpec {
    /// Parses either the JSON form (`{"kind":"power","alpha":0.5}`) or the
    /// shorthand `power:0.5` / `shannon`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s)
                .map_err(|e| Error::InvalidInput(format!("bad functional JSON {s}: {e}")));
        }
        match s.split_once(':') {
            None if s.eq_ignore_ascii_case("shannon") => Ok(FunctionalSpec::Shannon),
            Some((kind, a)) if kind.eq_ignore_ascii_case("power") => a
                .trim()
                .parse::<f64>()
                .map(|alpha| FunctionalSpec::Power { alpha })
                .map_err(|e| Error::InvalidInput(format!("bad power exponent {a:?}: {e}"))),
            _ => Err(Error::InvalidInput(format!("unknown functional {s:?}"))),
        }
    }

    pub fn build(&self) -> Functional {
        match *self {
            FunctionalSpec::Power { alpha } => Functional::Power { alpha },
            FunctionalSpec::Shannon => Functional::Shannon,
        }
    }
}

/// A probability vector, optionally with slack `|Σ p_i − 1| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    tolerance: f64,
}

/// Slack used for vectors that are meant to lie exactly on the simplex.
pub const SIMPLEX_ROUNDING: f64 = 1e-12;

impl ProbabilityVector {
    /// Builds a vector on the simplex up to floating-point rounding.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, SIMPLEX_ROUNDING)
    }

    /// Builds a vector in the relaxed class `|Σ p_i − 1| ≤ tolerance`.
    pub fn with_tolerance(probs: Vec<f64>, tolerance: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        if !(tolerance >= 0.0) {
            return Err(Error::InvalidInput(format!("bad tolerance {tolerance}")));
        }
        if let Some(i) = probs.iter().position(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry {i} is not a non-negative finite number: {}",
                probs[i]
            )));
        }
        let total = ksum(probs.iter().copied());
        if (total - 1.0).abs() > tolerance {
            return Err(Error::InvalidInput(format!(
                "entries sum to {total}, outside 1 ± {tolerance}"
            )));
        }
        Ok(Self { probs, tolerance })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
            tolerance: SIMPLEX_ROUNDING,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// `θ(P; φ) = Σ_i φ(p_i)` with compensated summation.
pub fn additive_functional(p: &ProbabilityVector, phi: &Functional) -> Result<f64> {
    let mut terms = Vec::with_capacity(p.len());
    for (index, &pi) in p.probs().iter().enumerate() {
        let v = phi.eval(pi);
        if !v.is_finite() {
            return Err(Error::NonFinite { index, p: pi });
        }
        terms.push(v);
    }
    Ok(ksum(terms))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("truncation level {delta} outside (0, 1)")))
    }
}

/// `T_Δ[φ](p)`: `φ(Δ)` below `Δ`, `φ(p)` on `[Δ, 1]`, `φ(1)` above one.
pub fn truncated_eval(phi: &Functional, delta: f64, p: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(truncated_eval_unchecked(phi, delta, p))
}

fn truncated_eval_unchecked(phi: &Functional, delta: f64, p: f64) -> f64 {
    if p < delta {
        phi.eval(delta)
    } else if p <= 1.0 {
        phi.eval(p)
    } else {
        phi.eval(1.0)
    }
}

/// `T^{(ℓ)}_Δ[φ](p)`: zero outside `[Δ, 1]`, `φ^{(ℓ)}(p)` inside.
pub fn truncated_deriv(phi: &Functional, order: usize, delta: f64, p: f64) -> Result<f64> {
    check_delta(delta)?;
    let max = phi.max_deriv_order();
    if order == 0 || order > max {
        return Err(Error::DerivativeOrder { order, max });
    }
    Ok(truncated_deriv_unchecked(phi, order, delta, p))
}

fn truncated_deriv_unchecked(phi: &Functional, order: usize, delta: f64, p: f64) -> f64 {
    if p < delta || p > 1.0 {
        0.0
    } else {
        phi.deriv_unchecked(order, p)
    }
}

/// Order of the Taylor bias correction applied by the plugin branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum CorrectionOrder {
    Second,
    Fourth,
}

impl TryFrom<u8> for CorrectionOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(CorrectionOrder::Second),
            4 => Ok(CorrectionOrder::Fourth),
            other => Err(format!("correction order must be 2 or 4, got {other}")),
        }
    }
}

impl From<CorrectionOrder> for u8 {
    fn from(c: CorrectionOrder) -> u8 {
        match c {
            CorrectionOrder::Second => 2,
            CorrectionOrder::Fourth => 4,
        }
    }
}

/// The truncated bias-corrected surrogate `φ̄_{2,Δ}` or `φ̄_{4,Δ}` at `p`.
///
/// ```text
/// φ̄_2 = T_Δ[φ] − p/(2n)·T⁽²⁾
/// φ̄_4 = φ̄_2 + p/(3n²)·T⁽³⁾ + 5p/(24n³)·T⁽⁴⁾ + p²/(8n²)·T⁽⁴⁾
/// ```
pub fn bias_corrected_fn(
    phi: &Functional,
    order: CorrectionOrder,
    delta: f64,
    n: f64,
    p: f64,
) -> Result<f64> {
    check_delta(delta)?;
    let needed = match order {
        CorrectionOrder::Second => 2,
        CorrectionOrder::Fourth => 4,
    };
    if phi.max_deriv_order() < needed {
        return Err(Error::DerivativeOrder {
            order: needed,
            max: phi.max_deriv_order(),
        });
    }
    Ok(bias_corrected_unchecked(phi, order, delta, n, p))
}

pub(crate) fn bias_corrected_unchecked(
    phi: &Functional,
    order: CorrectionOrder,
    delta: f64,
    n: f64,
    p: f64,
) -> f64 {
    let t = |l| truncated_deriv_unchecked(phi, l, delta, p);
    let second = truncated_eval_unchecked(phi, delta, p) - p / (2.0 * n) * t(2);
    match order {
        CorrectionOrder::Second => second,
        CorrectionOrder::Fourth => {
            let t4 = t(4);
            second
                + p / (3.0 * n * n) * t(3)
                + 5.0 * p / (24.0 * n * n * n) * t4
                + p * p / (8.0 * n * n) * t4
        }
    }
}

/// Outcome of a grid check of the divergence-speed sandwich
/// `W p^{α−ℓ} − c' ≤ |φ^{(ℓ)}(p)| ≤ W p^{α−ℓ} + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSpeedReport {
    pub ell: usize,
    pub alpha: f64,
    pub w: f64,
    pub c: f64,
    pub c_prime: f64,
    pub holds: bool,
    /// Grid point at which the fit broke down, when `holds` is false.
    pub witness: Option<f64>,
}

/// Relative deviation below which `|φ^{(ℓ)}|` and `W p^{α−ℓ}` count as equal.
const SPEED_REL_TOL: f64 = 1e-9;
/// Allowed relative drift of the limit ratio over the first decade of the grid.
const SPEED_LIMIT_DRIFT: f64 = 1e-3;

/// The default certificate grid: 4096 log-spaced points on `[1e-8, 1 − 1e-8]`.
pub fn default_speed_grid() -> Vec<f64> {
    log_space(1e-8, 1.0 - 1e-8, 4096)
}

/// Fits the divergence-speed constants on `grid` and reports whether they hold.
///
/// `W` is the ratio `|φ^{(ℓ)}(p)|·p^{ℓ−α}` at the smallest grid point. The
/// check fails when that ratio has not settled (it drifts by more than 0.1%
/// across the first decade of the grid) or is not positive; otherwise `c` and
/// `c'` are the smallest constants closing the sandwich on the grid.
pub fn check_divergence_speed(
    phi: &Functional,
    ell: usize,
    alpha: f64,
    grid: &[f64],
) -> Result<DivergenceSpeedReport> {
    let max = phi.max_deriv_order();
    if ell == 0 || ell > max {
        return Err(Error::DerivativeOrder { order: ell, max });
    }
    let mut pts: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|p| *p > 0.0 && *p < 1.0)
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput("grid needs at least two points in (0,1)".into()));
    }
    pts.sort_by(f64::total_cmp);

    let expo = alpha - ell as f64;
    let g: Vec<f64> = pts.iter().map(|&p| phi.deriv_unchecked(ell, p).abs()).collect();
    let s: Vec<f64> = pts.iter().map(|&p| p.powf(expo)).collect();
    let ratio = |i: usize| g[i] / s[i];

    let w = ratio(0);
    let fail = |witness| DivergenceSpeedReport {
        ell,
        alpha,
        w,
        c: f64::INFINITY,
        c_prime: f64::INFINITY,
        holds: false,
        witness: Some(witness),
    };
    if !(w.is_finite() && w > 0.0) {
        return Ok(fail(pts[0]));
    }
    let decade = pts.partition_point(|p| *p < 10.0 * pts[0]).min(pts.len() - 1);
    let drift = (ratio(decade) - w).abs() / w;
    if !(drift <= SPEED_LIMIT_DRIFT) {
        return Ok(fail(pts[decade]));
    }

    let mut c: f64 = 0.0;
    let mut c_prime: f64 = 0.0;
    for i in 0..pts.len() {
        let upper = w * s[i];
        let diff = g[i] - upper;
        if !diff.is_finite() {
            return Ok(fail(pts[i]));
        }
        if diff.abs() <= SPEED_REL_TOL * g[i].max(upper) {
            continue;
        }
        if diff > 0.0 {
            c = c.max(diff);
        } else {
            c_prime = c_prime.max(-diff);
        }
    }
    Ok(DivergenceSpeedReport {
        ell,
        alpha,
        w,
        c,
        c_prime,
        holds: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN4: f64 = 1.386_294_361_119_890_6;

    #[test]
    fn additive_functional_examples() {
        let u4 = ProbabilityVector::uniform(4);
        assert!((additive_functional(&u4, &Functional::Shannon).unwrap() - LN4).abs() < 1e-15);

        let deg = ProbabilityVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(additive_functional(&deg, &Functional::power(0.5)).unwrap(), 1.0);

        for k in [1usize, 7, 1000] {
            let u = ProbabilityVector::uniform(k);
            let v = additive_functional(&u, &Functional::power(2.0)).unwrap();
            assert!((v - 1.0 / k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn additive_functional_reports_offending_index() {
        let p = ProbabilityVector::new(vec![0.5, 0.0, 0.5]).unwrap();
        match additive_functional(&p, &Functional::power(-0.5)) {
            Err(Error::NonFinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::with_tolerance(vec![0.5, 0.6], 0.2).is_ok());
    }

    #[test]
    fn truncated_eval_examples() {
        let sh = Functional::Shannon;
        assert!((truncated_eval(&sh, 0.1, 0.05).unwrap() - 0.230_258_509_299_404_6).abs() < 1e-12);
        assert!((truncated_eval(&sh, 0.1, 0.5).unwrap() - 0.346_573_590_279_972_6).abs() < 1e-12);
        assert_eq!(truncated_eval(&Functional::power(2.0), 0.1, 1.5).unwrap(), 1.0);
        assert!(matches!(truncated_eval(&sh, 0.0, 0.5), Err(Error::Config(_))));
        assert!(matches!(truncated_eval(&sh, 1.0, 0.5), Err(Error::Config(_))));
    }

    #[test]
    fn truncated_deriv_examples() {
        let sh = Functional::Shannon;
        assert_eq!(truncated_deriv(&sh, 2, 0.1, 0.05).unwrap(), 0.0);
        assert_eq!(truncated_deriv(&sh, 2, 0.1, 0.5).unwrap(), -2.0);
        assert_eq!(truncated_deriv(&Functional::power(2.0), 2, 0.1, 2.0).unwrap(), 0.0);
        // left limit at p = 1
        assert_eq!(truncated_deriv(&sh, 2, 0.1, 1.0).unwrap(), -1.0);
        assert!(matches!(
            truncated_deriv(&sh, 7, 0.1, 0.5),
            Err(Error::DerivativeOrder { order: 7, max: 6 })
        ));
        assert!(truncated_deriv(&sh, 0, 0.1, 0.5).is_err());
    }

    #[test]
    fn bias_corrected_examples() {
        let o2 = CorrectionOrder::Second;
        let v = bias_corrected_fn(&Functional::power(2.0), o2, 0.1, 100.0, 0.5).unwrap();
        assert!((v - 0.245).abs() < 1e-15);
        let v = bias_corrected_fn(&Functional::Shannon, o2, 0.1, 100.0, 0.5).unwrap();
        assert!((v - (0.346_573_590_279_972_6 + 0.005)).abs() < 1e-12);
        let v = bias_corrected_fn(&Functional::Shannon, o2, 0.1, 100.0, 0.05).unwrap();
        assert!((v - 0.230_258_509_299_404_6).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_needs_four_derivatives() {
        let low = Functional::custom(CustomFunctional::new(
            "cubic-only",
            2.0,
            0.0,
            3,
            |p| p * p,
            |l, p| if l == 1 { 2.0 * p } else if l == 2 { 2.0 } else { 0.0 },
        ));
        assert!(bias_corrected_fn(&low, CorrectionOrder::Fourth, 0.1, 10.0, 0.5).is_err());
        assert!(bias_corrected_fn(&low, CorrectionOrder::Second, 0.1, 10.0, 0.5).is_ok());
    }

    #[test]
    fn builtin_derivatives_match_formulas() {
        let a: f64 = 0.7;
        let pw = Functional::power(a);
        let p: f64 = 0.3;
        let mut coeff = 1.0;
        for l in 1..=6 {
            coeff *= a - (l - 1) as f64;
            let want = coeff * p.powf(a - l as f64);
            assert!((pw.deriv(l, p).unwrap() - want).abs() <= 1e-12 * want.abs());
        }
        let sh = Functional::Shannon;
        assert!((sh.deriv(1, p).unwrap() - (-p.ln() - 1.0)).abs() < 1e-15);
        assert!((sh.deriv(2, p).unwrap() + 1.0 / p).abs() < 1e-12);
        assert!((sh.deriv(3, p).unwrap() - 1.0 / (p * p)).abs() < 1e-12);
        assert!((sh.deriv(4, p).unwrap() + 2.0 / p.powi(3)).abs() < 1e-9);
        assert!((sh.deriv(6, p).unwrap() + 24.0 / p.powi(5)).abs() < 1e-6);
    }

    #[test]
    fn shannon_derivatives_match_finite_differences() {
        // independent check of the sign pattern via central differences
        let sh = Functional::Shannon;
        let h = 1e-5;
        for l in 1..=4 {
            for &p in &[0.2, 0.5, 0.8] {
                let prev = |x: f64| if l == 1 { sh.eval(x) } else { sh.deriv(l - 1, x).unwrap() };
                let fd = (prev(p + h) - prev(p - h)) / (2.0 * h);
                let an = sh.deriv(l, p).unwrap();
                assert!((fd - an).abs() < 1e-5 * an.abs().max(1.0), "l={l} p={p}");
            }
        }
    }

    #[test]
    fn divergence_speed_examples() {
        let grid = default_speed_grid();
        let r = check_divergence_speed(&Functional::power(0.5), 4, 0.5, &grid).unwrap();
        assert!(r.holds);
        assert!((r.w - 0.9375).abs() < 1e-12);
        assert_eq!((r.c, r.c_prime), (0.0, 0.0));

        let r = check_divergence_speed(&Functional::Shannon, 2, 1.0, &grid).unwrap();
        assert!(r.holds);
        assert!((r.w - 1.0).abs() < 1e-12);
        assert_eq!((r.c, r.c_prime), (0.0, 0.0));

        let r = check_divergence_speed(&Functional::power(2.0), 2, 2.0, &grid).unwrap();
        assert!(r.holds);
        assert_eq!(r.w, 2.0);
        assert_eq!((r.c, r.c_prime), (0.0, 0.0));
    }

    #[test]
    fn divergence_speed_rejects_wrong_exponent() {
        let grid = default_speed_grid();
        // log divergence at ℓ = α for −p ln p
        let r = check_divergence_speed(&Functional::Shannon, 1, 1.0, &grid).unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_some());
        let r = check_divergence_speed(&Functional::power(0.5), 2, 0.6, &grid).unwrap();
        assert!(!r.holds);
        let r = check_divergence_speed(&Functional::power(0.5), 2, 0.4, &grid).unwrap();
        assert!(!r.holds);
        // identically-zero derivative has no positive W
        let r = check_divergence_speed(&Functional::power(2.0), 3, 2.0, &grid).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn divergence_speed_lower_order_terms_give_positive_constants() {
        // |φ'| = 0.5 p^{-1/2} + 1 → c ≈ 1 at p → 1
        let phi = Functional::custom(CustomFunctional::new(
            "sqrt+p",
            0.5,
            0.0,
            2,
            |p| p.sqrt() + p,
            |l, p| if l == 1 { 0.5 / p.sqrt() + 1.0 } else { -0.25 * p.powf(-1.5) },
        ));
        let r = check_divergence_speed(&phi, 1, 0.5, &default_speed_grid()).unwrap();
        assert!(r.holds);
        assert!((r.w - 0.5).abs() < 1e-3);
        assert!((r.c - 1.0).abs() < 1e-3);
    }

    #[test]
    fn power_speed_holds_for_every_order_above_alpha() {
        let grid = default_speed_grid();
        for &a in &[0.3, 0.5, 0.9, 1.4, 1.7] {
            for l in 1..=6usize {
                if (l as f64) <= a {
                    continue;
                }
                let r = check_divergence_speed(&Functional::power(a), l, a, &grid).unwrap();
                assert!(r.holds, "alpha={a} l={l}");
                assert_eq!((r.c, r.c_prime), (0.0, 0.0), "alpha={a} l={l}");
            }
        }
    }

    #[test]
    fn truncated_eval_is_continuous() {
        let fs = [Functional::Shannon, Functional::power(0.5), Functional::power(1.3)];
        for phi in &fs {
            for &delta in &[0.01, 0.2, 0.7] {
                let jump = |m: usize| {
                    (0..m)
                        .map(|i| {
                            let a = 1.2 * i as f64 / m as f64;
                            let b = 1.2 * (i + 1) as f64 / m as f64;
                            (truncated_eval(phi, delta, b).unwrap()
                                - truncated_eval(phi, delta, a).unwrap())
                            .abs()
                        })
                        .fold(0.0, f64::max)
                };
                let coarse = jump(1_000);
                let fine = jump(100_000);
                assert!(fine < coarse && fine < 1e-3, "{phi:?} delta={delta}");
            }
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(FunctionalSpec::parse("shannon").unwrap(), FunctionalSpec::Shannon);
        assert_eq!(
            FunctionalSpec::parse("power:0.5").unwrap(),
            FunctionalSpec::Power { alpha: 0.5 }
        );
        assert_eq!(
            FunctionalSpec::parse(r#"{"kind":"power","alpha":0.5}"#).unwrap(),
            FunctionalSpec::Power { alpha: 0.5 }
        );
        assert_eq!(
            FunctionalSpec::parse(r#"{"kind": "shannon"}"#).unwrap(),
            FunctionalSpec::Shannon
        );
        assert!(FunctionalSpec::parse("renyi:2").is_err());
        let json = serde_json::to_string(&FunctionalSpec::Power { alpha: 0.5 }).unwrap();
        assert_eq!(json, r#"{"kind":"power","alpha":0.5}"#);
    }
}
