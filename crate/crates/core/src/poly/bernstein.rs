use super::{Interval, Polynomial};
use crate::error::{Error, Result};

/// Largest degree for which [`bernstein_approx`] expands to monomials.
pub const MAX_MONOMIAL_BERNSTEIN_DEGREE: usize = 64;

/// Bernstein polynomial `B_L[f]` of an interval, kept in evaluation form
/// (its control values `f(lo + ν·w/L)`), valid for any degree.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinApprox {
    values: Vec<f64>,
    interval: Interval,
}

impl BernsteinApprox {
    /// `B_L[f]` on `[0, 1]`.
    pub fn new<F: Fn(f64) -> f64>(f: F, degree: usize) -> Result<Self> {
        Self::on_interval(f, degree, Interval::unit())
    }

    /// `B_L[f]` on an arbitrary interval, via the affine map onto `[0, 1]`.
    pub fn on_interval<F: Fn(f64) -> f64>(f: F, degree: usize, interval: Interval) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("Bernstein degree must be at least 1".into()));
        }
        let values = (0..=degree)
            .map(|nu| {
                let u = nu as f64 / degree as f64;
                f(interval.lo() + u * interval.width())
            })
            .collect();
        Ok(Self { values, interval })
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// De Casteljau evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = ((x - self.interval.lo()) / self.interval.width()).clamp(0.0, 1.0);
        let mut b = self.values.clone();
        let l = b.len();
        for r in 1..l {
            for i in 0..l - r {
                b[i] = (1.0 - u) * b[i] + u * b[i + 1];
            }
        }
        b[0]
    }

    /// Largest `|B_L[f](x) − f(x)|` over `points` uniform points.
    pub fn max_error<F: Fn(f64) -> f64>(&self, f: F, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = self.interval.lo() + self.interval.width() * i as f64 / (points - 1) as f64;
                (self.eval(x) - f(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `B_L[f]` on `[0, 1]` expanded in the monomial basis.
///
/// Uses `B_L[f](x) = Σ_m C(L,m) Δ^m f(0) x^m` with forward differences at
/// step `1/L`. Rounding in the differences is amplified roughly like
/// `3^L·ε` when the monomial form is evaluated, so it stays within 1e-10 of
/// the exact Bernstein sum only up to degree ~16; [`BernsteinApprox`] is
/// accurate at every degree. Degrees above 64 are rejected.
pub fn bernstein_approx<F: Fn(f64) -> f64>(f: F, degree: usize) -> Result<Polynomial> {
    if degree > MAX_MONOMIAL_BERNSTEIN_DEGREE {
        return Err(Error::InvalidInput(format!(
            "Bernstein degree {degree} exceeds {MAX_MONOMIAL_BERNSTEIN_DEGREE}; \
             use the evaluation form"
        )));
    }
    let b = BernsteinApprox::new(f, degree)?;
    let mut diffs = b.values.clone();
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut binom = 1.0;
    for m in 0..=degree {
        coeffs.push(binom * diffs[0]);
        for i in 0..diffs.len() - 1 {
            diffs[i] = diffs[i + 1] - diffs[i];
        }
        diffs.pop();
        binom = binom * (degree - m) as f64 / (m + 1) as f64;
    }
    Polynomial::new(coeffs, Interval::unit())
}
