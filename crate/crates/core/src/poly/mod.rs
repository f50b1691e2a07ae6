//! Polynomial machinery: finite differences and moduli of smoothness,
//! Bernstein operators, and best uniform approximation by the Remez
//! exchange algorithm.

mod bernstein;
mod chebyshev;
mod remez;
mod smoothness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bernstein::{bernstein_approx, BernsteinApprox, MAX_MONOMIAL_BERNSTEIN_DEGREE};
pub(crate) use chebyshev::cheb_basis;
pub use chebyshev::ChebSeries;
pub use remez::{
    approx_error_curve, remez_best_approx, ApproxResult, ErrorCurve, RemezOptions,
};
pub use smoothness::{finite_difference, modulus_of_smoothness, Weight};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")))
        }
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Affine map onto `[-1, 1]`.
    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// Inverse of [`Interval::to_unit`].
    pub fn from_unit(&self, t: f64) -> f64 {
        let x = self.lo + 0.5 * (t + 1.0) * (self.hi - self.lo);
        x.clamp(self.lo, self.hi)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = String;

    fn try_from(v: [f64; 2]) -> std::result::Result<Self, String> {
        Interval::new(v[0], v[1]).map_err(|e| e.to_string())
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl std::str::FromStr for Interval {
    type Err = Error;

    /// Parses `lo,hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("interval {s:?} is not lo,hi")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad interval bound {v:?}: {e}")))
        };
        Interval::new(parse(a)?, parse(b)?)
    }
}

/// A polynomial `Σ a_m x^m` in the monomial basis, tagged with the interval
/// it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    interval: Interval,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>, interval: Interval) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        Ok(Self { coeffs, interval })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }
}
