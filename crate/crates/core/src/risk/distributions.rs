use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::ProbabilityVector;
use crate::numeric::ksum;

/// Test distribution families for the risk lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform,
    /// `p_i ∝ i^{−s}`.
    Zipf { s: f64 },
    /// `(1 − p, p/(k−1), …, p/(k−1))`.
    TwoSpike { p: f64 },
    /// A draw from the symmetric Dirichlet distribution.
    Dirichlet { conc: f64 },
}

impl Family {
    /// Whether [`DistributionSpec::generate`] consumes randomness.
    pub fn is_random(&self) -> bool {
        matches!(self, Family::Dirichlet { .. })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Uniform => write!(f, "uniform"),
            Family::Zipf { s } => write!(f, "zipf:{s}"),
            Family::TwoSpike { p } => write!(f, "two_spike:{p}"),
            Family::Dirichlet { conc } => write!(f, "dirichlet:{conc}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `uniform`, `zipf[:s]` (default `s = 1`), `two_spike:p` or
    /// `dirichlet:conc`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let value = |what: &str| -> Result<f64> {
            let raw = arg.ok_or_else(|| Error::InvalidInput(format!("family `{name}` needs a {what}")))?;
            raw.parse().map_err(|_| Error::InvalidInput(format!("bad {what} `{raw}` for family `{name}`")))
        };
        let family = match name {
            "uniform" if arg.is_none() => Family::Uniform,
            "zipf" => Family::Zipf { s: if arg.is_some() { value("exponent")? } else { 1.0 } },
            "two_spike" => Family::TwoSpike { p: value("spike mass")? },
            "dirichlet" => Family::Dirichlet { conc: value("concentration")? },
            _ => return Err(Error::InvalidInput(format!("unknown distribution family `{s}`"))),
        };
        family.check()?;
        Ok(family)
    }
}

impl Family {
    fn check(&self) -> Result<()> {
        let ok = match *self {
            Family::Uniform => true,
            Family::Zipf { s } => s.is_finite() && s >= 0.0,
            Family::TwoSpike { p } => p > 0.0 && p < 1.0,
            Family::Dirichlet { conc } => conc.is_finite() && conc > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid parameter in `{self}`")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
    pub k: usize,
}

impl DistributionSpec {
    pub fn new(family: Family, k: usize) -> Result<Self> {
        family.check()?;
        if k == 0 || (k == 1 && matches!(family, Family::TwoSpike { .. })) {
            return Err(Error::InvalidInput(format!("alphabet size {k} is too small for `{family}`")));
        }
        Ok(Self { family, k })
    }

    /// The distribution; only the Dirichlet family draws from `rng`.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ProbabilityVector> {
        let k = self.k;
        let raw: Vec<f64> = match self.family {
            Family::Uniform => return Ok(ProbabilityVector::uniform(k)),
            Family::Zipf { s } => (1..=k).map(|i| (i as f64).powf(-s)).collect(),
            Family::TwoSpike { p } => {
                let mut v = vec![p / (k - 1) as f64; k];
                v[0] = 1.0 - p;
                return ProbabilityVector::new(v);
            }
            Family::Dirichlet { conc } => {
                let gamma = Gamma::new(conc, 1.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
                let mut v: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
                if v.iter().all(|&x| x == 0.0) {
                    // every coordinate underflowed; fall back to a vertex
                    v[0] = 1.0;
                }
                v
            }
        };
        let total = ksum(raw.iter().copied());
        ProbabilityVector::new(raw.into_iter().map(|x| x / total).collect())
    }
}
