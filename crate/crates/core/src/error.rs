use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the library.
///
/// The variants are grouped the way callers react to them: bad user input,
/// invalid estimator configuration, and numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("functional is not finite at index {index} (p = {p})")]
    NonFinite { index: usize, p: f64 },

    #[error("derivative order {order} outside 1..={max}")]
    DerivativeOrder { order: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration violates {} constraint(s): {}", .0.len(), join_violations(.0))]
    Violations(Vec<crate::estimators::Violation>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("truncation at {trunc} leaves Poisson tail mass {tail:e} at rate {rate}")]
    Truncation { trunc: usize, tail: f64, rate: f64 },

    #[error("estimator failed at rep {rep}: {source}")]
    Rep {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[crate::estimators::Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
