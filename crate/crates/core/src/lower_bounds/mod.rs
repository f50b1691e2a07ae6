//! Lower-bound constructions: two-point pairs, moment-matched priors and
//! their Poisson mixtures, and the best-approximation lower bound.

mod composite;
mod divergence;
mod helper;
mod le_cam;
mod poisson_tv;
mod priors;
mod simplex;

pub use composite::{
    composite_lower_bound, tv_term, CompositeLowerBound, CompositeLowerBoundInput, ConditionCheck,
    SideCondition,
};
pub use divergence::{divergence, DivergenceKind};
pub use helper::{maximize_on_simplex, SimplexMax};
pub use le_cam::{hellinger_formula, hellinger_le_cam_bound, le_cam_bound, shifted_pair, TwoPointPair};
pub use poisson_tv::{default_truncation, mixture_tv_bound, poisson_mixture_tv, PoissonTv, TAIL_TOLERANCE};
pub use priors::{chebyshev_grid, moment_matched_pair, tilted_pair, MeasurePair, GAP_WARN_THRESHOLD};
pub use simplex::{solve_lp, LpSolution};
