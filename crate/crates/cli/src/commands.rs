use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;

use minifunc::estimators::{
    default_order, validate_config, CompositeEstimator, Estimator, EstimatorConfig, Histogram,
};
use minifunc::functional::{check_divergence_speed, default_speed_grid};
use minifunc::lower_bounds::{
    composite_lower_bound, divergence, hellinger_le_cam_bound, le_cam_bound, moment_matched_pair,
    poisson_mixture_tv, shifted_pair, tilted_pair, CompositeLowerBoundInput, DivergenceKind, SideCondition,
    TwoPointPair,
};
use minifunc::poly::remez_best_approx;
use minifunc::risk::{rate_sweep, rep_rng, EstimatorChoice, SweepConfig};
use minifunc::Error;
use serde_json::{json, Value};

use crate::config::{
    ApproxArgs, CheckSpeedArgs, Command, ConditionArg, Construction, EstimateArgs, LowerBoundArgs, PriorsArgs,
    RunConfig, SweepArgs,
};
use crate::failure::Failure;
use crate::histogram::read_histogram;

/// Execute `cfg` and return its JSON report, which embeds `cfg`.
pub fn run(cfg: &RunConfig) -> Result<Value, Failure> {
    let body = match &cfg.command {
        Command::Estimate(a) => estimate(cfg, a)?,
        Command::Approx(a) => approx(a)?,
        Command::RiskSweep(a) => risk_sweep(cfg, a)?,
        Command::LowerBound(a) => lower_bound(a)?,
        Command::CheckSpeed(a) => check_speed(a)?,
        Command::Priors(a) => priors(a)?,
    };
    let mut out = json!({ "config": cfg });
    if let (Value::Object(dst), Value::Object(src)) = (&mut out, body) {
        dst.extend(src);
    }
    Ok(out)
}

fn require_validated(choice: EstimatorChoice, cfg: &RunConfig) -> Result<(), Failure> {
    if !choice.is_validated() && !cfg.allow_unvalidated {
        return Err(Failure::config(format!(
            "estimator `{choice}` uses constants that fail validation; pass --allow-unvalidated to use it"
        )));
    }
    Ok(())
}

fn estimate(cfg: &RunConfig, a: &EstimateArgs) -> Result<Value, Failure> {
    let counts = read_histogram(&a.input, a.k)?;
    let total: u64 = counts.iter().sum();
    let n = a.n.unwrap_or(total);
    let k = counts.len();
    let h = Histogram::new(counts, n, a.model)?;
    let phi = a.phi.build();
    let mut warnings = Vec::new();
    let estimator = match (a.c1, a.c2) {
        (Some(c1), Some(c2)) => {
            if !matches!(a.estimator, EstimatorChoice::Composite | EstimatorChoice::CompositePractical) {
                return Err(Failure::input("--c1/--c2 only apply to the composite estimator"));
            }
            let ecfg = EstimatorConfig { c1, c2, correction_order: default_order(phi.alpha()), rng_seed: cfg.master_seed };
            let violations = validate_config(&ecfg, phi.alpha());
            if !violations.is_empty() {
                if !cfg.allow_unvalidated {
                    return Err(Error::Violations(violations).into());
                }
                warnings.extend(violations.iter().map(|v| format!("unvalidated constants: {v}")));
            }
            Estimator::Composite(Arc::new(CompositeEstimator::new_unchecked(phi.clone(), ecfg)?))
        }
        _ => {
            require_validated(a.estimator, cfg)?;
            a.estimator.build(&phi, cfg.master_seed)?
        }
    };
    let mut rng = rep_rng(cfg.master_seed, n, k as u64, "estimate", 0);
    let est = estimator.estimate(&phi, &h, &mut rng)?;
    warnings.extend(est.warnings);
    Ok(json!({
        "k": k,
        "n": n,
        "estimator": a.estimator.id(),
        "estimate": est.value,
        "branch_counts": est.branch_counts,
        "warnings": warnings,
    }))
}

fn approx(a: &ApproxArgs) -> Result<Value, Failure> {
    let phi = a.phi.build();
    let r = remez_best_approx(|x| phi.eval(x), a.degree, a.interval)?;
    if !r.converged {
        return Err(Failure::numerical(format!(
            "Remez exchange did not converge after {} iterations (best sup error {:e})",
            r.iterations, r.sup_error
        )));
    }
    Ok(json!({
        "degree": a.degree,
        "interval": a.interval,
        "sup_error": r.sup_error,
        "iterations": r.iterations,
        "alternation_points": r.alternation_points,
        "coefficients": r.poly.coeffs(),
        "chebyshev_coefficients": r.cheb_coeffs,
    }))
}

fn risk_sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<Value, Failure> {
    for &e in &a.estimators {
        require_validated(e, cfg)?;
    }
    let sweep = SweepConfig {
        family: a.family,
        phi: a.functional(),
        estimators: a.estimators.clone(),
        n_grid: a.n_grid.clone(),
        k_rule: a.k_rule,
        reps: a.reps,
        master_seed: cfg.master_seed,
        model: a.model,
    };
    let result = rate_sweep(&sweep)?;
    let file = File::create(&a.out).map_err(|e| Failure::input(format!("{}: {e}", a.out.display())))?;
    result.write_csv(BufWriter::new(file))?;
    Ok(json!({
        "out": a.out,
        "rows": result.rows.len(),
        "slopes": result.slopes,
        "warnings": result.warnings,
    }))
}

fn lower_bound(a: &LowerBoundArgs) -> Result<Value, Failure> {
    let out = match &a.construction {
        Construction::LeCam { phi, p, q, k, n } => {
            let phi = phi.build();
            let pair = TwoPointPair::new(*p, *q, *k, &phi)?;
            let kl = divergence(&pair.p_vec, &pair.q_vec, DivergenceKind::Kl)?;
            let chi2 = divergence(&pair.p_vec, &pair.q_vec, DivergenceKind::Chi2)?;
            json!({
                "construction": "le-cam",
                "bound_value": le_cam_bound(&pair.p_vec, &pair.q_vec, &phi, *n)?,
                "terms": { "theta_gap": pair.theta_gap, "kl": kl, "chi2": chi2, "kl_quadratic": pair.kl_bound },
            })
        }
        Construction::Hellinger { phi, beta, delta, k, n } => {
            let phi = phi.build();
            let (p, q) = shifted_pair(*beta, *delta, *k)?;
            let gap = minifunc::functional::additive_functional(&p, &phi)?
                - minifunc::functional::additive_functional(&q, &phi)?;
            json!({
                "construction": "hellinger",
                "bound_value": hellinger_le_cam_bound(&p, &q, &phi, *n)?,
                "terms": {
                    "theta_gap": gap,
                    "hellinger_squared": divergence(&p, &q, DivergenceKind::Hellinger)?,
                    "tv": divergence(&p, &q, DivergenceKind::Tv)?,
                },
            })
        }
        Construction::Composite { phi, n, k, lambda, degree, d, alpha, w, w_prime, condition, gamma } => {
            let phi = phi.build();
            let condition = match condition {
                ConditionArg::Plain => SideCondition::Plain,
                ConditionArg::Tilted => SideCondition::Tilted { gamma: *gamma },
                ConditionArg::Auto => SideCondition::Auto,
            };
            let mut input = CompositeLowerBoundInput {
                n: *n,
                k: *k,
                lambda: *lambda,
                degree: *degree,
                d: d.unwrap_or(0.0),
                alpha: alpha.unwrap_or_else(|| phi.alpha()),
                w: *w,
                w_prime: *w_prime,
                condition,
            };
            let mut b = composite_lower_bound(&phi, &input)?;
            if d.is_none() {
                input.d = b.condition.lhs;
                b = composite_lower_bound(&phi, &input)?;
            }
            let corrections: serde_json::Map<String, Value> =
                b.corrections.iter().map(|(name, v)| (name.clone(), json!(v))).collect();
            json!({
                "construction": "composite",
                "bound_value": b.value,
                "terms": {
                    "d": input.d,
                    "main": b.main,
                    "tv_term": b.tv_term,
                    "corrections": corrections,
                    "condition": b.condition,
                },
            })
        }
    };
    Ok(out)
}

fn check_speed(a: &CheckSpeedArgs) -> Result<Value, Failure> {
    let phi = a.phi.build();
    let alpha = a.alpha.unwrap_or_else(|| phi.alpha());
    let report = check_divergence_speed(&phi, a.ell, alpha, &default_speed_grid())?;
    Ok(json!({ "report": report }))
}

fn priors(a: &PriorsArgs) -> Result<Value, Failure> {
    let phi = a.phi.build();
    let grid = a.grid_size.unwrap_or(50 * (a.degree + 2));
    let (construction, pair) = match (a.gamma, a.eta) {
        (Some(gamma), Some(eta)) => ("tilted", tilted_pair(&phi, a.degree, gamma, eta, grid)?),
        _ => ("moment-matched", moment_matched_pair(&phi, a.degree, a.interval, grid)?),
    };
    let tv = match (a.tv_n, a.tv_k) {
        (Some(n), Some(k)) => Some(poisson_mixture_tv(&pair, n, k, None)?),
        _ => None,
    };
    let file = File::create(&a.out).map_err(|e| Failure::input(format!("{}: {e}", a.out.display())))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["x", "w0", "w1"]).map_err(Error::from)?;
    for ((x, w0), w1) in pair.support.iter().zip(&pair.w0).zip(&pair.w1) {
        w.write_record([x.to_string(), w0.to_string(), w1.to_string()]).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(json!({
        "out": a.out,
        "construction": construction,
        "matched_orders": pair.matched_orders,
        "gap": pair.gap,
        "reference_gap": pair.reference_gap,
        "max_moment_residual": pair.max_moment_residual,
        "support_size": pair.support.len(),
        "poisson_tv": tv,
        "warnings": pair.warnings,
    }))
}
