//! Acceptance suite. Every criterion runs at its fixed tolerance and prints a
//! single `PASS` or `FAIL` line; the process fails if any criterion does.

use std::process::Command;
use std::time::{Duration, Instant};

use minifunc::estimators::{
    default_config, factorial_moment, validate_config, CompositeEstimator, EstimatorConfig, SamplingModel,
};
use minifunc::lower_bounds::{le_cam_bound, maximize_on_simplex, moment_matched_pair, poisson_mixture_tv, TwoPointPair};
use minifunc::numeric::log_log_slope;
use minifunc::poly::remez_best_approx;
use minifunc::risk::{monte_carlo_risk, EstimatorChoice, RiskReport, SeedStream};
use minifunc::{Error, Functional, Interval, ProbabilityVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > budget {
        return Err(format!("{detail}; took {took:.1?}, budget {budget:.0?}"));
    }
    Ok(format!("{detail} ({took:.1?})"))
}

fn seeds(stream: &str) -> SeedStream {
    SeedStream { master_seed: 20_240_601, stream: stream.into() }
}

fn risk(p: &ProbabilityVector, choice: EstimatorChoice, n: u64, reps: usize, stream: &str) -> RiskReport {
    let est = choice.build(&Functional::Shannon, 7).expect("estimator builds");
    monte_carlo_risk(p, &Functional::Shannon, &est, n, SamplingModel::Multinomial, reps, &seeds(stream))
        .expect("risk run succeeds")
}

/// Mean of the falling factorial `(N)_m / n^m` over Poisson draws.
fn factorial_moments() -> Outcome {
    let start = Instant::now();
    let n = 10_000u64;
    let draws = 1_000_000usize;
    let mut worst: f64 = 0.0;
    for (i, p) in [0.001, 0.01, 0.1].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let pois = Poisson::new(n as f64 * p).unwrap();
        let counts: Vec<u64> = (0..draws).map(|_| pois.sample(&mut rng) as u64).collect();
        for m in 1..=8 {
            let scale = (n as f64).powi(m as i32);
            let vals: Vec<f64> = counts.iter().map(|&c| factorial_moment(c, m) / scale).collect();
            let mean = vals.iter().sum::<f64>() / draws as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
            let se = (var / draws as f64).sqrt();
            let z = (mean - p.powi(m as i32)).abs() / se;
            if z > 4.0 {
                return Err(format!("p = {p}, m = {m}: |z| = {z:.2} > 4"));
            }
            worst = worst.max(z);
        }
    }
    within_budget(start, Duration::from_secs(60), format!("largest |z| = {worst:.2} over 24 cases"))
}

fn remez_correctness() -> Outcome {
    let unit = Interval::unit();
    let e0 = remez_best_approx(|x| x, 0, unit).map_err(|e| e.to_string())?.sup_error;
    if (e0 - 0.5).abs() > 1e-10 {
        return Err(format!("degree-0 error of x is {e0}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_poly: f64 = 0.0;
    for degree in 0..=10usize {
        for target in 0..=degree {
            let coeffs: Vec<f64> = (0..=target).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
            let f = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let r = remez_best_approx(f, degree, unit).map_err(|e| e.to_string())?;
            worst_poly = worst_poly.max(r.sup_error);
        }
    }
    if worst_poly > 1e-12 {
        return Err(format!("polynomial recovery error {worst_poly:e}"));
    }
    let mut checked = 0;
    let cases: Vec<(Functional, Interval)> = vec![
        (Functional::power(0.5), unit),
        (Functional::Shannon, unit),
        (Functional::power(1.5), Interval::new(0.0, 0.1).unwrap()),
        (Functional::power(0.3), Interval::new(0.0, 0.01).unwrap()),
    ];
    for (phi, interval) in &cases {
        for degree in [1, 2, 4, 8, 16, 24] {
            let r = remez_best_approx(|x| phi.eval(x), degree, *interval).map_err(|e| e.to_string())?;
            if !r.converged {
                continue;
            }
            checked += 1;
            let pts = &r.alternation_points;
            if pts.len() != degree + 2 {
                return Err(format!("L = {degree}: {} alternation points", pts.len()));
            }
            let resid: Vec<f64> = pts.iter().map(|&x| phi.eval(x) - r.eval(x)).collect();
            for w in resid.windows(2) {
                if w[0].signum() == w[1].signum() {
                    return Err(format!("L = {degree}: residual signs do not alternate"));
                }
            }
            let lo = resid.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            if lo < r.sup_error * (1.0 - 1e-6) {
                return Err(format!("L = {degree}: extremum {lo:e} below E = {:e}", r.sup_error));
            }
        }
    }
    check(
        checked == 24,
        format!("E_0(x) = {e0}, recovery error ≤ {worst_poly:.1e}, {checked}/24 converged results alternate"),
    )
}

fn approximation_scaling() -> Outcome {
    let start = Instant::now();
    let phi = Functional::power(0.5);
    let lambda = 0.1;
    let interval = Interval::new(0.0, lambda).unwrap();
    let degrees: Vec<usize> = (4..=40).collect();
    let mut errs = Vec::new();
    for &l in &degrees {
        errs.push(remez_best_approx(|x| phi.eval(x), l, interval).map_err(|e| e.to_string())?.sup_error);
    }
    let ls: Vec<f64> = degrees.iter().map(|&l| l as f64).collect();
    let slope_l = log_log_slope(&ls, &errs);
    let lambdas = [1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.3, 1.0];
    let mut errs_lambda = Vec::new();
    for &lam in &lambdas {
        let iv = Interval::new(0.0, lam).unwrap();
        errs_lambda.push(remez_best_approx(|x| phi.eval(x), 16, iv).map_err(|e| e.to_string())?.sup_error);
    }
    let slope_lambda = log_log_slope(&lambdas, &errs_lambda);
    let detail = format!("slope in L = {slope_l:.4}, slope in λ = {slope_lambda:.4}");
    if (slope_l + 1.0).abs() > 0.15 || (slope_lambda - 0.5).abs() > 0.1 {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(120), detail)
}

fn moment_matched_pairs() -> Outcome {
    let start = Instant::now();
    let square = Functional::power(2.0);
    let pair = moment_matched_pair(&square, 1, Interval::unit(), 201).map_err(|e| e.to_string())?;
    if (pair.gap - 0.25).abs() > 0.005 {
        return Err(format!("gap for x² at L = 1 is {}", pair.gap));
    }
    let mut worst_moment: f64 = 0.0;
    let mut tv_checks = 0;
    let mut pairs = vec![(1usize, pair)];
    for l in [2usize, 4, 6, 8, 10, 12] {
        let phi = Functional::power(0.5);
        pairs.push((l, moment_matched_pair(&phi, l, Interval::unit(), 50 * (l + 2)).map_err(|e| e.to_string())?));
    }
    for (l, pair) in &pairs {
        let total0: f64 = pair.w0.iter().sum();
        let total1: f64 = pair.w1.iter().sum();
        if pair.w0.iter().chain(&pair.w1).any(|&w| w < 0.0) || (total0 - 1.0).abs() > 1e-8 || (total1 - 1.0).abs() > 1e-8 {
            return Err(format!("L = {l}: weights are not probability vectors"));
        }
        for m in 1..=*l {
            let diff: f64 = pair.support.iter().zip(pair.w0.iter().zip(&pair.w1)).map(|(x, (a, b))| (a - b) * x.powi(m as i32)).sum();
            worst_moment = worst_moment.max(diff.abs());
        }
        // rates n·x/k with n/k = M and L > 2eM
        for frac in [0.1, 0.5, 0.9] {
            let m = frac * *l as f64 / (2.0 * std::f64::consts::E);
            let tv = poisson_mixture_tv(pair, m, 1.0, None).map_err(|e| e.to_string())?;
            tv_checks += 1;
            if !(tv.numeric_tv <= tv.bound) {
                return Err(format!("L = {l}, M = {m}: TV {} exceeds {}", tv.numeric_tv, tv.bound));
            }
        }
    }
    if worst_moment > 1e-8 {
        return Err(format!("moment mismatch {worst_moment:e}"));
    }
    within_budget(
        start,
        Duration::from_secs(120),
        format!("gap(x², L = 1) = {:.6}, moments within {worst_moment:.1e}, {tv_checks} TV bounds hold", pairs[0].1.gap),
    )
}

fn plugin_bias() -> Outcome {
    let start = Instant::now();
    let (k, n, reps) = (100usize, 100_000u64, 10_000usize);
    let p = ProbabilityVector::uniform(k);
    let plain = risk(&p, EstimatorChoice::Plugin, n, reps, "bias-plugin");
    let corrected = risk(&p, EstimatorChoice::Plugin2, n, reps, "bias-plugin2");
    let want = -((k - 1) as f64) / (2.0 * n as f64);
    let z = (plain.bias - want) / plain.bias_se;
    let ratio = plain.bias.abs() / corrected.bias.abs();
    let detail = format!(
        "plugin bias {:.4e} vs {want:.4e} (z = {z:.2}); corrected bias {:.3e}, ratio {ratio:.1}",
        plain.bias, corrected.bias
    );
    if z.abs() > 3.0 || ratio < 5.0 {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(180), detail)
}

fn composite_separation() -> Outcome {
    let start = Instant::now();
    let (k, n, reps) = (10_000usize, 10_000u64, 1_000usize);
    let p = ProbabilityVector::uniform(k);
    let plain = risk(&p, EstimatorChoice::Plugin, n, reps, "sep-plugin");
    let composite = risk(&p, EstimatorChoice::CompositePractical, n, reps, "sep-composite");
    let ratio = composite.mse / plain.mse;
    let detail = format!("MSE composite {:.4e} / plugin {:.4e} = {ratio:.4}", composite.mse, plain.mse);
    if ratio > 0.5 {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(600), detail)
}

fn le_cam_consistency() -> Outcome {
    let (k, n, reps) = (100usize, 1_000u64, 10_000usize);
    let q = 0.5 - 1.0 / (n as f64).sqrt();
    let pair = TwoPointPair::new(0.5, q, k, &Functional::Shannon).map_err(|e| e.to_string())?;
    let bound = le_cam_bound(&pair.p_vec, &pair.q_vec, &Functional::Shannon, n).map_err(|e| e.to_string())?;
    let mut parts = vec![format!("bound {bound:.4e}")];
    for choice in [EstimatorChoice::Plugin, EstimatorChoice::Composite, EstimatorChoice::CompositePractical] {
        let r = risk(&pair.p_vec, choice, n, reps, "le-cam");
        parts.push(format!("{} {:.4e}±{:.1e}", choice.id(), r.mse, r.mse_se));
        if bound > r.mse + 3.0 * r.mse_se {
            return Err(format!("{}: bound exceeds the empirical MSE", parts.join(", ")));
        }
    }
    Ok(parts.join(", "))
}

fn simplex_helpers() -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for k in [2usize, 10, 100] {
        for alpha in [0.3, 0.7] {
            let r = maximize_on_simplex(|p: f64| p.powf(alpha), k).map_err(|e| e.to_string())?;
            let want = (k as f64).powf(1.0 - alpha);
            if (r.value - want).abs() > 1e-9 {
                failures.push(format!("Σp^{alpha} at k = {k}: max {} vs {want}", r.value));
            }
        }
        let log_sq = |p: f64| if p == 0.0 { 0.0 } else { p * p.ln().powi(2) };
        let r = maximize_on_simplex(log_sq, k).map_err(|e| e.to_string())?;
        let want = (k as f64).ln().powi(2);
        lines.push(format!("k = {k}: max Σp ln²p = {:.6} vs ln²k = {want:.6}", r.value));
        if (r.value - want).abs() > 1e-9 {
            failures.push(format!("Σp ln²p at k = {k}: max {:.6} at {:?} vs ln²k = {want:.6}", r.value, &r.point[..2.min(k)]));
        }
    }
    if failures.is_empty() {
        Ok(format!("power sums match k^(1−α); {}", lines.join("; ")))
    } else {
        Err(failures.join("; "))
    }
}

fn config_validation() -> Outcome {
    let mut lines = Vec::new();
    for alpha in [0.3, 0.5, 1.0, 1.4] {
        let cfg = default_config(alpha, 0).map_err(|e| e.to_string())?;
        let violations = validate_config(&cfg, alpha);
        if !violations.is_empty() {
            return Err(format!("default at α = {alpha} fails: {violations:?}"));
        }
        let phi = if alpha == 1.0 { Functional::Shannon } else { Functional::power(alpha) };
        CompositeEstimator::new(phi.clone(), cfg).map_err(|e| format!("α = {alpha}: {e}"))?;
        lines.push(format!("α = {alpha}: C1 = {:.3e}, C2 = {}", cfg.c1, cfg.c2));

        // each inequality is evaluated and rejected on its own
        let c2 = 8.0 * alpha + 1.0;
        let bad = [
            (EstimatorConfig { c2: 8.0 * alpha * 0.9, ..cfg }, "C2 > 8α"),
            (EstimatorConfig { c1: 1.0 / c2.powi(3), ..cfg }, "C2³·C1 ≤ 1/2"),
            (EstimatorConfig { c1: 0.5, c2: 20.0, ..cfg }, "2 − 3·C1·ln2"),
        ];
        for (bad_cfg, name) in bad {
            let found = validate_config(&bad_cfg, alpha);
            if !found.iter().any(|v| v.condition.starts_with(name)) {
                return Err(format!("α = {alpha}: `{name}` not reported for {bad_cfg:?}"));
            }
            if !matches!(CompositeEstimator::new(phi.clone(), bad_cfg), Err(Error::Violations(_))) {
                return Err(format!("α = {alpha}: estimator accepted {bad_cfg:?}"));
            }
        }
    }
    Ok(lines.join("; "))
}

fn sweep_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("sweep.csv");
    let run = |jobs: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let o = Command::new(env!("CARGO_BIN_EXE_minifunc"))
            .args(["--seed", "99", "--jobs", jobs, "risk-sweep", "--phi", "shannon", "--n-grid", "100,300,1000,3000"])
            .args(["--k-rule", "prop:1", "--reps", "200", "--estimators", "plugin,plugin2,composite", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        Ok((std::fs::read(&out).map_err(|e| e.to_string())?, o.stdout))
    };
    let base = run("1")?;
    for jobs in ["1", "2", "4", "8"] {
        if run(jobs)? != base {
            return Err(format!("output differs with --jobs {jobs}"));
        }
    }
    let rows = base.0.iter().filter(|&&b| b == b'\n').count() - 1;
    Ok(format!("{rows} CSV rows byte-identical over 5 runs with --jobs 1, 1, 2, 4, 8"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("factorial-moment unbiasedness", factorial_moments),
        ("Remez correctness", remez_correctness),
        ("best-approximation error scaling", approximation_scaling),
        ("moment-matched pairs and Poisson TV", moment_matched_pairs),
        ("plugin bias oracle", plugin_bias),
        ("composite vs plugin separation", composite_separation),
        ("Le Cam consistency", le_cam_consistency),
        ("simplex helper maxima", simplex_helpers),
        ("config validation", config_validation),
        ("risk-sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
