use minifunc::functional::{additive_functional, CustomFunctional};
use minifunc::lower_bounds::{
    divergence, le_cam_bound, maximize_on_simplex, moment_matched_pair, poisson_mixture_tv, tilted_pair,
    DivergenceKind, TwoPointPair,
};
use minifunc::poly::{remez_best_approx, Interval};
use minifunc::Functional;

#[test]
fn le_cam_for_entropy_two_point_pair() {
    // p = 0.5, q = 0.5 − 1/√n, k = 100, n = 10⁴; oracle: direct evaluation
    let (n, k) = (10_000u64, 100usize);
    let phi = Functional::Shannon;
    let q = 0.5 - 1.0 / (n as f64).sqrt();
    let pair = TwoPointPair::new(0.5, q, k, &phi).unwrap();
    let theta = |head: f64, mass: f64| {
        let tail = mass / (k - 1) as f64;
        -head * head.ln() - (k - 1) as f64 * tail * tail.ln()
    };
    let gap = theta(0.5, 0.5) - theta(1.0 - q, q);
    let tail = |m: f64| m / (k - 1) as f64;
    let kl = 0.5 * (0.5 / (1.0 - q)).ln() + 0.5 * (tail(0.5) / tail(q)).ln();
    let want = 0.25 * gap * gap * (-(n as f64) * kl).exp();
    let got = le_cam_bound(&pair.p_vec, &pair.q_vec, &phi, n).unwrap();
    assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    assert!((pair.theta_gap - gap).abs() < 1e-12);
}

#[test]
fn kl_tracks_its_quadratic_approximation() {
    // the quadratic term is exact to first order as q → p
    for k in [3, 10, 100] {
        let phi = Functional::Shannon;
        let mut prev = f64::INFINITY;
        for dq in [0.1, 0.03, 0.01, 0.003] {
            let pair = TwoPointPair::new(0.5, 0.5 - dq, k, &phi).unwrap();
            let kl = divergence(&pair.p_vec, &pair.q_vec, DivergenceKind::Kl).unwrap();
            let chi2 = divergence(&pair.p_vec, &pair.q_vec, DivergenceKind::Chi2).unwrap();
            assert!(kl <= chi2);
            let rel = (kl / pair.kl_bound - 1.0).abs();
            assert!(rel < prev);
            prev = rel;
        }
        assert!(prev < 0.01);
    }
}

/// `φ(p) = −p ln p + p(ln γ + 1)`: vanishes at 0, has `φ'(γ) = 0`, and
/// differs from entropy by a linear term, so `θ` only shifts by a constant.
fn shifted_entropy(gamma: f64) -> Functional {
    let c = gamma.ln() + 1.0;
    Functional::custom(CustomFunctional::new(
        "shifted-entropy",
        1.0,
        0.0,
        6,
        move |p| -p * p.ln() + c * p,
        move |order, p| match order {
            1 => -p.ln() - 1.0 + c,
            m => {
                let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
                let fact: f64 = (1..=m - 2).map(|j| j as f64).product();
                sign * fact / p.powi(m as i32 - 1)
            }
        },
    ))
}

#[test]
fn shifted_entropy_has_the_stated_shape() {
    let gamma = 0.01;
    let phi = shifted_entropy(gamma);
    assert_eq!(phi.eval(0.0), 0.0);
    assert!(phi.deriv(1, gamma).unwrap().abs() < 1e-14);
    let p = minifunc::ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
    let a = additive_functional(&p, &phi).unwrap();
    let b = additive_functional(&p, &Functional::Shannon).unwrap();
    assert!((a - b - (gamma.ln() + 1.0)).abs() < 1e-14);
}

#[test]
fn tilted_gap_stays_away_from_zero() {
    // γ = η = 1/(2L²) gives the interval [γ, 2L²γ] = [γ, 1]; E_L of
    // φ* = −ln x + const there does not vanish as L grows
    let mut ratios = Vec::new();
    for l in [4usize, 8, 12] {
        let gamma = 1.0 / (2.0 * (l * l) as f64);
        let phi = shifted_entropy(gamma);
        let pair = tilted_pair(&phi, l, gamma, gamma, 50 * (l + 2)).unwrap();
        assert!(pair.max_moment_residual <= 1e-8);
        let star = remez_best_approx(|x| -x.ln(), l, Interval::new(gamma, 1.0).unwrap()).unwrap();
        assert!((pair.reference_gap.unwrap() - 2.0 * gamma * star.sup_error).abs() < 1e-9 * pair.gap);
        assert!(pair.gap_rel_error().unwrap() < 0.02);
        ratios.push(pair.gap / (2.0 * gamma));
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 0.1, "{ratios:?}");
    assert!(ratios[2] > 0.5 * ratios[0], "{ratios:?}");
}

#[test]
fn mixture_tv_below_the_analytic_bound() {
    for (phi, l) in [(Functional::Shannon, 6), (Functional::power(0.5), 8), (Functional::power(1.5), 10)] {
        let pair = moment_matched_pair(&phi, l, Interval::unit(), 50 * (l + 2)).unwrap();
        for n in [0.2, 0.5, 1.0] {
            let tv = poisson_mixture_tv(&pair, n, 1.0, None).unwrap();
            if (l as f64) > 2.0 * std::f64::consts::E * tv.max_rate {
                assert!(tv.numeric_tv <= tv.bound);
            }
        }
    }
}

#[test]
fn simplex_maxima_of_the_helper_sums() {
    for k in [10usize, 100] {
        for alpha in [0.3, 0.7] {
            let r = maximize_on_simplex(|p: f64| p.powf(alpha), k).unwrap();
            let want = (k as f64).powf(1.0 - alpha);
            assert!((r.value - want).abs() <= 1e-9 * want);
        }
        let r = maximize_on_simplex(|p: f64| if p == 0.0 { 0.0 } else { p * p.ln().powi(2) }, k).unwrap();
        let want = (k as f64).ln().powi(2);
        assert!((r.value - want).abs() <= 1e-9 * want, "k={k}: {} vs {want}", r.value);
    }
}
