use crate::functional::Functional;
use crate::numeric::{golden_max, KahanSum};
use crate::poly::{ApproxResult, Interval};

/// Falling factorial `(N)_m = N(N−1)…(N−m+1)`; zero when `m > N`.
pub fn factorial_moment(n: u64, m: usize) -> f64 {
    if m as u64 > n {
        return 0.0;
    }
    (0..m as u64).fold(1.0, |acc, j| acc * (n - j) as f64)
}

const RANGE_GRID: usize = 16_384;

/// `(inf φ, sup φ)` over `interval`: a 16384-point scan refined by
/// golden-section search in the cells around the best grid points.
pub fn phi_range(phi: &Functional, interval: Interval) -> (f64, f64) {
    let xs: Vec<f64> = (0..RANGE_GRID)
        .map(|i| interval.lo() + interval.width() * i as f64 / (RANGE_GRID - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| phi.eval(x)).collect();
    let refine = |sign: f64| {
        let mut best = 0;
        for i in 0..vals.len() {
            if sign * vals[i] > sign * vals[best] {
                best = i;
            }
        }
        let lo = xs[best.saturating_sub(1)];
        let hi = xs[(best + 1).min(xs.len() - 1)];
        let (_, v) = golden_max(|x| sign * phi.eval(x), lo, hi, 1e-14 * interval.width());
        sign * v.max(sign * vals[best])
    };
    (refine(-1.0), refine(1.0))
}

/// The polynomial branch of the composite estimator, prepared once per
/// approximation.
#[derive(Debug, Clone)]
pub struct PolyBranch {
    /// `c_m` with `φ_L(x) = Σ c_m (x/scale)^m`.
    coeffs: Vec<f64>,
    scale: f64,
    clamp: (f64, f64),
}

impl PolyBranch {
    pub fn new(approx: &ApproxResult, clamp: (f64, f64)) -> Self {
        let interval = approx.interval();
        let (coeffs, scale) = if interval.lo() == 0.0 {
            // rescaled coefficients keep the terms O(1) on short intervals
            (approx.scaled_coeffs(), interval.width())
        } else {
            (approx.poly.coeffs().to_vec(), 1.0)
        };
        Self { coeffs, scale, clamp }
    }

    pub fn clamp_bounds(&self) -> (f64, f64) {
        self.clamp
    }

    /// `Σ_m a_m (N)_m / n^m`, unclamped.
    pub fn raw(&self, count: u64, n: f64) -> f64 {
        let mut acc = KahanSum::new();
        let mut prod = 1.0;
        for (m, &c) in self.coeffs.iter().enumerate() {
            if m > 0 {
                let j = (m - 1) as u64;
                if j >= count {
                    break;
                }
                prod *= (count - j) as f64 / (n * self.scale);
            }
            acc.add(c * prod);
        }
        acc.value()
    }

    /// The clamped per-symbol estimate.
    pub fn estimate(&self, count: u64, n: f64) -> f64 {
        self.raw(count, n).clamp(self.clamp.0, self.clamp.1)
    }
}

/// `(Σ_m a_m (N)_m / n^m ∧ φ_sup) ∨ φ_inf` for one symbol.
pub fn best_poly_symbol_estimate(
    count: u64,
    n: f64,
    approx: &ApproxResult,
    clamp: (f64, f64),
) -> f64 {
    PolyBranch::new(approx, clamp).estimate(count, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::remez_best_approx;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn factorial_moment_examples() {
        assert_eq!(factorial_moment(5, 2), 20.0);
        assert_eq!(factorial_moment(3, 5), 0.0);
        assert_eq!(factorial_moment(7, 0), 1.0);
        assert_eq!(factorial_moment(10, 10), 3_628_800.0);
    }

    #[test]
    fn constant_and_zero_count() {
        let i = Interval::new(0.0, 0.2).unwrap();
        let c = remez_best_approx(|_| 0.3, 0, i).unwrap();
        for n in [0, 1, 17, 1000] {
            assert!((best_poly_symbol_estimate(n, 100.0, &c, (0.0, 1.0)) - 0.3).abs() < 1e-14);
        }
        let r = remez_best_approx(f64::sqrt, 6, i).unwrap();
        let a0 = r.poly.coeffs()[0];
        let clamp = (0.0, 0.2f64.sqrt());
        let got = best_poly_symbol_estimate(0, 100.0, &r, clamp);
        assert!((got - a0.clamp(clamp.0, clamp.1)).abs() < 1e-14);
    }

    #[test]
    fn scaled_and_monomial_forms_agree() {
        let i = Interval::new(0.0, 0.05).unwrap();
        let r = remez_best_approx(|x: f64| -x * x.ln().max(-1e300), 8, i).unwrap();
        let b = PolyBranch::new(&r, (f64::NEG_INFINITY, f64::INFINITY));
        let n: f64 = 1000.0;
        for count in [0u64, 1, 3, 9, 25, 60] {
            let direct: f64 = r
                .poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(m, a)| a * factorial_moment(count, m) / n.powi(m as i32))
                .sum();
            let tol = 1e-9 * direct.abs().max(1e-3);
            assert!((b.raw(count, n) - direct).abs() < tol, "count={count}");
        }
    }

    #[test]
    fn range_of_shannon() {
        let (lo, hi) = phi_range(&Functional::Shannon, Interval::unit());
        assert!(lo.abs() < 1e-15);
        assert!((hi - (-1f64).exp()).abs() < 1e-12);
        let (lo, hi) = phi_range(&Functional::Shannon, Interval::new(0.0, 0.1).unwrap());
        assert_eq!(lo, 0.0);
        assert!((hi - 0.1 * 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn clamp_is_contractive() {
        let (lo, hi) = (-0.2, 0.7);
        for i in 0..200 {
            let x = -3.0 + 6.0 * i as f64 / 199.0;
            for j in 0..50 {
                let v = lo + (hi - lo) * j as f64 / 49.0;
                assert!((x.clamp(lo, hi) - v).abs() <= (x - v).abs());
            }
        }
    }

    #[test]
    fn poisson_unbiasedness_small() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (n, p): (f64, f64) = (500.0, 0.01);
        let d = Poisson::new(n * p).unwrap();
        let reps = 100_000;
        for m in 1..=3 {
            let xs: Vec<f64> = (0..reps)
                .map(|_| factorial_moment(d.sample(&mut rng) as u64, m) / n.powi(m as i32))
                .collect();
            let mean = xs.iter().sum::<f64>() / reps as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / reps as f64;
            let want = p.powi(m as i32);
            assert!((mean - want).abs() <= 4.0 * (var / reps as f64).sqrt(), "m={m}");
        }
    }
}
