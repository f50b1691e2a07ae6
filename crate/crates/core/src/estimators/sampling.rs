use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{Histogram, SamplingModel, SplitHistograms};
use crate::functional::ProbabilityVector;

fn poisson<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    let d = Poisson::new(rate).expect("positive finite rate");
    d.sample(rng) as u64
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p in (0,1)").sample(rng)
}

/// Draw counts for `n` samples from `p` under `model`.
///
/// The multinomial draw is exact, built from conditional binomials.
pub fn sample_histogram<R: Rng + ?Sized>(
    p: &ProbabilityVector,
    n: u64,
    model: SamplingModel,
    rng: &mut R,
) -> Histogram {
    let probs = p.probs();
    let counts = match model {
        SamplingModel::Poissonized => probs.iter().map(|&pi| poisson(n as f64 * pi, rng)).collect(),
        SamplingModel::Multinomial => {
            let mut remaining_n = n;
            let mut remaining_mass: f64 = probs.iter().sum();
            let mut counts = Vec::with_capacity(probs.len());
            for (i, &pi) in probs.iter().enumerate() {
                let c = if i + 1 == probs.len() {
                    remaining_n
                } else if remaining_mass > 0.0 {
                    binomial(remaining_n, (pi / remaining_mass).min(1.0), rng)
                } else {
                    0
                };
                counts.push(c);
                remaining_n -= c;
                remaining_mass -= pi;
            }
            counts
        }
    };
    Histogram { counts, n_nominal: n, model }
}

/// Send each counted sample to `est` or `sel` by an independent fair coin.
///
/// Each half keeps the model tag and gets nominal size `n/2` (rounded down).
pub fn split_samples<R: Rng + ?Sized>(h: &Histogram, rng: &mut R) -> SplitHistograms {
    let mut est = Vec::with_capacity(h.k());
    let mut sel = Vec::with_capacity(h.k());
    for &c in h.counts() {
        let a = binomial(c, 0.5, rng);
        est.push(a);
        sel.push(c - a);
    }
    let half = h.n_nominal() / 2;
    let wrap = |counts: Vec<u64>| {
        let n = match h.model() {
            SamplingModel::Multinomial => counts.iter().sum(),
            SamplingModel::Poissonized => half,
        };
        Histogram { counts, n_nominal: n, model: h.model() }
    };
    SplitHistograms { est: wrap(est), sel: wrap(sel) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_and_empty_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ProbabilityVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        for _ in 0..20 {
            let h = sample_histogram(&p, 10, SamplingModel::Multinomial, &mut rng);
            assert_eq!(h.counts(), &[10, 0, 0]);
        }
        let u = ProbabilityVector::uniform(5);
        for model in [SamplingModel::Multinomial, SamplingModel::Poissonized] {
            let h = sample_histogram(&u, 0, model, &mut rng);
            assert!(h.counts().iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn multinomial_sums_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = ProbabilityVector::new(vec![0.5, 0.25, 0.125, 0.125]).unwrap();
        for _ in 0..100 {
            let h = sample_histogram(&p, 1000, SamplingModel::Multinomial, &mut rng);
            assert_eq!(h.counts().iter().sum::<u64>(), 1000);
        }
    }

    #[test]
    fn poisson_mean_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = ProbabilityVector::uniform(2);
        let reps = 10_000;
        let n = 1_000_000;
        let mean = (0..reps)
            .map(|_| sample_histogram(&u, n, SamplingModel::Poissonized, &mut rng).counts()[0] as f64)
            .sum::<f64>()
            / reps as f64;
        let sigma = (n as f64 / 2.0).sqrt();
        assert!((mean - 5e5).abs() <= 3.0 * sigma / (reps as f64).sqrt());
    }

    #[test]
    fn split_conserves_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = Histogram::from_counts(vec![0, 1_000_000, 7, 0]);
        let s = split_samples(&h, &mut rng);
        for i in 0..4 {
            assert_eq!(s.est.counts()[i] + s.sel.counts()[i], h.counts()[i]);
        }
        let z = Histogram::from_counts(vec![0; 6]);
        let s = split_samples(&z, &mut rng);
        assert!(s.est.counts().iter().chain(s.sel.counts()).all(|&c| c == 0));
    }

    #[test]
    fn poisson_thinning_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = ProbabilityVector::new(vec![1.0]).unwrap();
        let reps = 10_000;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for _ in 0..reps {
            let h = sample_histogram(&p, 20_000, SamplingModel::Poissonized, &mut rng);
            let s = split_samples(&h, &mut rng);
            a.push(s.est.counts()[0] as f64);
            b.push(s.sel.counts()[0] as f64);
        }
        let r = reps as f64;
        let ma = a.iter().sum::<f64>() / r;
        let mb = b.iter().sum::<f64>() / r;
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
        let cov = prods.iter().sum::<f64>() / r;
        let var_prod = prods.iter().map(|v| (v - cov).powi(2)).sum::<f64>() / r;
        assert!(cov.abs() <= 3.0 * (var_prod / r).sqrt(), "cov = {cov}");
        // each half is Poisson(1e4)
        assert!((ma - 1e4).abs() < 3.0 * (1e4f64 / r).sqrt());
    }
}
