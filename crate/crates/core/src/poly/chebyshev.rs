use super::{Interval, Polynomial};

/// A Chebyshev series `Σ c_j T_j(t)` with `t` the image of `x` under the
/// affine map of `interval` onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
    pub interval: Interval,
}

/// `T_j(t)` for `j = 0..count`.
pub(crate) fn cheb_basis(t: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(t);
    for j in 2..count {
        let next = 2.0 * t * out[j - 1] - out[j - 2];
        out.push(next);
    }
    out
}

impl ChebSeries {
    /// Clenshaw evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_unit(self.interval.to_unit(x))
    }

    pub(crate) fn eval_unit(&self, t: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Monomial coefficients in the rescaled variable `u = (x − lo)/(hi − lo)`.
    pub fn to_scaled_monomial(&self) -> Vec<f64> {
        // Monomial coefficients in t first, then substitute t = 2u − 1.
        let n = self.coeffs.len();
        let mut in_t = vec![0.0; n];
        let mut prev = vec![0.0; n];
        let mut cur = vec![0.0; n];
        prev[0] = 1.0;
        in_t[0] += self.coeffs[0];
        if n > 1 {
            cur[1] = 1.0;
            in_t[1] += self.coeffs[1];
        }
        for j in 2..n {
            let mut next = vec![0.0; n];
            for i in 0..j {
                next[i + 1] += 2.0 * cur[i];
            }
            for i in 0..n {
                next[i] -= prev[i];
            }
            for i in 0..=j {
                in_t[i] += self.coeffs[j] * next[i];
            }
            prev = std::mem::replace(&mut cur, next);
        }
        compose_affine(&in_t, 2.0, -1.0)
    }

    /// Monomial coefficients in `x` itself.
    pub fn to_monomial(&self) -> Polynomial {
        let scaled = self.to_scaled_monomial();
        let (lo, w) = (self.interval.lo(), self.interval.width());
        // u = x/w − lo/w
        let coeffs = compose_affine(&scaled, 1.0 / w, -lo / w);
        Polynomial::new(coeffs, self.interval).expect("non-empty")
    }
}

/// Coefficients of `q(x) = p(s·x + o)` given those of `p`.
fn compose_affine(p: &[f64], s: f64, o: f64) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n];
    for &a in p.iter().rev() {
        // out ← out·(s x + o) + a
        let mut next = vec![0.0; n];
        for i in 0..n {
            if out[i] == 0.0 {
                continue;
            }
            next[i] += out[i] * o;
            if i + 1 < n {
                next[i + 1] += out[i] * s;
            }
        }
        next[0] += a;
        out = next;
    }
    out
}
