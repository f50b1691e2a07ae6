use crate::error::{Error, Result};

/// Minimax rate (without constants) of estimating `θ` for a functional whose
/// divergence speed is `p^α`, `α ∈ (0, 2]`:
///
/// | α            | rate                                  |
/// |--------------|---------------------------------------|
/// | (0, 1/2]     | `k²/(n ln n)^{2α}`                    |
/// | (1/2, 1)     | `k²/(n ln n)^{2α} + k^{2−2α}/n`       |
/// | 1            | `k²/(n ln n)² + ln²k/n`               |
/// | (1, 3/2)     | `k²/(n ln n)^{2α} + 1/n`              |
/// | [3/2, 2]     | `1/n`                                 |
///
/// For `α ≤ 0` no consistent estimator exists and an error is returned.
pub fn theoretical_rate(alpha: f64, n: f64, k: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!(
            "α = {alpha} ≤ 0: no consistent estimator exists, so there is no rate"
        )));
    }
    if alpha > 2.0 {
        return Err(Error::InvalidInput(format!("α = {alpha} is above 2")));
    }
    if !(n > 1.0 && k >= 1.0) {
        return Err(Error::InvalidInput(format!("need n > 1 and k ≥ 1 (n = {n}, k = {k})")));
    }
    let poly = k * k / (n * n.ln()).powf(2.0 * alpha);
    let rate = if alpha <= 0.5 {
        poly
    } else if alpha < 1.0 {
        poly + k.powf(2.0 - 2.0 * alpha) / n
    } else if alpha == 1.0 {
        poly + k.ln().powi(2) / n
    } else if alpha < 1.5 {
        poly + 1.0 / n
    } else {
        1.0 / n
    };
    Ok(rate)
}
