use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chebyshev::{cheb_basis, ChebSeries};
use super::{Interval, Polynomial};
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::numeric::{golden_max, log_log_slope};

/// Stopping rule for [`remez_best_approx`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemezOptions {
    pub max_iterations: usize,
    /// Converged once `max |r| / min |r(reference)| − 1` drops below this.
    pub tolerance: f64,
}

impl Default for RemezOptions {
    fn default() -> Self {
        Self { max_iterations: 100, tolerance: 1e-10 }
    }
}

/// Outcome of a best uniform approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub poly: Polynomial,
    /// `E_L`: the largest residual of `poly` on the interval.
    pub sup_error: f64,
    pub alternation_points: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// The same polynomial as a Chebyshev series on the interval; prefer
    /// this for evaluation at high degree.
    pub cheb_coeffs: Vec<f64>,
}

impl ApproxResult {
    pub fn degree(&self) -> usize {
        self.cheb_coeffs.len() - 1
    }

    pub fn interval(&self) -> Interval {
        self.poly.interval()
    }

    pub fn cheb(&self) -> ChebSeries {
        ChebSeries { coeffs: self.cheb_coeffs.clone(), interval: self.poly.interval() }
    }

    /// Evaluate through the Chebyshev form.
    pub fn eval(&self, x: f64) -> f64 {
        self.cheb().eval(x)
    }

    /// Monomial coefficients `b_m` in `u = (x − lo)/(hi − lo)`, so that the
    /// polynomial equals `Σ b_m u^m`.
    pub fn scaled_coeffs(&self) -> Vec<f64> {
        self.cheb().to_scaled_monomial()
    }
}

struct Iterate {
    coeffs: Vec<f64>,
    sup: f64,
    reference: Vec<f64>,
}

fn solve_reference(g: &[f64], reference: &[f64]) -> Option<Vec<f64>> {
    let m = reference.len();
    let l = m - 2;
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (i, &t) in reference.iter().enumerate() {
        for (j, v) in cheb_basis(t, l + 1).into_iter().enumerate() {
            a[(i, j)] = v;
        }
        a[(i, l + 1)] = if i % 2 == 0 { 1.0 } else { -1.0 };
    }
    let rhs = DVector::from_column_slice(g);
    let sol = a.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(sol.as_slice()[..=l].to_vec())
}

/// One signed extremum of the residual.
#[derive(Clone, Copy)]
struct Extremum {
    t: f64,
    r: f64,
}

/// Locate one extremum per sign run of the residual over `points`.
fn locate_extrema<R: Fn(f64) -> f64>(residual: &R, points: &[f64]) -> Vec<Extremum> {
    let vals: Vec<f64> = points.iter().map(|&t| residual(t)).collect();
    let mut out: Vec<Extremum> = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if vals[i] == 0.0 {
            i += 1;
            continue;
        }
        let sign = vals[i].signum();
        let start = i;
        while i < points.len() && vals[i] != 0.0 && vals[i].signum() == sign {
            i += 1;
        }
        // leftmost largest sample in the run
        let mut best = start;
        for j in start..i {
            if vals[j].abs() > vals[best].abs() {
                best = j;
            }
        }
        let lo = points[best.saturating_sub(1)];
        let hi = points[(best + 1).min(points.len() - 1)];
        let mut ext = Extremum { t: points[best], r: vals[best] };
        if hi > lo {
            let tol = 1e-15_f64.max((hi - lo) * 1e-12);
            let (t, v) = golden_max(|t| sign * residual(t), lo, hi, tol);
            if v > ext.r.abs() && v.is_finite() {
                ext = Extremum { t, r: sign * v };
            }
        }
        // merge with a same-signed predecessor (separated only by exact zeros)
        match out.last_mut() {
            Some(prev) if prev.r.signum() == sign => {
                if ext.r.abs() > prev.r.abs() {
                    *prev = ext;
                }
            }
            _ => out.push(ext),
        }
    }
    out
}

/// Replace one reference point by `e` so that the reference stays sorted and
/// the residual signs along it still alternate.
fn single_exchange<S: Fn(usize) -> f64>(reference: &mut Vec<f64>, e: Extremum, sign: S) {
    let m = reference.len();
    let s = e.r.signum();
    let pos = reference.partition_point(|&t| t < e.t);
    if pos < m && reference[pos] == e.t {
        return;
    }
    if pos == 0 {
        if sign(0) == s {
            reference[0] = e.t;
        } else {
            reference.pop();
            reference.insert(0, e.t);
        }
    } else if pos == m {
        if sign(m - 1) == s {
            reference[m - 1] = e.t;
        } else {
            reference.remove(0);
            reference.push(e.t);
        }
    } else if sign(pos - 1) == s {
        reference[pos - 1] = e.t;
    } else {
        reference[pos] = e.t;
    }
}

/// Best uniform approximation of `f` on `interval` by polynomials of degree
/// `degree`, via the Remez exchange algorithm.
///
/// The exchange works in the Chebyshev basis of the interval mapped onto
/// `[-1, 1]`, starting from the Chebyshev extreme points. Residual extrema
/// are found by scanning `8(L+2)` Chebyshev-spaced points plus the current
/// reference and refining each sign run by golden-section search.
///
/// The exchange stops when the levelled error satisfies
/// `max |r| / min |r| − 1 < 1e-10`, or when `max |r| − min |r|` is already
/// at the rounding level of `f` (32ε·max|f|), since the ratio test cannot be
/// met once `E_L` approaches machine precision. If the iteration limit is
/// hit the best iterate is returned with `converged = false`.
pub fn remez_best_approx<F: Fn(f64) -> f64>(
    f: F,
    degree: usize,
    interval: Interval,
) -> Result<ApproxResult> {
    remez_with_options(f, degree, interval, RemezOptions::default())
}

pub fn remez_with_options<F: Fn(f64) -> f64>(
    f: F,
    degree: usize,
    interval: Interval,
    opts: RemezOptions,
) -> Result<ApproxResult> {
    let g = |t: f64| f(interval.from_unit(t));
    let m = degree + 2;
    let scan_len = 8 * m;
    let scan: Vec<f64> = (0..scan_len)
        .map(|j| -(std::f64::consts::PI * j as f64 / (scan_len - 1) as f64).cos())
        .collect();
    let mut f_scale: f64 = 1.0;
    for &t in &scan {
        let v = g(t);
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "function is not finite at x = {} on [{}, {}]",
                interval.from_unit(t),
                interval.lo(),
                interval.hi()
            )));
        }
        f_scale = f_scale.max(v.abs());
    }
    let floor = 1e-13 * f_scale;
    // residual differences below this are rounding in f and in the series
    let noise = 32.0 * f64::EPSILON * f_scale;

    let mut reference: Vec<f64> = (0..m)
        .map(|i| -(std::f64::consts::PI * i as f64 / (m - 1) as f64).cos())
        .collect();
    let mut best: Option<Iterate> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let gv: Vec<f64> = reference.iter().map(|&t| g(t)).collect();
        let Some(coeffs) = solve_reference(&gv, &reference) else {
            break;
        };
        let series = ChebSeries { coeffs: coeffs.clone(), interval };
        let residual = |t: f64| g(t) - series.eval_unit(t);

        let mut points: Vec<f64> = scan.iter().chain(reference.iter()).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let extrema = locate_extrema(&residual, &points);
        let sup = extrema.iter().map(|e| e.r.abs()).fold(0.0, f64::max);

        if best.as_ref().is_none_or(|b| sup < b.sup) {
            best = Some(Iterate { coeffs: coeffs.clone(), sup, reference: reference.clone() });
        }
        if sup <= floor {
            // f is (numerically) a polynomial of degree ≤ L
            converged = true;
            break;
        }
        if extrema.len() < m {
            // too few sign changes for a full exchange: swap the global
            // maximum into the reference, keeping the signs alternating
            let e = *extrema
                .iter()
                .max_by(|a, b| a.r.abs().total_cmp(&b.r.abs()))
                .expect("residual has an extremum above the floor");
            let level = gv[0] - series.eval_unit(reference[0]);
            let ref_sign = |i: usize| {
                let s = if level >= 0.0 { 1.0 } else { -1.0 };
                if i.is_multiple_of(2) { s } else { -s }
            };
            single_exchange(&mut reference, e, ref_sign);
            continue;
        }

        // window of m consecutive extrema containing the global maximum that
        // maximizes the smallest |r|
        let imax = extrema
            .iter()
            .enumerate()
            .fold(0, |b, (i, e)| if e.r.abs() > extrema[b].r.abs() { i } else { b });
        let first = imax.saturating_sub(m - 1);
        let last = imax.min(extrema.len() - m);
        let mut win = first;
        let mut win_min = f64::NEG_INFINITY;
        for s in first..=last {
            let mn = extrema[s..s + m].iter().map(|e| e.r.abs()).fold(f64::INFINITY, f64::min);
            if mn > win_min {
                win_min = mn;
                win = s;
            }
        }
        reference = extrema[win..win + m].iter().map(|e| e.t).collect();
        if sup / win_min - 1.0 < opts.tolerance || sup - win_min <= noise {
            converged = true;
            // the reference now holds the alternation points of this iterate
            best = Some(Iterate { coeffs, sup, reference: reference.clone() });
            break;
        }
    }

    let best = best.ok_or_else(|| {
        Error::Numerical(format!("Remez system singular at degree {degree}"))
    })?;
    let series = ChebSeries { coeffs: best.coeffs.clone(), interval };
    Ok(ApproxResult {
        poly: series.to_monomial(),
        sup_error: best.sup,
        alternation_points: best.reference.iter().map(|&t| interval.from_unit(t)).collect(),
        iterations,
        converged,
        cheb_coeffs: best.coeffs,
    })
}

/// One cell of an [`ErrorCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurvePoint {
    pub degree: usize,
    pub lambda: f64,
    pub sup_error: f64,
    pub converged: bool,
}

/// `E_L(φ, [0, λ])` over a grid of degrees and interval lengths, with
/// log-log slopes along each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<ErrorCurvePoint>,
    /// `(λ, slope of log E_L against log L)` for each λ with ≥ 2 degrees.
    pub slope_in_degree: Vec<(f64, f64)>,
    /// `(L, slope of log E_L against log λ)` for each L with ≥ 2 lengths.
    pub slope_in_lambda: Vec<(usize, f64)>,
}

pub fn approx_error_curve(
    phi: &Functional,
    degrees: &[usize],
    lambdas: &[f64],
) -> Result<ErrorCurve> {
    for &lam in lambdas {
        if !(lam > 0.0 && lam <= 1.0) {
            return Err(Error::InvalidInput(format!("λ = {lam} is outside (0, 1]")));
        }
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("degrees must be at least 1".into()));
    }
    let cells: Vec<(usize, f64)> = lambdas
        .iter()
        .flat_map(|&lam| degrees.iter().map(move |&l| (l, lam)))
        .collect();
    let points = cells
        .par_iter()
        .map(|&(l, lam)| {
            let r = remez_best_approx(|x| phi.eval(x), l, Interval::new(0.0, lam)?)?;
            Ok(ErrorCurvePoint { degree: l, lambda: lam, sup_error: r.sup_error, converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;

    let slope_of = |pts: Vec<(f64, f64)>| {
        let usable: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.1 > 0.0).collect();
        if usable.len() < 2 {
            return None;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        Some(log_log_slope(&x, &y))
    };
    let slope_in_degree = if degrees.len() >= 2 {
        lambdas
            .iter()
            .filter_map(|&lam| {
                let pts = points
                    .iter()
                    .filter(|p| p.lambda == lam)
                    .map(|p| (p.degree as f64, p.sup_error))
                    .collect();
                slope_of(pts).map(|s| (lam, s))
            })
            .collect()
    } else {
        Vec::new()
    };
    let slope_in_lambda = if lambdas.len() >= 2 {
        degrees
            .iter()
            .filter_map(|&l| {
                let pts = points
                    .iter()
                    .filter(|p| p.degree == l)
                    .map(|p| (p.lambda, p.sup_error))
                    .collect();
                slope_of(pts).map(|s| (l, s))
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(ErrorCurve { points, slope_in_degree, slope_in_lambda })
}
