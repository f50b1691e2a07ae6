//! Dense two-phase simplex for small linear programs in equality form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of `max cᵀx` subject to `A x = b`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub basis: Vec<usize>,
}

const MAX_PIVOTS: usize = 50_000;
/// Degenerate pivots in a row before switching from Dantzig's rule to
/// Bland's rule.
const STALL_LIMIT: usize = 50;

/// Revised simplex state. The basis matrix is refactorized at every
/// iteration, which is cheap for the few rows used here and keeps rounding
/// from accumulating the way it does in a tableau.
struct Revised<'a> {
    /// Column-major copy of `[A | I]`: structural columns then artificials.
    cols: Vec<Vec<f64>>,
    b: &'a [f64],
    rows: Vec<usize>,
    basis: Vec<usize>,
}

impl Revised<'_> {
    fn basis_lu(&self) -> nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn> {
        let m = self.rows.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for (ci, &j) in self.basis.iter().enumerate() {
            for (ri, &r) in self.rows.iter().enumerate() {
                mat[(ri, ci)] = self.cols[j][r];
            }
        }
        mat.lu()
    }

    fn column(&self, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|&r| self.cols[j][r]))
    }

    fn basic_values(&self, lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> Result<DVector<f64>> {
        let rhs = DVector::from_iterator(self.rows.len(), self.rows.iter().map(|&r| self.b[r]));
        lu.solve(&rhs).ok_or_else(|| Error::Numerical("singular simplex basis".into()))
    }

    /// Maximize `Σ cost_j x_j`, letting only columns `< allowed` enter.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let scale = 1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-10 * scale;
        let mut stall = 0;
        let mut last_obj = f64::NEG_INFINITY;
        for _ in 0..MAX_PIVOTS {
            let lu = self.basis_lu();
            let xb = self.basic_values(&lu)?;
            let cb = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&j| cost[j]));
            let y = lu
                .u()
                .transpose()
                .solve_lower_triangular(&cb)
                .and_then(|z| lu.l().transpose().solve_upper_triangular(&z))
                .map(|w| {
                    let mut y = w;
                    lu.p().inv_permute_rows(&mut y);
                    y
                })
                .ok_or_else(|| Error::Numerical("singular simplex basis".into()))?;
            let obj: f64 = cb.dot(&xb);
            if obj > last_obj + tol {
                stall = 0;
                last_obj = obj;
            } else {
                stall += 1;
            }
            let bland = stall > STALL_LIMIT;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let d = cost[j] - self.rows.iter().enumerate().map(|(ri, &r)| y[ri] * self.cols[j][r]).sum::<f64>();
                if d > tol {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d > best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((col, _)) = entering else {
                return Ok(());
            };
            let u = lu
                .solve(&self.column(col))
                .ok_or_else(|| Error::Numerical("singular simplex basis".into()))?;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..u.len() {
                if u[i] > 1e-9 {
                    let ratio = xb[i].max(0.0) / u[i];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, bv)) => {
                            if ratio < bv - 1e-13 || (ratio <= bv + 1e-13 && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, bv))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.basis[row] = col;
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }
}

/// Maximize `cᵀx` subject to `A x = b`, `x ≥ 0`, with `A` given row-major.
///
/// Two-phase revised simplex: phase one drives artificial variables to zero
/// (redundant rows are dropped), phase two optimizes `c`.
pub fn solve_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("LP dimensions do not agree".into()));
    }
    let signs: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let rhs: Vec<f64> = b.iter().zip(&signs).map(|(v, s)| v * s).collect();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| signs[i] * a[i][j]).collect()).collect();
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        cols.push(e);
    }
    let mut lp = Revised { cols, b: &rhs, rows: (0..m).collect(), basis: (n..n + m).collect() };

    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|v| *v = -1.0);
    lp.optimize(&phase1, n)?;
    let xb = lp.basic_values(&lp.basis_lu())?;
    let infeasibility: f64 = lp.basis.iter().zip(xb.iter()).filter(|(&j, _)| j >= n).map(|(_, v)| v.abs()).sum();
    if infeasibility > 1e-9 * (1.0 + rhs.iter().fold(0.0f64, |s, v| s.max(v.abs()))) {
        return Err(Error::Infeasible);
    }
    // swap zero-level artificials for structural columns, or drop their rows
    let mut pos = 0;
    while pos < lp.basis.len() {
        if lp.basis[pos] < n {
            pos += 1;
            continue;
        }
        let lu = lp.basis_lu();
        let swap = (0..n).filter(|j| !lp.basis.contains(j)).find(|&j| {
            lu.solve(&lp.column(j)).is_some_and(|u| u[pos].abs() > 1e-7)
        });
        match swap {
            Some(j) => {
                lp.basis[pos] = j;
                pos += 1;
            }
            None => {
                let art = lp.basis.remove(pos);
                lp.rows.retain(|&r| r != art - n);
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, m));
    if !lp.basis.is_empty() {
        lp.optimize(&phase2, n)?;
    }
    let mut x = vec![0.0; n];
    if !lp.basis.is_empty() {
        let xb = lp.basic_values(&lp.basis_lu())?;
        for (&j, &v) in lp.basis.iter().zip(xb.iter()) {
            x[j] = v.max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, basis: lp.basis.clone() })
}
