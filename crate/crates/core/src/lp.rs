//! Dense two-phase simplex for small linear programs
//!
//! ```text
//! minimize cᵀx  subject to  A x ≤ b,  x ≥ 0
//! ```
//!
//! Pivoting uses Bland's rule, so the method terminates on degenerate
//! problems. Intended for a few hundred variables at most.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs, last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                row[c] = 0.0;
            }
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                    *o -= cb * v;
                }
            }
        }
        self.obj = obj;
    }

    /// Runs simplex iterations over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let scale = 1.0 + self.obj.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = PIVOT_EPS * scale;
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -tol) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Solves `min cᵀx, A x ≤ b, x ≥ 0`. Returns the optimal `x`.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: b.len(),
        });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }

    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let art_start = n + m;
    let width = art_start + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    for (i, (ai, &bi)) in a.iter().zip(b).enumerate() {
        let mut row = vec![0.0; width + 1];
        if bi >= 0.0 {
            row[..n].copy_from_slice(ai);
            row[n + i] = 1.0;
            row[width] = bi;
            basis.push(n + i);
        } else {
            for (r, v) in row[..n].iter_mut().zip(ai) {
                *r = -v;
            }
            row[n + i] = -1.0;
            row[next_art] = 1.0;
            row[width] = -bi;
            basis.push(next_art);
            next_art += 1;
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        width,
    };

    if n_art > 0 {
        let mut cost = vec![0.0; width];
        cost[art_start..].iter_mut().for_each(|v| *v = 1.0);
        tab.set_objective(&cost);
        tab.optimize(width)?;
        let infeasibility = -tab.obj[width];
        let b_scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * b_scale {
            return Err(Error::Infeasible);
        }
        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    tab.set_objective(&cost);
    tab.optimize(art_start)?;

    let mut x = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs(i).max(0.0);
        }
    }
    Ok(x)
}
