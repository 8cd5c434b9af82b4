//! Dantzig selector
//!
//! ```text
//! β̂ ∈ argmin { ‖β‖₁ : ‖D⁻¹Xᵀ(Xβ − y)‖_∞ ≤ δ }
//! ```
//!
//! with `D = diag(‖X(:,k)‖₂)`, solved as a linear program in `β = β⁺ − β⁻`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp;

fn column_norms(x: &DMatrix<f64>) -> Result<Vec<f64>> {
    x.column_iter()
        .enumerate()
        .map(|(k, c)| {
            let n = c.norm();
            if n > 0.0 {
                Ok(n)
            } else {
                Err(Error::DegenerateColumn(k))
            }
        })
        .collect()
}

/// `D⁻¹Xᵀ(Xβ − y)`, the quantity the constraint bounds in sup norm.
pub fn normalized_correlation(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    if beta.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            actual: beta.len(),
        });
    }
    let d = column_norms(x)?;
    let r = x * DVector::from_column_slice(beta) - DVector::from_column_slice(y);
    let g = x.transpose() * r;
    Ok(g.iter().zip(&d).map(|(v, dk)| v / dk).collect())
}

fn check_dims(x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::EmptyDesign);
    }
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// Minimum-ℓ¹ coefficients `β̂ ∈ ℝᵖ` for an `n × p` matrix `x`.
pub fn dantzig_selector(x: &DMatrix<f64>, y: &[f64], delta: f64) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    let p = x.ncols();
    let d = column_norms(x)?;
    let xt = x.transpose();
    let mut gram = &xt * x;
    let mut corr = xt * DVector::from_column_slice(y);
    for k in 0..p {
        gram.row_mut(k).scale_mut(1.0 / d[k]);
        corr[k] /= d[k];
    }

    // G β⁺ − G β⁻ ≤ δ + c  and  −G β⁺ + G β⁻ ≤ δ − c
    let mut a = Vec::with_capacity(2 * p);
    let mut b = Vec::with_capacity(2 * p);
    for k in 0..p {
        let row: Vec<f64> = gram.row(k).iter().copied().collect();
        let mut upper = row.clone();
        upper.extend(row.iter().map(|v| -v));
        a.push(upper);
        b.push(delta + corr[k]);
        let mut lower: Vec<f64> = row.iter().map(|v| -v).collect();
        lower.extend_from_slice(&row);
        a.push(lower);
        b.push(delta - corr[k]);
    }
    let z = lp::minimize(&vec![1.0; 2 * p], &a, &b)?;
    Ok((0..p).map(|k| z[k] - z[p + k]).collect())
}
