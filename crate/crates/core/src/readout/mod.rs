//! Linear readout: `y(t) = Σ_k w_k x_k(t)`, its training, and error metrics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::reservoir::StateTrajectory;

mod dantzig;

pub use dantzig::{dantzig_selector, normalized_correlation};

/// Node weights `w_0..w_N` with their cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    w: Vec<f64>,
    norm: f64,
}

impl ReadoutWeights {
    pub fn new(w: Vec<f64>) -> Self {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { w, norm }
    }

    pub fn zeros(nodes: usize) -> Self {
        Self::new(vec![0.0; nodes])
    }

    /// Unit vector selecting node `k`.
    pub fn unit(nodes: usize, k: usize) -> Self {
        let mut w = vec![0.0; nodes];
        w[k] = 1.0;
        Self::new(w)
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Euclidean norm `|w|`.
    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// Readout output `y(t)` for `t = 1..=M`.
pub fn output(traj: &StateTrajectory, w: &ReadoutWeights) -> Result<Vec<f64>> {
    if w.len() != traj.nodes() {
        return Err(Error::DimensionMismatch {
            expected: traj.nodes(),
            actual: w.len(),
        });
    }
    Ok(traj
        .columns()
        .skip(1)
        .map(|col| col.iter().zip(&w.w).map(|(x, wk)| x * wk).sum())
        .collect())
}

/// Reservoir states stored as columns: rows are nodes, columns retained times.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
    washout: usize,
}

impl DesignMatrix {
    pub fn from_matrix(x: DMatrix<f64>, washout: usize) -> Self {
        Self { x, washout }
    }

    /// `cols` state vectors of length `nodes`, stored one after another.
    pub fn from_column_slice(nodes: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nodes * cols {
            return Err(Error::DimensionMismatch {
                expected: nodes * cols,
                actual: data.len(),
            });
        }
        Ok(Self::from_matrix(DMatrix::from_column_slice(nodes, cols, data), 0))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn nodes(&self) -> usize {
        self.x.nrows()
    }

    pub fn column_count(&self) -> usize {
        self.x.ncols()
    }

    pub fn washout(&self) -> usize {
        self.washout
    }

    /// Keeps the columns with indices in `range`.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> DesignMatrix {
        DesignMatrix {
            x: self.x.columns(range.start, range.len()).into_owned(),
            washout: self.washout,
        }
    }

    /// Readout output at each retained time.
    pub fn apply(&self, w: &ReadoutWeights) -> Result<Vec<f64>> {
        if w.len() != self.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes(),
                actual: w.len(),
            });
        }
        let wv = DVector::from_column_slice(w.values());
        Ok((self.x.transpose() * wv).iter().copied().collect())
    }
}

/// Targets `ŷ(t)` aligned with the columns of a [`DesignMatrix`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TargetSeries(Vec<f64>);

impl TargetSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Concatenates per-trajectory targets (indexed `t = 1..=M`), dropping
    /// the first `washout` entries of each, matching [`build_design`].
    pub fn after_washout(per_series: &[Vec<f64>], washout: usize) -> Self {
        Self(
            per_series
                .iter()
                .flat_map(|s| s.iter().skip(washout).copied())
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Stacks the states at times `t > washout` of every trajectory, in order.
pub fn build_design(trajs: &[StateTrajectory], washout: usize) -> Result<DesignMatrix> {
    let first = trajs.first().ok_or(Error::EmptyDesign)?;
    let nodes = first.nodes();
    let mut data = Vec::new();
    for traj in trajs {
        if traj.nodes() != nodes {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                actual: traj.nodes(),
            });
        }
        if washout >= traj.len() {
            return Err(Error::WashoutTooLong {
                washout,
                len: traj.len(),
            });
        }
        for t in washout + 1..=traj.len() {
            data.extend_from_slice(traj.column(t));
        }
    }
    let cols = data.len() / nodes;
    Ok(DesignMatrix {
        x: DMatrix::from_vec(nodes, cols, data),
        washout,
    })
}

fn check_target(x: &DesignMatrix, target: &TargetSeries) -> Result<()> {
    if x.column_count() == 0 || x.nodes() == 0 {
        return Err(Error::EmptyDesign);
    }
    if target.len() != x.column_count() {
        return Err(Error::DimensionMismatch {
            expected: x.column_count(),
            actual: target.len(),
        });
    }
    Ok(())
}

/// Minimum-norm least-squares weights, `w = (Xᵀ)⁺ ŷ` via the SVD.
pub fn train_least_squares(x: &DesignMatrix, target: &TargetSeries) -> Result<ReadoutWeights> {
    check_target(x, target)?;
    let a = x.x.transpose();
    let b = DVector::from_column_slice(target.values());
    let dim = a.nrows().max(a.ncols()) as f64;
    let svd = a.svd(true, true);
    let eps = svd.singular_values.max() * dim * f64::EPSILON;
    let w = svd
        .solve(&b, eps)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(ReadoutWeights::new(w.iter().copied().collect()))
}

/// Ridge weights from `(X Xᵀ + λI) w = X ŷ`.
pub fn train_ridge(x: &DesignMatrix, target: &TargetSeries, lambda: f64) -> Result<ReadoutWeights> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "ridge lambda must be nonnegative, got {lambda}"
        )));
    }
    check_target(x, target)?;
    let n = x.nodes();
    let gram = &x.x * x.x.transpose() + DMatrix::identity(n, n) * lambda;
    let rhs = &x.x * DVector::from_column_slice(target.values());
    let w = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        // singular Gram matrix (λ = 0, rank deficient): pseudo-inverse
        None => {
            let svd = gram.svd(true, true);
            let eps = svd.singular_values.max() * n as f64 * f64::EPSILON;
            svd.solve(&rhs, eps)
                .map_err(|e| Error::Numerical(e.to_string()))?
        }
    };
    Ok(ReadoutWeights::new(w.iter().copied().collect()))
}

/// Sparse readout weights from the Dantzig selector on `Xᵀ w ≈ ŷ`.
pub fn train_dantzig(x: &DesignMatrix, target: &TargetSeries, delta: f64) -> Result<ReadoutWeights> {
    check_target(x, target)?;
    let w = dantzig_selector(&x.x.transpose(), target.values(), delta)?;
    Ok(ReadoutWeights::new(w))
}

/// Root mean square error normalised by the (population) variance of the target.
pub fn nrmse(y: &[f64], target: &[f64]) -> Result<f64> {
    if y.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: y.len(),
        });
    }
    if target.len() < 2 {
        return Err(Error::Precondition("NRMSE needs at least two samples".into()));
    }
    let n = target.len() as f64;
    let mean = target.iter().sum::<f64>() / n;
    let var = target.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mse = y
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / n;
    Ok((mse / var).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::{run, Feedback, Nonlinearity, ReservoirConfig};

    fn small_traj() -> StateTrajectory {
        let cfg = ReservoirConfig::new(2, 0.5, 0.5, Nonlinearity::Tanh, Feedback::Delayed).unwrap();
        run(&cfg, &vec![1.0, -1.0].into())
    }

    #[test]
    fn output_selectors() {
        let traj = small_traj();
        assert_eq!(output(&traj, &ReadoutWeights::zeros(3)).unwrap(), vec![0.0, 0.0]);
        let y = output(&traj, &ReadoutWeights::unit(3, 1)).unwrap();
        assert_eq!(y, vec![traj.state(1, 1), traj.state(1, 2)]);
        assert!(output(&traj, &ReadoutWeights::zeros(2)).is_err());
    }

    #[test]
    fn output_column_sums_of_hand_oracle() {
        let traj = small_traj();
        let y = output(&traj, &ReadoutWeights::new(vec![1.0; 3])).unwrap();
        let t1 = 0.5f64.tanh();
        let t2 = (-0.5f64).tanh() + 0.5f64.tanh();
        assert!((y[0] - t1).abs() < 1e-14 && (y[1] - t2).abs() < 1e-14);
    }

    #[test]
    fn weight_norm_cached() {
        let w = ReadoutWeights::new(vec![3.0, 4.0]);
        assert!((w.norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn design_counts() {
        let traj = small_traj();
        let d = build_design(std::slice::from_ref(&traj), 0).unwrap();
        assert_eq!(d.column_count(), 2);
        assert_eq!(d.matrix().column(1).as_slice(), traj.column(2));
        let d = build_design(std::slice::from_ref(&traj), 1).unwrap();
        assert_eq!(d.column_count(), 1);
        let d = build_design(&[traj.clone(), traj.clone()], 1).unwrap();
        assert_eq!(d.column_count(), 2 * 2 - 2);
        assert!(matches!(
            build_design(&[traj], 2),
            Err(Error::WashoutTooLong { .. })
        ));
        assert_eq!(build_design(&[], 0), Err(Error::EmptyDesign));
    }

    #[test]
    fn least_squares_single_equation_min_norm() {
        let mut x = DMatrix::zeros(4, 1);
        x[(0, 0)] = 1.0;
        let d = DesignMatrix::from_matrix(x, 0);
        let w = train_least_squares(&d, &TargetSeries::new(vec![5.0])).unwrap();
        assert!((w.values()[0] - 5.0).abs() < 1e-12);
        assert!(w.values()[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn least_squares_zero_target() {
        let d = DesignMatrix::from_matrix(DMatrix::from_fn(3, 6, |i, j| (i + 2 * j) as f64), 0);
        let w = train_least_squares(&d, &TargetSeries::new(vec![0.0; 6])).unwrap();
        assert!(w.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ridge_shrinks_to_zero() {
        let d = DesignMatrix::from_matrix(DMatrix::from_fn(3, 8, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0), 0);
        let t = TargetSeries::new((0..8).map(|i| i as f64 * 0.3 - 1.0).collect());
        let w = train_ridge(&d, &t, 1e12).unwrap();
        assert!(w.norm() < 1e-6);
        assert!(train_ridge(&d, &t, -1.0).is_err());
    }

    #[test]
    fn ridge_lambda_zero_rank_deficient_falls_back() {
        let d = DesignMatrix::from_matrix(DMatrix::from_fn(3, 2, |i, j| (i + j) as f64), 0);
        let t = TargetSeries::new(vec![1.0, 2.0]);
        let ls = train_least_squares(&d, &t).unwrap();
        let r = train_ridge(&d, &t, 0.0).unwrap();
        for (a, b) in ls.values().iter().zip(r.values()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn nrmse_examples() {
        let t = [1.0, 3.0, -2.0, 0.5];
        assert_eq!(nrmse(&t, &t).unwrap(), 0.0);
        let mean = t.iter().sum::<f64>() / 4.0;
        assert!((nrmse(&[mean; 4], &t).unwrap() - 1.0).abs() < 1e-12);
        assert!((nrmse(&[0.0, 0.0], &[1.0, -1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nrmse(&[1.0, 2.0], &[3.0, 3.0]), Err(Error::ZeroVariance));
        assert!(nrmse(&[1.0], &[1.0, 2.0]).is_err());
    }
}
