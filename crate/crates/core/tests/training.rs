mod common;

use delayres::readout::{
    build_design, dantzig_selector, normalized_correlation, nrmse, train_least_squares,
    train_ridge, DesignMatrix, TargetSeries,
};
use delayres::reservoir::{run, Feedback, Nonlinearity, ReservoirConfig};
use delayres::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

fn planted(nodes: usize, cols: usize, seed: u64) -> (DesignMatrix, Vec<f64>, TargetSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_matrix(nodes, cols, &mut rng);
    let w: Vec<f64> = (0..nodes).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let y = x.transpose() * DVector::from_column_slice(&w);
    (
        DesignMatrix::from_matrix(x, 0),
        w,
        TargetSeries::new(y.iter().copied().collect()),
    )
}

#[test]
fn planted_recovery_least_squares_and_ridge() {
    for seed in 0..10 {
        let (x, w, t) = planted(8, 40, seed);
        let ls = train_least_squares(&x, &t).unwrap();
        let ridge = train_ridge(&x, &t, 1e-8).unwrap();
        for (k, wk) in w.iter().enumerate() {
            assert!((ls.values()[k] - wk).abs() < 1e-8);
            assert!((ridge.values()[k] - wk).abs() < 1e-4);
        }
    }
}

#[test]
fn planted_recovery_on_reservoir_states() {
    let cfg = ReservoirConfig::new(6, 0.5, 0.5, Nonlinearity::Tanh, Feedback::Delayed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u: Vec<f64> = (0..120).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = build_design(&[run(&cfg, &u.into())], 10).unwrap();
    let w = [0.3, -1.0, 0.5, 0.0, 2.0, -0.7, 0.1];
    let y = x.matrix().transpose() * DVector::from_column_slice(&w);
    let got = train_least_squares(&x, &TargetSeries::new(y.iter().copied().collect())).unwrap();
    for (a, b) in got.values().iter().zip(w) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn ridge_zero_matches_least_squares() {
    for seed in 20..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DesignMatrix::from_matrix(random_matrix(5, 30, &mut rng), 0);
        let t = TargetSeries::new((0..30).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let ls = train_least_squares(&x, &t).unwrap();
        let r = train_ridge(&x, &t, 0.0).unwrap();
        for (a, b) in ls.values().iter().zip(r.values()) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn underdetermined_least_squares_is_min_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_matrix(6, 3, &mut rng);
    let t: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w = train_least_squares(&DesignMatrix::from_matrix(x.clone(), 0), &TargetSeries::new(t.clone())).unwrap();
    // exact fit, and w lies in the row space of Xᵀ (= column space of X)
    let fit = x.transpose() * DVector::from_column_slice(w.values());
    for (a, b) in fit.iter().zip(&t) {
        assert!((a - b).abs() < 1e-10);
    }
    let coeffs = (x.transpose() * &x).lu().solve(&(x.transpose() * DVector::from_column_slice(w.values()))).unwrap();
    let back = &x * coeffs;
    for (a, b) in back.iter().zip(w.values()) {
        assert!((a - b).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn residual_orthogonality(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(4, 25, &mut rng);
        let t: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = train_least_squares(&DesignMatrix::from_matrix(x.clone(), 0), &TargetSeries::new(t.clone())).unwrap();
        let resid = x.transpose() * DVector::from_column_slice(w.values()) - DVector::from_column_slice(&t);
        let g = &x * resid;
        prop_assert!(g.amax() < 1e-8);
    }

    #[test]
    fn ridge_norm_monotone(seed in 0u64..1000, l1 in 0.0f64..10.0, dl in 0.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DesignMatrix::from_matrix(random_matrix(5, 20, &mut rng), 0);
        let t = TargetSeries::new((0..20).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let a = train_ridge(&x, &t, l1).unwrap().norm();
        let b = train_ridge(&x, &t, l1 + dl).unwrap().norm();
        prop_assert!(a >= b - 1e-12);
    }

    #[test]
    fn dantzig_feasible_and_optimal(seed in 0u64..1000, p in 1usize..4, delta in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = p + rng.gen_range(0..4);
        let x = random_matrix(n, p, &mut rng);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let beta = dantzig_selector(&x, &y, delta).unwrap();
        let sup = normalized_correlation(&x, &y, &beta).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(sup <= delta + 1e-6);
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let oracle = common::dantzig_oracle_l1(&x, &y, delta).unwrap();
        prop_assert!((l1 - oracle).abs() < 1e-4, "l1 {} oracle {}", l1, oracle);
    }
}

#[test]
fn dantzig_desk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let x = random_matrix(80, 40, &mut rng);
    let y: Vec<f64> = (0..80).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let beta = dantzig_selector(&x, &y, 0.2).unwrap();
    let sup = normalized_correlation(&x, &y, &beta).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(sup <= 0.2 + 1e-6);
    let zeros = beta.iter().filter(|b| b.abs() < 1e-12).count();
    assert!(zeros > 0, "expected a sparse solution");
}

#[test]
fn nrmse_zero_predictor_dominates_training() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = DesignMatrix::from_matrix(random_matrix(6, 50, &mut rng), 0);
    let t: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..1.0)).collect();
    let w = train_ridge(&x, &TargetSeries::new(t.clone()), 1e-3).unwrap();
    let fit = nrmse(&x.apply(&w).unwrap(), &t).unwrap();
    let zero = nrmse(&[0.0; 50], &t).unwrap();
    assert!(fit <= zero);
    assert_eq!(nrmse(&[1.0; 3], &[2.0; 3]), Err(Error::ZeroVariance));
}
