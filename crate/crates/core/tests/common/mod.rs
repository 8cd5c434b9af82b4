//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use delayres::reservoir::Nonlinearity;
use nalgebra::{DMatrix, DVector};

/// Node states from the scalar recursion on the nonlinear node alone:
/// `x_0(t) = f(α·x_0(t−N−1) + β·u(t))` and `x_k(t) = x_0(t−k)`.
/// Returned as `states[t][k]` for `t = 0..=M`.
pub fn delay_oracle(n: usize, alpha: f64, beta: f64, f: Nonlinearity, u: &[f64]) -> Vec<Vec<f64>> {
    let m = u.len();
    let mut x0 = vec![0.0; m + 1];
    for t in 1..=m {
        let fb = if t > n + 1 { x0[t - n - 1] } else { 0.0 };
        x0[t] = f.apply(alpha * fb + beta * u[t - 1]);
    }
    (0..=m)
        .map(|t| (0..=n).map(|k| if t >= k { x0[t - k] } else { 0.0 }).collect())
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    s.sqrt()
}

fn naive_mean(class: &[Vec<f64>]) -> Vec<f64> {
    let mut mu = vec![0.0; class[0].len()];
    for j in 0..mu.len() {
        let mut s = 0.0;
        for x in class {
            s += x[j];
        }
        mu[j] = s / class.len() as f64;
    }
    mu
}

/// Double-loop `(C_d, C_v, Sep)`.
pub fn naive_separation(classes: &[Vec<Vec<f64>>]) -> (f64, f64, f64) {
    let nu = classes.len();
    let mus: Vec<Vec<f64>> = classes.iter().map(|c| naive_mean(c)).collect();
    let mut cd = 0.0;
    for n in 0..nu {
        for m in 0..nu {
            cd += dist(&mus[n], &mus[m]);
        }
    }
    cd /= (nu * nu) as f64;
    let mut cv = 0.0;
    for n in 0..nu {
        let mut s = 0.0;
        for x in &classes[n] {
            s += dist(&mus[n], x);
        }
        cv += s / classes[n].len() as f64;
    }
    cv /= nu as f64;
    (cd, cv, cd / (cv + 1.0))
}

/// Optimal value of `min cᵀz, A z ≤ b, z ≥ 0` by enumerating every basic
/// solution. Only for a handful of variables.
pub fn vertex_enumeration_min(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let nv = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..nv {
        let mut r = vec![0.0; nv];
        r[j] = -1.0;
        rows.push((r, 0.0));
    }
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..nv).collect();
    loop {
        let m = DMatrix::from_fn(nv, nv, |i, j| rows[subset[i]].0[j]);
        let rhs = DVector::from_fn(nv, |i, _| rows[subset[i]].1);
        if let Some(z) = m.lu().solve(&rhs) {
            let feasible = rows.iter().all(|(r, bi)| {
                let lhs: f64 = r.iter().zip(z.iter()).map(|(p, q)| p * q).sum();
                lhs <= bi + 1e-9 * (1.0 + bi.abs())
            });
            if feasible {
                let val: f64 = c.iter().zip(z.iter()).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(val, |b: f64| b.min(val)));
            }
        }
        // next combination
        let total = rows.len();
        let mut i = nv;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < total - nv + i {
                subset[i] += 1;
                for j in i + 1..nv {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Minimum ‖β‖₁ subject to `‖D⁻¹Xᵀ(Xβ − y)‖_∞ ≤ δ`, by vertex enumeration
/// on the split `β = β⁺ − β⁻`.
pub fn dantzig_oracle_l1(x: &DMatrix<f64>, y: &[f64], delta: f64) -> Option<f64> {
    let p = x.ncols();
    let d: Vec<f64> = (0..p).map(|k| x.column(k).norm()).collect();
    let g = x.transpose() * x;
    let c = x.transpose() * DVector::from_column_slice(y);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in 0..p {
        let row: Vec<f64> = (0..p).map(|j| g[(k, j)] / d[k]).collect();
        let mut up = row.clone();
        up.extend(row.iter().map(|v| -v));
        a.push(up);
        b.push(delta + c[k] / d[k]);
        let mut lo: Vec<f64> = row.iter().map(|v| -v).collect();
        lo.extend(row.iter().copied());
        a.push(lo);
        b.push(delta - c[k] / d[k]);
    }
    vertex_enumeration_min(&vec![1.0; 2 * p], &a, &b)
}
