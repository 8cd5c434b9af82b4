//! Input→output Lipschitz bound for the delay-line reservoir.
//!
//! When `f` is `L`-Lipschitz and `αL < 1/√2`,
//!
//! ```text
//! ‖y_u − y_v‖² ≤ |w|² · M · (Lβ)² · (N+1) · (1 + 2/(1 − 2α²L²)) · ‖u − v‖²
//! ```
//!
//! with both norms taken over `t = 1..=M`. This module evaluates the constant
//! and measures how close simulated pairs come to it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::readout::{output, ReadoutWeights};
use crate::reservoir::{pad_inputs, run, InputSeries, ReservoirConfig};

/// Relative slack allowed before a pair counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Default threshold on `|u(t) − v(t)|` for the pointwise probe.
pub const DEFAULT_PROBE_EPSILON: f64 = 1e-6;

/// `αL < 1/√2`, strictly.
pub fn contraction_valid(alpha: f64, lipschitz: f64) -> bool {
    // compare squares so that αL = 1/√2 exactly (denominator zero) is rejected
    2.0 * (alpha * lipschitz).powi(2) < 1.0
}

/// `1 + 2/(1 − 2(αL)²)`.
pub fn geometric_factor(alpha_l: f64) -> Result<f64> {
    if !contraction_valid(alpha_l, 1.0) {
        return Err(Error::BoundUndefined(alpha_l));
    }
    Ok(1.0 + 2.0 / (1.0 - 2.0 * alpha_l * alpha_l))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lipschitz: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Delay length `N` (the reservoir has `N + 1` nodes).
    pub n: usize,
    /// Padded input length `M`.
    pub m: usize,
    pub weight_norm: f64,
}

impl BoundParams {
    pub fn for_config(config: &ReservoirConfig, m: usize, w: &ReadoutWeights) -> Self {
        Self {
            lipschitz: config.lipschitz(),
            alpha: config.alpha(),
            beta: config.beta(),
            n: config.n(),
            m,
            weight_norm: w.norm(),
        }
    }
}

pub fn theoretical_constant(p: &BoundParams) -> Result<f64> {
    let factor = geometric_factor(p.alpha * p.lipschitz)?;
    let lb = p.lipschitz * p.beta;
    Ok(p.weight_norm.powi(2) * p.m as f64 * lb * lb * (p.n + 1) as f64 * factor)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn padded_pair(u: &InputSeries, v: &InputSeries) -> (InputSeries, InputSeries) {
    let m = u.len().max(v.len());
    (u.padded(m), v.padded(m))
}

/// `‖y_u − y_v‖² / ‖u − v‖²` over `t = 1..=M`.
pub fn empirical_ratio(
    config: &ReservoirConfig,
    w: &ReadoutWeights,
    u: &InputSeries,
    v: &InputSeries,
) -> Result<f64> {
    let (u, v) = padded_pair(u, v);
    let denom = squared_distance(u.values(), v.values());
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let yu = output(&run(config, &u), w)?;
    let yv = output(&run(config, &v), w)?;
    Ok(squared_distance(&yu, &yv) / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theoretical_c: f64,
    pub max_empirical_ratio: f64,
    pub mean_empirical_ratio: f64,
    pub num_pairs: usize,
    pub violations: usize,
    /// `theoretical_c − max_empirical_ratio`
    pub slack: f64,
}

/// Evaluates every pair against the constant for `M` = the longest input.
pub fn bound_check(
    config: &ReservoirConfig,
    w: &ReadoutWeights,
    pairs: &[(InputSeries, InputSeries)],
) -> Result<BoundReport> {
    let all: Vec<InputSeries> = pairs
        .iter()
        .flat_map(|(u, v)| [u.clone(), v.clone()])
        .collect();
    let m = pad_inputs(&all)?.len();
    let c = theoretical_constant(&BoundParams::for_config(config, m, w))?;

    let ratios = pairs
        .par_iter()
        .map(|(u, v)| empirical_ratio(config, w, &u.padded(m), &v.padded(m)))
        .collect::<Result<Vec<f64>>>()?;

    let max = ratios.iter().copied().fold(0.0, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let violations = ratios
        .iter()
        .filter(|&&r| r > c * (1.0 + VIOLATION_TOLERANCE))
        .count();
    Ok(BoundReport {
        theoretical_c: c,
        max_empirical_ratio: max,
        mean_empirical_ratio: mean,
        num_pairs: ratios.len(),
        violations,
        slack: c - max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseStats {
    pub max: f64,
    pub mean: f64,
    pub p99: f64,
    /// Number of admissible `(pair, t)` samples.
    pub count: usize,
}

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Distribution of `|y_u(t) − y_v(t)| / |u(t) − v(t)|` over all pairs and
/// times with `|u(t) − v(t)| ≥ epsilon`.
pub fn pointwise_ratio_probe(
    config: &ReservoirConfig,
    w: &ReadoutWeights,
    pairs: &[(InputSeries, InputSeries)],
    epsilon: f64,
) -> Result<PointwiseStats> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let per_pair = pairs
        .par_iter()
        .map(|(u, v)| -> Result<Vec<f64>> {
            let (u, v) = padded_pair(u, v);
            let yu = output(&run(config, &u), w)?;
            let yv = output(&run(config, &v), w)?;
            Ok((1..=u.len())
                .filter_map(|t| {
                    let du = (u.at(t) - v.at(t)).abs();
                    (du >= epsilon).then(|| (yu[t - 1] - yv[t - 1]).abs() / du)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ratios: Vec<f64> = per_pair.into_iter().flatten().collect();
    if ratios.is_empty() {
        return Err(Error::NoAdmissibleSteps);
    }
    ratios.sort_by(f64::total_cmp);
    Ok(PointwiseStats {
        max: *ratios.last().unwrap(),
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        p99: percentile(&ratios, 99.0),
        count: ratios.len(),
    })
}

/// `count` pairs of series with i.i.d. entries uniform on `[−1, 1]`,
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_pairs(count: usize, m: usize, seed: u64) -> Vec<(InputSeries, InputSeries)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> InputSeries {
        (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<_>>().into()
    };
    (0..count)
        .map(|_| {
            let u = draw(&mut rng);
            let v = draw(&mut rng);
            (u, v)
        })
        .collect()
}

/// Random weights on the unit sphere in `ℝ^nodes`.
pub fn random_unit_weights(nodes: usize, seed: u64) -> ReadoutWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let w: Vec<f64> = (0..nodes).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return ReadoutWeights::new(w.into_iter().map(|v| v / norm).collect());
        }
    }
}
