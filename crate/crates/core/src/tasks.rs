//! Benchmark tasks: NARMA regression and synthetic template classification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::readout::{
    build_design, nrmse, train_dantzig, train_least_squares, train_ridge, DesignMatrix,
    ReadoutWeights, TargetSeries,
};
use crate::reservoir::{pad_inputs, run, InputSeries, ReservoirConfig, StateTrajectory};
use crate::separation::{group_by_label, report_from_trajectories, LabeledSeries, SeparationReport};

/// NARMA recurrence constants:
/// `y(t+1) = A·y(t) + B·y(t)·Σ_{i<order} y(t−i) + C·u(t−order+1)·u(t) + D`.
pub const NARMA_A: f64 = 0.3;
pub const NARMA_B: f64 = 0.05;
pub const NARMA_C: f64 = 1.5;
pub const NARMA_D: f64 = 0.1;
/// Inputs are drawn uniformly from `[0, NARMA_INPUT_MAX]`.
pub const NARMA_INPUT_MAX: f64 = 0.5;
const NARMA_DIVERGENCE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarmaSpec {
    pub order: usize,
    pub length: usize,
    pub seed: u64,
}

impl NarmaSpec {
    /// NARMA-10 of the given length.
    pub fn new(length: usize, seed: u64) -> Self {
        Self {
            order: 10,
            length,
            seed,
        }
    }
}

/// NARMA input `u(1..=T)` and aligned target: `target[t−1] = y(t)` depends on
/// inputs up to `u(t)` only.
#[derive(Debug, Clone, PartialEq)]
pub struct NarmaData {
    pub input: InputSeries,
    pub target: Vec<f64>,
}

/// Iterates the recurrence over `u[0..T)` from a zero history. Returns
/// `y[0..=T]`, where `y[t+1]` is driven by `u[t]` and `u[t−order+1]`.
pub fn narma_recurrence(u: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 || u.len() <= order {
        return Err(Error::Precondition(format!(
            "NARMA needs length > order (length {}, order {order})",
            u.len()
        )));
    }
    let mut y = vec![0.0; u.len() + 1];
    for t in order - 1..u.len() {
        let window: f64 = y[t + 1 - order..=t].iter().sum();
        let next = NARMA_A * y[t] + NARMA_B * y[t] * window + NARMA_C * u[t + 1 - order] * u[t] + NARMA_D;
        if !next.is_finite() || next.abs() > NARMA_DIVERGENCE {
            return Err(Error::NarmaDiverged);
        }
        y[t + 1] = next;
    }
    Ok(y)
}

pub fn narma_generate(spec: &NarmaSpec) -> Result<NarmaData> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u: Vec<f64> = (0..spec.length)
        .map(|_| rng.gen_range(0.0..=NARMA_INPUT_MAX))
        .collect();
    let y = narma_recurrence(&u, spec.order)?;
    Ok(NarmaData {
        input: u.into(),
        target: y[1..].to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticClassSpec {
    /// One template per class; all the same length.
    pub templates: Vec<Vec<f64>>,
    /// Half-width `a` of the uniform noise on `[−a, a]`.
    pub noise: f64,
    pub samples_per_class: usize,
    pub seed: u64,
}

impl SyntheticClassSpec {
    pub fn num_classes(&self) -> usize {
        self.templates.len()
    }
}

/// Noisy copies of each template, labelled by template index, class-major.
pub fn synth_classes(spec: &SyntheticClassSpec) -> Result<Vec<LabeledSeries>> {
    let len = spec
        .templates
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Precondition("no class templates".into()))?;
    if spec.templates.iter().any(|t| t.len() != len) {
        return Err(Error::Precondition("templates must have equal lengths".into()));
    }
    if spec.noise.is_nan() || spec.noise < 0.0 {
        return Err(Error::Precondition("noise amplitude must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.templates.len() * spec.samples_per_class);
    for (class, template) in spec.templates.iter().enumerate() {
        for _ in 0..spec.samples_per_class {
            let values: Vec<f64> = template
                .iter()
                .map(|&v| {
                    if spec.noise > 0.0 {
                        v + rng.gen_range(-spec.noise..=spec.noise)
                    } else {
                        v
                    }
                })
                .collect();
            out.push(LabeledSeries::new(class.to_string(), values.into()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum TrainMethod {
    LeastSquares,
    Ridge { lambda: f64 },
    Dantzig { delta: f64 },
}

impl TrainMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TrainMethod::LeastSquares => "least_squares",
            TrainMethod::Ridge { .. } => "ridge",
            TrainMethod::Dantzig { .. } => "dantzig",
        }
    }

    /// λ for ridge, δ for Dantzig, 0 for least squares.
    pub fn hyperparameter(&self) -> f64 {
        match *self {
            TrainMethod::LeastSquares => 0.0,
            TrainMethod::Ridge { lambda } => lambda,
            TrainMethod::Dantzig { delta } => delta,
        }
    }

    pub fn train(&self, x: &DesignMatrix, target: &TargetSeries) -> Result<ReadoutWeights> {
        match *self {
            TrainMethod::LeastSquares => train_least_squares(x, target),
            TrainMethod::Ridge { lambda } => train_ridge(x, target, lambda),
            TrainMethod::Dantzig { delta } => train_dantzig(x, target, delta),
        }
    }
}

impl fmt::Display for TrainMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub method: TrainMethod,
    pub washout: usize,
    /// Fraction of data used for training; the rest is held out.
    pub train_fraction: f64,
}

impl Default for TrainSpec {
    fn default() -> Self {
        Self {
            method: TrainMethod::Ridge { lambda: 1e-6 },
            washout: 0,
            train_fraction: 0.8,
        }
    }
}

/// Serialized as `{method, lambda_or_delta, nrmse_train, nrmse_test, weight_norm}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub method: String,
    pub lambda_or_delta: f64,
    pub nrmse_train: Option<f64>,
    pub nrmse_test: Option<f64>,
    pub weight_norm: f64,
}

pub enum Task {
    /// One long input with a per-step target (`target[t−1]` for time `t`).
    Regression { input: InputSeries, target: Vec<f64> },
    Classification { samples: Vec<LabeledSeries> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    #[serde(flatten)]
    pub training: TrainingReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separation: Option<SeparationReport>,
    #[serde(skip)]
    pub weights: Option<ReadoutWeights>,
}

fn split_point(total: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must lie in (0, 1], got {fraction}"
        )));
    }
    Ok(((total as f64 * fraction).round() as usize).clamp(1, total))
}

pub fn run_benchmark(config: &ReservoirConfig, task: &Task, spec: &TrainSpec) -> Result<BenchmarkReport> {
    match task {
        Task::Regression { input, target } => regression(config, input, target, spec),
        Task::Classification { samples } => classification(config, samples, spec),
    }
}

fn regression(
    config: &ReservoirConfig,
    input: &InputSeries,
    target: &[f64],
    spec: &TrainSpec,
) -> Result<BenchmarkReport> {
    if target.len() != input.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            actual: target.len(),
        });
    }
    let traj = run(config, input);
    let design = build_design(std::slice::from_ref(&traj), spec.washout)?;
    let targets = TargetSeries::after_washout(&[target.to_vec()], spec.washout);
    let cols = design.column_count();
    let split = split_point(cols, spec.train_fraction)?;

    let train_x = design.select_columns(0..split);
    let train_t = TargetSeries::new(targets.values()[..split].to_vec());
    let w = spec.method.train(&train_x, &train_t)?;

    let nrmse_train = nrmse(&train_x.apply(&w)?, train_t.values()).ok();
    let nrmse_test = if split < cols {
        let test_x = design.select_columns(split..cols);
        nrmse(&test_x.apply(&w)?, &targets.values()[split..]).ok()
    } else {
        None
    };
    Ok(BenchmarkReport {
        training: TrainingReport {
            method: spec.method.name().into(),
            lambda_or_delta: spec.method.hyperparameter(),
            nrmse_train,
            nrmse_test,
            weight_norm: w.norm(),
        },
        accuracy: None,
        separation: None,
        weights: Some(w),
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Readout trained towards the class index; each sample is scored by its
/// time-averaged output and assigned to the nearest class-mean score.
fn classification(
    config: &ReservoirConfig,
    samples: &[LabeledSeries],
    spec: &TrainSpec,
) -> Result<BenchmarkReport> {
    if samples.iter().any(|s| s.label.is_empty()) {
        return Err(Error::EmptyClass);
    }
    let series: Vec<InputSeries> = samples.iter().map(|s| s.series.clone()).collect();
    let batch = pad_inputs(&series)?;
    let m = batch.len();
    if spec.washout >= m {
        return Err(Error::WashoutTooLong {
            washout: spec.washout,
            len: m,
        });
    }
    let trajs: Vec<StateTrajectory> = batch.inputs().iter().map(|u| run(config, u)).collect();
    let groups = group_by_label(samples);

    let mut class_of = vec![0usize; samples.len()];
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (c, (_, members)) in groups.iter().enumerate() {
        let k = split_point(members.len(), spec.train_fraction)?;
        for (pos, &i) in members.iter().enumerate() {
            class_of[i] = c;
            if pos < k {
                train_idx.push(i);
            } else {
                test_idx.push(i);
            }
        }
    }

    let retained = m - spec.washout;
    let design_for = |idx: &[usize]| -> Result<(DesignMatrix, TargetSeries)> {
        let ts: Vec<StateTrajectory> = idx.iter().map(|&i| trajs[i].clone()).collect();
        let x = build_design(&ts, spec.washout)?;
        let t = idx
            .iter()
            .flat_map(|&i| std::iter::repeat_n(class_of[i] as f64, retained))
            .collect();
        Ok((x, TargetSeries::new(t)))
    };

    let (train_x, train_t) = design_for(&train_idx)?;
    let w = spec.method.train(&train_x, &train_t)?;
    let nrmse_train = nrmse(&train_x.apply(&w)?, train_t.values()).ok();

    let score = |i: usize| -> Result<f64> {
        let y = crate::readout::output(&trajs[i], &w)?;
        Ok(mean(&y[spec.washout..]))
    };
    let mut class_scores = vec![Vec::new(); groups.len()];
    for &i in &train_idx {
        class_scores[class_of[i]].push(score(i)?);
    }
    let centres: Vec<f64> = class_scores.iter().map(|s| mean(s)).collect();

    let eval_idx = if test_idx.is_empty() { &train_idx } else { &test_idx };
    let mut correct = 0;
    for &i in eval_idx {
        let s = score(i)?;
        let predicted = centres
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - s).abs().total_cmp(&(b.1 - s).abs()))
            .map(|(c, _)| c)
            .unwrap_or(0);
        if predicted == class_of[i] {
            correct += 1;
        }
    }
    let nrmse_test = if test_idx.is_empty() {
        None
    } else {
        let (test_x, test_t) = design_for(&test_idx)?;
        nrmse(&test_x.apply(&w)?, test_t.values()).ok()
    };

    Ok(BenchmarkReport {
        training: TrainingReport {
            method: spec.method.name().into(),
            lambda_or_delta: spec.method.hyperparameter(),
            nrmse_train,
            nrmse_test,
            weight_norm: w.norm(),
        },
        accuracy: Some(correct as f64 / eval_idx.len() as f64),
        separation: Some(report_from_trajectories(&trajs, &groups, m)?),
        weights: Some(w),
    })
}
