//! Class-separation metrics over instantaneous reservoir states.
//!
//! At a fixed time `t` the states `x^{(u)}(t)` are grouped into classes
//! `X_1(t), …, X_{N_u}(t)`. With `μ_n` the mean of class `n`:
//!
//! ```text
//! C_d = (1/N_u²) Σ_n Σ_m |μ_n − μ_m|
//! C_v = (1/N_u)  Σ_n (1/|X_n|) Σ_{x∈X_n} |μ_n − x|
//! Sep = C_d / (C_v + 1)
//! ```
//!
//! `C_d` keeps the `n = m` terms, so two classes at distance `d` give `d/2`.
//! Distances are Euclidean over all `N + 1` nodes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reservoir::{pad_inputs, run, InputSeries, ReservoirConfig, StateTrajectory};

/// An input with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub label: String,
    pub series: InputSeries,
}

impl LabeledSeries {
    pub fn new(label: impl Into<String>, series: InputSeries) -> Self {
        Self {
            label: label.into(),
            series,
        }
    }
}

/// Reservoir states at one time, partitioned into labelled classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedStateSet {
    time: usize,
    labels: Vec<String>,
    classes: Vec<Vec<Vec<f64>>>,
}

impl ClassifiedStateSet {
    pub fn new(time: usize, labels: Vec<String>, classes: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::EmptyClass);
        }
        if labels.len() != classes.len() {
            return Err(Error::DimensionMismatch {
                expected: classes.len(),
                actual: labels.len(),
            });
        }
        let dim = classes
            .iter()
            .find_map(|c| c.first())
            .map(Vec::len)
            .ok_or(Error::EmptyClass)?;
        for class in &classes {
            if class.is_empty() {
                return Err(Error::EmptyClass);
            }
            if let Some(bad) = class.iter().find(|x| x.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: bad.len(),
                });
            }
        }
        Ok(Self {
            time,
            labels,
            classes,
        })
    }

    /// Unlabelled convenience constructor; classes are named by index.
    pub fn from_classes(time: usize, classes: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let labels = (0..classes.len()).map(|i| i.to_string()).collect();
        Self::new(time, labels, classes)
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classes(&self) -> &[Vec<Vec<f64>>] {
        &self.classes
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Componentwise mean of the members.
pub fn class_average(class: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = class.first().ok_or(Error::EmptyClass)?;
    let mut mu = vec![0.0; first.len()];
    for x in class {
        if x.len() != mu.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len(),
                actual: x.len(),
            });
        }
        for (m, v) in mu.iter_mut().zip(x) {
            *m += v;
        }
    }
    let n = class.len() as f64;
    mu.iter_mut().for_each(|m| *m /= n);
    Ok(mu)
}

fn centers(set: &ClassifiedStateSet) -> Vec<Vec<f64>> {
    set.classes
        .iter()
        .map(|c| class_average(c).expect("validated on construction"))
        .collect()
}

fn inter_from_centers(mus: &[Vec<f64>]) -> f64 {
    let nu = mus.len() as f64;
    let total: f64 = mus
        .iter()
        .map(|a| mus.iter().map(|b| distance(a, b)).sum::<f64>())
        .sum();
    total / (nu * nu)
}

fn intra_from_centers(set: &ClassifiedStateSet, mus: &[Vec<f64>]) -> f64 {
    let total: f64 = set
        .classes
        .iter()
        .zip(mus)
        .map(|(class, mu)| {
            class.iter().map(|x| distance(mu, x)).sum::<f64>() / class.len() as f64
        })
        .sum();
    total / set.classes.len() as f64
}

/// `C_d`: mean distance between class centres over all ordered pairs.
pub fn inter_class_distance(set: &ClassifiedStateSet) -> f64 {
    inter_from_centers(&centers(set))
}

/// `C_v`: mean distance of members to their own centre, averaged over classes.
pub fn intra_class_variance(set: &ClassifiedStateSet) -> f64 {
    intra_from_centers(set, &centers(set))
}

/// `C_d / (C_v + 1)`.
pub fn separation(set: &ClassifiedStateSet) -> f64 {
    let mus = centers(set);
    inter_from_centers(&mus) / (intra_from_centers(set, &mus) + 1.0)
}

/// Separation metrics at every time `t = 1..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub times: Vec<usize>,
    pub c_d: Vec<f64>,
    pub c_v: Vec<f64>,
    pub sep: Vec<f64>,
    /// First time at which `sep` is maximal.
    pub argmax_time: usize,
    pub max_sep: f64,
}

/// Groups labelled inputs by label, keeping first-appearance order.
pub fn group_by_label(samples: &[LabeledSeries]) -> Vec<(String, Vec<usize>)> {
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        match groups.iter_mut().find(|(l, _)| *l == s.label) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((s.label.clone(), vec![i])),
        }
    }
    groups
}

/// Classified state set at time `t` from precomputed trajectories.
pub fn states_at(
    trajs: &[StateTrajectory],
    groups: &[(String, Vec<usize>)],
    t: usize,
) -> Result<ClassifiedStateSet> {
    ClassifiedStateSet::new(
        t,
        groups.iter().map(|(l, _)| l.clone()).collect(),
        groups
            .iter()
            .map(|(_, idx)| idx.iter().map(|&i| trajs[i].column(t).to_vec()).collect())
            .collect(),
    )
}

/// Runs every input (zero-padded to a common length) and evaluates
/// `C_d`, `C_v` and `Sep` at each time step.
pub fn separation_curve(
    config: &ReservoirConfig,
    samples: &[LabeledSeries],
) -> Result<SeparationReport> {
    if samples.iter().any(|s| s.label.is_empty()) {
        return Err(Error::EmptyClass);
    }
    let series: Vec<InputSeries> = samples.iter().map(|s| s.series.clone()).collect();
    let batch = pad_inputs(&series)?;
    let trajs: Vec<StateTrajectory> = batch.inputs().par_iter().map(|u| run(config, u)).collect();
    let groups = group_by_label(samples);
    report_from_trajectories(&trajs, &groups, batch.len())
}

pub(crate) fn report_from_trajectories(
    trajs: &[StateTrajectory],
    groups: &[(String, Vec<usize>)],
    m: usize,
) -> Result<SeparationReport> {
    let rows = (1..=m)
        .into_par_iter()
        .map(|t| {
            let set = states_at(trajs, groups, t)?;
            let mus = centers(&set);
            let cd = inter_from_centers(&mus);
            let cv = intra_from_centers(&set, &mus);
            Ok((t, cd, cv, cd / (cv + 1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SeparationReport {
        times: Vec::with_capacity(m),
        c_d: Vec::with_capacity(m),
        c_v: Vec::with_capacity(m),
        sep: Vec::with_capacity(m),
        argmax_time: 0,
        max_sep: 0.0,
    };
    for (t, cd, cv, s) in rows {
        if report.times.is_empty() || s > report.max_sep {
            report.argmax_time = t;
            report.max_sep = s;
        }
        report.times.push(t);
        report.c_d.push(cd);
        report.c_v.push(cv);
        report.sep.push(s);
    }
    Ok(report)
}

/// Largest `C` supported by the data in `|x^{(u)}(t) − x^{(v)}(t)| ≥ C|u(t) − v(t)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseProbeStats {
    pub infimum: f64,
    /// Number of admissible `(u, v, t)` triples.
    pub count: usize,
    /// Indices of the pair and the time attaining the infimum.
    pub argmin: (usize, usize, usize),
}

/// Infimum of state distance over input distance, across all unordered pairs
/// and times with `|u(t) − v(t)| ≥ epsilon`.
pub fn inverse_separation_probe(
    config: &ReservoirConfig,
    inputs: &[InputSeries],
    epsilon: f64,
) -> Result<InverseProbeStats> {
    let batch = pad_inputs(inputs)?;
    let inputs = batch.inputs();
    let trajs: Vec<StateTrajectory> = inputs.par_iter().map(|u| run(config, u)).collect();
    let mut best: Option<InverseProbeStats> = None;
    let mut count = 0;
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            for t in 1..=batch.len() {
                let du = (inputs[i].at(t) - inputs[j].at(t)).abs();
                if du < epsilon {
                    continue;
                }
                count += 1;
                let ratio = distance(trajs[i].column(t), trajs[j].column(t)) / du;
                if best.as_ref().is_none_or(|b| ratio < b.infimum) {
                    best = Some(InverseProbeStats {
                        infimum: ratio,
                        count: 0,
                        argmin: (i, j, t),
                    });
                }
            }
        }
    }
    let mut stats = best.ok_or(Error::NoAdmissibleSteps)?;
    stats.count = count;
    Ok(stats)
}

/// For injective `f`: whether the full states differ at the first time the
/// inputs differ. Always true; `false` indicates a defect in the simulator.
pub fn injectivity_check(config: &ReservoirConfig, u: &InputSeries, v: &InputSeries) -> Result<bool> {
    if !config.nonlinearity().is_injective() {
        return Err(Error::Precondition(format!(
            "injectivity check needs an injective nonlinearity, got {}",
            config.nonlinearity()
        )));
    }
    let t1 = u.first_difference(v).ok_or(Error::ZeroDenominator)?;
    let xu = run(config, &u.padded(t1));
    let xv = run(config, &v.padded(t1));
    Ok(xu.column(t1) != xv.column(t1))
}

/// The input shifted down by `P/β`, which a `P`-periodic `f` cannot tell apart.
pub fn periodic_shift(config: &ReservoirConfig, u: &InputSeries) -> Result<InputSeries> {
    let period = config.nonlinearity().period().ok_or_else(|| {
        Error::Precondition(format!(
            "periodicity check needs a periodic nonlinearity, got {}",
            config.nonlinearity()
        ))
    })?;
    let shift = period / config.beta();
    Ok(u.values().iter().map(|x| x - shift).collect::<Vec<_>>().into())
}

/// Tolerance for "identical" trajectories in the periodicity check.
pub const PERIODICITY_TOLERANCE: f64 = 1e-9;

/// Runs `u` and `u − P/β`; true iff every state agrees within
/// [`PERIODICITY_TOLERANCE`].
pub fn periodicity_check(config: &ReservoirConfig, u: &InputSeries) -> Result<bool> {
    let v = periodic_shift(config, u)?;
    let xu = run(config, u);
    let xv = run(config, &v);
    Ok(xu
        .as_slice()
        .iter()
        .zip(xv.as_slice())
        .all(|(a, b)| (a - b).abs() <= PERIODICITY_TOLERANCE))
}
