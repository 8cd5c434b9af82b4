//! Delay-line reservoir: one nonlinear input node followed by a chain of pure
//! delay nodes.
//!
//! Nodes are indexed `0..=N`. Node 0 is the nonlinear node, nodes `1..=N` are
//! delays, and the last node feeds back into node 0:
//!
//! ```text
//! x_0(t)     = f(α·x_N(t−1) + β·u(t))
//! x_{k+1}(t) = x_k(t−1)          for k = 0..N−1
//! x_k(0)     = 0
//! ```
//!
//! The same object is sometimes written with nodes `1..=N`; shifting every
//! index by one gives this layout. The instantaneous-feedback variant replaces
//! `x_N(t−1)` by `x_N(t)`, which after the shift equals `x_{N−1}(t−1)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Supported node nonlinearities. Each carries an exact Lipschitz constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    Tanh,
    Sine,
    /// `tanh(gain · x)`
    ScaledTanh { gain: f64 },
}

impl Nonlinearity {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Nonlinearity::Tanh => x.tanh(),
            Nonlinearity::Sine => x.sin(),
            Nonlinearity::ScaledTanh { gain } => (gain * x).tanh(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            Nonlinearity::Tanh | Nonlinearity::Sine => 1.0,
            Nonlinearity::ScaledTanh { gain } => gain,
        }
    }

    /// Period of `f`, if it is periodic.
    pub fn period(&self) -> Option<f64> {
        match self {
            Nonlinearity::Sine => Some(TAU),
            _ => None,
        }
    }

    pub fn is_injective(&self) -> bool {
        !matches!(self, Nonlinearity::Sine)
    }

    fn validate(&self) -> Result<()> {
        if let Nonlinearity::ScaledTanh { gain } = *self {
            if !(gain.is_finite() && gain > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "scaled tanh gain must be positive, got {gain}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Tanh => write!(f, "tanh"),
            Nonlinearity::Sine => write!(f, "sine"),
            Nonlinearity::ScaledTanh { gain } => write!(f, "scaled-tanh:{gain}"),
        }
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    /// Accepts `tanh`, `sine` (or `sin`) and `scaled-tanh:<gain>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parsed = match lower.as_str() {
            "tanh" => Nonlinearity::Tanh,
            "sine" | "sin" => Nonlinearity::Sine,
            other => {
                let gain = other
                    .strip_prefix("scaled-tanh:")
                    .or_else(|| other.strip_prefix("scaled_tanh:"))
                    .and_then(|g| g.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown nonlinearity '{s}'")))?;
                Nonlinearity::ScaledTanh { gain }
            }
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

/// Where the feedback term is read from when updating node 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feedback {
    /// `x_0(t) = f(α·x_N(t−1) + β·u(t))`
    #[default]
    Delayed,
    /// `x_0(t) = f(α·x_N(t) + β·u(t))`, with `x_N(t) = x_{N−1}(t−1)`.
    Instantaneous,
}

impl FromStr for Feedback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delayed" => Ok(Feedback::Delayed),
            "instantaneous" => Ok(Feedback::Instantaneous),
            other => Err(Error::InvalidConfig(format!("unknown feedback variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawConfig {
    n: usize,
    alpha: f64,
    beta: f64,
    nonlinearity: Nonlinearity,
    #[serde(default)]
    feedback: Feedback,
}

/// Validated reservoir parameters. Construct with [`ReservoirConfig::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ReservoirConfig {
    n: usize,
    alpha: f64,
    beta: f64,
    nonlinearity: Nonlinearity,
    feedback: Feedback,
}

impl TryFrom<RawConfig> for ReservoirConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        ReservoirConfig::new(raw.n, raw.alpha, raw.beta, raw.nonlinearity, raw.feedback)
    }
}

impl From<ReservoirConfig> for RawConfig {
    fn from(c: ReservoirConfig) -> Self {
        RawConfig {
            n: c.n,
            alpha: c.alpha,
            beta: c.beta,
            nonlinearity: c.nonlinearity,
            feedback: c.feedback,
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl ReservoirConfig {
    /// `n` is the number of delay nodes; the reservoir has `n + 1` nodes.
    pub fn new(
        n: usize,
        alpha: f64,
        beta: f64,
        nonlinearity: Nonlinearity,
        feedback: Feedback,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        open_unit("alpha", alpha)?;
        open_unit("beta", beta)?;
        nonlinearity.validate()?;
        Ok(Self {
            n,
            alpha,
            beta,
            nonlinearity,
            feedback,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    pub fn feedback(&self) -> Feedback {
        self.feedback
    }

    pub fn lipschitz(&self) -> f64 {
        self.nonlinearity.lipschitz()
    }
}

/// Discrete input `u(1..=m)`. `u(0)` is always zero and never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputSeries(Vec<f64>);

impl InputSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `u(t)` with 1-based time; zero at `t = 0` and past the end.
    #[inline]
    pub fn at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.0.get(t - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Zero-extends to length `m`. Longer series are returned unchanged.
    pub fn padded(&self, m: usize) -> Self {
        let mut v = self.0.clone();
        if v.len() < m {
            v.resize(m, 0.0);
        }
        Self(v)
    }

    /// First time `t ≥ 1` at which the two (zero-extended) series differ.
    pub fn first_difference(&self, other: &InputSeries) -> Option<usize> {
        let m = self.len().max(other.len());
        (1..=m).find(|&t| self.at(t) != other.at(t))
    }
}

impl From<Vec<f64>> for InputSeries {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Inputs zero-padded to a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBatch {
    inputs: Vec<InputSeries>,
    len: usize,
}

impl InputBatch {
    pub fn inputs(&self) -> &[InputSeries] {
        &self.inputs
    }

    pub fn into_inputs(self) -> Vec<InputSeries> {
        self.inputs
    }

    /// Common length `M`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Extends every series with trailing zeros up to the longest length `M`.
pub fn pad_inputs(series: &[InputSeries]) -> Result<InputBatch> {
    let len = series
        .iter()
        .map(InputSeries::len)
        .max()
        .ok_or(Error::NoInputs)?;
    Ok(InputBatch {
        inputs: series.iter().map(|s| s.padded(len)).collect(),
        len,
    })
}

/// Scales `u` to unit ℓ² norm, so `|u(t)| ≤ 1` for every `t`.
pub fn normalize_input(u: &InputSeries) -> Result<InputSeries> {
    let norm = u.l2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroSeries);
    }
    Ok(InputSeries(u.0.iter().map(|v| v / norm).collect()))
}

/// Multiplies `u` elementwise by `mask`, repeated periodically.
pub fn apply_mask(u: &InputSeries, mask: &[f64]) -> Result<InputSeries> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(InputSeries(
        u.0.iter()
            .zip(mask.iter().cycle())
            .map(|(v, m)| v * m)
            .collect(),
    ))
}

/// Node states `x_k(t)` for `k = 0..=N`, `t = 0..=M`, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    nodes: usize,
    states: Vec<f64>,
}

impl StateTrajectory {
    /// Builds a trajectory from column-major data (`nodes` entries per time step).
    pub fn from_columns(nodes: usize, states: Vec<f64>) -> Result<Self> {
        if nodes == 0 || states.is_empty() || !states.len().is_multiple_of(nodes) {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                actual: states.len(),
            });
        }
        Ok(Self { nodes, states })
    }

    /// Number of nodes, `N + 1`.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Input length `M`; columns run over `t = 0..=M`.
    pub fn len(&self) -> usize {
        self.states.len() / self.nodes - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn state(&self, k: usize, t: usize) -> f64 {
        self.states[t * self.nodes + k]
    }

    /// Full state vector `x(t)`.
    #[inline]
    pub fn column(&self, t: usize) -> &[f64] {
        &self.states[t * self.nodes..(t + 1) * self.nodes]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.nodes)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.states
    }
}

fn step_into(prev: &[f64], u_t: f64, config: &ReservoirConfig, next: &mut [f64]) {
    let n = config.n;
    let feedback = match config.feedback {
        Feedback::Delayed => prev[n],
        Feedback::Instantaneous => prev[n - 1],
    };
    next[1..].copy_from_slice(&prev[..n]);
    next[0] = config
        .nonlinearity
        .apply(config.alpha * feedback + config.beta * u_t);
}

/// Advances one time step.
pub fn step(prev: &[f64], u_t: f64, config: &ReservoirConfig) -> Result<Vec<f64>> {
    if prev.len() != config.node_count() {
        return Err(Error::DimensionMismatch {
            expected: config.node_count(),
            actual: prev.len(),
        });
    }
    let mut next = vec![0.0; prev.len()];
    step_into(prev, u_t, config, &mut next);
    Ok(next)
}

/// Runs the reservoir from the zero state over `u(1..=M)`.
pub fn run(config: &ReservoirConfig, u: &InputSeries) -> StateTrajectory {
    let nodes = config.node_count();
    let m = u.len();
    let mut states = vec![0.0; nodes * (m + 1)];
    for t in 1..=m {
        let (done, rest) = states.split_at_mut(t * nodes);
        step_into(&done[(t - 1) * nodes..], u.at(t), config, &mut rest[..nodes]);
    }
    StateTrajectory { nodes, states }
}
