//! Run configuration for the command-line tool: a JSON file whose fields can
//! be overridden individually by flags.
//!
//! ```json
//! { "n": 50, "alpha": 0.5, "beta": 0.25, "nonlinearity": "tanh",
//!   "feedback": "delayed", "method": "ridge", "lambda": 1e-6,
//!   "washout": 200, "train_fraction": 0.8, "seed": 7 }
//! ```

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::reservoir::{Feedback, Nonlinearity, ReservoirConfig};
use crate::tasks::{TrainMethod, TrainSpec};

pub const DEFAULT_N: usize = 10;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_LAMBDA: f64 = 1e-6;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub nonlinearity: Option<String>,
    pub feedback: Option<String>,
    /// `least_squares`, `ridge` or `dantzig`
    pub method: Option<String>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub washout: Option<usize>,
    pub train_fraction: Option<f64>,
    pub seed: Option<u64>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay_fields!(
            base, top, n, alpha, beta, nonlinearity, feedback, method, lambda, delta, washout,
            train_fraction, seed
        )
    }

    pub fn reservoir(&self) -> Result<ReservoirConfig> {
        let nonlinearity = match &self.nonlinearity {
            Some(s) => s.parse()?,
            None => Nonlinearity::Tanh,
        };
        let feedback = match &self.feedback {
            Some(s) => s.parse()?,
            None => Feedback::Delayed,
        };
        ReservoirConfig::new(
            self.n.unwrap_or(DEFAULT_N),
            self.alpha.unwrap_or(DEFAULT_ALPHA),
            self.beta.unwrap_or(DEFAULT_BETA),
            nonlinearity,
            feedback,
        )
    }

    pub fn method(&self) -> Result<TrainMethod> {
        match self.method.as_deref().unwrap_or("ridge") {
            "least_squares" | "ls" => Ok(TrainMethod::LeastSquares),
            "ridge" => Ok(TrainMethod::Ridge {
                lambda: self.lambda.unwrap_or(DEFAULT_LAMBDA),
            }),
            "dantzig" => {
                let delta = self
                    .delta
                    .ok_or_else(|| Error::InvalidConfig("dantzig training needs --delta".into()))?;
                Ok(TrainMethod::Dantzig { delta })
            }
            other => Err(Error::InvalidConfig(format!("unknown training method '{other}'"))),
        }
    }

    pub fn train_spec(&self) -> Result<TrainSpec> {
        Ok(TrainSpec {
            method: self.method()?,
            washout: self.washout.unwrap_or(0),
            train_fraction: self.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION),
        })
    }

    /// Randomised commands refuse to run without an explicit seed.
    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidConfig("a --seed is required for this command".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let file: RunConfig =
            serde_json::from_str(r#"{"n": 20, "alpha": 0.3, "nonlinearity": "sine", "seed": 1}"#).unwrap();
        let flags = RunConfig {
            alpha: Some(0.4),
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        let r = merged.reservoir().unwrap();
        assert_eq!(r.n(), 20);
        assert_eq!(r.alpha(), 0.4);
        assert_eq!(r.nonlinearity(), Nonlinearity::Sine);
        assert_eq!(merged.seed().unwrap(), 9);
    }

    #[test]
    fn validation_and_required_fields() {
        let bad = RunConfig {
            alpha: Some(1.2),
            ..Default::default()
        };
        assert!(bad.reservoir().is_err());
        assert!(RunConfig::default().seed().is_err());
        let dz = RunConfig {
            method: Some("dantzig".into()),
            ..Default::default()
        };
        assert!(dz.method().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        assert_eq!(
            RunConfig::default().method().unwrap(),
            TrainMethod::Ridge { lambda: DEFAULT_LAMBDA }
        );
    }
}
