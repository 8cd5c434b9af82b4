//! Single-nonlinear-node delay-line reservoir computer.
//!
//! * [`reservoir`]: exact state dynamics and input preconditioning
//! * [`readout`]: linear readout, least squares / ridge / Dantzig training, NRMSE
//! * [`bounds`]: the input→output Lipschitz constant and its empirical check
//! * [`separation`]: class separation metrics, injectivity and periodicity checks
//! * [`tasks`]: NARMA and synthetic classification benchmarks
//! * [`io`], [`config`]: file formats and CLI configuration

pub mod bounds;
pub mod config;
pub mod error;
pub mod io;
pub mod lp;
pub mod readout;
pub mod reservoir;
pub mod separation;
pub mod tasks;

pub use error::{Error, Result};
pub use readout::{ReadoutWeights, DesignMatrix, TargetSeries};
pub use reservoir::{Feedback, InputBatch, InputSeries, Nonlinearity, ReservoirConfig, StateTrajectory};
