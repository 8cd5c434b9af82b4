use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use delayres::bounds::{
    bound_check, contraction_valid, pointwise_ratio_probe, random_pairs, random_unit_weights,
    DEFAULT_PROBE_EPSILON,
};
use delayres::config::RunConfig;
use delayres::io;
use delayres::readout::{dantzig_selector, normalized_correlation, nrmse, output, ReadoutWeights};
use delayres::reservoir::{apply_mask, normalize_input, run, InputSeries, ReservoirConfig};
use delayres::separation::{inverse_separation_probe, separation_curve, InverseProbeStats, SeparationReport};
use delayres::tasks::{
    narma_generate, run_benchmark, synth_classes, NarmaSpec, SyntheticClassSpec, Task,
};
use delayres::Error;

#[derive(Parser)]
#[command(name = "delayres", version, about = "Delay-line reservoir computer toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Delay length N (the reservoir has N+1 nodes)
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// tanh | sine | scaled-tanh:<gain>
    #[arg(long, global = true)]
    nonlinearity: Option<String>,
    /// delayed | instantaneous
    #[arg(long, global = true)]
    feedback: Option<String>,
    /// least_squares | ridge | dantzig
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    washout: Option<usize>,
    #[arg(long, global = true)]
    train_fraction: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let base = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(RunConfig {
            n: self.n,
            alpha: self.alpha,
            beta: self.beta,
            nonlinearity: self.nonlinearity.clone(),
            feedback: self.feedback.clone(),
            method: self.method.clone(),
            lambda: self.lambda,
            delta: self.delta,
            washout: self.washout,
            train_fraction: self.train_fraction,
            seed: self.seed,
        }))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the reservoir on an input CSV and write the state trajectory
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Trajectory CSV (stdout if omitted)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Single-column CSV (header `m`) applied periodically to the input
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Scale the input to unit l2 norm first
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Train readout weights on an input/target pair
    Train {
        #[arg(long)]
        input: PathBuf,
        /// Target CSV with column `y`, one row per input step
        #[arg(long)]
        target: PathBuf,
        /// Where to write the weights CSV
        #[arg(long)]
        weights_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Apply trained weights to an input
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        /// Optional target; prints the NRMSE after washout
        #[arg(long)]
        target: Option<PathBuf>,
        /// Output CSV with column `y` (t = 1..M)
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the input→output Lipschitz bound on random input pairs
    Bound {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 64)]
        length: usize,
        /// Weights CSV; random unit weights if omitted
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Distribution of pointwise output/input difference ratios
    PointwiseProbe {
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 64)]
        length: usize,
        #[arg(long, default_value_t = DEFAULT_PROBE_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Separation curve for labelled inputs
    Separation {
        /// CSV with columns series,label,t,u
        #[arg(long)]
        input: PathBuf,
        /// Optional CSV dump of t,c_d,c_v,sep
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Threshold for the inverse-separation probe
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
    /// NARMA benchmark: generate data, train, report NRMSE
    Narma {
        #[arg(long, default_value_t = 2000)]
        length: usize,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Write the generated dataset (t,u,y)
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        weights_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Classification benchmark on labelled or synthetic inputs
    Classify {
        /// Labelled CSV; synthetic templates are used if omitted
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        #[arg(long, default_value_t = 20)]
        length: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Write the generated dataset
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Dantzig selector for a matrix and right-hand side
    Dantzig {
        /// Matrix CSV (header row, one record per row)
        #[arg(long)]
        matrix: PathBuf,
        /// Right-hand side CSV with column `y`
        #[arg(long)]
        y: PathBuf,
        /// Coefficients CSV with column `w`
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    /// Exit 1: a checked property failed.
    Violation(String),
    /// Exit 2: usage, configuration or input error.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn load_weights(path: Option<&Path>, config: &ReservoirConfig, seed: Option<u64>) -> Result<ReadoutWeights, Error> {
    let w = match path {
        Some(p) => io::read_weights_file(p)?,
        None => {
            let seed = seed.ok_or_else(|| {
                Error::InvalidConfig("a --seed is required when weights are drawn at random".into())
            })?;
            random_unit_weights(config.node_count(), seed.wrapping_add(1))
        }
    };
    if w.len() != config.node_count() {
        return Err(Error::DimensionMismatch {
            expected: config.node_count(),
            actual: w.len(),
        });
    }
    Ok(w)
}

fn simulate(input: &Path, out: Option<&Path>, mask: Option<&Path>, normalize: bool, common: &Common) -> CmdResult {
    let cfg = common.resolve()?.reservoir()?;
    let mut u = io::read_series_file(input)?;
    if let Some(m) = mask {
        let mask = io::read_column(io::open_file(m)?, "m")?;
        u = apply_mask(&u, &mask)?;
    }
    if normalize {
        u = normalize_input(&u)?;
    }
    let traj = run(&cfg, &u);
    match out {
        Some(p) => io::write_trajectory(io::create_file(p)?, &traj)?,
        None => io::write_trajectory(std::io::stdout().lock(), &traj)?,
    }
    Ok(())
}

fn train(input: &Path, target: &Path, weights_out: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    let u = io::read_series_file(input)?;
    let y = io::read_column(io::open_file(target)?, "y")?;
    let report = run_benchmark(&cfg, &Task::Regression { input: u, target: y }, &rc.train_spec()?)?;
    if let (Some(p), Some(w)) = (weights_out, &report.weights) {
        io::write_weights_file(p, w)?;
    }
    print_json(&report.training)
}

#[derive(Serialize)]
struct EvalReport {
    nrmse: f64,
    washout: usize,
}

fn eval(input: &Path, weights: &Path, target: Option<&Path>, out: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    let u = io::read_series_file(input)?;
    let w = load_weights(Some(weights), &cfg, None)?;
    let y = output(&run(&cfg, &u), &w)?;
    if let Some(p) = out {
        io::write_column(io::create_file(p)?, "y", &y)?;
    }
    if let Some(t) = target {
        let target = io::read_column(io::open_file(t)?, "y")?;
        if target.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                actual: target.len(),
            }
            .into());
        }
        let washout = rc.washout.unwrap_or(0).min(y.len());
        let e = nrmse(&y[washout..], &target[washout..])?;
        print_json(&EvalReport { nrmse: e, washout })?;
    } else if out.is_none() {
        io::write_column(std::io::stdout().lock(), "y", &y)?;
    }
    Ok(())
}

fn bound(pairs: usize, length: usize, weights: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    if !contraction_valid(cfg.alpha(), cfg.lipschitz()) {
        return Err(Failure::Usage(format!(
            "bound inapplicable: αL = {} ≥ 1/√2",
            cfg.alpha() * cfg.lipschitz()
        )));
    }
    let seed = rc.seed()?;
    let w = load_weights(weights, &cfg, Some(seed))?;
    let report = bound_check(&cfg, &w, &random_pairs(pairs, length, seed))?;
    print_json(&report)?;
    if report.violations > 0 {
        return Err(Failure::Violation(format!("{} bound violations", report.violations)));
    }
    Ok(())
}

fn pointwise(pairs: usize, length: usize, epsilon: f64, weights: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    let seed = rc.seed()?;
    let w = load_weights(weights, &cfg, Some(seed))?;
    let stats = pointwise_ratio_probe(&cfg, &w, &random_pairs(pairs, length, seed), epsilon)?;
    print_json(&stats)
}

#[derive(Serialize)]
struct SeparationOutput {
    #[serde(flatten)]
    report: SeparationReport,
    inverse_probe: Option<InverseProbeStats>,
    warnings: Vec<String>,
}

fn separation_cmd(input: &Path, csv_out: Option<&Path>, epsilon: f64, common: &Common) -> CmdResult {
    let cfg = common.resolve()?.reservoir()?;
    let samples = io::read_labeled(io::open_file(input)?)?;
    let report = separation_curve(&cfg, &samples)?;
    let classes = delayres::separation::group_by_label(&samples).len();
    let mut warnings = Vec::new();
    if classes > 1 {
        let collapsed: Vec<usize> = report
            .times
            .iter()
            .zip(&report.c_d)
            .filter(|(_, &cd)| cd == 0.0)
            .map(|(&t, _)| t)
            .collect();
        if !collapsed.is_empty() {
            warnings.push(format!(
                "C_d = 0 at {} of {} time steps: class centres coincide",
                collapsed.len(),
                report.times.len()
            ));
        }
    }
    let series: Vec<InputSeries> = samples.iter().map(|s| s.series.clone()).collect();
    let inverse_probe = inverse_separation_probe(&cfg, &series, epsilon).ok();
    if let Some(p) = &inverse_probe {
        if p.infimum < 1e-12 {
            warnings.push(format!(
                "inverse separation fails: inputs {} and {} differ by ≥ {epsilon} at t = {} but their states coincide",
                p.argmin.0, p.argmin.1, p.argmin.2
            ));
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = csv_out {
        io::write_separation_csv(io::create_file(p)?, &report)?;
    }
    print_json(&SeparationOutput {
        report,
        inverse_probe,
        warnings,
    })
}

fn narma(length: usize, order: usize, dataset: Option<&Path>, weights_out: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    let data = narma_generate(&NarmaSpec {
        order,
        length,
        seed: rc.seed()?,
    })?;
    if let Some(p) = dataset {
        io::write_narma_dataset(io::create_file(p)?, &data.input, &data.target)?;
    }
    let report = run_benchmark(
        &cfg,
        &Task::Regression {
            input: data.input,
            target: data.target,
        },
        &rc.train_spec()?,
    )?;
    if let (Some(p), Some(w)) = (weights_out, &report.weights) {
        io::write_weights_file(p, w)?;
    }
    print_json(&report)
}

#[allow(clippy::too_many_arguments)]
fn classify(
    input: Option<&Path>,
    classes: usize,
    length: usize,
    samples: usize,
    noise: f64,
    dataset: Option<&Path>,
    common: &Common,
) -> CmdResult {
    let rc = common.resolve()?;
    let cfg = rc.reservoir()?;
    let data = match input {
        Some(p) => io::read_labeled(io::open_file(p)?)?,
        None => {
            let seed = rc.seed()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let templates = (0..classes)
                .map(|_| (0..length).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                .collect();
            synth_classes(&SyntheticClassSpec {
                templates,
                noise,
                samples_per_class: samples,
                seed: seed.wrapping_add(1),
            })?
        }
    };
    if let Some(p) = dataset {
        io::write_labeled(io::create_file(p)?, &data)?;
    }
    let report = run_benchmark(&cfg, &Task::Classification { samples: data }, &rc.train_spec()?)?;
    print_json(&report)
}

#[derive(Serialize)]
struct DantzigOutput {
    beta: Vec<f64>,
    l1_norm: f64,
    constraint_sup: f64,
    delta: f64,
}

fn dantzig(matrix: &Path, y: &Path, out: Option<&Path>, common: &Common) -> CmdResult {
    let rc = common.resolve()?;
    let delta = rc
        .delta
        .ok_or_else(|| Failure::Usage("dantzig needs --delta".into()))?;
    let x = io::read_matrix(io::open_file(matrix)?)?;
    let y = io::read_column(io::open_file(y)?, "y")?;
    let beta = dantzig_selector(&x, &y, delta)?;
    let sup = normalized_correlation(&x, &y, &beta)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(p) = out {
        io::write_column(io::create_file(p)?, "w", &beta)?;
    }
    print_json(&DantzigOutput {
        l1_norm: beta.iter().map(|b| b.abs()).sum(),
        beta,
        constraint_sup: sup,
        delta,
    })
}

fn dispatch(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Simulate {
            input,
            output,
            mask,
            normalize,
            common,
        } => simulate(input, output.as_deref(), mask.as_deref(), *normalize, common),
        Command::Train {
            input,
            target,
            weights_out,
            common,
        } => train(input, target, weights_out.as_deref(), common),
        Command::Eval {
            input,
            weights,
            target,
            output,
            common,
        } => eval(input, weights, target.as_deref(), output.as_deref(), common),
        Command::Bound {
            pairs,
            length,
            weights,
            common,
        } => bound(*pairs, *length, weights.as_deref(), common),
        Command::PointwiseProbe {
            pairs,
            length,
            epsilon,
            weights,
            common,
        } => pointwise(*pairs, *length, *epsilon, weights.as_deref(), common),
        Command::Separation {
            input,
            csv,
            epsilon,
            common,
        } => separation_cmd(input, csv.as_deref(), *epsilon, common),
        Command::Narma {
            length,
            order,
            dataset,
            weights_out,
            common,
        } => narma(*length, *order, dataset.as_deref(), weights_out.as_deref(), common),
        Command::Classify {
            input,
            classes,
            length,
            samples,
            noise,
            dataset,
            common,
        } => classify(
            input.as_deref(),
            *classes,
            *length,
            *samples,
            *noise,
            dataset.as_deref(),
            common,
        ),
        Command::Dantzig {
            matrix,
            y,
            output,
            common,
        } => dantzig(matrix, y, output.as_deref(), common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli.command);
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
