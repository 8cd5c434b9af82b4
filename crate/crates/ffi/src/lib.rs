//! C ABI over the `delayres` crate.
//!
//! Every fallible function returns a [`DelayresStatus`] and writes results
//! through out-pointers. On failure, [`delayres_last_error`] gives a message
//! for the calling thread. Reservoirs and trajectories are opaque handles
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use delayres::bounds::{contraction_valid, empirical_ratio, theoretical_constant, BoundParams};
use delayres::readout::{self, DesignMatrix, ReadoutWeights, TargetSeries};
use delayres::reservoir::{self, Feedback, InputSeries, Nonlinearity, ReservoirConfig, StateTrajectory};
use delayres::separation::{inter_class_distance, intra_class_variance, separation, ClassifiedStateSet};
use delayres::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayresStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// Degenerate data: zero variance, singular system, infeasible program.
    Numerical = 4,
    /// The output bound needs αL < 1/√2.
    BoundUndefined = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayresNonlinearity {
    Tanh = 0,
    Sine = 1,
    /// `tanh(gain·x)`
    ScaledTanh = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayresFeedback {
    Delayed = 0,
    Instantaneous = 1,
}

/// Opaque reservoir configuration.
pub struct DelayresReservoir(ReservoirConfig);

/// Opaque state trajectory, `len + 1` columns of `nodes` states.
pub struct DelayresTrajectory(StateTrajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DelayresStatus {
    match e {
        Error::DimensionMismatch { .. } => DelayresStatus::DimensionMismatch,
        Error::BoundUndefined(_) => DelayresStatus::BoundUndefined,
        Error::ZeroSeries
        | Error::ZeroVariance
        | Error::DegenerateColumn(_)
        | Error::Infeasible
        | Error::Unbounded
        | Error::ZeroDenominator
        | Error::Numerical(_) => DelayresStatus::Numerical,
        _ => DelayresStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Small { needed: usize, got: usize },
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DelayresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DelayresStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            DelayresStatus::NullPointer
        }
        Ok(Err(Fail::Small { needed, got })) => {
            set_error(format!("buffer holds {got} values, {needed} needed"));
            DelayresStatus::BufferTooSmall
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            DelayresStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

/// A zero-length array may come with a null pointer.
unsafe fn array<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn array_mut<'a>(p: *mut f64, len: usize, needed: usize, name: &'static str) -> Result<&'a mut [f64], Fail> {
    if len < needed {
        return Err(Fail::Small { needed, got: len });
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn delayres_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `gain` is read only for `ScaledTanh`.
///
/// # Safety
/// `out_reservoir` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn delayres_reservoir_new(
    n: usize,
    alpha: f64,
    beta: f64,
    nonlinearity: DelayresNonlinearity,
    gain: f64,
    feedback: DelayresFeedback,
    out_reservoir: *mut *mut DelayresReservoir,
) -> DelayresStatus {
    guard(|| {
        let slot = out(out_reservoir, "out_reservoir")?;
        let f = match nonlinearity {
            DelayresNonlinearity::Tanh => Nonlinearity::Tanh,
            DelayresNonlinearity::Sine => Nonlinearity::Sine,
            DelayresNonlinearity::ScaledTanh => Nonlinearity::ScaledTanh { gain },
        };
        let fb = match feedback {
            DelayresFeedback::Delayed => Feedback::Delayed,
            DelayresFeedback::Instantaneous => Feedback::Instantaneous,
        };
        let cfg = ReservoirConfig::new(n, alpha, beta, f, fb)?;
        *slot = Box::into_raw(Box::new(DelayresReservoir(cfg)));
        Ok(())
    })
}

/// # Safety
/// `reservoir` must be null or a handle from [`delayres_reservoir_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn delayres_reservoir_free(reservoir: *mut DelayresReservoir) {
    if !reservoir.is_null() {
        drop(Box::from_raw(reservoir));
    }
}

/// Number of nodes, `N + 1`; 0 for a null handle.
///
/// # Safety
/// `reservoir` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn delayres_reservoir_node_count(reservoir: *const DelayresReservoir) -> usize {
    reservoir.as_ref().map_or(0, |r| r.0.node_count())
}

/// Drives the reservoir with `u(1..=len)` from the zero state.
///
/// # Safety
/// `u` must point to `len` readable doubles; `out_trajectory` must be writable.
#[no_mangle]
pub unsafe extern "C" fn delayres_reservoir_run(
    reservoir: *const DelayresReservoir,
    u: *const f64,
    len: usize,
    out_trajectory: *mut *mut DelayresTrajectory,
) -> DelayresStatus {
    guard(|| {
        let r = arg(reservoir, "reservoir")?;
        let u = array(u, len, "u")?;
        let slot = out(out_trajectory, "out_trajectory")?;
        let traj = reservoir::run(&r.0, &InputSeries::new(u.to_vec()));
        *slot = Box::into_raw(Box::new(DelayresTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be null or a handle from [`delayres_reservoir_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn delayres_trajectory_free(trajectory: *mut DelayresTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn delayres_trajectory_nodes(trajectory: *const DelayresTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.nodes())
}

/// Input length `M`; the trajectory holds times `0..=M`.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn delayres_trajectory_len(trajectory: *const DelayresTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.len())
}

/// Copies all states, time-major: `buf[t * nodes + k] = x_k(t)`.
/// Needs `(len + 1) * nodes` slots.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn delayres_trajectory_copy_states(
    trajectory: *const DelayresTrajectory,
    buf: *mut f64,
    buf_len: usize,
) -> DelayresStatus {
    guard(|| {
        let t = arg(trajectory, "trajectory")?;
        let src = t.0.as_slice();
        let dst = array_mut(buf, buf_len, src.len(), "buf")?;
        dst[..src.len()].copy_from_slice(src);
        Ok(())
    })
}

/// Readout `y(t) = w·x(t)` for `t = 1..=len`, written to `out[0..len]`.
///
/// # Safety
/// `w` must hold `w_len` doubles, `out` must have room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn delayres_readout_output(
    trajectory: *const DelayresTrajectory,
    w: *const f64,
    w_len: usize,
    out_y: *mut f64,
    out_len: usize,
) -> DelayresStatus {
    guard(|| {
        let t = arg(trajectory, "trajectory")?;
        let w = ReadoutWeights::new(array(w, w_len, "w")?.to_vec());
        let y = readout::output(&t.0, &w)?;
        let dst = array_mut(out_y, out_len, y.len(), "out_y")?;
        dst[..y.len()].copy_from_slice(&y);
        Ok(())
    })
}

/// Whether `alpha * lipschitz < 1/√2`.
#[no_mangle]
pub extern "C" fn delayres_contraction_valid(alpha: f64, lipschitz: f64) -> bool {
    contraction_valid(alpha, lipschitz)
}

/// Output Lipschitz constant `C` for inputs of length `m` and a readout of
/// norm `weight_norm`.
///
/// # Safety
/// `reservoir` must be a live handle, `out_c` writable.
#[no_mangle]
pub unsafe extern "C" fn delayres_theoretical_constant(
    reservoir: *const DelayresReservoir,
    m: usize,
    weight_norm: f64,
    out_c: *mut f64,
) -> DelayresStatus {
    guard(|| {
        let r = arg(reservoir, "reservoir")?;
        let slot = out(out_c, "out_c")?;
        let cfg = &r.0;
        *slot = theoretical_constant(&BoundParams {
            lipschitz: cfg.lipschitz(),
            alpha: cfg.alpha(),
            beta: cfg.beta(),
            n: cfg.n(),
            m,
            weight_norm,
        })?;
        Ok(())
    })
}

/// `‖y_u − y_v‖² / ‖u − v‖²`, the shorter input zero-padded.
///
/// # Safety
/// Arrays must hold the stated number of doubles, `out_ratio` writable.
#[no_mangle]
pub unsafe extern "C" fn delayres_empirical_ratio(
    reservoir: *const DelayresReservoir,
    w: *const f64,
    w_len: usize,
    u: *const f64,
    u_len: usize,
    v: *const f64,
    v_len: usize,
    out_ratio: *mut f64,
) -> DelayresStatus {
    guard(|| {
        let r = arg(reservoir, "reservoir")?;
        let w = ReadoutWeights::new(array(w, w_len, "w")?.to_vec());
        let u = InputSeries::new(array(u, u_len, "u")?.to_vec());
        let v = InputSeries::new(array(v, v_len, "v")?.to_vec());
        let slot = out(out_ratio, "out_ratio")?;
        *slot = empirical_ratio(&r.0, &w, &u, &v)?;
        Ok(())
    })
}

/// # Safety
/// `y` and `target` must hold `len` doubles, `out_nrmse` writable.
#[no_mangle]
pub unsafe extern "C" fn delayres_nrmse(
    y: *const f64,
    target: *const f64,
    len: usize,
    out_nrmse: *mut f64,
) -> DelayresStatus {
    guard(|| {
        let y = array(y, len, "y")?;
        let target = array(target, len, "target")?;
        let slot = out(out_nrmse, "out_nrmse")?;
        *slot = readout::nrmse(y, target)?;
        Ok(())
    })
}

/// Ridge readout from a design of `cols` state vectors, each `nodes` long,
/// stored one after another. Writes `nodes` weights.
///
/// # Safety
/// `states` must hold `nodes * cols` doubles, `target` `cols`, and
/// `out_w` must have room for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn delayres_train_ridge(
    states: *const f64,
    nodes: usize,
    cols: usize,
    target: *const f64,
    lambda: f64,
    out_w: *mut f64,
    out_len: usize,
) -> DelayresStatus {
    guard(|| {
        let total = nodes.checked_mul(cols).ok_or(Error::InvalidConfig("design too large".into()))?;
        let states = array(states, total, "states")?;
        let target = array(target, cols, "target")?;
        let x = DesignMatrix::from_column_slice(nodes, cols, states)?;
        let w = readout::train_ridge(&x, &TargetSeries::new(target.to_vec()), lambda)?;
        let dst = array_mut(out_w, out_len, w.len(), "out_w")?;
        dst[..w.len()].copy_from_slice(w.values());
        Ok(())
    })
}

/// Separation of `count` state vectors of length `dim`, stored one after
/// another, with `labels[i]` the class of vector `i`.
///
/// # Safety
/// `states` must hold `count * dim` doubles and `labels` `count` entries;
/// output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn delayres_separation(
    states: *const f64,
    dim: usize,
    labels: *const usize,
    count: usize,
    out_inter: *mut f64,
    out_intra: *mut f64,
    out_sep: *mut f64,
) -> DelayresStatus {
    guard(|| {
        let total = count.checked_mul(dim).ok_or(Error::InvalidConfig("state set too large".into()))?;
        let states = array(states, total, "states")?;
        if count > 0 && labels.is_null() {
            return Err(Fail::Null("labels"));
        }
        let labels: &[usize] = if count == 0 { &[] } else { slice::from_raw_parts(labels, count) };
        let (d, v, s) = (out(out_inter, "out_inter")?, out(out_intra, "out_intra")?, out(out_sep, "out_sep")?);
        let mut order: Vec<usize> = Vec::new();
        let mut classes: Vec<Vec<Vec<f64>>> = Vec::new();
        for (i, &label) in labels.iter().enumerate() {
            let idx = match order.iter().position(|&l| l == label) {
                Some(p) => p,
                None => {
                    order.push(label);
                    classes.push(Vec::new());
                    order.len() - 1
                }
            };
            classes[idx].push(states[i * dim..(i + 1) * dim].to_vec());
        }
        let set = ClassifiedStateSet::from_classes(0, classes)?;
        *d = inter_class_distance(&set);
        *v = intra_class_variance(&set);
        *s = separation(&set);
        Ok(())
    })
}
