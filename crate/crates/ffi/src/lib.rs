//! C ABI over the `unpredictable` crate.
//!
//! Sequences and trajectories cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns an [`UpStatus`]; the message for the most recent failure on the
//! calling thread is available from [`up_last_error_message`]. Strings
//! returned by the library are released with [`up_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use unpredictable::bernoulli::{realize, BernoulliSpec};
use unpredictable::filter::{
    chi_exact, chi_quadrature, separation_constants, solve_ode, FilterConfig, Trajectory,
};
use unpredictable::io as formats;
use unpredictable::point::{point_symbol, point_window};
use unpredictable::report::{to_json, SequenceReport};
use unpredictable::verifier::{find_sequence_witnesses, orbit_return_distances, SequenceScan};
use unpredictable::{metric_distance, Alphabet, Error, SequenceWindow};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Coverage = 3,
    Resource = 4,
    Resolution = 5,
    Parse = 6,
    InvalidUtf8 = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque sequence window.
pub struct UpSequence(SequenceWindow);

/// Opaque sampled trajectory.
pub struct UpTrajectory(Trajectory);

/// Filter parameters; obtain defaults from [`up_filter_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UpFilterConfig {
    pub decay: f64,
    pub step: f64,
    pub sample_dt: f64,
    pub tolerance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UpSeparationConstants {
    pub kappa_i: f64,
    pub kappa_ii: f64,
    pub lower_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(err: Error) -> UpStatus {
    let status = match err {
        Error::Coverage(_) => UpStatus::Coverage,
        Error::Domain(_) => UpStatus::Domain,
        Error::Resource(_) => UpStatus::Resource,
        Error::Resolution(_) => UpStatus::Resolution,
        Error::Parse { .. } => UpStatus::Parse,
    };
    set_error(err.to_string());
    status
}

fn null(name: &str) -> UpStatus {
    set_error(format!("{name} is null"));
    UpStatus::NullPointer
}

/// Runs `f`, converting panics into `UpStatus::Panic`.
fn guarded(f: impl FnOnce() -> UpStatus) -> UpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == UpStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => {
            set_error("internal panic");
            UpStatus::Panic
        }
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize, name: &str) -> Result<&'a [T], UpStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, UpStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        UpStatus::InvalidUtf8
    })
}

unsafe fn seq_arg<'a>(p: *const UpSequence, name: &str) -> Result<&'a SequenceWindow, UpStatus> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T) {
    *out = value;
}

fn boxed_sequence(seq: SequenceWindow) -> *mut UpSequence {
    Box::into_raw(Box::new(UpSequence(seq)))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return fail(err),
        }
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn up_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn up_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a window from alphabet values and symbol indices.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_new(
    values: *const f64,
    n_values: usize,
    first_index: i64,
    symbols: *const u16,
    n_symbols: usize,
    out: *mut *mut UpSequence,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let values = tri!(slice_arg(values, n_values, "values"));
        let symbols = tri!(slice_arg(symbols, n_symbols, "symbols"));
        let alphabet = lib!(Alphabet::new(values.to_vec()));
        let seq = lib!(SequenceWindow::new(alphabet, first_index, symbols.to_vec()));
        put(out, boxed_sequence(seq));
        UpStatus::Ok
    })
}

/// Releases a sequence handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_free(seq: *mut UpSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Number of symbols in the window, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_len(seq: *const UpSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// Index of the first symbol, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_first_index(seq: *const UpSequence) -> i64 {
    seq.as_ref().map_or(0, |s| s.0.first_index())
}

/// Copies the symbol indices into `buf`, which must hold `up_sequence_len`
/// entries.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_copy_symbols(
    seq: *const UpSequence,
    buf: *mut u16,
    capacity: usize,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        if buf.is_null() {
            return null("buf");
        }
        if capacity < seq.len() {
            set_error(format!("buffer holds {capacity}, need {}", seq.len()));
            return UpStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(seq.symbols().as_ptr(), buf, seq.len());
        UpStatus::Ok
    })
}

/// Symbol value at a sequence index.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_value_at(
    seq: *const UpSequence,
    index: i64,
    out: *mut f64,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        if out.is_null() {
            return null("out");
        }
        match seq.value_at(index) {
            Some(v) => {
                put(out, v);
                UpStatus::Ok
            }
            None => fail(Error::Coverage(format!(
                "index {index} outside [{}, {}]",
                seq.first_index(),
                seq.last_index()
            ))),
        }
    })
}

/// Parses the sequence text format.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_parse(
    text: *const c_char,
    out: *mut *mut UpSequence,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let text = tri!(str_arg(text, "text"));
        put(out, boxed_sequence(lib!(formats::parse_sequence(text))));
        UpStatus::Ok
    })
}

/// Sequence text format; release with `up_string_free`. NULL on a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_to_text(seq: *const UpSequence) -> *mut c_char {
    match seq.as_ref() {
        Some(s) => into_c_string(formats::write_sequence(&s.0)),
        None => ptr::null_mut(),
    }
}

/// `times` applications of the shift map.
#[no_mangle]
pub unsafe extern "C" fn up_sequence_shift(
    seq: *const UpSequence,
    times: u64,
    out: *mut *mut UpSequence,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        if out.is_null() {
            return null("out");
        }
        let shifted = if times == 1 {
            lib!(seq.shift())
        } else {
            lib!(seq.shifted_by(times))
        };
        put(out, boxed_sequence(shifted));
        UpStatus::Ok
    })
}

/// Distance truncated to `[-half_width, half_width]` and its tail bound.
#[no_mangle]
pub unsafe extern "C" fn up_metric_distance(
    a: *const UpSequence,
    b: *const UpSequence,
    half_width: u32,
    value: *mut f64,
    tail_bound: *mut f64,
) -> UpStatus {
    guarded(|| {
        let a = tri!(seq_arg(a, "a"));
        let b = tri!(seq_arg(b, "b"));
        if value.is_null() || tail_bound.is_null() {
            return null("value/tail_bound");
        }
        let d = lib!(metric_distance(a, b, half_width));
        put(value, d.value);
        put(tail_bound, d.tail_bound);
        UpStatus::Ok
    })
}

/// Truncated return distances for shifts `1..=max_shift`; `out` must hold
/// `max_shift` values.
#[no_mangle]
pub unsafe extern "C" fn up_orbit_return_distances(
    seq: *const UpSequence,
    half_width: u32,
    max_shift: u64,
    out: *mut f64,
    capacity: usize,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        if out.is_null() {
            return null("out");
        }
        if (capacity as u64) < max_shift {
            set_error(format!("buffer holds {capacity}, need {max_shift}"));
            return UpStatus::BufferTooSmall;
        }
        let d = lib!(orbit_return_distances(seq, half_width, max_shift));
        for (i, (_, v)) in d.into_iter().enumerate() {
            *out.add(i) = v;
        }
        UpStatus::Ok
    })
}

/// Symbol (0 or 1) of the unpredictable point at `index`.
#[no_mangle]
pub extern "C" fn up_point_symbol(index: i64) -> u8 {
    point_symbol(index)
}

/// Window of the unpredictable point.
#[no_mangle]
pub unsafe extern "C" fn up_point_window(
    first_index: i64,
    length: usize,
    out: *mut *mut UpSequence,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        put(out, boxed_sequence(lib!(point_window(first_index, length))));
        UpStatus::Ok
    })
}

/// Seeded Bernoulli realization, first index 0.
#[no_mangle]
pub unsafe extern "C" fn up_bernoulli_realize(
    values: *const f64,
    n_values: usize,
    probabilities: *const f64,
    n_probabilities: usize,
    seed: u64,
    length: usize,
    out: *mut *mut UpSequence,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let values = tri!(slice_arg(values, n_values, "values"));
        let probabilities = tri!(slice_arg(probabilities, n_probabilities, "probabilities"));
        let spec = BernoulliSpec {
            alphabet: lib!(Alphabet::new(values.to_vec())),
            probabilities: probabilities.to_vec(),
            seed,
            length,
        };
        put(out, boxed_sequence(lib!(realize(&spec))));
        UpStatus::Ok
    })
}

#[no_mangle]
pub extern "C" fn up_filter_config_default() -> UpFilterConfig {
    let c = FilterConfig::default();
    UpFilterConfig {
        decay: c.decay,
        step: c.step,
        sample_dt: c.sample_dt,
        tolerance: c.tolerance,
    }
}

unsafe fn config_arg(cfg: *const UpFilterConfig) -> Result<FilterConfig, UpStatus> {
    let c = cfg.as_ref().ok_or_else(|| null("config"))?;
    Ok(FilterConfig {
        decay: c.decay,
        step: c.step,
        sample_dt: c.sample_dt,
        tolerance: c.tolerance,
    })
}

fn boxed_trajectory(t: Trajectory) -> *mut UpTrajectory {
    Box::into_raw(Box::new(UpTrajectory(t)))
}

/// Samples chi on `[t_start, t_end]` from `chi(t_start) = chi_start`; the
/// sequence index `k` is placed on `[k*step, (k+1)*step)`.
#[no_mangle]
pub unsafe extern "C" fn up_chi_exact(
    seq: *const UpSequence,
    config: *const UpFilterConfig,
    t_start: f64,
    t_end: f64,
    chi_start: f64,
    out: *mut *mut UpTrajectory,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        let config = tri!(config_arg(config));
        if out.is_null() {
            return null("out");
        }
        let signal = lib!(config.signal(seq.clone()));
        let traj = lib!(chi_exact(&signal, &config, t_start, t_end, chi_start));
        put(out, boxed_trajectory(traj));
        UpStatus::Ok
    })
}

/// Solution of `x' = -decay x + pi(t)`, `x(0) = phi0`, on `[0, t_end]`.
#[no_mangle]
pub unsafe extern "C" fn up_solve_ode(
    seq: *const UpSequence,
    config: *const UpFilterConfig,
    phi0: f64,
    t_end: f64,
    out: *mut *mut UpTrajectory,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        let config = tri!(config_arg(config));
        if out.is_null() {
            return null("out");
        }
        let signal = lib!(config.signal(seq.clone()));
        put(
            out,
            boxed_trajectory(lib!(solve_ode(&signal, &config, phi0, t_end))),
        );
        UpStatus::Ok
    })
}

/// Convolution integral over `[t - tail, t]` and the bound on the rest.
#[no_mangle]
pub unsafe extern "C" fn up_chi_quadrature(
    seq: *const UpSequence,
    config: *const UpFilterConfig,
    t: f64,
    tail: f64,
    value: *mut f64,
    truncation_bound: *mut f64,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        let config = tri!(config_arg(config));
        if value.is_null() || truncation_bound.is_null() {
            return null("value/truncation_bound");
        }
        let signal = lib!(config.signal(seq.clone()));
        let q = lib!(chi_quadrature(&signal, &config, t, tail));
        put(value, q.value);
        put(truncation_bound, q.truncation_bound);
        UpStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn up_separation_constants(
    epsilon0: f64,
    out: *mut UpSeparationConstants,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let c = lib!(separation_constants(epsilon0));
        put(
            out,
            UpSeparationConstants {
                kappa_i: c.kappa_i,
                kappa_ii: c.kappa_ii,
                lower_bound: c.lower_bound,
            },
        );
        UpStatus::Ok
    })
}

/// Number of samples, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn up_trajectory_len(traj: *const UpTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copies times and values; both buffers must hold `up_trajectory_len`
/// entries. Either pointer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn up_trajectory_copy(
    traj: *const UpTrajectory,
    times: *mut f64,
    values: *mut f64,
    capacity: usize,
) -> UpStatus {
    guarded(|| {
        let Some(traj) = traj.as_ref() else {
            return null("traj");
        };
        let n = traj.0.len();
        if capacity < n {
            set_error(format!("buffer holds {capacity}, need {n}"));
            return UpStatus::BufferTooSmall;
        }
        if !times.is_null() {
            ptr::copy_nonoverlapping(traj.0.times().as_ptr(), times, n);
        }
        if !values.is_null() {
            ptr::copy_nonoverlapping(traj.0.values().as_ptr(), values, n);
        }
        UpStatus::Ok
    })
}

/// `t,value` CSV with `digits` significant digits; NULL on error.
#[no_mangle]
pub unsafe extern "C" fn up_trajectory_to_csv(
    traj: *const UpTrajectory,
    digits: usize,
) -> *mut c_char {
    let Some(traj) = traj.as_ref() else {
        set_error("traj is null");
        return ptr::null_mut();
    };
    match formats::write_csv(&traj.0, digits) {
        Ok(s) => into_c_string(s),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn up_trajectory_parse_csv(
    text: *const c_char,
    out: *mut *mut UpTrajectory,
) -> UpStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let text = tri!(str_arg(text, "text"));
        put(out, boxed_trajectory(lib!(formats::parse_csv(text))));
        UpStatus::Ok
    })
}

/// Releases a trajectory handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn up_trajectory_free(traj: *mut UpTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Sequence witness search; writes the JSON report to `*json_out` (release
/// with `up_string_free`).
#[no_mangle]
pub unsafe extern "C" fn up_verify_sequence(
    seq: *const UpSequence,
    half_width: u32,
    tolerance: f64,
    epsilon0: f64,
    count: usize,
    json_out: *mut *mut c_char,
) -> UpStatus {
    guarded(|| {
        let seq = tri!(seq_arg(seq, "seq"));
        if json_out.is_null() {
            return null("json_out");
        }
        let scan = SequenceScan {
            half_width,
            tolerance,
            epsilon0,
        };
        let verdict = lib!(find_sequence_witnesses(seq, &scan, count));
        put(
            json_out,
            into_c_string(to_json(&SequenceReport::new(seq, &scan, count, &verdict))),
        );
        UpStatus::Ok
    })
}
