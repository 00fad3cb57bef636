//! Exponential filtering of a piecewise-constant signal.
//!
//! For a step signal `pi` and decay rate `lambda`, the filtered function is
//! `chi(t) = int_{-inf}^t exp(-lambda (t - s)) pi(s) ds`, the bounded solution
//! of `x' = -lambda x + pi(t)`. On a constant piece with value `v` the
//! solution is known in closed form,
//!
//! ```text
//! x(t) = v/lambda + (x(t_k) - v/lambda) exp(-lambda (t - t_k)),
//! ```
//!
//! so stepping from breakpoint to breakpoint carries no discretization error.
//! [`chi_quadrature`] evaluates the convolution integral directly and serves as
//! an independent check on the recurrence.

use crate::error::{Error, Result};
use crate::symbols::SequenceWindow;

/// Burn-in after which a solution started from an arbitrary value is accepted
/// as the graph of `chi`.
pub const DEFAULT_BURN_IN: f64 = 50.0;
pub const DEFAULT_STEP: f64 = 0.1;
pub const DEFAULT_PHI0: f64 = 0.5;
pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_SAMPLE_DT: f64 = 0.01;

/// Relative slack when comparing times against breakpoints and coverage ends.
const TIME_SLACK: f64 = 1e-9;

/// `pi(t)` equals the symbol at window position `j` on
/// `[origin + j*step, origin + (j+1)*step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSignal {
    sequence: SequenceWindow,
    step: f64,
    origin: f64,
}

impl StepSignal {
    pub fn new(sequence: SequenceWindow, step: f64, origin: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::domain(format!(
                "step {step} must be a positive number"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::domain("signal origin must be finite"));
        }
        Ok(Self {
            sequence,
            step,
            origin,
        })
    }

    /// Places sequence index `k` on `[k*step, (k+1)*step)`.
    pub fn aligned(sequence: SequenceWindow, step: f64) -> Result<Self> {
        let origin = sequence.first_index() as f64 * step;
        Self::new(sequence, step, origin)
    }

    pub fn sequence(&self) -> &SequenceWindow {
        &self.sequence
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn pieces(&self) -> usize {
        self.sequence.len()
    }

    /// Time at which piece `j` starts; `breakpoint(pieces())` is the end.
    pub fn breakpoint(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.step
    }

    pub fn start(&self) -> f64 {
        self.breakpoint(0)
    }

    pub fn end(&self) -> f64 {
        self.breakpoint(self.pieces())
    }

    /// Value of piece `j`.
    pub fn piece_value(&self, j: usize) -> f64 {
        self.sequence.alphabet().value(self.sequence.symbols()[j])
    }

    /// Largest `|pi|` over the symbols present.
    pub fn sup_abs(&self) -> f64 {
        self.sequence.max_abs_present()
    }

    /// Piece active at `t`, consistent with [`Self::breakpoint`]. Times at or a
    /// hair past the end map to the last piece.
    pub fn piece_at(&self, t: f64) -> Option<usize> {
        if !self.covers(t, t) {
            return None;
        }
        let last = self.pieces() - 1;
        let guess = ((t - self.origin) / self.step).floor();
        let mut j = if guess < 0.0 {
            0
        } else {
            (guess as usize).min(last)
        };
        while j > 0 && self.breakpoint(j) > t {
            j -= 1;
        }
        while j < last && self.breakpoint(j + 1) <= t {
            j += 1;
        }
        Some(j)
    }

    fn slack(&self) -> f64 {
        TIME_SLACK * self.step
    }

    /// True when `pi` is defined on `[a, b]` (up to the closing breakpoint).
    pub fn covers(&self, a: f64, b: f64) -> bool {
        a >= self.start() - self.slack() && b <= self.end() + self.slack()
    }

    fn require_cover(&self, a: f64, b: f64) -> Result<()> {
        if self.covers(a, b) {
            Ok(())
        } else {
            Err(Error::coverage(format!(
                "signal defined on [{}, {}] does not cover [{a}, {b}]",
                self.start(),
                self.end()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Kernel rate `lambda`, 1/seconds.
    pub decay: f64,
    /// Step length `mu` of the piecewise-constant input.
    pub step: f64,
    pub sample_dt: f64,
    pub tolerance: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            decay: 1.0,
            step: DEFAULT_STEP,
            sample_dt: DEFAULT_SAMPLE_DT,
            tolerance: 1e-10,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("decay", self.decay),
            ("step", self.step),
            ("sample_dt", self.sample_dt),
            ("tolerance", self.tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} = {v} must be a positive number"
                )));
            }
        }
        if self.sample_dt > self.step {
            return Err(Error::domain(format!(
                "sample_dt = {} exceeds the step {}",
                self.sample_dt, self.step
            )));
        }
        Ok(())
    }

    /// The step signal for `sequence` under this configuration, index `k`
    /// on `[k*step, (k+1)*step)`.
    pub fn signal(&self, sequence: SequenceWindow) -> Result<StepSignal> {
        StepSignal::aligned(sequence, self.step)
    }

    fn check_signal(&self, signal: &StepSignal) -> Result<()> {
        self.validate()?;
        if signal.step() != self.step {
            return Err(Error::domain(format!(
                "signal step {} differs from configured step {}",
                signal.step(),
                self.step
            )));
        }
        Ok(())
    }
}

/// Uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
}

/// Allowed deviation of a sample time from the uniform grid, relative to the
/// larger of the time magnitude and the spacing.
const UNIFORM_TOLERANCE: f64 = 1e-12;

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::domain("trajectory needs at least one sample"));
        }
        if times.len() != values.len() {
            return Err(Error::domain(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::domain("trajectory contains a non-finite number"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "trajectory times are not strictly increasing",
            ));
        }
        if times.len() > 2 {
            let n = times.len() - 1;
            let (t0, tn) = (times[0], times[n]);
            let h = (tn - t0) / n as f64;
            let scale = t0.abs().max(tn.abs()).max(h);
            if let Some((j, t)) = times
                .iter()
                .enumerate()
                .find(|(j, &t)| (t - (t0 + *j as f64 * h)).abs() > UNIFORM_TOLERANCE * scale)
            {
                return Err(Error::domain(format!(
                    "sample {j} at t = {t} is off the uniform grid"
                )));
            }
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid spacing, 0 for a single sample.
    pub fn spacing(&self) -> f64 {
        let n = self.len() - 1;
        if n == 0 {
            0.0
        } else {
            (self.times[n] - self.times[0]) / n as f64
        }
    }

    /// Samples with `t >= from`.
    pub fn since(&self, from: f64) -> Result<Self> {
        let k = self.times.partition_point(|&t| t < from);
        if k == self.len() {
            return Err(Error::coverage(format!(
                "no samples at or after t = {from}"
            )));
        }
        Ok(Self {
            times: self.times[k..].to_vec(),
            values: self.values[k..].to_vec(),
        })
    }

    /// Linear interpolation between neighbouring samples; `None` outside the
    /// sampled range.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let (t0, tn) = (self.times[0], *self.times.last().expect("nonempty"));
        let h = self.spacing();
        let slack = TIME_SLACK * h.max(f64::MIN_POSITIVE);
        if t < t0 - slack || t > tn + slack {
            return None;
        }
        if self.len() == 1 {
            return Some(self.values[0]);
        }
        let pos = ((t - t0) / h).clamp(0.0, (self.len() - 1) as f64);
        let j = (pos.floor() as usize).min(self.len() - 2);
        let frac = pos - j as f64;
        if frac <= TIME_SLACK {
            return Some(self.values[j]);
        }
        if frac >= 1.0 - TIME_SLACK {
            return Some(self.values[j + 1]);
        }
        Some(self.values[j] + frac * (self.values[j + 1] - self.values[j]))
    }
}

/// Closed-form step of `x' = -decay x + v` over `dt`.
#[inline]
fn advance(x: f64, v: f64, decay: f64, dt: f64) -> f64 {
    if dt <= 0.0 {
        return x;
    }
    let steady = v / decay;
    steady + (x - steady) * (-decay * dt).exp()
}

fn sample_count(t_start: f64, t_end: f64, dt: f64) -> usize {
    ((t_end - t_start) / dt + TIME_SLACK).floor() as usize
}

/// Walks the recurrence forward through breakpoints, stopping at requested
/// times.
struct Marcher<'a> {
    signal: &'a StepSignal,
    decay: f64,
    piece: usize,
    time: f64,
    value: f64,
}

impl<'a> Marcher<'a> {
    fn new(signal: &'a StepSignal, decay: f64, t: f64, value: f64) -> Self {
        let piece = signal.piece_at(t).expect("caller checked coverage");
        Self {
            signal,
            decay,
            piece,
            time: t,
            value,
        }
    }

    fn advance_to(&mut self, t: f64) -> f64 {
        let last = self.signal.pieces() - 1;
        while self.piece < last && self.signal.breakpoint(self.piece + 1) <= t {
            let b = self.signal.breakpoint(self.piece + 1);
            self.value = advance(
                self.value,
                self.signal.piece_value(self.piece),
                self.decay,
                b - self.time,
            );
            self.time = b;
            self.piece += 1;
        }
        self.value = advance(
            self.value,
            self.signal.piece_value(self.piece),
            self.decay,
            t - self.time,
        );
        self.time = t;
        self.value
    }
}

/// Samples `chi` on `[t_start, t_end]` at spacing `sample_dt`, starting from
/// `chi(t_start) = chi_start`.
///
/// The lower tail of the convolution integral is not computed here; it enters
/// only through `chi_start`.
pub fn chi_exact(
    signal: &StepSignal,
    config: &FilterConfig,
    t_start: f64,
    t_end: f64,
    chi_start: f64,
) -> Result<Trajectory> {
    config.check_signal(signal)?;
    if !(t_end > t_start && t_start.is_finite() && t_end.is_finite()) {
        return Err(Error::domain(format!(
            "t_end = {t_end} must exceed t_start = {t_start}"
        )));
    }
    if !chi_start.is_finite() {
        return Err(Error::domain("chi_start must be finite"));
    }
    signal.require_cover(t_start, t_end)?;

    let n = sample_count(t_start, t_end, config.sample_dt);
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut marcher = Marcher::new(signal, config.decay, t_start, chi_start);
    for i in 0..=n {
        let t = t_start + i as f64 * config.sample_dt;
        times.push(t);
        values.push(marcher.advance_to(t));
    }
    Ok(Trajectory { times, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Bound on the discarded part `int_{-inf}^{t - tail}` of the integral.
    pub truncation_bound: f64,
}

/// Direct evaluation of the convolution integral over `[t - tail, t]`, each
/// constant piece integrated in closed form.
pub fn chi_quadrature(
    signal: &StepSignal,
    config: &FilterConfig,
    t: f64,
    tail: f64,
) -> Result<Quadrature> {
    config.check_signal(signal)?;
    if !(tail.is_finite() && tail > 0.0) {
        return Err(Error::domain(format!(
            "tail length {tail} must be positive"
        )));
    }
    let a = t - tail;
    signal.require_cover(a, t)?;
    let lambda = config.decay;

    let first = signal.piece_at(a).expect("covered");
    let last = signal.piece_at(t).expect("covered");
    let mut value = 0.0;
    for j in first..=last {
        let lo = signal.breakpoint(j).max(a);
        let hi = if j + 1 == signal.pieces() {
            t
        } else {
            signal.breakpoint(j + 1).min(t)
        };
        if hi <= lo {
            continue;
        }
        let v = signal.piece_value(j);
        // int_lo^hi e^{-lambda (t - s)} ds = e^{-lambda (t - hi)} (1 - e^{-lambda (hi - lo)}) / lambda
        value += v / lambda * (-lambda * (t - hi)).exp() * -(-lambda * (hi - lo)).exp_m1();
    }
    let truncation_bound = signal.sup_abs() * (-lambda * tail).exp() / lambda;
    Ok(Quadrature {
        value,
        truncation_bound,
    })
}

/// Solution of `x' = -decay x + pi(t)` with `x(0) = phi0`, sampled on
/// `[0, t_end]`.
///
/// Computed as the zero-start response plus `phi0 exp(-decay t)`, so two runs
/// on the same signal differ by exactly `|delta phi0| exp(-decay t)` up to a
/// single rounding.
pub fn solve_ode(
    signal: &StepSignal,
    config: &FilterConfig,
    phi0: f64,
    t_end: f64,
) -> Result<Trajectory> {
    if !phi0.is_finite() {
        return Err(Error::domain("phi0 must be finite"));
    }
    let forced = chi_exact(signal, config, 0.0, t_end, 0.0)?;
    let values = forced
        .times
        .iter()
        .zip(&forced.values)
        .map(|(&t, &x)| x + phi0 * (-config.decay * t).exp())
        .collect();
    Ok(Trajectory {
        times: forced.times,
        values,
    })
}

/// `chi` evaluated exactly at arbitrary times, from the breakpoint values of
/// the recurrence.
#[derive(Debug, Clone)]
pub struct ChiFunction {
    signal: StepSignal,
    decay: f64,
    at_breakpoints: Vec<f64>,
}

impl ChiFunction {
    /// `chi_start` is the value at the signal's first breakpoint.
    pub fn new(signal: StepSignal, decay: f64, chi_start: f64) -> Result<Self> {
        if !(decay.is_finite() && decay > 0.0) {
            return Err(Error::domain(format!("decay {decay} must be positive")));
        }
        let mut at_breakpoints = Vec::with_capacity(signal.pieces());
        let mut x = chi_start;
        for j in 0..signal.pieces() {
            at_breakpoints.push(x);
            x = advance(
                x,
                signal.piece_value(j),
                decay,
                signal.breakpoint(j + 1) - signal.breakpoint(j),
            );
        }
        Ok(Self {
            signal,
            decay,
            at_breakpoints,
        })
    }

    pub fn signal(&self) -> &StepSignal {
        &self.signal
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.signal.start(), self.signal.end())
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        let j = self.signal.piece_at(t)?;
        Some(advance(
            self.at_breakpoints[j],
            self.signal.piece_value(j),
            self.decay,
            t - self.signal.breakpoint(j),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationConstants {
    /// Solves `exp(-2 kappa) = 2/3`.
    pub kappa_i: f64,
    /// Solves `1 - exp(-2 kappa) = epsilon0 / 12`.
    pub kappa_ii: f64,
    /// `epsilon0 / 24`.
    pub lower_bound: f64,
}

impl SeparationConstants {
    pub fn min_kappa(&self) -> f64 {
        self.kappa_i.min(self.kappa_ii)
    }
}

/// Interval lengths and the separation level guaranteed near a separation
/// time, in the factor-2 kernel convention of the estimates they come from.
pub fn separation_constants(epsilon0: f64) -> Result<SeparationConstants> {
    let max = 12.0 * -(-2.0f64).exp_m1();
    if !(epsilon0 > 0.0 && epsilon0 <= max) {
        return Err(Error::domain(format!(
            "epsilon0 = {epsilon0} must lie in (0, {max}] for kappa < 1"
        )));
    }
    Ok(SeparationConstants {
        kappa_i: 1.5f64.ln() / 2.0,
        kappa_ii: -(-epsilon0 / 12.0).ln_1p() / 2.0,
        lower_bound: epsilon0 / 24.0,
    })
}
