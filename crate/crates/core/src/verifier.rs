//! Finite witness searches for unpredictability.
//!
//! A sequence is unpredictable when some shifts `zeta_n` bring it back close
//! to itself on any bounded index range while, for each of them, some
//! `eta_n` separates the shifted and original entries by at least
//! `epsilon0`. The function analogue asks for uniform closeness on a compact
//! interval and separation on a whole interval `[u - sigma, u + sigma]`.
//!
//! Finite data can never prove either property. Searches return a
//! three-valued [`Verdict`]:
//!
//! * `Consistent`: the requested witnesses were found.
//! * `Inconsistent`: a qualifying shift admits no separation anywhere and the
//!   data is exactly periodic under that shift (periodic and constant inputs).
//! * `Inconclusive`: the data ran out first.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{ChiFunction, Trajectory};
use crate::symbols::{metric_distance, SequenceWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceWitness {
    pub zeta: u64,
    pub eta: u64,
    /// Index interval `[-L, L]` on which the shifted sequence was compared.
    pub window: (i64, i64),
    pub max_window_error: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceVerdict {
    /// Strictly increasing in both `zeta` and `eta`.
    pub witnesses: Vec<SequenceWitness>,
    /// Smallest separation among the witnesses, 0 when there are none.
    pub epsilon0_achieved: f64,
    pub verdict: Verdict,
}

/// A shift that keeps `[-L, L]` within tolerance, and the smallest positive
/// `eta` that separates it, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualifyingShift {
    pub zeta: u64,
    pub max_window_error: f64,
    pub first_separation: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceScan {
    pub half_width: u32,
    pub tolerance: f64,
    pub epsilon0: f64,
}

impl SequenceScan {
    fn validate(&self, seq: &SequenceWindow) -> Result<()> {
        if self.half_width == 0 {
            return Err(Error::domain("window half-width must be at least 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::domain(format!(
                "tolerance {} must be finite and nonnegative",
                self.tolerance
            )));
        }
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            return Err(Error::domain(format!(
                "epsilon0 {} must be positive",
                self.epsilon0
            )));
        }
        let l = i64::from(self.half_width);
        if !seq.covers(-l, l + 1) {
            return Err(Error::coverage(format!(
                "window [{}, {}] must cover [{}, {}] for any shift to fit",
                seq.first_index(),
                seq.last_index(),
                -l,
                l + 1
            )));
        }
        Ok(())
    }

    /// `1..=last - L`: shifts keeping `[-L, L] + zeta` inside the window.
    fn shifts(&self, seq: &SequenceWindow) -> std::ops::RangeInclusive<u64> {
        1..=(seq.last_index() - i64::from(self.half_width)) as u64
    }
}

fn window_error(seq: &SequenceWindow, zeta: u64, half_width: u32) -> f64 {
    let l = i64::from(half_width);
    let z = zeta as i64;
    (-l..=l)
        .map(|k| (seq.value_at(k + z).expect("covered") - seq.value_at(k).expect("covered")).abs())
        .fold(0.0, f64::max)
}

fn separation(seq: &SequenceWindow, zeta: u64, eta: u64) -> f64 {
    (seq.value_at((zeta + eta) as i64).expect("covered")
        - seq.value_at(eta as i64).expect("covered"))
    .abs()
}

/// Smallest `eta > after` with `|nu_{zeta+eta} - nu_eta| >= epsilon0`.
fn next_separation(seq: &SequenceWindow, zeta: u64, after: u64, epsilon0: f64) -> Option<u64> {
    let max_eta = (seq.last_index() - zeta as i64).max(0) as u64;
    (after + 1..=max_eta).find(|&eta| separation(seq, zeta, eta) >= epsilon0)
}

/// Smallest `p` with `s[i + p] == s[i]` throughout; `s.len()` if none.
fn minimal_period(s: &[u16]) -> usize {
    // prefix function: longest proper border of each prefix
    let mut border = vec![0usize; s.len()];
    for i in 1..s.len() {
        let mut k = border[i - 1];
        while k > 0 && s[i] != s[k] {
            k = border[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        border[i] = k;
    }
    s.len() - border.last().copied().unwrap_or(0)
}

/// Every qualifying shift in the window, in increasing order, each with its
/// own earliest separation. Unlike the witness chain, each entry is
/// independent of the others, so the set only grows when `tolerance` is
/// loosened or `epsilon0` lowered.
pub fn scan_sequence_shifts(
    seq: &SequenceWindow,
    scan: &SequenceScan,
) -> Result<Vec<QualifyingShift>> {
    scan.validate(seq)?;
    Ok(scan
        .shifts(seq)
        .filter_map(|zeta| {
            let err = window_error(seq, zeta, scan.half_width);
            (err <= scan.tolerance).then(|| QualifyingShift {
                zeta,
                max_window_error: err,
                first_separation: next_separation(seq, zeta, 0, scan.epsilon0),
            })
        })
        .collect())
}

/// Brute-force search for up to `count` witness pairs `(zeta, eta)`.
///
/// Shifts are scanned in increasing order; each qualifying shift takes the
/// smallest `eta` beyond the previous witness's `eta` that separates it.
/// The verdict is inconsistent when the window is exactly periodic with a
/// period among the scanned shifts, whatever witnesses precede it.
pub fn find_sequence_witnesses(
    seq: &SequenceWindow,
    scan: &SequenceScan,
    count: usize,
) -> Result<SequenceVerdict> {
    scan.validate(seq)?;
    if count == 0 {
        return Err(Error::domain("witness count must be at least 1"));
    }
    let l = i64::from(scan.half_width);
    // An exact period in range is a qualifying shift that never separates.
    let shifts = scan.shifts(seq);
    let period = Some(minimal_period(seq.symbols()) as u64).filter(|p| shifts.contains(p));
    let mut witnesses: Vec<SequenceWitness> = Vec::new();

    for zeta in shifts {
        if witnesses.len() == count || Some(zeta) == period {
            break;
        }
        let err = window_error(seq, zeta, scan.half_width);
        if err > scan.tolerance {
            continue;
        }
        let prev_eta = witnesses.last().map_or(0, |w| w.eta);
        if let Some(eta) = next_separation(seq, zeta, prev_eta, scan.epsilon0) {
            witnesses.push(SequenceWitness {
                zeta,
                eta,
                window: (-l, l),
                max_window_error: err,
                separation: separation(seq, zeta, eta),
            });
        }
    }
    let verdict = if period.is_some() {
        Verdict::Inconsistent
    } else if witnesses.len() == count {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };

    let epsilon0_achieved = if witnesses.is_empty() {
        0.0
    } else {
        witnesses
            .iter()
            .map(|w| w.separation)
            .fold(f64::INFINITY, f64::min)
    };
    Ok(SequenceVerdict {
        witnesses,
        epsilon0_achieved,
        verdict,
    })
}

/// Recomputes a sequence witness from scratch.
pub fn recheck_sequence_witness(
    seq: &SequenceWindow,
    witness: &SequenceWitness,
    tolerance: f64,
    epsilon0: f64,
) -> bool {
    let (lo, hi) = witness.window;
    let z = witness.zeta as i64;
    let e = witness.eta as i64;
    if !seq.covers(lo, hi) || !seq.covers(lo + z, hi + z) || !seq.covers(e, e + z) {
        return false;
    }
    let err = (lo..=hi)
        .map(|k| (seq.value_at(k + z).unwrap() - seq.value_at(k).unwrap()).abs())
        .fold(0.0, f64::max);
    let sep = (seq.value_at(e + z).unwrap() - seq.value_at(e).unwrap()).abs();
    err == witness.max_window_error
        && err <= tolerance
        && sep == witness.separation
        && sep >= epsilon0
}

/// Truncated distance between `shift^n(seq)` and `seq` for `n = 1..=max_shift`.
pub fn orbit_return_distances(
    seq: &SequenceWindow,
    half_width: u32,
    max_shift: u64,
) -> Result<Vec<(u64, f64)>> {
    let k = i64::from(half_width);
    let reach = i64::try_from(max_shift)
        .ok()
        .and_then(|m| m.checked_add(k))
        .ok_or_else(|| Error::domain("max_shift overflows the index range"))?;
    if !seq.covers(-k, reach) {
        return Err(Error::coverage(format!(
            "window [{}, {}] does not cover [{}, {}]",
            seq.first_index(),
            seq.last_index(),
            -k,
            reach
        )));
    }
    (1..=max_shift)
        .map(|n| {
            let shifted = seq.shifted_by(n)?;
            Ok((n, metric_distance(&shifted, seq, half_width)?.value))
        })
        .collect()
}

/// A real function known on a uniform grid.
pub trait SampledFunction {
    /// `[start, end]` on which values are available.
    fn domain(&self) -> (f64, f64);
    /// Grid spacing of the available samples.
    fn spacing(&self) -> f64;
    fn value(&self, t: f64) -> Option<f64>;
}

impl SampledFunction for Trajectory {
    fn domain(&self) -> (f64, f64) {
        (self.times()[0], *self.times().last().expect("nonempty"))
    }

    fn spacing(&self) -> f64 {
        self.spacing()
    }

    fn value(&self, t: f64) -> Option<f64> {
        self.interpolate(t)
    }
}

/// Any evaluable function, read on a grid of the given spacing.
pub struct Gridded<F> {
    f: F,
    domain: (f64, f64),
    spacing: f64,
}

impl<F: Fn(f64) -> Option<f64>> Gridded<F> {
    pub fn new(f: F, domain: (f64, f64), spacing: f64) -> Self {
        Self { f, domain, spacing }
    }
}

impl<F: Fn(f64) -> Option<f64>> SampledFunction for Gridded<F> {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn spacing(&self) -> f64 {
        self.spacing
    }

    fn value(&self, t: f64) -> Option<f64> {
        if t < self.domain.0 || t > self.domain.1 {
            return None;
        }
        (self.f)(t)
    }
}

impl ChiFunction {
    /// This function read on a grid of `spacing`.
    pub fn gridded(&self, spacing: f64) -> Gridded<impl Fn(f64) -> Option<f64> + '_> {
        Gridded::new(move |t| self.eval(t), self.domain(), spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionScan {
    /// Compact interval `[alpha, beta]` for the convergence check.
    pub compact: (f64, f64),
    pub sigma: f64,
    pub tolerance: f64,
    pub epsilon0: f64,
    /// Earliest admissible center; `None` means the start of the domain.
    pub search_from: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionWitness {
    pub t_shift: f64,
    pub u_center: f64,
    pub sigma: f64,
    pub max_compact_error: f64,
    pub min_separation_on_interval: f64,
}

/// Per-shift diagnostics, whether or not a witness was found.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub t_shift: f64,
    pub max_compact_error: f64,
    pub qualifies: bool,
    /// Largest `min_{[u-sigma, u+sigma]} |h(t+shift) - h(t)|` over the centers
    /// scanned (the scan stops at the first witness); `None` if the shift did
    /// not qualify.
    pub best_separation: Option<f64>,
    pub best_center: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionVerdict {
    pub witnesses: Vec<FunctionWitness>,
    pub shifts: Vec<ShiftReport>,
    /// Largest interval separation seen over all qualifying shifts.
    /// Smallest witness separation, or the largest separation seen when
    /// there are no witnesses.
    pub achieved_separation: f64,
    pub verdict: Verdict,
}

const GRID_SLACK: f64 = 1e-9;

struct CenterScan {
    /// Largest window minimum and its center index.
    best: Option<(f64, usize)>,
    separated: bool,
    max_diff: f64,
    /// First admissible separated center and its window minimum.
    found: Option<(usize, f64)>,
}

/// Sliding minimum of `diff` over windows of `2 half + 1` grid points whose
/// indices lie in `[lo, hi]`; stops at the first admissible separated center.
fn scan_centers(
    diff: &dyn Fn(usize) -> f64,
    lo: usize,
    hi: usize,
    half: usize,
    epsilon0: f64,
    admissible: &dyn Fn(usize) -> bool,
) -> CenterScan {
    let mut out = CenterScan {
        best: None,
        separated: false,
        max_diff: 0.0,
        found: None,
    };
    let mut window: VecDeque<(usize, f64)> = VecDeque::new();
    for k in lo..=hi {
        let d = diff(k);
        out.max_diff = out.max_diff.max(d);
        while window.back().is_some_and(|&(_, w)| w >= d) {
            window.pop_back();
        }
        window.push_back((k, d));
        if k < lo + 2 * half {
            continue;
        }
        while window.front().is_some_and(|&(i, _)| i + 2 * half < k) {
            window.pop_front();
        }
        let center = k - half;
        let min_sep = window.front().expect("nonempty").1;
        if out.best.is_none_or(|(b, _)| min_sep > b) {
            out.best = Some((min_sep, center));
        }
        if min_sep >= epsilon0 {
            out.separated = true;
            if admissible(center) {
                out.found = Some((center, min_sep));
                break;
            }
        }
    }
    out
}

/// Searches the candidate shifts for witnesses of unpredictability of `h`.
///
/// A shift qualifies when `max |h(t+shift) - h(t)|` over the grid on
/// `[alpha, beta]` is at most the tolerance. For each qualifying shift the
/// grid is then scanned for the earliest center `u` (beyond the previous
/// witness's center) with the separation at least `epsilon0` throughout
/// `[u - sigma, u + sigma]`.
pub fn find_function_witnesses(
    h: &impl SampledFunction,
    shift_candidates: &[f64],
    scan: &FunctionScan,
) -> Result<FunctionVerdict> {
    let (alpha, beta) = scan.compact;
    if !(alpha.is_finite() && beta.is_finite() && alpha <= beta) {
        return Err(Error::domain(format!(
            "compact interval [{alpha}, {beta}] is invalid"
        )));
    }
    if !(scan.sigma > 0.0 && scan.sigma.is_finite()) {
        return Err(Error::domain(format!(
            "sigma {} must be positive",
            scan.sigma
        )));
    }
    if !(scan.tolerance >= 0.0 && scan.tolerance.is_finite()) {
        return Err(Error::domain(format!(
            "tolerance {} must be nonnegative",
            scan.tolerance
        )));
    }
    if !(scan.epsilon0 > 0.0 && scan.epsilon0.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon0 {} must be positive",
            scan.epsilon0
        )));
    }
    if shift_candidates.is_empty() {
        return Err(Error::domain("no candidate shifts given"));
    }
    if let Some(s) = shift_candidates
        .iter()
        .find(|s| !(**s > 0.0 && s.is_finite()))
    {
        return Err(Error::domain(format!("shift {s} must be positive")));
    }
    let delta = h.spacing();
    if !(delta > 0.0 && delta.is_finite()) || delta > scan.sigma / 8.0 * (1.0 + GRID_SLACK) {
        return Err(Error::Resolution(format!(
            "sample spacing {delta} exceeds sigma/8 = {}",
            scan.sigma / 8.0
        )));
    }
    let mut shifts = shift_candidates.to_vec();
    shifts.sort_by(f64::total_cmp);
    shifts.dedup();
    let max_shift = *shifts.last().expect("nonempty");
    let (d0, d1) = h.domain();
    let slack = GRID_SLACK * delta;
    if alpha < d0 - slack || beta + max_shift > d1 + slack {
        return Err(Error::coverage(format!(
            "samples on [{d0}, {d1}] do not cover [{alpha}, {}]",
            beta + max_shift
        )));
    }

    let eval = |t: f64| -> f64 {
        // clamp tiny grid overshoots back into the domain
        h.value(t.clamp(d0, d1)).expect("inside the sampled domain")
    };
    let compact_points = ((beta - alpha) / delta + GRID_SLACK).floor() as usize;
    let half = (scan.sigma / delta + GRID_SLACK).floor() as usize;

    let mut witnesses: Vec<FunctionWitness> = Vec::new();
    let mut reports = Vec::with_capacity(shifts.len());
    let mut verdict = Verdict::Inconclusive;

    for &shift in &shifts {
        let max_compact_error = (0..=compact_points)
            .map(|i| {
                let t = alpha + i as f64 * delta;
                (eval(t + shift) - eval(t)).abs()
            })
            .fold(0.0, f64::max);
        let qualifies = max_compact_error <= scan.tolerance;
        let mut report = ShiftReport {
            t_shift: shift,
            max_compact_error,
            qualifies,
            best_separation: None,
            best_center: None,
        };
        if !qualifies {
            reports.push(report);
            continue;
        }

        // grid over the whole domain where t + shift stays sampled
        let last = ((d1 - shift - d0) / delta + GRID_SLACK).floor() as usize;
        let prev_center = witnesses.last().map(|w| w.u_center);
        let diff_at = |k: usize| {
            let t = d0 + k as f64 * delta;
            (eval(t + shift) - eval(t)).abs()
        };
        let center_time = |c: usize| d0 + c as f64 * delta;
        let admissible = |c: usize| {
            let u = center_time(c);
            prev_center.is_none_or(|p| u > p) && scan.search_from.is_none_or(|s| u >= s)
        };
        let lower = prev_center
            .into_iter()
            .chain(scan.search_from)
            .fold(f64::NEG_INFINITY, f64::max);
        let first_center = if lower > d0 {
            ((lower - d0) / delta - GRID_SLACK).floor() as usize
        } else {
            0
        };
        let from = first_center.saturating_sub(half);
        let mut centers = scan_centers(&diff_at, from, last, half, scan.epsilon0, &admissible);
        if centers.found.is_none() && from > 0 {
            // the skipped prefix still decides whether the shift separates at all
            let prefix = scan_centers(
                &diff_at,
                0,
                (from + 2 * half).min(last),
                half,
                scan.epsilon0,
                &|_| false,
            );
            centers.separated |= prefix.separated;
            centers.max_diff = centers.max_diff.max(prefix.max_diff);
            if prefix
                .best
                .is_some_and(|(p, _)| centers.best.is_none_or(|(b, _)| p > b))
            {
                centers.best = prefix.best;
            }
        }
        let best = centers.best.map(|(sep, c)| (sep, center_time(c)));
        let found = centers.found.map(|(c, sep)| (center_time(c), sep));
        let (separated_anywhere, max_diff) = (centers.separated, centers.max_diff);
        report.best_separation = best.map(|b| b.0);
        report.best_center = best.map(|b| b.1);
        reports.push(report);

        match found {
            Some((u_center, min_sep)) => witnesses.push(FunctionWitness {
                t_shift: shift,
                u_center,
                sigma: scan.sigma,
                max_compact_error,
                min_separation_on_interval: min_sep,
            }),
            None if !separated_anywhere && max_diff <= scan.tolerance => {
                verdict = Verdict::Inconsistent;
                break;
            }
            None => {}
        }
    }

    if verdict != Verdict::Inconsistent && !witnesses.is_empty() {
        verdict = Verdict::Consistent;
    }
    let achieved_separation = if witnesses.is_empty() {
        reports
            .iter()
            .filter_map(|r| r.best_separation)
            .fold(0.0, f64::max)
    } else {
        witnesses
            .iter()
            .map(|w| w.min_separation_on_interval)
            .fold(f64::INFINITY, f64::min)
    };
    Ok(FunctionVerdict {
        witnesses,
        shifts: reports,
        achieved_separation,
        verdict,
    })
}
