//! JSON verification reports. Keys are emitted in declaration order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::SequenceWindow;
use crate::verifier::{FunctionScan, FunctionVerdict, SequenceScan, SequenceVerdict, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceWitnessRecord {
    pub zeta: u64,
    pub eta: u64,
    pub window: [i64; 2],
    pub max_window_error: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCoverage {
    pub first_index: i64,
    pub last_index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceParameters {
    pub half_width: u32,
    pub tolerance: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub verdict: Verdict,
    pub epsilon0_requested: f64,
    pub epsilon0_achieved: f64,
    pub witnesses: Vec<SequenceWitnessRecord>,
    pub data_coverage: IndexCoverage,
    pub parameters: SequenceParameters,
}

impl SequenceReport {
    pub fn new(
        seq: &SequenceWindow,
        scan: &SequenceScan,
        count: usize,
        verdict: &SequenceVerdict,
    ) -> Self {
        Self {
            verdict: verdict.verdict,
            epsilon0_requested: scan.epsilon0,
            epsilon0_achieved: verdict.epsilon0_achieved,
            witnesses: verdict
                .witnesses
                .iter()
                .map(|w| SequenceWitnessRecord {
                    zeta: w.zeta,
                    eta: w.eta,
                    window: [w.window.0, w.window.1],
                    max_window_error: w.max_window_error,
                    separation: w.separation,
                })
                .collect(),
            data_coverage: IndexCoverage {
                first_index: seq.first_index(),
                last_index: seq.last_index(),
            },
            parameters: SequenceParameters {
                half_width: scan.half_width,
                tolerance: scan.tolerance,
                count,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionWitnessRecord {
    pub t_shift: f64,
    pub u_center: f64,
    pub sigma: f64,
    pub max_window_error: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub t_shift: f64,
    pub max_window_error: f64,
    pub qualifies: bool,
    pub best_separation: Option<f64>,
    pub best_center: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeCoverage {
    pub start: f64,
    pub end: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionParameters {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub tolerance: f64,
    pub search_from: Option<f64>,
    pub shifts: Vec<f64>,
}

/// Achieved separation next to the level the construction predicts, when a
/// prediction applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationSummary {
    pub achieved: f64,
    pub predicted_lower_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionReport {
    pub verdict: Verdict,
    pub epsilon0_requested: f64,
    pub witnesses: Vec<FunctionWitnessRecord>,
    pub separation: SeparationSummary,
    pub shifts: Vec<ShiftRecord>,
    pub data_coverage: TimeCoverage,
    pub parameters: FunctionParameters,
}

impl FunctionReport {
    pub fn new(
        coverage: TimeCoverage,
        shifts: &[f64],
        scan: &FunctionScan,
        verdict: &FunctionVerdict,
        predicted_lower_bound: Option<f64>,
    ) -> Self {
        Self {
            verdict: verdict.verdict,
            epsilon0_requested: scan.epsilon0,
            witnesses: verdict
                .witnesses
                .iter()
                .map(|w| FunctionWitnessRecord {
                    t_shift: w.t_shift,
                    u_center: w.u_center,
                    sigma: w.sigma,
                    max_window_error: w.max_compact_error,
                    separation: w.min_separation_on_interval,
                })
                .collect(),
            separation: SeparationSummary {
                achieved: verdict.achieved_separation,
                predicted_lower_bound,
            },
            shifts: verdict
                .shifts
                .iter()
                .map(|s| ShiftRecord {
                    t_shift: s.t_shift,
                    max_window_error: s.max_compact_error,
                    qualifies: s.qualifies,
                    best_separation: s.best_separation,
                    best_center: s.best_center,
                })
                .collect(),
            data_coverage: coverage,
            parameters: FunctionParameters {
                alpha: scan.compact.0,
                beta: scan.compact.1,
                sigma: scan.sigma,
                tolerance: scan.tolerance,
                search_from: scan.search_from,
                shifts: shifts.to_vec(),
            },
        }
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::point_window;
    use crate::verifier::find_sequence_witnesses;

    #[test]
    fn sequence_report_keys_and_round_trip() {
        let w = point_window(-512, 1024).unwrap();
        let scan = SequenceScan {
            half_width: 3,
            tolerance: 0.0,
            epsilon0: 1.0,
        };
        let v = find_sequence_witnesses(&w, &scan, 2).unwrap();
        let report = SequenceReport::new(&w, &scan, 2, &v);
        let text = to_json(&report);
        let keys: Vec<usize> = [
            "\"verdict\"",
            "\"epsilon0_requested\"",
            "\"witnesses\"",
            "\"data_coverage\"",
            "\"parameters\"",
        ]
        .iter()
        .map(|k| text.find(k).expect(k))
        .collect();
        assert!(keys.windows(2).all(|p| p[0] < p[1]));
        assert!(text.contains("\"verdict\": \"consistent\""));
        let back: SequenceReport = from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back), text);
    }
}
