//! Text formats.
//!
//! Sequence file (UTF-8):
//!
//! ```text
//! alphabet: 0,1
//! first_index: -8
//! 0,1,1,0,...
//! ```
//!
//! Line 3 lists symbols as indices into the alphabet. Alphabet values are
//! written in the shortest form that parses back to the same `f64`, so
//! writing a parsed file reproduces it byte for byte.
//!
//! Time-series CSV: header `t,value`, one sample per line, each number in
//! scientific notation with a fixed count of significant digits (17 by
//! default, which round-trips every `f64`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::filter::Trajectory;
use crate::symbols::{Alphabet, SequenceWindow};

pub const DEFAULT_DIGITS: usize = 17;
pub const CSV_HEADER: &str = "t,value";

pub fn write_sequence(seq: &SequenceWindow) -> String {
    let mut out = String::with_capacity(seq.len() * 2 + 64);
    out.push_str("alphabet: ");
    for (i, v) in seq.alphabet().values().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("write to String");
    }
    write!(out, "\nfirst_index: {}\n", seq.first_index()).expect("write to String");
    for (i, s) in seq.symbols().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{s}").expect("write to String");
    }
    out.push('\n');
    out
}

fn field<'a>(line: Option<&'a str>, number: usize, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::parse(number, format!("missing `{key}:` line")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(':'))
        .map(str::trim)
        .ok_or_else(|| Error::parse(number, format!("expected `{key}: ...`")))
}

pub fn parse_sequence(text: &str) -> Result<SequenceWindow> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));

    let values = field(lines.next(), 1, "alphabet")?
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(1, format!("bad alphabet value `{}`", tok.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = Alphabet::new(values)?;

    let first = field(lines.next(), 2, "first_index")?;
    let first_index = first
        .parse::<i64>()
        .map_err(|_| Error::parse(2, format!("bad first_index `{first}`")))?;

    let body = lines
        .next()
        .ok_or_else(|| Error::parse(3, "missing symbol line"))?;
    let symbols = body
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u16>()
                .map_err(|_| Error::parse(3, format!("bad symbol index `{}`", tok.trim())))
        })
        .collect::<Result<Vec<_>>>()?;

    if let Some((n, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::parse(
            n + 4,
            "unexpected content after the symbol line",
        ));
    }
    SequenceWindow::new(alphabet, first_index, symbols)
}

/// `x` with `digits` significant digits in scientific notation.
fn format_sig(out: &mut String, x: f64, digits: usize) {
    write!(out, "{:.*e}", digits - 1, x).expect("write to String");
}

pub fn write_csv(traj: &Trajectory, digits: usize) -> Result<String> {
    if !(1..=DEFAULT_DIGITS).contains(&digits) {
        return Err(Error::domain(format!("digits {digits} must be in 1..=17")));
    }
    let mut out = String::with_capacity(traj.len() * (2 * digits + 12) + 8);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (&t, &v) in traj.times().iter().zip(traj.values()) {
        format_sig(&mut out, t, digits);
        out.push(',');
        format_sig(&mut out, v, digits);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::parse(1, format!("expected header `{CSV_HEADER}`"))),
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(n, "expected two comma-separated fields"))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(n, format!("bad number `{}`", s.trim())))
        };
        times.push(parse(t)?);
        values.push(parse(v)?);
    }
    Trajectory::new(times, values)
}

/// Which of the two text formats `text` is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Sequence,
    Csv,
}

pub fn detect_format(text: &str) -> Option<Format> {
    let first = text.lines().next()?.trim();
    if first.starts_with("alphabet:") {
        Some(Format::Sequence)
    } else if first == CSV_HEADER {
        Some(Format::Csv)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_layout() {
        let w = SequenceWindow::new(Alphabet::binary(), -2, vec![0, 1, 1]).unwrap();
        let text = write_sequence(&w);
        assert_eq!(text, "alphabet: 0,1\nfirst_index: -2\n0,1,1\n");
        assert_eq!(parse_sequence(&text).unwrap(), w);
    }

    #[test]
    fn awkward_alphabet_values_round_trip() {
        let a = Alphabet::new(vec![0.1, -1e-300, 2.5e17, -0.0, 1.0 / 3.0]).unwrap();
        let w = SequenceWindow::new(a, i64::MIN, vec![4, 3, 2, 1, 0]).unwrap();
        let text = write_sequence(&w);
        let back = parse_sequence(&text).unwrap();
        assert_eq!(back, w);
        assert_eq!(write_sequence(&back), text);
    }

    #[test]
    fn malformed_sequences() {
        let cases = [
            ("", 1),
            ("alphabet 0,1\nfirst_index: 0\n0\n", 1),
            ("alphabet: 0,x\nfirst_index: 0\n0\n", 1),
            ("alphabet: 0,1\nfirst: 0\n0\n", 2),
            ("alphabet: 0,1\nfirst_index: 0\n", 3),
            ("alphabet: 0,1\nfirst_index: 0\n0,a\n", 3),
            ("alphabet: 0,1\nfirst_index: 0\n0\n1\n", 4),
        ];
        for (text, line) in cases {
            match parse_sequence(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(
            parse_sequence("alphabet: 0,1\nfirst_index: 0\n0,2\n"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let tr = Trajectory::new(vec![0.0, 0.01, 0.02], vec![0.5, 1.0 / 3.0, -2e-20]).unwrap();
        let text = write_csv(&tr, 17).unwrap();
        assert!(text.starts_with("t,value\n0.0000000000000000e0,5.0000000000000000e-1\n"));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, tr);
        assert_eq!(write_csv(&back, 17).unwrap(), text);
        assert!(write_csv(&tr, 0).is_err());
        assert!(write_csv(&tr, 3).unwrap().contains("3.33e-1"));
    }

    #[test]
    fn format_detection() {
        assert_eq!(detect_format("alphabet: 0,1\n"), Some(Format::Sequence));
        assert_eq!(detect_format("t,value\n"), Some(Format::Csv));
        assert_eq!(detect_format("{}"), None);
        assert!(parse_csv("time,value\n").is_err());
    }
}
