//! The sequence space: finite alphabets of real symbols, windows onto
//! bi-infinite sequences, the weighted metric and the shift map.
//!
//! A bi-infinite sequence is never materialized. A [`SequenceWindow`] holds a
//! contiguous slice `[first_index, last_index]`, and every quantity that
//! depends on indices outside the slice is reported together with a bound on
//! what the missing part could contribute.

use crate::error::{Error, Result};

/// Default truncation half-width for distances on binary sequences.
/// With diameter 1 the tail bound is `2^-31`, about `4.7e-10`.
pub const DEFAULT_HALF_WIDTH: u32 = 32;

/// A finite, ordered set of distinct real symbol values.
#[derive(Debug, Clone)]
pub struct Alphabet {
    values: Vec<f64>,
}

impl Alphabet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "alphabet needs at least 2 values, got {}",
                values.len()
            )));
        }
        if values.len() > usize::from(u16::MAX) + 1 {
            return Err(Error::resource(format!(
                "alphabet has {} values, at most 65536 are supported",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("alphabet value {v} is not finite")));
        }
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                if a == b {
                    return Err(Error::domain(format!("alphabet value {a} is repeated")));
                }
            }
        }
        Ok(Self { values })
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self {
            values: vec![0.0, 1.0],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, symbol: u16) -> f64 {
        self.values[usize::from(symbol)]
    }

    /// Largest gap between two symbols.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    /// Smallest gap between two distinct symbols. For `{a, b}` this is `|a - b|`.
    pub fn epsilon0(&self) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |a_i|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(min a_i, max a_i)`.
    pub fn bounds(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Index of `value` in the alphabet, if present.
    pub fn symbol_of(&self, value: f64) -> Option<u16> {
        self.values
            .iter()
            .position(|&v| v == value)
            .map(|i| i as u16)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Eq for Alphabet {}

/// A contiguous finite slice of a bi-infinite symbol sequence.
///
/// Symbols are stored as indices into the alphabet; position `j` holds the
/// symbol at sequence index `first_index + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceWindow {
    alphabet: Alphabet,
    first_index: i64,
    symbols: Vec<u16>,
}

impl SequenceWindow {
    pub fn new(alphabet: Alphabet, first_index: i64, symbols: Vec<u16>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::domain(
                "sequence window must hold at least one symbol",
            ));
        }
        if let Some(&s) = symbols.iter().find(|&&s| usize::from(s) >= alphabet.len()) {
            return Err(Error::domain(format!(
                "symbol index {s} is outside an alphabet of {} values",
                alphabet.len()
            )));
        }
        if first_index.checked_add(symbols.len() as i64 - 1).is_none() {
            return Err(Error::domain("window index range overflows"));
        }
        Ok(Self {
            alphabet,
            first_index,
            symbols,
        })
    }

    /// Builds a window from symbol values, looking each up in the alphabet.
    pub fn from_values(alphabet: Alphabet, first_index: i64, values: &[f64]) -> Result<Self> {
        let symbols = values
            .iter()
            .map(|&v| {
                alphabet
                    .symbol_of(v)
                    .ok_or_else(|| Error::domain(format!("value {v} is not in the alphabet")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, first_index, symbols)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + (self.symbols.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    /// True when the window holds every index in `[lo, hi]`.
    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.first_index && hi <= self.last_index()
    }

    pub fn symbol_at(&self, index: i64) -> Option<u16> {
        let offset = index.checked_sub(self.first_index)?;
        usize::try_from(offset)
            .ok()
            .and_then(|o| self.symbols.get(o).copied())
    }

    pub fn value_at(&self, index: i64) -> Option<f64> {
        self.symbol_at(index).map(|s| self.alphabet.value(s))
    }

    /// Symbol values in window order.
    pub fn values(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.symbols.iter().map(|&s| self.alphabet.value(s))
    }

    /// Largest `|value|` among the symbols actually present.
    pub fn max_abs_present(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// One application of the shift map: the symbol at index `k` moves to
    /// index `k - 1`.
    pub fn shift(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::domain("shift needs a window of length at least 2"));
        }
        self.shifted_by(1)
    }

    /// `n` applications of the shift map.
    pub fn shifted_by(&self, n: u64) -> Result<Self> {
        let n = i64::try_from(n).map_err(|_| Error::domain("shift count overflows"))?;
        let first_index = self
            .first_index
            .checked_sub(n)
            .ok_or_else(|| Error::domain("shift moves the window below the index range"))?;
        Ok(Self {
            alphabet: self.alphabet.clone(),
            first_index,
            symbols: self.symbols.clone(),
        })
    }
}

/// A distance truncated to `[-K, K]` together with a bound on the omitted tail.
/// The true distance lies in `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedDistance {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_{|k| <= K} |i_k - j_k| / 2^|k|`, plus the largest contribution the
/// indices `|k| > K` could make (`diameter * 2^(1-K)`).
pub fn metric_distance(
    a: &SequenceWindow,
    b: &SequenceWindow,
    half_width: u32,
) -> Result<TruncatedDistance> {
    if a.alphabet != b.alphabet {
        return Err(Error::domain("windows use different alphabets"));
    }
    let k = i64::from(half_width);
    for (name, w) in [("first", a), ("second", b)] {
        if !w.covers(-k, k) {
            return Err(Error::coverage(format!(
                "{name} window [{}, {}] does not cover [{}, {}]",
                w.first_index(),
                w.last_index(),
                -k,
                k
            )));
        }
    }
    let mut value = 0.0;
    for idx in -k..=k {
        let x = a.value_at(idx).expect("covered");
        let y = b.value_at(idx).expect("covered");
        value += (x - y).abs() * weight(idx);
    }
    let tail_bound = a.alphabet.diameter() * 2f64.powi(1 - half_width as i32);
    Ok(TruncatedDistance { value, tail_bound })
}

/// `2^-|k|`, exact for all `|k| <= 1074`.
fn weight(k: i64) -> f64 {
    2f64.powi(-(k.unsigned_abs().min(1100) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(first: i64, bits: &[u16]) -> SequenceWindow {
        SequenceWindow::new(Alphabet::binary(), first, bits.to_vec()).unwrap()
    }

    #[test]
    fn alphabet_rejects_degenerate_sets() {
        assert!(matches!(Alphabet::new(vec![1.0]), Err(Error::Domain(_))));
        assert!(matches!(
            Alphabet::new(vec![1.0, 1.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Alphabet::new(vec![0.0, -0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Alphabet::new(vec![0.0, f64::NAN]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn alphabet_constants() {
        let a = Alphabet::new(vec![-1.0, 0.5, 3.0]).unwrap();
        assert_eq!(a.diameter(), 4.0);
        assert_eq!(a.epsilon0(), 1.5);
        assert_eq!(a.max_abs(), 3.0);
        assert_eq!(Alphabet::new(vec![2.0, -0.5]).unwrap().epsilon0(), 2.5);
    }

    #[test]
    fn window_rejects_foreign_symbols() {
        let err = SequenceWindow::new(Alphabet::binary(), 0, vec![0, 2]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(SequenceWindow::new(Alphabet::binary(), 0, vec![]).is_err());
    }

    #[test]
    fn identical_windows_have_zero_distance() {
        let w = binary(
            -12,
            &[
                1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1,
            ],
        );
        let d = metric_distance(&w, &w, 10).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.tail_bound, 2f64.powi(-9));
    }

    #[test]
    fn single_difference_at_origin() {
        let mut bits = vec![0u16; 21];
        let a = binary(-10, &bits);
        bits[10] = 1;
        let b = binary(-10, &bits);
        assert_eq!(metric_distance(&a, &b, 10).unwrap().value, 1.0);
    }

    #[test]
    fn geometric_half_line() {
        let k = 8;
        let ones: Vec<u16> = (-8..=8).map(|i| u16::from(i >= 0)).collect();
        let zeros = vec![0u16; 17];
        let d = metric_distance(&binary(-k, &ones), &binary(-k, &zeros), k as u32).unwrap();
        let direct: f64 = (0..=8).map(|j| 1.0 / f64::from(1u32 << j)).sum();
        assert_eq!(d.value, 1.99609375);
        assert_eq!(d.value, direct);
    }

    #[test]
    fn coverage_and_alphabet_mismatch() {
        let w = binary(-2, &[0, 1, 0, 1, 0]);
        assert!(matches!(
            metric_distance(&w, &w, 3),
            Err(Error::Coverage(_))
        ));
        let other =
            SequenceWindow::new(Alphabet::new(vec![0.0, 2.0]).unwrap(), -2, vec![0; 5]).unwrap();
        assert!(matches!(
            metric_distance(&w, &other, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn shift_moves_the_point_right() {
        let zeros = binary(-4, &[0; 9]);
        let s = zeros.shift().unwrap();
        assert_eq!(s.first_index(), -5);
        assert_eq!(s.value_at(0), Some(0.0));

        let alt: Vec<u16> = (-6i64..=6).map(|i| (i.rem_euclid(2)) as u16).collect();
        let w = binary(-6, &alt);
        assert_eq!(w.symbol_at(0), Some(0));
        let s = w.shift().unwrap();
        assert_eq!(s.symbol_at(0), Some(1));
        assert_eq!(s.symbol_at(-1), Some(0));
        assert_eq!(s.last_index(), w.last_index() - 1);

        assert!(binary(0, &[1]).shift().is_err());
    }

    #[test]
    fn iterated_shift_matches_direct_offset() {
        let bits: Vec<u16> = (0..40).map(|i| ((i * 7 + 3) % 5 % 2) as u16).collect();
        let w = binary(-20, &bits);
        let mut s = w.clone();
        for _ in 0..3 {
            s = s.shift().unwrap();
        }
        assert_eq!(s, w.shifted_by(3).unwrap());
        let direct: f64 = (-8i64..=8)
            .map(|k| {
                (w.value_at(k + 3).unwrap() - w.value_at(k).unwrap()).abs()
                    / 2f64.powi(k.abs() as i32)
            })
            .sum();
        assert_eq!(metric_distance(&s, &w, 8).unwrap().value, direct);
    }
}
