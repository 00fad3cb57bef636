//! The recursive binary string family and the point assembled from it.
//!
//! Level `r` holds `2^r` strings of length `r`. The string at 1-based position
//! `2k-1` of level `r+1` is string `k` of level `r` with `0` appended, the one
//! at position `2k` has `1` appended. Unrolled, string `p` of level `r` is the
//! `r`-bit binary expansion of `p - 1`.
//!
//! The point reads, from index 0 rightwards, the odd-position strings of
//! levels 1, 2, 3, ... in increasing position order. From index -1 leftwards it
//! reads the even-position strings of levels 2, 3, ..., each block in normal
//! left-to-right orientation, so the last character of a block is the one
//! nearest the origin.

use crate::error::{Error, Result};
use crate::symbols::{Alphabet, SequenceWindow};

pub const MAX_LEVEL: u32 = 24;
pub const MAX_WINDOW: usize = 1 << 20;

/// All `2^level` strings of one level, in position order.
///
/// Strings are stored as their bit patterns; string `k` (0-based) is the
/// `level` low bits of `codes[k]`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringFamily {
    level: u32,
    codes: Vec<u32>,
}

impl StringFamily {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// String at 1-based `position`, as a vector of bits.
    pub fn bits(&self, position: usize) -> Option<Vec<u8>> {
        let code = *self.codes.get(position.checked_sub(1)?)?;
        Some(
            (0..self.level)
                .rev()
                .map(|b| ((code >> b) & 1) as u8)
                .collect(),
        )
    }

    /// String at 1-based `position`, as text of `0`/`1`.
    pub fn string(&self, position: usize) -> Option<String> {
        self.bits(position)
            .map(|bits| bits.iter().map(|&b| char::from(b'0' + b)).collect())
    }

    pub fn strings(&self) -> impl Iterator<Item = String> + '_ {
        (1..=self.len()).map(|p| self.string(p).expect("in range"))
    }
}

/// Builds level `level` by running the append-0 / append-1 recursion from
/// level 1.
pub fn family(level: u32) -> Result<StringFamily> {
    if level == 0 {
        return Err(Error::domain("family level must be at least 1"));
    }
    if level > MAX_LEVEL {
        return Err(Error::resource(format!(
            "family level {level} exceeds the maximum of {MAX_LEVEL}"
        )));
    }
    let mut codes = vec![0u32, 1];
    for _ in 1..level {
        codes = codes.iter().flat_map(|&c| [c << 1, (c << 1) | 1]).collect();
    }
    Ok(StringFamily { level, codes })
}

/// Symbol (0 or 1) of the assembled point at any index.
pub fn point_symbol(index: i64) -> u8 {
    if index >= 0 {
        // Level r contributes 2^(r-1) odd-position strings of length r.
        let mut offset = index as u128;
        let mut level = 1u32;
        loop {
            let span = u128::from(level) << (level - 1);
            if offset < span {
                break;
            }
            offset -= span;
            level += 1;
        }
        let block = (offset / u128::from(level)) as u64;
        let ch = (offset % u128::from(level)) as u32;
        // odd position 2*block + 1 encodes the value 2*block
        let code = block << 1;
        ((code >> (level - 1 - ch)) & 1) as u8
    } else {
        // distance from the origin, 0 for index -1
        let mut offset = (-(index + 1)) as u128;
        let mut level = 2u32;
        loop {
            let span = u128::from(level) << (level - 1);
            if offset < span {
                break;
            }
            offset -= span;
            level += 1;
        }
        let block = (offset / u128::from(level)) as u64;
        let from_right = (offset % u128::from(level)) as u32;
        // even position 2*block + 2 encodes the value 2*block + 1
        let code = (block << 1) | 1;
        ((code >> from_right) & 1) as u8
    }
}

/// The point restricted to `[first_index, first_index + length - 1]`, over the
/// binary alphabet `{0, 1}`.
pub fn point_window(first_index: i64, length: usize) -> Result<SequenceWindow> {
    if length == 0 {
        return Err(Error::domain("window length must be at least 1"));
    }
    if length > MAX_WINDOW {
        return Err(Error::resource(format!(
            "window length {length} exceeds the maximum of {MAX_WINDOW}"
        )));
    }
    first_index
        .checked_add(length as i64 - 1)
        .ok_or_else(|| Error::domain("window index range overflows"))?;
    let symbols = (0..length as i64)
        .map(|j| u16::from(point_symbol(first_index + j)))
        .collect();
    SequenceWindow::new(Alphabet::binary(), first_index, symbols)
}
