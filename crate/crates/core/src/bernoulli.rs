//! Seeded realizations of a finite-outcome Bernoulli process.
//!
//! Generator identity (fixed; changing it changes every stored realization):
//! ChaCha20 keystream, key = `seed` as little-endian bytes in the first 8 key
//! bytes and zeros elsewhere, stream 0. Each trial consumes one `u64`, maps it
//! to `u = (x >> 11) * 2^-53` in `[0, 1)` and picks the first symbol whose
//! cumulative probability exceeds `u`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::symbols::{Alphabet, SequenceWindow};

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSpec {
    pub alphabet: Alphabet,
    pub probabilities: Vec<f64>,
    pub seed: u64,
    pub length: usize,
}

impl BernoulliSpec {
    /// Fair coin on `{0, 1}`.
    pub fn fair_binary(seed: u64, length: usize) -> Self {
        Self {
            alphabet: Alphabet::binary(),
            probabilities: vec![0.5, 0.5],
            seed,
            length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::domain("realization length must be at least 1"));
        }
        if self.probabilities.len() != self.alphabet.len() {
            return Err(Error::domain(format!(
                "{} probabilities given for an alphabet of {} values",
                self.probabilities.len(),
                self.alphabet.len()
            )));
        }
        if let Some(p) = self
            .probabilities
            .iter()
            .find(|p| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::domain(format!("probability {p} is outside [0, 1]")));
        }
        let sum: f64 = self.probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(())
    }
}

fn rng_for(seed: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}

fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `spec.length` independent symbols, first index 0.
pub fn realize(spec: &BernoulliSpec) -> Result<SequenceWindow> {
    spec.validate()?;
    let mut cumulative = Vec::with_capacity(spec.probabilities.len());
    let mut acc = 0.0;
    for &p in &spec.probabilities {
        acc += p;
        cumulative.push(acc);
    }
    // Rounding can leave the total a hair below 1; such draws go to the last
    // symbol that can occur at all.
    let fallback = spec
        .probabilities
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("probabilities sum to 1") as u16;

    let mut rng = rng_for(spec.seed);
    let symbols = (0..spec.length)
        .map(|_| {
            let u = unit_interval(rng.next_u64());
            cumulative
                .iter()
                .position(|&c| u < c)
                .map_or(fallback, |i| i as u16)
        })
        .collect();
    SequenceWindow::new(spec.alphabet.clone(), 0, symbols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distribution() {
        let spec = BernoulliSpec {
            probabilities: vec![1.0, 0.0],
            ..BernoulliSpec::fair_binary(99, 10)
        };
        assert_eq!(realize(&spec).unwrap().symbols(), &[0; 10]);
        let spec = BernoulliSpec {
            probabilities: vec![0.0, 1.0],
            ..spec
        };
        assert_eq!(realize(&spec).unwrap().symbols(), &[1; 10]);
    }

    #[test]
    fn same_spec_same_output() {
        let spec = BernoulliSpec::fair_binary(7, 500);
        assert_eq!(realize(&spec).unwrap(), realize(&spec).unwrap());
        let other = BernoulliSpec::fair_binary(8, 500);
        assert_ne!(realize(&spec).unwrap(), realize(&other).unwrap());
    }

    #[test]
    fn generator_identity_is_pinned() {
        // First 16 fair-coin draws for seed 42; fixed forever.
        let w = realize(&BernoulliSpec::fair_binary(42, 16)).unwrap();
        let mut rng = rng_for(42);
        let direct: Vec<u16> = (0..16)
            .map(|_| u16::from(unit_interval(rng.next_u64()) >= 0.5))
            .collect();
        assert_eq!(w.symbols(), direct.as_slice());
        assert_eq!(w.symbols(), &PINNED_SEED_42);
    }

    // Reproduced independently from the raw ChaCha20 keystream (zero nonce,
    // zero counter) with Python's `cryptography` package.
    const PINNED_SEED_42: [u16; 16] = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1];

    #[test]
    fn frequency_of_fair_coin() {
        let w = realize(&BernoulliSpec::fair_binary(2024, 100_000)).unwrap();
        let ones = w.symbols().iter().filter(|&&s| s == 1).count();
        let freq = ones as f64 / 1e5;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn three_symbol_frequencies() {
        let spec = BernoulliSpec {
            alphabet: Alphabet::new(vec![-1.0, 0.0, 2.0]).unwrap(),
            probabilities: vec![0.2, 0.3, 0.5],
            seed: 5,
            length: 100_000,
        };
        let w = realize(&spec).unwrap();
        for (sym, p) in [0.2, 0.3, 0.5].iter().enumerate() {
            let n = w
                .symbols()
                .iter()
                .filter(|&&s| usize::from(s) == sym)
                .count();
            assert!((n as f64 / 1e5 - p).abs() < 0.01);
        }
    }

    #[test]
    fn not_periodic_with_short_period() {
        let w = realize(&BernoulliSpec::fair_binary(11, 10_000)).unwrap();
        let s = w.symbols();
        for p in 1..=64 {
            assert!(s.iter().zip(&s[p..]).any(|(a, b)| a != b), "period {p}");
        }
    }

    #[test]
    fn invalid_specs() {
        let base = BernoulliSpec::fair_binary(1, 10);
        assert!(realize(&BernoulliSpec {
            length: 0,
            ..base.clone()
        })
        .is_err());
        assert!(realize(&BernoulliSpec {
            probabilities: vec![0.6, 0.6],
            ..base.clone()
        })
        .is_err());
        assert!(realize(&BernoulliSpec {
            probabilities: vec![1.5, -0.5],
            ..base.clone()
        })
        .is_err());
        assert!(realize(&BernoulliSpec {
            probabilities: vec![1.0],
            ..base
        })
        .is_err());
    }
}
