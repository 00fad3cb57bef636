//! Unpredictable sequences and functions.
//!
//! * [`symbols`]: alphabets, sequence windows, the weighted metric and the shift map.
//! * [`point`]: the recursive string family and the unpredictable point built from it.
//! * [`bernoulli`]: seeded Bernoulli-process realizations.
//! * [`filter`]: exponential filtering of step signals into a continuous function.
//! * [`verifier`]: finite witness searches for unpredictability.
//! * [`io`] and [`report`]: sequence files, time-series CSV and JSON reports.
//! * [`cli`]: the command-line front end.

pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod filter;
pub mod io;
pub mod point;
pub mod report;
pub mod symbols;
pub mod verifier;

pub use error::{Error, Result};
pub use symbols::{metric_distance, Alphabet, SequenceWindow, TruncatedDistance};
