//! Command-line front end. Exit status: 0 on success, 1 on domain, coverage
//! and I/O failures, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bernoulli::{realize, BernoulliSpec};
use crate::error::Error;
use crate::filter::{
    separation_constants, solve_ode, ChiFunction, FilterConfig, StepSignal, DEFAULT_BURN_IN,
    DEFAULT_HORIZON, DEFAULT_PHI0, DEFAULT_SAMPLE_DT, DEFAULT_STEP,
};
use crate::io::{self as formats, detect_format, Format, DEFAULT_DIGITS};
use crate::point::point_window;
use crate::report::{to_json, FunctionReport, SequenceReport, TimeCoverage};
use crate::symbols::{metric_distance, Alphabet, SequenceWindow, DEFAULT_HALF_WIDTH};
use crate::verifier::{
    find_function_witnesses, find_sequence_witnesses, FunctionScan, Gridded, SampledFunction,
    SequenceScan,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "unpredictable",
    version,
    about = "Unpredictable sequences and functions: construct, filter and verify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a window of the assembled unpredictable point.
    Point(PointArgs),
    /// Write a seeded Bernoulli-process realization.
    Bernoulli(BernoulliArgs),
    /// Filter a sequence into the time series of chi.
    Filter(FilterArgs),
    /// Search a sequence for unpredictability witnesses.
    VerifySeq(VerifySeqArgs),
    /// Search a function (sequence-built chi or a CSV time series) for witnesses.
    VerifyFn(VerifyFnArgs),
    /// Truncated distance between two sequence windows.
    Metric(MetricArgs),
    /// Apply the shift map to a sequence window.
    Shift(ShiftArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub first: i64,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BernoulliArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub length: usize,
    /// Probability of the last symbol for a binary alphabet, or one
    /// probability per symbol.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub p: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1",
        allow_hyphen_values = true
    )]
    pub alphabet: Vec<f64>,
    /// Index given to the first draw.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub first: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = DEFAULT_PHI0, allow_hyphen_values = true)]
    pub phi0: f64,
    #[arg(long = "t-end", default_value_t = DEFAULT_HORIZON)]
    pub t_end: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_DT)]
    pub dt: f64,
    /// Start of the span accepted as the graph of chi.
    #[arg(long = "burn-in", default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: f64,
    /// Emit only samples with t >= burn-in.
    #[arg(long = "accepted-only")]
    pub accepted_only: bool,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    pub digits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifySeqArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "half-width", default_value_t = 4)]
    pub half_width: u32,
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Defaults to the smallest gap in the alphabet.
    #[arg(long)]
    pub epsilon0: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyFnArgs {
    /// Sequence file (chi is built from it) or `t,value` CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Step length when building chi from a sequence.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// chi at the first breakpoint of the sequence window.
    #[arg(long = "chi-start", default_value_t = 0.0, allow_hyphen_values = true)]
    pub chi_start: f64,
    /// Explicit time shifts to test.
    #[arg(long, value_delimiter = ',')]
    pub shifts: Vec<f64>,
    /// Take shifts from sequence witnesses (zeta * mu); sequence input only.
    #[arg(long = "shifts-from-seq")]
    pub shifts_from_seq: bool,
    #[arg(long = "half-width", default_value_t = 8)]
    pub half_width: u32,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Defaults to kappa_ii / 2 for the alphabet's epsilon0.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    /// Defaults to the alphabet's epsilon0 / 24.
    #[arg(long)]
    pub epsilon0: Option<f64>,
    /// Grid spacing for sequence-built chi; defaults to sigma / 8.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Time after the start of sequence-built chi before samples are used;
    /// drops the transient left by --chi-start.
    #[arg(long = "burn-in", default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: f64,
    /// Earliest admissible separation center.
    #[arg(long = "search-from", allow_hyphen_values = true)]
    pub search_from: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long = "half-width", default_value_t = DEFAULT_HALF_WIDTH)]
    pub half_width: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub times: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "i/o error on {}: {e}", p.display()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "--{name} must be a positive number, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be finite, got {v}")))
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn read_sequence(path: &Path) -> CliResult<SequenceWindow> {
    Ok(formats::parse_sequence(&read(path)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.to_owned(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Lib(_) | CliError::Io(..) => EXIT_FAILURE,
            }
        }
    }
}

fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Point(a) => point(a),
        Command::Bernoulli(a) => bernoulli(a),
        Command::Filter(a) => filter(a),
        Command::VerifySeq(a) => verify_seq(a),
        Command::VerifyFn(a) => verify_fn(a),
        Command::Metric(a) => metric(a),
        Command::Shift(a) => shift(a),
    }
}

fn point(a: &PointArgs) -> CliResult<()> {
    if a.length == 0 {
        return Err(usage("--length must be at least 1"));
    }
    let w = point_window(a.first, a.length)?;
    emit(a.out.as_deref(), &formats::write_sequence(&w))
}

fn bernoulli(a: &BernoulliArgs) -> CliResult<()> {
    if a.length == 0 {
        return Err(usage("--length must be at least 1"));
    }
    for &v in a.p.iter().chain(&a.alphabet) {
        finite("p/--alphabet", v)?;
    }
    let alphabet = Alphabet::new(a.alphabet.clone())?;
    let probabilities = match (a.p.as_slice(), alphabet.len()) {
        (&[p], 2) => vec![1.0 - p, p],
        (ps, m) if ps.len() == m => ps.to_vec(),
        (ps, m) => {
            return Err(usage(format!(
                "--p has {} values for an alphabet of {m}",
                ps.len()
            )))
        }
    };
    let spec = BernoulliSpec {
        alphabet,
        probabilities,
        seed: a.seed,
        length: a.length,
    };
    let w = realize(&spec)?;
    let w = SequenceWindow::new(w.alphabet().clone(), a.first, w.symbols().to_vec())?;
    emit(a.out.as_deref(), &formats::write_sequence(&w))
}

fn filter(a: &FilterArgs) -> CliResult<()> {
    positive("mu", a.mu)?;
    positive("lambda", a.lambda)?;
    positive("t-end", a.t_end)?;
    positive("dt", a.dt)?;
    finite("phi0", a.phi0)?;
    finite("burn-in", a.burn_in)?;
    if a.burn_in < 0.0 {
        return Err(usage("--burn-in must be nonnegative"));
    }
    if a.dt > a.mu {
        return Err(usage(format!("--dt {} exceeds --mu {}", a.dt, a.mu)));
    }
    if !(1..=DEFAULT_DIGITS).contains(&a.digits) {
        return Err(usage("--digits must be in 1..=17"));
    }
    let seq = read_sequence(&a.input)?;
    let config = FilterConfig {
        decay: a.lambda,
        step: a.mu,
        sample_dt: a.dt,
        ..FilterConfig::default()
    };
    let signal = config.signal(seq)?;
    let traj = solve_ode(&signal, &config, a.phi0, a.t_end)?;
    let traj = if a.accepted_only {
        traj.since(a.burn_in)?
    } else {
        traj
    };
    // |phi(t) - chi(t)| <= |phi0 - chi(0)| e^{-lambda t}, with |chi(0)| <= sup|pi| / lambda
    let gap = a.phi0.abs() + signal.sup_abs() / a.lambda;
    eprintln!(
        "accepted as chi on [{}, {}]; transient bound {:.3e}",
        a.burn_in,
        a.t_end,
        gap * (-a.lambda * a.burn_in).exp()
    );
    emit(a.out.as_deref(), &formats::write_csv(&traj, a.digits)?)
}

fn verify_seq(a: &VerifySeqArgs) -> CliResult<()> {
    if a.half_width == 0 {
        return Err(usage("--half-width must be at least 1"));
    }
    if a.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(usage("--tolerance must be finite and nonnegative"));
    }
    if let Some(e) = a.epsilon0 {
        positive("epsilon0", e)?;
    }
    let seq = read_sequence(&a.input)?;
    let scan = SequenceScan {
        half_width: a.half_width,
        tolerance: a.tolerance,
        epsilon0: a.epsilon0.unwrap_or_else(|| seq.alphabet().epsilon0()),
    };
    let verdict = find_sequence_witnesses(&seq, &scan, a.count)?;
    let report = SequenceReport::new(&seq, &scan, a.count, &verdict);
    emit(a.out.as_deref(), &to_json(&report))
}

fn verify_fn(a: &VerifyFnArgs) -> CliResult<()> {
    positive("mu", a.mu)?;
    positive("lambda", a.lambda)?;
    finite("chi-start", a.chi_start)?;
    finite("alpha", a.alpha)?;
    finite("beta", a.beta)?;
    if a.alpha > a.beta {
        return Err(usage("--alpha must not exceed --beta"));
    }
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(usage("--tolerance must be finite and nonnegative"));
    }
    for (name, v) in [
        ("sigma", a.sigma),
        ("epsilon0", a.epsilon0),
        ("spacing", a.spacing),
    ] {
        if let Some(v) = v {
            positive(name, v)?;
        }
    }
    for &s in &a.shifts {
        positive("shifts", s)?;
    }
    finite("burn-in", a.burn_in)?;
    if a.burn_in < 0.0 {
        return Err(usage("--burn-in must be nonnegative"));
    }
    if let Some(s) = a.search_from {
        finite("search-from", s)?;
    }
    if a.shifts.is_empty() == !a.shifts_from_seq {
        return Err(usage("give exactly one of --shifts or --shifts-from-seq"));
    }

    let text = read(&a.input)?;
    match detect_format(&text) {
        Some(Format::Sequence) => {
            let seq = formats::parse_sequence(&text)?;
            let eps_alphabet = seq.alphabet().epsilon0();
            let constants = separation_constants(eps_alphabet).ok();
            let sigma = match (a.sigma, constants) {
                (Some(s), _) => s,
                (None, Some(c)) => c.kappa_ii / 2.0,
                (None, None) => {
                    return Err(usage(
                        "--sigma is required: the alphabet gap is outside the range of the separation constants",
                    ))
                }
            };
            let shifts = if a.shifts_from_seq {
                let scan = SequenceScan {
                    half_width: a.half_width,
                    tolerance: 0.0,
                    epsilon0: eps_alphabet,
                };
                let v = find_sequence_witnesses(&seq, &scan, a.count)?;
                if v.witnesses.is_empty() {
                    return Err(CliError::Lib(Error::Coverage(
                        "no sequence witnesses to take shifts from".into(),
                    )));
                }
                v.witnesses.iter().map(|w| w.zeta as f64 * a.mu).collect()
            } else {
                a.shifts.clone()
            };
            let signal = StepSignal::aligned(seq, a.mu)?;
            let chi = ChiFunction::new(signal, a.lambda, a.chi_start)?;
            let spacing = a.spacing.unwrap_or(sigma / 8.0);
            let scan = FunctionScan {
                compact: (a.alpha, a.beta),
                sigma,
                tolerance: a.tolerance,
                epsilon0: a.epsilon0.unwrap_or(eps_alphabet / 24.0),
                search_from: a.search_from,
            };
            let (start, end) = chi.domain();
            let start = start + a.burn_in;
            if start >= end {
                return Err(usage(format!(
                    "--burn-in {} leaves no samples of chi on [{}, {end}]",
                    a.burn_in,
                    start - a.burn_in
                )));
            }
            let grid = Gridded::new(|t| chi.eval(t), (start, end), spacing);
            let verdict = find_function_witnesses(&grid, &shifts, &scan)?;
            let report = FunctionReport::new(
                TimeCoverage {
                    start,
                    end,
                    spacing,
                },
                &shifts,
                &scan,
                &verdict,
                constants.map(|c| c.lower_bound),
            );
            emit(a.out.as_deref(), &to_json(&report))
        }
        Some(Format::Csv) => {
            if a.shifts_from_seq {
                return Err(usage("--shifts-from-seq needs a sequence file"));
            }
            let (Some(sigma), Some(epsilon0)) = (a.sigma, a.epsilon0) else {
                return Err(usage("--sigma and --epsilon0 are required for CSV input"));
            };
            let traj = formats::parse_csv(&text)?;
            let scan = FunctionScan {
                compact: (a.alpha, a.beta),
                sigma,
                tolerance: a.tolerance,
                epsilon0,
                search_from: a.search_from,
            };
            let verdict = find_function_witnesses(&traj, &a.shifts, &scan)?;
            let (start, end) = SampledFunction::domain(&traj);
            let report = FunctionReport::new(
                TimeCoverage {
                    start,
                    end,
                    spacing: traj.spacing(),
                },
                &a.shifts,
                &scan,
                &verdict,
                None,
            );
            emit(a.out.as_deref(), &to_json(&report))
        }
        None => Err(CliError::Lib(Error::Parse {
            line: 1,
            message: "input is neither a sequence file nor a `t,value` CSV".into(),
        })),
    }
}

fn metric(a: &MetricArgs) -> CliResult<()> {
    let x = read_sequence(&a.a)?;
    let y = read_sequence(&a.b)?;
    let d = metric_distance(&x, &y, a.half_width)?;
    let json = serde_json::json!({
        "value": d.value,
        "tail_bound": d.tail_bound,
        "half_width": a.half_width,
    });
    let mut text = serde_json::to_string_pretty(&json).expect("serializable");
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn shift(a: &ShiftArgs) -> CliResult<()> {
    if a.times == 0 {
        return Err(usage("--times must be at least 1"));
    }
    let seq = read_sequence(&a.input)?;
    let mut shifted = seq.shift()?;
    if a.times > 1 {
        shifted = seq.shifted_by(a.times)?;
    }
    emit(a.out.as_deref(), &formats::write_sequence(&shifted))
}
